#pragma once

// Two-sided exponential-series solutions for homoclinic orbits anchored at
// regular saddles of the traveling-wave ODEs.
//
// Right branch: phi+(z) = x0 + sum_k a_k e^{k alpha z} with alpha < 0 (z > 0);
// left branch uses the positive exponent. Coefficients follow the order-k
// recurrence F(k alpha) a_k = sum of quadratic (and for gch3 cubic) bracket
// terms; the brackets are validated against numeric extraction from the ODE
// residual (see oracle.hpp).
//
// For gch3 a `negated` bracket convention is also provided: it flips the sign
// of the quadratic and cubic brackets and exists to cross-check coefficient
// tables computed under the flipped sign. The standard convention is the one
// whose truncated series actually satisfies the ODE to truncation order.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gchtw/equations.hpp"
#include "gchtw/errors.hpp"
#include "gchtw/phase_plane.hpp"
#include "gchtw/poly.hpp"

namespace gchtw {

enum class Side { right, left };

inline const char* to_string(Side s) { return s == Side::right ? "right" : "left"; }

enum class Gch3Recurrence { standard, negated };

inline const char* to_string(Gch3Recurrence r) {
    return r == Gch3Recurrence::standard ? "standard" : "negated";
}

// ---------------------------------------------------------------------------
// Saddle eigenvalues of the traveling ODE linearized at x0: +-sqrt(radicand).

inline std::pair<double, double> saddle_eigenvalues(EquationId eq, const WaveParams& p,
                                                    double x0) {
    const double den = series_denominator(eq, p, x0);
    const double num = series_numerator(eq, p, x0);
    const double scale = std::max(1.0, std::abs(p.c) + std::abs(x0));
    if (std::abs(den) <= 1e-10 * scale)
        throw singular_degeneracy_error(
            "equilibrium lies on the singular set; series exponent undefined");
    const double radicand = num / den;
    if (radicand <= 0.0)
        throw not_a_saddle_error("equilibrium is not a saddle of the traveling ODE");
    const double a = std::sqrt(radicand);
    return {a, -a};
}

// ---------------------------------------------------------------------------
// Recurrence brackets, in the arrangement
//   F(k alpha) a_k = sum_{i=1}^{k-1} Bq(i, k-i) a_i a_{k-i}
//                  + sum_{l+m+n=k} Bc(l, m, n) a_l a_m a_n   (gch3 only)

inline double quad_bracket(EquationId eq, double x0, double alpha, int i, int j,
                           Gch3Recurrence rec = Gch3Recurrence::standard) {
    const double a2 = alpha * alpha;
    switch (eq) {
        case EquationId::gch1:
            return 4.0 - 2.0 * i * i * a2 - 2.0 * i * j * a2;
        case EquationId::gch2:
            return 8.0 - 4.0 * i * i * a2 - 2.0 * i * j * a2 +
                   2.0 * i * j * j * a2 * alpha;
        case EquationId::gch3: {
            const double b = x0 * (2.0 * i * i * a2 + i * j * a2 - 3.0);
            return rec == Gch3Recurrence::standard ? b : -b;
        }
    }
    return 0.0;
}

inline double cubic_bracket_gch3(double alpha, int l, int m, int n,
                                 Gch3Recurrence rec = Gch3Recurrence::standard) {
    const double a2 = alpha * alpha;
    const double b = n * n * a2 + m * n * a2 -
                     static_cast<double>(l) * m * n * n * a2 * a2 - 1.0;
    return rec == Gch3Recurrence::standard ? b : -b;
}

// ---------------------------------------------------------------------------
// One-sided branch.

struct SeriesBranch {
    double x0 = 0.0;
    double exponent = 0.0;              // alpha < 0 (right) or beta > 0 (left)
    int M = 0;                          // truncation order
    std::vector<double> coefficients;   // a_1 .. a_M
    Side side = Side::right;
    bool overflow = false;              // some |a_k| exceeded the growth guard
    EquationId equation = EquationId::gch1;
    Gch3Recurrence recurrence = Gch3Recurrence::standard;

    double coeff(int k) const { return coefficients[static_cast<std::size_t>(k) - 1]; }

    // phi(z), phi'(z), phi''(z) of the truncated series
    double eval(double z) const { return x0 + horner(z, 0); }
    double eval_d1(double z) const { return horner(z, 1); }
    double eval_d2(double z) const { return horner(z, 2); }

    // sum_k |a_k| e^{k * exponent * z}; bound used for the decay-to-x0 check
    double tail_bound(double z) const {
        const double t = std::exp(exponent * z);
        double s = 0.0, tp = 1.0;
        for (double a : coefficients) {
            tp *= std::abs(t);
            s += std::abs(a) * tp;
        }
        return s;
    }

  private:
    double horner(double z, int deriv) const {
        const double t = std::exp(exponent * z);
        double s = 0.0;
        for (std::size_t k = coefficients.size(); k-- > 0;) {
            const double kk = static_cast<double>(k + 1);
            double c = coefficients[k];
            for (int d = 0; d < deriv; ++d) c *= kk * exponent;
            s = s * t + c;
        }
        return s * t;
    }
};

inline constexpr int default_truncation = 25;
inline constexpr int max_truncation = 200;
inline constexpr double coefficient_growth_guard = 1e12;

inline SeriesBranch build_branch(EquationId eq, const WaveParams& p, double x0, double leading,
                                 int M, Side side,
                                 Gch3Recurrence rec = Gch3Recurrence::standard) {
    if (M < 2 || M > max_truncation)
        throw std::invalid_argument("build_branch: truncation M must be in [2, 200]");
    const auto [alpha_plus, alpha_minus] = saddle_eigenvalues(eq, p, x0);
    const double alpha = (side == Side::right) ? alpha_minus : alpha_plus;

    SeriesBranch b;
    b.x0 = x0;
    b.exponent = alpha;
    b.M = M;
    b.side = side;
    b.equation = eq;
    b.recurrence = rec;
    b.coefficients.assign(static_cast<std::size_t>(M), 0.0);
    b.coefficients[0] = leading;

    const double fscale = std::abs(series_denominator(eq, p, x0)) * alpha * alpha;
    const double guard = coefficient_growth_guard * std::max(1.0, std::abs(leading));
    for (int k = 2; k <= M; ++k) {
        const double F = series_F(eq, p, x0, k * alpha);
        if (std::abs(F) <= 1e-10 * std::max(1.0, fscale * k * k))
            throw resonance_error("resonant series order k=" + std::to_string(k));
        double rhs = 0.0;
        for (int i = 1; i <= k - 1; ++i) {
            const int j = k - i;
            rhs += quad_bracket(eq, x0, alpha, i, j, rec) * b.coeff(i) * b.coeff(j);
        }
        if (eq == EquationId::gch3) {
            for (int l = 1; l <= k - 2; ++l)
                for (int m = 1; m <= k - 1 - l; ++m) {
                    const int n = k - l - m;
                    rhs += cubic_bracket_gch3(alpha, l, m, n, rec) * b.coeff(l) *
                           b.coeff(m) * b.coeff(n);
                }
        }
        const double ak = rhs / F;
        if (!std::isfinite(ak)) {
            b.overflow = true;
            break;
        }
        b.coefficients[static_cast<std::size_t>(k) - 1] = ak;
        if (std::abs(ak) > guard) b.overflow = true;
    }
    return b;
}

// Recompute the branch from its stored leading coefficient and compare; the
// maximum relative deviation should be at rounding level for intact data.
inline double rebuild_deviation(const SeriesBranch& b, const WaveParams& p) {
    const SeriesBranch fresh =
        build_branch(b.equation, p, b.x0, b.coefficients.at(0), b.M, b.side, b.recurrence);
    double worst = 0.0;
    for (int k = 2; k <= b.M; ++k) {
        const double ref = fresh.coeff(k);
        const double dev = std::abs(b.coeff(k) - ref) / std::max(1.0, std::abs(ref));
        worst = std::max(worst, dev);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Continuity solve: real leading coefficients with phi(0) = target.

inline std::vector<double> solve_continuity(EquationId eq, const WaveParams& p, double x0,
                                            int M, double target = 0.0,
                                            Side side = Side::right,
                                            Gch3Recurrence rec = Gch3Recurrence::standard) {
    // homogeneity a_k = phi_k a_1^k lets one branch build provide the polynomial
    SeriesBranch unit = build_branch(eq, p, x0, 1.0, M, side, rec);
    std::vector<double> poly(static_cast<std::size_t>(M) + 1, 0.0);
    poly[0] = x0 - target;
    int degree = 0;
    for (int k = 1; k <= M; ++k) {
        const double c = unit.coeff(k);
        if (!std::isfinite(c)) break;
        poly[static_cast<std::size_t>(k)] = c;
        if (c != 0.0) degree = k;
    }
    poly.resize(static_cast<std::size_t>(degree) + 1);
    if (degree == 0) return {};
    return poly_real_roots(poly);
}

// ---------------------------------------------------------------------------
// Convergence diagnostics.

struct ConvergenceReport {
    enum class Verdict { converging, diverging, inconclusive };
    Verdict verdict = Verdict::inconclusive;
    double tail_ratio = 0.0;       // geometric ratio estimate over the last quartile
    int max_coefficient_index = 1; // index of the largest |a_k|
};

inline const char* to_string(ConvergenceReport::Verdict v) {
    switch (v) {
        case ConvergenceReport::Verdict::converging: return "converging";
        case ConvergenceReport::Verdict::diverging: return "diverging";
        case ConvergenceReport::Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

inline ConvergenceReport convergence_report(const SeriesBranch& b) {
    if (b.M < 8)
        throw std::invalid_argument("convergence_report: M >= 8 required for a tail estimate");
    ConvergenceReport r;
    double amax = 0.0;
    for (int k = 1; k <= b.M; ++k)
        if (std::abs(b.coeff(k)) > amax) {
            amax = std::abs(b.coeff(k));
            r.max_coefficient_index = k;
        }
    if (b.overflow) {
        r.verdict = ConvergenceReport::Verdict::diverging;
        r.tail_ratio = std::numeric_limits<double>::infinity();
        return r;
    }

    // least-squares slope of log|a_k| over the last quartile (zeros skipped)
    const int q0 = std::max(2, b.M - std::max(2, b.M / 4));
    std::vector<std::pair<double, double>> pts;
    int zeros = 0;
    for (int k = q0; k <= b.M; ++k) {
        const double a = std::abs(b.coeff(k));
        if (a == 0.0) {
            ++zeros;
            continue;
        }
        pts.emplace_back(static_cast<double>(k), std::log(a));
    }
    const int total = b.M - q0 + 1;
    if (pts.size() < 2) {
        if (zeros == total) {
            // identically-zero tail: the truncated series is exact
            r.verdict = ConvergenceReport::Verdict::converging;
            r.tail_ratio = 0.0;
        }
        return r;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    r.tail_ratio = std::exp(slope);

    const double a1 = std::abs(b.coeff(1));
    const double aM = std::abs(b.coeff(b.M));
    if (r.tail_ratio < 1.0 - 1e-3 && aM < a1)
        r.verdict = ConvergenceReport::Verdict::converging;
    else if (r.tail_ratio > 1.0 + 1e-3)
        r.verdict = ConvergenceReport::Verdict::diverging;
    return r;
}

// ---------------------------------------------------------------------------
// Exact solutions of the gch3 traveling ODE at g = 0. The ODE factors as
// (c - phi^2 + phi'^2)(phi'' - phi) = 0; the closed forms below satisfy
// phi'' = phi for any constants.
//   family 1: k1 e^z + k2 e^{-z}
//   family 2: (1/4) e^{-z-k3} (4 c e^{2z} + e^{2 k4})
//   family 3: (1/4) e^{-z-k5} (4 c e^{2z} + e^{2z + 2 k6})

struct ExactG0Solution {
    int family = 1;
    double c = 1.0;
    std::array<double, 2> constants{0.0, 0.0};

    // coefficients of A e^z + B e^{-z}
    double A() const {
        switch (family) {
            case 1: return constants[0];
            case 2: return c * std::exp(-constants[0]);
            case 3: return 0.25 * std::exp(-constants[0]) *
                           (4.0 * c + std::exp(2.0 * constants[1]));
        }
        return 0.0;
    }
    double B() const {
        switch (family) {
            case 1: return constants[1];
            case 2: return 0.25 * std::exp(2.0 * constants[1] - constants[0]);
            case 3: return 0.0;
        }
        return 0.0;
    }

    double eval(double z) const { return A() * std::exp(z) + B() * std::exp(-z); }
    double eval_d1(double z) const { return A() * std::exp(z) - B() * std::exp(-z); }
    double eval_d2(double z) const { return eval(z); }
};

inline ExactG0Solution exact_g0(double c, int family, std::array<double, 2> constants) {
    if (family < 1 || family > 3)
        throw std::invalid_argument("exact_g0: family must be 1, 2 or 3");
    ExactG0Solution s;
    s.family = family;
    s.c = c;
    s.constants = constants;
    return s;
}

// ---------------------------------------------------------------------------
// Assembled two-sided solutions.

enum class Construction { continuity_root, mirror, matched_left, exact_g0_form };

inline const char* to_string(Construction c) {
    switch (c) {
        case Construction::continuity_root: return "continuity-root";
        case Construction::mirror: return "mirror";
        case Construction::matched_left: return "matched-left";
        case Construction::exact_g0_form: return "exact-g0";
    }
    return "?";
}

inline std::optional<Construction> parse_construction(const std::string& s) {
    if (s == "continuity-root" || s == "continuity") return Construction::continuity_root;
    if (s == "mirror") return Construction::mirror;
    if (s == "matched-left" || s == "matched") return Construction::matched_left;
    if (s == "exact-g0") return Construction::exact_g0_form;
    return std::nullopt;
}

struct HomoclinicSolution {
    EquationId equation = EquationId::gch1;
    WaveParams params{1.0, 0.0};
    SeriesBranch right;
    SeriesBranch left;
    double junction_value = 0.0;
    double junction_jump = 0.0;
    Construction construction = Construction::continuity_root;
    Gch3Recurrence recurrence = Gch3Recurrence::standard;
    std::optional<ExactG0Solution> exact;

    double x0() const { return right.x0; }
};

struct AssembleOptions {
    Construction strategy = Construction::continuity_root;
    std::optional<double> leading;     // a_1 for mirror / matched-left
    std::optional<double> target;      // continuity target (default 0)
    Gch3Recurrence recurrence = Gch3Recurrence::standard;
    int family = 1;                    // exact-g0 family
    std::array<double, 2> constants{0.0, 0.0};
};

inline bool equation_is_reversible(EquationId eq) { return eq != EquationId::gch2; }

namespace detail {

inline double smallest_abs(const std::vector<double>& v) {
    double best = v.front();
    for (double x : v)
        if (std::abs(x) < std::abs(best)) best = x;
    return best;
}

}  // namespace detail

// Root choice for assembled solutions: smallest |a_1| among roots whose branch
// converges, falling back to the smallest |a_1| overall when none does.
inline double pick_continuity_root(EquationId eq, const WaveParams& p, double x0, int M,
                                   Side side, Gch3Recurrence rec,
                                   const std::vector<double>& roots) {
    if (M >= 8) {
        std::vector<double> converging;
        for (double r : roots) {
            const auto b = build_branch(eq, p, x0, r, M, side, rec);
            if (convergence_report(b).verdict == ConvergenceReport::Verdict::converging)
                converging.push_back(r);
        }
        if (!converging.empty()) return detail::smallest_abs(converging);
    }
    return detail::smallest_abs(roots);
}

// mirror of a right branch: phi-(z) = phi+(-z), same coefficients, exponent
// negated
inline SeriesBranch mirror_branch(const SeriesBranch& right) {
    SeriesBranch left = right;
    left.exponent = -right.exponent;
    left.side = Side::left;
    return left;
}

inline HomoclinicSolution assemble(EquationId eq, const WaveParams& p, double x0, int M,
                                   const AssembleOptions& opts) {
    HomoclinicSolution sol;
    sol.equation = eq;
    sol.params = p;
    sol.construction = opts.strategy;
    sol.recurrence = opts.recurrence;

    switch (opts.strategy) {
        case Construction::continuity_root: {
            const double target = opts.target.value_or(0.0);
            const auto rroots =
                solve_continuity(eq, p, x0, M, target, Side::right, opts.recurrence);
            if (rroots.empty())
                throw no_continuity_root_error(
                    "no real continuity root; retry with --strategy matched or an explicit "
                    "--target");
            const double a1 =
                pick_continuity_root(eq, p, x0, M, Side::right, opts.recurrence, rroots);
            sol.right = build_branch(eq, p, x0, a1, M, Side::right, opts.recurrence);
            if (equation_is_reversible(eq)) {
                sol.left = mirror_branch(sol.right);
            } else {
                const auto lroots =
                    solve_continuity(eq, p, x0, M, target, Side::left, opts.recurrence);
                if (lroots.empty())
                    throw no_continuity_root_error(
                        "no real left-branch continuity root; retry with --strategy matched");
                const double b1 =
                    pick_continuity_root(eq, p, x0, M, Side::left, opts.recurrence, lroots);
                sol.left = build_branch(eq, p, x0, b1, M, Side::left, opts.recurrence);
            }
            break;
        }
        case Construction::mirror: {
            if (!equation_is_reversible(eq))
                throw std::invalid_argument("mirror assembly requires a reversible equation");
            if (!opts.leading)
                throw std::invalid_argument("mirror assembly requires an explicit a_1");
            sol.right = build_branch(eq, p, x0, *opts.leading, M, Side::right, opts.recurrence);
            sol.left = mirror_branch(sol.right);
            break;
        }
        case Construction::matched_left: {
            if (!opts.leading)
                throw std::invalid_argument("matched-left assembly requires an explicit a_1");
            sol.right = build_branch(eq, p, x0, *opts.leading, M, Side::right, opts.recurrence);
            const double target = opts.target.value_or(sol.right.eval(0.0));
            const auto lroots =
                solve_continuity(eq, p, x0, M, target, Side::left, opts.recurrence);
            if (lroots.empty())
                throw no_continuity_root_error("no real b_1 matches the right branch at z=0");
            const double b1 =
                pick_continuity_root(eq, p, x0, M, Side::left, opts.recurrence, lroots);
            sol.left = build_branch(eq, p, x0, b1, M, Side::left, opts.recurrence);
            break;
        }
        case Construction::exact_g0_form: {
            if (eq != EquationId::gch3 || p.g != 0.0)
                throw std::invalid_argument("exact-g0 assembly requires gch3 with g = 0");
            sol.exact = exact_g0(p.c, opts.family, opts.constants);
            // represent both branches as the trivial series around x0 = 0 so the
            // container stays self-consistent
            sol.right = build_branch(eq, p, 0.0, sol.exact->B(), std::max(2, M), Side::right);
            sol.left = build_branch(eq, p, 0.0, sol.exact->A(), std::max(2, M), Side::left);
            sol.junction_value = sol.exact->eval(0.0);
            sol.junction_jump = 0.0;
            return sol;
        }
    }

    sol.junction_value = sol.right.eval(0.0);
    sol.junction_jump = std::abs(sol.right.eval(0.0) - sol.left.eval(0.0));
    if (opts.strategy != Construction::mirror) {
        const double jtol = 1e-9 * std::max(1.0, std::abs(sol.junction_value));
        if (sol.junction_jump > jtol)
            throw no_continuity_root_error("assembled branches do not meet at z=0");
    } else {
        sol.junction_jump = 0.0;
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Wave evaluation: u(x, t) = phi(x - c t).

inline double evaluate_phi(const HomoclinicSolution& sol, double z) {
    if (sol.exact) return sol.exact->eval(z);
    if (z > 0.0) return sol.right.eval(z);
    if (z < 0.0) return sol.left.eval(z);
    return sol.junction_value;
}

inline double evaluate_wave(const HomoclinicSolution& sol, double x, double t) {
    return evaluate_phi(sol, x - sol.params.c * t);
}

}  // namespace gchtw
