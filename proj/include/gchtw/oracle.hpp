#pragma once

// Independent verification layer. Nothing here trusts the recurrence code in
// series.hpp: brackets are recovered numerically from the pointwise ODE
// residual of probe series, series orbits are cross-checked against direct
// integration of the regularized flow, and residual profiles are scanned.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "gchtw/equations.hpp"
#include "gchtw/errors.hpp"
#include "gchtw/phase_plane.hpp"
#include "gchtw/rk45.hpp"
#include "gchtw/series.hpp"

namespace gchtw {

namespace oracle_detail {

using cplx = std::complex<double>;

// sparse exponential probe: phi(z) = x0 + sum val * e^{idx * alpha * z}
struct ProbeSeries {
    double x0 = 0.0;
    double alpha = 0.0;
    std::vector<std::pair<int, double>> terms;

    // evaluate phi and derivatives at t = e^{alpha z} (complex allowed)
    cplx phi(const cplx& t) const {
        cplx s = x0;
        for (auto [k, v] : terms) s += v * std::pow(t, k);
        return s;
    }
    cplx phi_d1(const cplx& t) const {
        cplx s = 0.0;
        for (auto [k, v] : terms) s += v * (k * alpha) * std::pow(t, k);
        return s;
    }
    cplx phi_d2(const cplx& t) const {
        cplx s = 0.0;
        for (auto [k, v] : terms) s += v * (k * alpha) * (k * alpha) * std::pow(t, k);
        return s;
    }
};

// The probe residual R(z) is a finite sum of e^{o alpha z}; with t = e^{alpha z}
// it is a polynomial in t. Sampling t on a circle of radius rho and applying
// the discrete Fourier sum recovers each order coefficient exactly (no
// aliasing once the sample count exceeds the top order), with a perfectly
// conditioned system. The seed only rotates the sampling phase.
inline std::map<int, double> residual_orders(EquationId eq, const WaveParams& p,
                                             const ProbeSeries& probe, std::uint64_t seed,
                                             int min_samples) {
    std::vector<int> support;
    for (auto [k, v] : probe.terms) support.push_back(k);
    std::vector<int> orders;
    for (std::size_t a = 0; a < support.size(); ++a) {
        orders.push_back(support[a]);
        for (std::size_t b = a; b < support.size(); ++b) {
            orders.push_back(support[a] + support[b]);
            for (std::size_t c = b; c < support.size(); ++c)
                orders.push_back(support[a] + support[b] + support[c]);
        }
    }
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    const int max_order = orders.back();

    const int n = std::max(min_samples, max_order + 8);
    const double rho = 0.92;
    if (std::pow(rho, -max_order) > 1e12)
        throw ill_conditioned_error("residual sampling system is ill-conditioned");
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double theta0 = phase(rng);

    std::vector<cplx> R(n);
    for (int j = 0; j < n; ++j) {
        const double th = theta0 + 2.0 * std::numbers::pi * j / n;
        const cplx t = rho * cplx(std::cos(th), std::sin(th));
        R[j] = traveling_residual_t<cplx>(eq, p.c, p.g, probe.phi(t), probe.phi_d1(t),
                                          probe.phi_d2(t));
    }
    std::map<int, double> out;
    for (int o : orders) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const double th = (theta0 + 2.0 * std::numbers::pi * j / n) * o;
            acc += R[j] * cplx(std::cos(th), -std::sin(th));
        }
        out[o] = (acc / (static_cast<double>(n) * std::pow(rho, o))).real();
    }
    return out;
}

inline double order_k(EquationId eq, const WaveParams& p, double x0, double alpha,
                      const std::vector<std::pair<int, double>>& terms, int k,
                      std::uint64_t seed, int min_samples) {
    ProbeSeries probe{x0, alpha, terms};
    auto orders = residual_orders(eq, p, probe, seed, min_samples);
    auto it = orders.find(k);
    return it == orders.end() ? 0.0 : it->second;
}

}  // namespace oracle_detail

// ---------------------------------------------------------------------------
// Bracket extraction. Results use the same arrangement as series.hpp:
//   F(k alpha) a_k = sum Bq_sym(i, j) a_i a_j (i <= j, unordered pairs)
//                  + sum Bc_sym(l, m, n) a_l a_m a_n (l <= m <= n)

struct ExtractedRelation {
    int k = 0;
    double F = 0.0;
    std::vector<std::tuple<int, int, double>> quadratic;       // (i, j, bracket), i <= j
    std::vector<std::tuple<int, int, int, double>> cubic;      // (l, m, n, bracket)
};

inline std::vector<ExtractedRelation> extract_recurrence(EquationId eq, const WaveParams& p,
                                                         double x0, double exponent,
                                                         int k_max, std::uint64_t seed = 0) {
    using oracle_detail::order_k;
    const double h = 0.02;
    const int min_samples = 3 * k_max;
    std::vector<ExtractedRelation> out;
    for (int k = 1; k <= k_max; ++k) {
        ExtractedRelation rel;
        rel.k = k;
        // linear factor: d r_k / d a_k
        {
            const double fp = order_k(eq, p, x0, exponent, {{k, h}}, k, seed, min_samples);
            const double fm = order_k(eq, p, x0, exponent, {{k, -h}}, k, seed, min_samples);
            rel.F = (fp - fm) / (2.0 * h);
        }
        // quadratic brackets
        for (int i = 1; 2 * i <= k; ++i) {
            const int j = k - i;
            double d2;
            if (i == j) {
                const double fp = order_k(eq, p, x0, exponent, {{i, h}}, k, seed, min_samples);
                const double fm = order_k(eq, p, x0, exponent, {{i, -h}}, k, seed, min_samples);
                d2 = (fp + fm) / (h * h);  // 2 * coeff of a_i^2
                rel.quadratic.emplace_back(i, j, -0.5 * d2);
            } else {
                const double fpp =
                    order_k(eq, p, x0, exponent, {{i, h}, {j, h}}, k, seed, min_samples);
                const double fpm =
                    order_k(eq, p, x0, exponent, {{i, h}, {j, -h}}, k, seed, min_samples);
                const double fmp =
                    order_k(eq, p, x0, exponent, {{i, -h}, {j, h}}, k, seed, min_samples);
                const double fmm =
                    order_k(eq, p, x0, exponent, {{i, -h}, {j, -h}}, k, seed, min_samples);
                d2 = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                rel.quadratic.emplace_back(i, j, -d2);
            }
        }
        // cubic brackets (only gch3 produces nonzero ones; extract regardless)
        if (eq == EquationId::gch3) {
            for (int l = 1; 3 * l <= k; ++l)
                for (int m = l; m <= (k - l) / 2; ++m) {
                    const int n = k - l - m;
                    if (n < m) break;
                    double d3;
                    if (l == m && m == n) {
                        auto f = [&](double s) {
                            return order_k(eq, p, x0, exponent, {{l, s}}, k, seed, min_samples);
                        };
                        d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
                        rel.cubic.emplace_back(l, m, n, -d3 / 6.0);
                    } else if (l == m || m == n) {
                        const int rep = (l == m) ? l : m;     // repeated index
                        const int other = (l == m) ? n : l;   // single index
                        auto f = [&](double s, double u) {
                            return order_k(eq, p, x0, exponent, {{rep, s}, {other, u}}, k,
                                           seed, min_samples);
                        };
                        d3 = ((f(h, h) - 2 * f(0, h) + f(-h, h)) -
                              (f(h, -h) - 2 * f(0, -h) + f(-h, -h))) /
                             (2 * h * h * h);
                        rel.cubic.emplace_back(l, m, n, -d3 / 2.0);
                    } else {
                        auto f = [&](double s, double u, double v) {
                            return order_k(eq, p, x0, exponent, {{l, s}, {m, u}, {n, v}}, k,
                                           seed, min_samples);
                        };
                        d3 = (f(h, h, h) - f(h, h, -h) - f(h, -h, h) - f(-h, h, h) +
                              f(h, -h, -h) + f(-h, h, -h) + f(-h, -h, h) - f(-h, -h, -h)) /
                             (8 * h * h * h);
                        rel.cubic.emplace_back(l, m, n, -d3);
                    }
                }
        }
        out.push_back(std::move(rel));
    }
    return out;
}

// Symmetrized brackets of the implemented recurrence, for comparison.
inline double implemented_quad_sym(EquationId eq, double x0, double alpha, int i, int j,
                                   Gch3Recurrence rec) {
    if (i == j) return quad_bracket(eq, x0, alpha, i, j, rec);
    return quad_bracket(eq, x0, alpha, i, j, rec) + quad_bracket(eq, x0, alpha, j, i, rec);
}

inline double implemented_cubic_sym(double alpha, int l, int m, int n, Gch3Recurrence rec) {
    std::vector<std::array<int, 3>> perms = {{l, m, n}, {l, n, m}, {m, l, n},
                                             {m, n, l}, {n, l, m}, {n, m, l}};
    std::sort(perms.begin(), perms.end());
    perms.erase(std::unique(perms.begin(), perms.end()), perms.end());
    double s = 0.0;
    for (const auto& q : perms) s += cubic_bracket_gch3(alpha, q[0], q[1], q[2], rec);
    return s;
}

// Max relative mismatch between extraction and implementation for k <= k_max.
inline double recurrence_mismatch(EquationId eq, const WaveParams& p, double x0,
                                  double exponent, int k_max,
                                  Gch3Recurrence rec = Gch3Recurrence::standard,
                                  std::uint64_t seed = 0) {
    const auto extracted = extract_recurrence(eq, p, x0, exponent, k_max, seed);
    double worst = 0.0;
    auto upd = [&](double impl, double got) {
        worst = std::max(worst, std::abs(impl - got) / std::max(1.0, std::abs(got)));
    };
    for (const auto& rel : extracted) {
        if (rel.k >= 1) upd(series_F(eq, p, x0, rel.k * exponent), rel.F);
        for (const auto& [i, j, b] : rel.quadratic)
            upd(implemented_quad_sym(eq, x0, exponent, i, j, rec), b);
        for (const auto& [l, m, n, b] : rel.cubic)
            upd(implemented_cubic_sym(exponent, l, m, n, rec), b);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Residual scan of an assembled solution.

struct ResidualScan {
    double max_tail = 0.0;                          // max |residual| over |z| >= 2/|exponent|
    std::vector<std::pair<double, double>> profile; // (z, residual) on the full grid
};

inline double solution_residual_at(const HomoclinicSolution& sol, double z) {
    if (sol.exact)
        return traveling_residual(sol.equation, sol.params, sol.exact->eval(z),
                                  sol.exact->eval_d1(z), sol.exact->eval_d2(z));
    const SeriesBranch& b = (z >= 0.0) ? sol.right : sol.left;
    return traveling_residual(sol.equation, sol.params, b.eval(z), b.eval_d1(z),
                              b.eval_d2(z));
}

inline ResidualScan residual_scan(const HomoclinicSolution& sol,
                                  const std::vector<double>& z_grid) {
    ResidualScan scan;
    const double zc = 2.0 / std::max(1e-12, std::abs(sol.right.exponent));
    for (double z : z_grid) {
        const double r = solution_residual_at(sol, z);
        scan.profile.emplace_back(z, r);
        if (std::abs(z) >= zc) scan.max_tail = std::max(scan.max_tail, std::abs(r));
    }
    return scan;
}

inline std::vector<double> default_scan_grid(const HomoclinicSolution& sol, int n = 400) {
    const double Z = std::max(10.0, 4.0 / std::abs(sol.right.exponent));
    std::vector<double> grid;
    for (int i = 0; i <= n; ++i) grid.push_back(-Z + 2.0 * Z * i / n);
    return grid;
}

// ---------------------------------------------------------------------------
// Manifold shooting: integrate the regularized flow from a point displaced
// off the saddle along its unstable eigenvector.

struct ShootResult {
    Trajectory trajectory;
    bool returned = false;
    double min_return_distance = std::numeric_limits<double>::infinity();
    Vec2 unstable_direction{};
};

inline ShootResult manifold_shoot(EquationId eq, const WaveParams& p, double x0,
                                  double offset, double tol, int ray = +1) {
    if (!(offset >= 1e-8 && offset <= 1e-4))
        throw std::invalid_argument("manifold_shoot: offset outside [1e-8, 1e-4]");
    const auto info = classify_equilibrium(eq, p, {x0, 0.0});
    if (info.kind != EquilibriumKind::saddle || info.origin != PointOrigin::regular)
        throw not_a_saddle_error("manifold_shoot requires a regular saddle");

    const Mat2 j = regularized_jacobian(eq, p, {x0, 0.0});
    const double lambda = std::sqrt(std::max(0.0, j.a12 * j.a21));
    Vec2 v{j.a12, lambda};
    const double vn = std::hypot(v[0], v[1]);
    v = {v[0] / vn, v[1] / vn};
    if ((ray > 0) != (v[0] > 0.0)) v = {-v[0], -v[1]};

    const Vec2 saddle{x0, 0.0};
    const Vec2 start{x0 + offset * v[0], offset * v[1]};

    ShootResult out;
    out.unstable_direction = v;
    const FirstIntegral H = first_integral(eq, p);
    const double H0 = H(start);

    const double box = 12.0 * (1.0 + std::abs(x0) + std::abs(p.c));
    const double span = 400.0 / std::max(0.05, lambda);
    const double departure = std::max(200.0 * offset, 2e-3 * (1.0 + std::abs(x0)));
    const double return_tol = 1e-3 * (1.0 + std::abs(x0));

    auto field = [&](const Vec2& s) { return regularized_rhs(eq, p, s); };
    RK45 stepper(field, start, 0.0, tol);
    stepper.set_max_step(span);

    Trajectory& traj = out.trajectory;
    traj.samples.push_back({0.0, start[0], start[1]});
    bool departed = false;
    for (int step = 0; step < 400000; ++step) {
        if (!stepper.step(+1.0)) break;
        const RK45Step seg = stepper.last_step();
        const Vec2 cur = seg.y1;
        traj.samples.push_back({seg.t1, cur[0], cur[1]});
        traj.H_drift = std::max(traj.H_drift, std::abs(H(cur) - H0));
        const double d = std::hypot(cur[0] - saddle[0], cur[1] - saddle[1]);
        if (!departed && d > departure) departed = true;
        if (departed) {
            const double dref = detail::segment_min_distance(seg, saddle);
            out.min_return_distance = std::min(out.min_return_distance, dref);
            if (out.min_return_distance <= 0.5 * return_tol) break;  // firmly back home
        }
        if (std::max(std::abs(cur[0]), std::abs(cur[1])) > 1e6) {
            traj.terminated_by = Termination::divergence;
            break;
        }
        if (std::abs(cur[0] - x0) > box || std::abs(cur[1]) > box) {
            traj.terminated_by = Termination::time_limit;
            break;
        }
        if (seg.t1 >= span) {
            traj.terminated_by = Termination::time_limit;
            break;
        }
    }
    out.returned = departed && out.min_return_distance <= return_tol;
    return out;
}

inline bool has_homoclinic_loop(EquationId eq, const WaveParams& p, double x0,
                                double offset = 1e-6, double tol = 1e-10) {
    for (int ray : {+1, -1}) {
        try {
            if (manifold_shoot(eq, p, x0, offset, tol, ray).returned) return true;
        } catch (const not_a_saddle_error&) {
            return false;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// One-sided discrete Hausdorff distance from the series orbit to the shot
// polyline (shot rays on both sides; reversible systems add the y-mirror).

namespace oracle_detail {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const double vx = b[0] - a[0], vy = b[1] - a[1];
    const double wx = p[0] - a[0], wy = p[1] - a[1];
    const double vv = vx * vx + vy * vy;
    double t = (vv > 0.0) ? (wx * vx + wy * vy) / vv : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = p[0] - (a[0] + t * vx), dy = p[1] - (a[1] + t * vy);
    return std::hypot(dx, dy);
}

}  // namespace oracle_detail

inline double series_orbit_distance(const HomoclinicSolution& sol, double offset = 1e-6,
                                    double tol = 1e-10) {
    const EquationId eq = sol.equation;
    const WaveParams& p = sol.params;
    const double x0 = sol.x0();

    std::vector<std::vector<Vec2>> polylines;
    for (int ray : {+1, -1}) {
        const auto shot = manifold_shoot(eq, p, x0, offset, tol, ray);
        std::vector<Vec2> line;
        for (const auto& s : shot.trajectory.samples) line.push_back({s.phi, s.y});
        if (equation_is_reversible(eq)) {
            std::vector<Vec2> mirror;
            for (const auto& s : shot.trajectory.samples) mirror.push_back({s.phi, -s.y});
            polylines.push_back(std::move(mirror));
        }
        polylines.push_back(std::move(line));
    }

    // series samples, uniformly in e^{alpha z} so the turning region is dense
    std::vector<Vec2> samples;
    const double alpha = sol.right.exponent;
    const int n = 400;
    for (int i = 1; i <= n; ++i) {
        const double t = static_cast<double>(i) / n;  // e^{alpha z} in (0, 1]
        const double z = std::log(t) / alpha;
        samples.push_back({sol.right.eval(z), sol.right.eval_d1(z)});
        const double zl = std::log(t) / sol.left.exponent;  // z <= 0 on the left
        samples.push_back({sol.left.eval(zl), sol.left.eval_d1(zl)});
    }

    double worst = 0.0;
    for (const auto& s : samples) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& line : polylines) {
            for (std::size_t i = 0; i + 1 < line.size(); ++i)
                best = std::min(best,
                                oracle_detail::point_segment_distance(s, line[i], line[i + 1]));
            if (line.size() == 1)
                best = std::min(best, std::hypot(s[0] - line[0][0], s[1] - line[0][1]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace gchtw
