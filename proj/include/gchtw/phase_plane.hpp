#pragma once

// Phase-plane analysis of the regularized traveling-wave systems: equilibrium
// classification, first integrals and level sets, adaptive integration of the
// regularized flow, singular-wave labeling (peakon / periodic cuspon), phase
// portraits, and the homoclinic-level / hyperbola intersection for gch3.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gchtw/equations.hpp"
#include "gchtw/poly.hpp"
#include "gchtw/rk45.hpp"

namespace gchtw {

// ---------------------------------------------------------------------------
// Equilibrium classification of the regularized system.

enum class EquilibriumKind { saddle, center, degenerate };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::center: return "center";
        case EquilibriumKind::degenerate: return "degenerate";
    }
    return "?";
}

enum class PointOrigin { regular, singular };

struct EquilibriumInfo {
    Vec2 location{};
    EquilibriumKind kind = EquilibriumKind::degenerate;
    std::array<std::complex<double>, 2> eigenvalues{};
    double jacobian_determinant = 0.0;
    PointOrigin origin = PointOrigin::regular;
};

inline EquilibriumInfo classify_equilibrium(EquationId eq, const WaveParams& p,
                                            const Vec2& location) {
    const Vec2 rhs = regularized_rhs(eq, p, location);
    const double scale = std::max({1.0, std::abs(p.c) + std::abs(p.g),
                                   location[0] * location[0] + location[1] * location[1]});
    if (std::hypot(rhs[0], rhs[1]) > 1e-8 * scale)
        throw not_an_equilibrium_error("point is not an equilibrium of the regularized system");

    const Mat2 j = regularized_jacobian(eq, p, location);
    EquilibriumInfo info;
    info.location = location;
    info.jacobian_determinant = j.det();

    const double tr = j.trace();
    const std::complex<double> sq =
        std::sqrt(std::complex<double>(tr * tr - 4.0 * j.det(), 0.0));
    info.eigenvalues = {0.5 * (std::complex<double>(tr) + sq),
                        0.5 * (std::complex<double>(tr) - sq)};

    const double jscale = std::max(1e-300, j.a11 * j.a11 + j.a12 * j.a12 + j.a21 * j.a21 +
                                               j.a22 * j.a22);
    if (std::abs(j.det()) <= 1e-10 * jscale)
        info.kind = EquilibriumKind::degenerate;
    else if (j.det() < 0.0)
        info.kind = EquilibriumKind::saddle;
    else if (std::abs(tr) <= 1e-8 * std::sqrt(jscale))
        info.kind = EquilibriumKind::center;
    else
        info.kind = EquilibriumKind::degenerate;

    info.origin = (std::abs(singular_factor(eq, p, location)) <= 1e-9 * scale)
                      ? PointOrigin::singular
                      : PointOrigin::regular;
    return info;
}

// Regular equilibria (y = 0 roots of the equilibrium polynomial), classified.
inline std::vector<EquilibriumInfo> classified_equilibria(EquationId eq, const WaveParams& p) {
    std::vector<EquilibriumInfo> out;
    for (const auto& r : equilibria(eq, p))
        out.push_back(classify_equilibrium(eq, p, {r.value, 0.0}));
    return out;
}

// Equilibria of the regularized system sitting on the singular set.
inline std::vector<EquilibriumInfo> singular_equilibria(EquationId eq, const WaveParams& p) {
    std::vector<EquilibriumInfo> out;
    switch (eq) {
        case EquationId::gch1: {
            const SingularSet s = singular_set(eq, p);
            if (s.singular_points) {
                for (const auto& pt : *s.singular_points)
                    out.push_back(classify_equilibrium(eq, p, pt));
            }
            break;
        }
        case EquationId::gch2: {
            const double phi = (2.0 * p.g - p.c * p.c) / (6.0 * p.c);
            const double y = (p.c * p.c + 4.0 * p.g) / (6.0 * p.c);
            out.push_back(classify_equilibrium(eq, p, {phi, y}));
            break;
        }
        case EquationId::gch3:
            // for g != 0 the hyperbola carries no equilibria; for g == 0 every
            // point of it is one (a degenerate continuum, not enumerated)
            break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// First integral of the regularized flow (closed-form polynomial).
//
//   gch1: H = y^2 (c + 2 phi)^2 - 4 phi^4 - 4 c phi^3 - (c^2 + 2g) phi^2 - 2 c g phi
//   gch2: H = (c/2) y^2 + 2 phi y^2 - (2/3) y^3 - (8/3) phi^3 - (c/2) phi^2 - g phi
//   gch3: H = y^2 (c - phi^2)/2 + y^4/4 - c phi^2/2 + g phi + phi^4/4

class FirstIntegral {
  public:
    FirstIntegral(EquationId eq, WaveParams p, Poly2 rep)
        : eq_(eq), p_(p), representation_(std::move(rep)) {}

    EquationId equation() const { return eq_; }
    const Poly2& representation() const { return representation_; }

    double operator()(double phi, double y) const {
        const double c = p_.c, g = p_.g;
        switch (eq_) {
            case EquationId::gch1: {
                const double G = c + 2.0 * phi;
                return y * y * G * G - 4.0 * phi * phi * phi * phi -
                       4.0 * c * phi * phi * phi - (c * c + 2.0 * g) * phi * phi -
                       2.0 * c * g * phi;
            }
            case EquationId::gch2:
                return 0.5 * c * y * y + 2.0 * phi * y * y - (2.0 / 3.0) * y * y * y -
                       (8.0 / 3.0) * phi * phi * phi - 0.5 * c * phi * phi - g * phi;
            case EquationId::gch3:
                return 0.5 * y * y * (c - phi * phi) + 0.25 * y * y * y * y -
                       0.5 * c * phi * phi + g * phi + 0.25 * phi * phi * phi * phi;
        }
        return 0.0;
    }

    double operator()(const Vec2& v) const { return (*this)(v[0], v[1]); }

    Vec2 gradient(double phi, double y) const {
        const double c = p_.c, g = p_.g;
        switch (eq_) {
            case EquationId::gch1: {
                const double G = c + 2.0 * phi;
                return {4.0 * y * y * G - 16.0 * phi * phi * phi - 12.0 * c * phi * phi -
                            2.0 * (c * c + 2.0 * g) * phi - 2.0 * c * g,
                        2.0 * y * G * G};
            }
            case EquationId::gch2:
                return {2.0 * y * y - 8.0 * phi * phi - c * phi - g,
                        c * y + 4.0 * phi * y - 2.0 * y * y};
            case EquationId::gch3:
                return {-phi * y * y - c * phi + g + phi * phi * phi,
                        y * (c - phi * phi) + y * y * y};
        }
        return {0.0, 0.0};
    }

  private:
    EquationId eq_;
    WaveParams p_;
    Poly2 representation_;
};

inline FirstIntegral first_integral(EquationId eq, const WaveParams& p) {
    const double c = p.c, g = p.g;
    switch (eq) {
        case EquationId::gch1:
            return FirstIntegral(eq, p,
                                 Poly2({{0, 2, c * c},
                                        {1, 2, 4.0 * c},
                                        {2, 2, 4.0},
                                        {4, 0, -4.0},
                                        {3, 0, -4.0 * c},
                                        {2, 0, -(c * c + 2.0 * g)},
                                        {1, 0, -2.0 * c * g}}));
        case EquationId::gch2:
            return FirstIntegral(eq, p,
                                 Poly2({{0, 2, 0.5 * c},
                                        {1, 2, 2.0},
                                        {0, 3, -2.0 / 3.0},
                                        {3, 0, -8.0 / 3.0},
                                        {2, 0, -0.5 * c},
                                        {1, 0, -g}}));
        case EquationId::gch3:
            return FirstIntegral(eq, p,
                                 Poly2({{0, 2, 0.5 * c},
                                        {2, 2, -0.5},
                                        {0, 4, 0.25},
                                        {2, 0, -0.5 * c},
                                        {1, 0, g},
                                        {4, 0, 0.25}}));
    }
    return FirstIntegral(eq, p, Poly2{});
}

// ---------------------------------------------------------------------------
// Regularized-flow trajectories.

enum class Termination { time_limit, singular_crossing, divergence, closed_orbit_detected };

inline const char* to_string(Termination t) {
    switch (t) {
        case Termination::time_limit: return "time-limit";
        case Termination::singular_crossing: return "singular-crossing";
        case Termination::divergence: return "divergence";
        case Termination::closed_orbit_detected: return "closed-orbit-detected";
    }
    return "?";
}

struct TrajectorySample {
    double zeta = 0.0;
    double phi = 0.0;
    double y = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double H_drift = 0.0;
    Termination terminated_by = Termination::time_limit;
    std::vector<double> singular_crossings;  // zeta values of denominator sign changes
};

struct IntegrateOptions {
    bool stop_on_singular = false;
    bool detect_closed_orbit = true;
    int max_steps = 200000;
    double divergence_norm = 1e6;
    // optional clipping rectangle {phi_min, phi_max, y_min, y_max}; empty = none
    std::optional<std::array<double, 4>> clip;
};

namespace detail {

inline double dist2(const Vec2& a, const Vec2& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

// min distance from the Hermite segment to a point, golden-section refined
inline double segment_min_distance(const RK45Step& seg, const Vec2& target) {
    double best = std::numeric_limits<double>::infinity();
    double best_t = seg.t0;
    const int n = 16;
    for (int i = 0; i <= n; ++i) {
        const double t = seg.t0 + (seg.t1 - seg.t0) * i / n;
        const double d = dist2(seg.interpolate(t), target);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    const double w = (seg.t1 - seg.t0) / n;
    double lo = best_t - w, hi = best_t + w;
    for (int it = 0; it < 40; ++it) {
        const double m1 = lo + (hi - lo) * 0.381966;
        const double m2 = hi - (hi - lo) * 0.381966;
        if (dist2(seg.interpolate(m1), target) < dist2(seg.interpolate(m2), target))
            hi = m2;
        else
            lo = m1;
    }
    const double m = 0.5 * (lo + hi);
    return std::sqrt(std::min(best, dist2(seg.interpolate(m), target)));
}

}  // namespace detail

inline Trajectory integrate_regularized(EquationId eq, const WaveParams& p, const Vec2& start,
                                        double zeta0, double zeta1, double tol,
                                        const IntegrateOptions& opts = {}) {
    if (!(std::isfinite(start[0]) && std::isfinite(start[1])))
        throw std::invalid_argument("integrate_regularized: start must be finite");
    if (!(tol >= 1e-12 && tol <= 1e-3))
        throw std::invalid_argument("integrate_regularized: tol outside [1e-12, 1e-3]");

    const double dir = (zeta1 >= zeta0) ? 1.0 : -1.0;
    auto field = [&](const Vec2& v) -> Vec2 {
        Vec2 f = regularized_rhs(eq, p, v);
        return {dir * f[0], dir * f[1]};
    };

    const FirstIntegral H = first_integral(eq, p);
    const double H0 = H(start);

    Trajectory traj;
    traj.samples.push_back({zeta0, start[0], start[1]});

    // winding reference for closed-orbit detection: nearest center, if any
    std::optional<Vec2> center_ref;
    if (opts.detect_closed_orbit) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& info : classified_equilibria(eq, p)) {
            if (info.kind != EquilibriumKind::center) continue;
            const double d = detail::dist2(info.location, start);
            if (d < best) {
                best = d;
                center_ref = info.location;
            }
        }
    }

    RK45 stepper(field, start, 0.0, tol);
    stepper.set_max_step(std::abs(zeta1 - zeta0));

    const double span = std::abs(zeta1 - zeta0);
    double winding = 0.0;
    double prev_angle = 0.0;
    bool have_angle = false;
    if (center_ref) {
        prev_angle = std::atan2(start[1] - (*center_ref)[1], start[0] - (*center_ref)[0]);
        have_angle = true;
    }
    const double return_threshold =
        10.0 * tol * std::max(1.0, std::hypot(start[0], start[1]));
    double prev_factor = singular_factor(eq, p, start);

    for (int step = 0; step < opts.max_steps; ++step) {
        if (!stepper.step(+1.0)) {
            traj.terminated_by = Termination::time_limit;
            return traj;
        }
        RK45Step seg = stepper.last_step();
        bool final_step = false;
        if (seg.t1 >= span) {
            // clamp the final sample to the span end via the interpolant
            final_step = true;
            const Vec2 yend = seg.interpolate(span);
            seg.t1 = span;
            seg.y1 = yend;
        }
        const double zeta = zeta0 + dir * seg.t1;
        const Vec2 cur = seg.y1;
        traj.samples.push_back({zeta, cur[0], cur[1]});
        traj.H_drift = std::max(traj.H_drift, std::abs(H(cur) - H0));

        // singular-set crossing events
        const double fac = singular_factor(eq, p, cur);
        if (prev_factor != 0.0 && fac * prev_factor < 0.0) {
            double lo = seg.t0, hi = seg.t1;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const Vec2 v = seg.interpolate(mid);
                if (singular_factor(eq, p, v) * prev_factor < 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            traj.singular_crossings.push_back(zeta0 + dir * 0.5 * (lo + hi));
            if (opts.stop_on_singular) {
                traj.terminated_by = Termination::singular_crossing;
                return traj;
            }
        }
        prev_factor = fac;

        if (std::max(std::abs(cur[0]), std::abs(cur[1])) > opts.divergence_norm) {
            traj.terminated_by = Termination::divergence;
            return traj;
        }
        if (opts.clip) {
            const auto& w = *opts.clip;
            if (cur[0] < w[0] || cur[0] > w[1] || cur[1] < w[2] || cur[1] > w[3]) {
                traj.terminated_by = Termination::time_limit;
                return traj;
            }
        }

        if (have_angle) {
            const double ang =
                std::atan2(cur[1] - (*center_ref)[1], cur[0] - (*center_ref)[0]);
            double delta = ang - prev_angle;
            while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
            while (delta < -std::numbers::pi) delta += 2.0 * std::numbers::pi;
            winding += delta;
            prev_angle = ang;
            if (opts.detect_closed_orbit && std::abs(winding) >= std::numbers::pi) {
                const double gate = std::max(1000.0 * return_threshold, 1e-3);
                if (std::min(detail::dist2(seg.y0, start), detail::dist2(seg.y1, start)) <=
                    gate * gate) {
                    const double dmin = detail::segment_min_distance(seg, start);
                    if (dmin <= return_threshold) {
                        traj.terminated_by = Termination::closed_orbit_detected;
                        return traj;
                    }
                }
            }
        }

        if (final_step) {
            traj.terminated_by = Termination::time_limit;
            return traj;
        }
    }
    traj.terminated_by = Termination::time_limit;
    return traj;
}

// ---------------------------------------------------------------------------
// Level-set tracing: predictor-corrector continuation of H(phi, y) = h.

struct LevelTraceOptions {
    double step = 1e-3;           // arc step (window-relative values typical)
    int max_steps = 200000;
    double gradient_floor = 1e-12;
    std::function<bool(const Vec2&)> stop;  // optional extra stop predicate
};

inline std::vector<Vec2> trace_level(const FirstIntegral& H, double h, Vec2 start,
                                     double direction, const LevelTraceOptions& opts) {
    std::vector<Vec2> pts;
    Vec2 x = start;
    // initial correction onto the level
    for (int it = 0; it < 5; ++it) {
        const Vec2 gr = H.gradient(x[0], x[1]);
        const double g2 = gr[0] * gr[0] + gr[1] * gr[1];
        if (g2 < opts.gradient_floor) break;
        const double r = H(x[0], x[1]) - h;
        x[0] -= r * gr[0] / g2;
        x[1] -= r * gr[1] / g2;
    }
    pts.push_back(x);
    for (int i = 0; i < opts.max_steps; ++i) {
        const Vec2 gr = H.gradient(x[0], x[1]);
        const double gn = std::hypot(gr[0], gr[1]);
        if (gn < opts.gradient_floor) break;  // critical point
        Vec2 t{direction * gr[1] / gn, -direction * gr[0] / gn};
        Vec2 xp{x[0] + opts.step * t[0], x[1] + opts.step * t[1]};
        for (int it = 0; it < 3; ++it) {
            const Vec2 g2v = H.gradient(xp[0], xp[1]);
            const double g2 = g2v[0] * g2v[0] + g2v[1] * g2v[1];
            if (g2 < opts.gradient_floor) break;
            const double r = H(xp[0], xp[1]) - h;
            xp[0] -= r * g2v[0] / g2;
            xp[1] -= r * g2v[1] / g2;
        }
        x = xp;
        pts.push_back(x);
        if (opts.stop && opts.stop(x)) break;
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Singular traveling-wave classification (gch1 carries all the structure).

enum class WaveLabel { periodic_cuspon, solitary_peakon, none };

inline const char* to_string(WaveLabel l) {
    switch (l) {
        case WaveLabel::periodic_cuspon: return "periodic-cuspon";
        case WaveLabel::solitary_peakon: return "solitary-peakon";
        case WaveLabel::none: return "none";
    }
    return "?";
}

struct SingularWaveVerdict {
    WaveLabel label = WaveLabel::none;
    double h_s = 0.0;                                   // boundary level value
    std::string geometry = "none";                      // "arch" | "triangle" | "none"
    std::optional<std::array<Vec2, 2>> singular_points; // S-+ used by the test
    double closure_phi = 0.0;                           // where the level returns to y = 0
    std::vector<Vec2> level_component;                  // traced evidence polyline
};

inline SingularWaveVerdict classify_singular_wave(EquationId eq, const WaveParams& p,
                                                  bool strict = false) {
    SingularWaveVerdict v;
    if (eq == EquationId::gch2) return v;  // no closed orbits touch the singular line
    if (eq == EquationId::gch3) {
        if (strict)
            throw unsupported_equation_error(
                "full singular-wave classification is not supported for gch3");
        return v;
    }

    const SingularSet sset = singular_set(eq, p);
    if (!(sset.Y > 0.0) || !sset.singular_points) return v;
    v.singular_points = sset.singular_points;

    const FirstIntegral H = first_integral(eq, p);
    const double phi_s = sset.phi_s;
    v.h_s = H(phi_s, std::sqrt(sset.Y));

    auto W = [&](double phi) { return H(phi, 0.0); };
    auto D = [&](double phi) { return v.h_s - W(phi); };

    const auto eqs = classified_equilibria(eq, p);
    const double level_tol =
        1e-6 * std::max({1.0, std::abs(v.h_s), p.c * p.c * std::abs(p.c)});

    for (double side : {+1.0, -1.0}) {
        // equilibria on this side of the singular line, nearest first
        std::vector<EquilibriumInfo> here;
        for (const auto& e : eqs)
            if (side * (e.location[0] - phi_s) > 1e-12) here.push_back(e);
        std::sort(here.begin(), here.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.location[0] - phi_s) < std::abs(b.location[0] - phi_s);
        });
        if (here.empty()) continue;

        // march outward: find the first zero of D(phi) = h_s - H(phi, 0),
        // either a sign change or a tangency (double zero at a grid minimum)
        const double L = 10.0 * (1.0 + std::abs(p.c) + std::sqrt(std::abs(p.g)));
        const int n_grid = 4000;
        const double tangency_tol = 1e-9 * std::max(1.0, p.c * p.c * p.c * p.c);
        std::optional<double> phi_e;
        double phi_prev2 = 0.0, phi_prev = phi_s + side * 1e-9 * (1.0 + std::abs(phi_s));
        double D_prev2 = 0.0, D_prev = D(phi_prev);
        for (int i = 1; i <= n_grid && !phi_e; ++i) {
            const double phi = phi_s + side * L * i / n_grid;
            const double d = D(phi);
            if (D_prev > 0.0 && d <= 0.0) {
                double lo = phi_prev, hi = phi;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (D(mid) > 0.0 ? lo : hi) = mid;
                }
                phi_e = 0.5 * (lo + hi);
                break;
            }
            if (i >= 2 && D_prev <= D_prev2 && D_prev <= d) {
                // local minimum: refine and test for a tangency
                double lo = phi_prev2, hi = phi;
                for (int it = 0; it < 120; ++it) {
                    const double m1 = lo + (hi - lo) * 0.381966;
                    const double m2 = hi - (hi - lo) * 0.381966;
                    if (D(m1) < D(m2))
                        hi = m2;
                    else
                        lo = m1;
                }
                const double pm = 0.5 * (lo + hi);
                if (D(pm) <= tangency_tol) phi_e = pm;
            }
            phi_prev2 = phi_prev;
            D_prev2 = D_prev;
            phi_prev = phi;
            D_prev = d;
        }
        if (!phi_e) continue;

        // a center strictly between the line and the closure point is required
        bool center_inside = false;
        for (const auto& e : here)
            if (e.kind == EquilibriumKind::center &&
                side * (*phi_e - e.location[0]) > -1e-12)
                center_inside = true;
        if (!center_inside) continue;

        // triangle when a regular saddle sits on the level at the closure point
        bool triangle = false;
        for (const auto& e : here) {
            if (e.kind != EquilibriumKind::saddle) continue;
            if (std::abs(W(e.location[0]) - v.h_s) <= level_tol &&
                std::abs(e.location[0] - *phi_e) <= 1e-4 * (1.0 + std::abs(*phi_e))) {
                triangle = true;
                break;
            }
        }

        v.closure_phi = *phi_e;
        v.geometry = triangle ? "triangle" : "arch";
        v.label = triangle ? WaveLabel::solitary_peakon : WaveLabel::periodic_cuspon;

        // trace the component as evidence, starting just inside the arch
        const double d0 = side * 1e-3 * (1.0 + std::abs(phi_s));
        const double phi0 = phi_s + d0;
        const double Dv = D(phi0);
        const double G0 = p.c + 2.0 * phi0;
        if (Dv > 0.0 && G0 != 0.0) {
            const double y0 = std::sqrt(Dv) / std::abs(G0);
            LevelTraceOptions lt;
            lt.step = 2e-3 * (1.0 + std::abs(p.c));
            lt.max_steps = 40000;
            lt.stop = [&](const Vec2& x) {
                return side * (x[0] - phi_s) < 0.5 * std::abs(d0) && x[1] < 0.0;
            };
            v.level_component = trace_level(H, v.h_s, {phi0, y0}, side, lt);
        }
        return v;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Phase portrait data (seeds on a deterministic grid, each integrated both ways).

struct Window {
    double phi_min = -1.0, phi_max = 1.0, y_min = -1.0, y_max = 1.0;
    bool degenerate() const { return !(phi_max > phi_min) || !(y_max > y_min); }
};

struct Portrait {
    std::vector<Trajectory> trajectories;
    std::vector<EquilibriumInfo> equilibrium_info;  // regular then singular
    SingularSet singular;
};

// Seeds live on a deterministic grid; a nonzero seed value jitters each grid
// point inside its own cell (still fully reproducible for a given seed).
inline Portrait portrait(EquationId eq, const WaveParams& p, const Window& w, int seeds,
                         double tol = 1e-8, std::uint64_t seed = 0) {
    if (w.degenerate()) throw std::invalid_argument("portrait: window must have positive area");
    if (seeds < 1) throw std::invalid_argument("portrait: seeds must be >= 1");

    Portrait out;
    out.singular = singular_set(eq, p);
    for (const auto& e : classified_equilibria(eq, p)) out.equilibrium_info.push_back(e);
    for (const auto& e : singular_equilibria(eq, p)) out.equilibrium_info.push_back(e);

    const int per_row = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(seeds))));
    IntegrateOptions opts;
    opts.detect_closed_orbit = true;
    const double mphi = 0.25 * (w.phi_max - w.phi_min);
    const double my = 0.25 * (w.y_max - w.y_min);
    opts.clip = std::array<double, 4>{w.phi_min - mphi, w.phi_max + mphi, w.y_min - my,
                                      w.y_max + my};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.35, 0.35);

    int made = 0;
    for (int i = 0; i < per_row && made < seeds; ++i) {
        for (int j = 0; j < per_row && made < seeds; ++j, ++made) {
            const double ji = (seed != 0) ? jitter(rng) : 0.0;
            const double jj = (seed != 0) ? jitter(rng) : 0.0;
            const double phi =
                w.phi_min + (w.phi_max - w.phi_min) * (i + 0.5 + ji) / per_row;
            const double y = w.y_min + (w.y_max - w.y_min) * (j + 0.5 + jj) / per_row;
            const double span = 30.0 / (1.0 + std::abs(p.c));
            out.trajectories.push_back(
                integrate_regularized(eq, p, {phi, y}, 0.0, span, tol, opts));
            out.trajectories.push_back(
                integrate_regularized(eq, p, {phi, y}, 0.0, -span, tol, opts));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// gch3: the g level at which the homoclinic loop through the middle saddle
// passes through (sqrt(c), 0), plus the loop/hyperbola intersection points.

struct GStarResult {
    double g_star = 0.0;
    double h2 = 0.0;          // H(z2, 0) at g_star in this header's H convention
    double h2_shifted = 0.0;  // h2 + c^2/4, the convention in which phi_P = h2/g
};

namespace detail {

// H(phi, 0) for gch3
inline double gch3_axis_level(double c, double g, double phi) {
    return 0.25 * phi * phi * phi * phi - 0.5 * c * phi * phi + g * phi;
}

// middle root of phi^3 - c phi + g (the saddle flanked by the center), for
// c > 0 and 0 < g < gmax
inline double gch3_middle_root(double c, double g) {
    auto roots = cubic_real_roots(1.0, 0.0, -c, g);
    std::vector<double> flat;
    for (const auto& r : roots)
        for (int i = 0; i < r.multiplicity; ++i) flat.push_back(r.value);
    if (flat.size() < 3) {
        // double-root boundary: the merged pair is the relevant location
        return flat.size() == 2 ? std::max(flat[0], flat[1]) : flat[0];
    }
    return flat[1];
}

}  // namespace detail

inline double gch3_three_root_bound(double c) { return (2.0 * c / 3.0) * std::sqrt(c / 3.0); }

inline GStarResult gstar(double c, double tol = 1e-10) {
    if (!(c > 0.0)) throw std::invalid_argument("gstar requires c > 0");
    const double gmax = gch3_three_root_bound(c);
    auto s = [&](double g) {
        const double z2 = detail::gch3_middle_root(c, g);
        return detail::gch3_axis_level(c, g, z2) - (g * std::sqrt(c) - 0.25 * c * c);
    };
    double lo = gmax * 1e-9, hi = gmax * (1.0 - 1e-9);
    double slo = s(lo), shi = s(hi);
    if (!(slo > 0.0 && shi < 0.0))
        throw std::domain_error("gstar: bracketing sign condition failed");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (s(mid) > 0.0 ? lo : hi) = mid;
    }
    GStarResult r;
    r.g_star = 0.5 * (lo + hi);
    const double z2 = detail::gch3_middle_root(c, r.g_star);
    r.h2 = detail::gch3_axis_level(c, r.g_star, z2);
    r.h2_shifted = r.h2 + 0.25 * c * c;
    return r;
}

struct HyperbolaIntersection {
    bool exists = false;
    double phi_s = 0.0;
    double y_s = 0.0;  // points are (phi_s, +-y_s)
    double h2 = 0.0;
    double h2_shifted = 0.0;
};

// Intersection of the level through the middle saddle with phi^2 - y^2 = c.
// On the hyperbola H = g phi - c^2/4, so phi = (h2 + c^2/4)/g; points exist
// for g below g_star.
inline HyperbolaIntersection gstar_intersections(double c, double g) {
    if (!(c > 0.0) || !(g > 0.0))
        throw std::invalid_argument("gstar_intersections requires c > 0 and g > 0");
    HyperbolaIntersection out;
    const double z2 = detail::gch3_middle_root(c, g);
    out.h2 = detail::gch3_axis_level(c, g, z2);
    out.h2_shifted = out.h2 + 0.25 * c * c;
    out.phi_s = out.h2_shifted / g;
    const double ysq = out.phi_s * out.phi_s - c;
    if (ysq >= -1e-12) {
        out.exists = true;
        out.y_s = std::sqrt(std::max(0.0, ysq));
    }
    return out;
}

}  // namespace gchtw
