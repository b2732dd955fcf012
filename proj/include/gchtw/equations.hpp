#pragma once

// The three generalized Camassa-Holm traveling-wave ODEs and their planar
// forms. Everything downstream (phase-plane analysis, series construction,
// oracles) consumes the definitions in this header.
//
// With u(x,t) = phi(x - c t) = phi(z) and integration constant g:
//
//   gch1:  -c phi + c phi'' = 4 phi^2 - 2 phi phi'' - 2 phi'^2 + g
//   gch2:  -c phi + c phi'' = 8 phi^2 - 4 phi phi'' - 2 phi'^2 + 2 phi' phi'' + g
//   gch3:  -c phi + c phi'' = phi^2 phi'' + phi phi'^2 - phi'^2 phi'' - phi^3 - g
//
// Planar systems (phi' = y):
//   gch1:  y' = (4 phi^2 - 2 y^2 + c phi + g) / (c + 2 phi)          [type one]
//   gch2:  y' = (8 phi^2 - 2 y^2 + c phi + g) / (c + 4 phi - 2 y)    [type two]
//   gch3:  y' = (phi y^2 + c phi - g - phi^3) / (c - phi^2 + y^2)    [type two]
//
// The regularized system rescales the independent variable by the denominator
// so the field is polynomial; both systems share invariant curves.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gchtw/errors.hpp"
#include "gchtw/poly.hpp"

namespace gchtw {

enum class EquationId { gch1, gch2, gch3 };

inline const char* to_string(EquationId eq) {
    switch (eq) {
        case EquationId::gch1: return "gch1";
        case EquationId::gch2: return "gch2";
        case EquationId::gch3: return "gch3";
    }
    return "?";
}

inline std::optional<EquationId> parse_equation_id(const std::string& s) {
    if (s == "gch1") return EquationId::gch1;
    if (s == "gch2") return EquationId::gch2;
    if (s == "gch3") return EquationId::gch3;
    return std::nullopt;
}

struct WaveParams {
    double c;
    double g;

    WaveParams(double c_, double g_) : c(c_), g(g_) {
        if (!std::isfinite(c) || !std::isfinite(g))
            throw std::invalid_argument("wave parameters must be finite");
        if (c == 0.0)
            throw std::invalid_argument("wave speed c must be nonzero");
    }
};

using Vec2 = std::array<double, 2>;

struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

// ---------------------------------------------------------------------------
// Pointwise residual of the traveling ODE (LHS - RHS); zero on true solutions.
// Generic over the scalar so the oracle can sample at complex arguments.

template <class T>
T traveling_residual_t(EquationId eq, double c, double g, const T& phi, const T& dphi,
                       const T& ddphi) {
    switch (eq) {
        case EquationId::gch1:
            return (-c * phi + c * ddphi) -
                   (4.0 * phi * phi - 2.0 * phi * ddphi - 2.0 * dphi * dphi + g);
        case EquationId::gch2:
            return (-c * phi + c * ddphi) - (8.0 * phi * phi - 4.0 * phi * ddphi -
                                             2.0 * dphi * dphi + 2.0 * dphi * ddphi + g);
        case EquationId::gch3:
            return (-c * phi + c * ddphi) -
                   (phi * phi * ddphi + phi * dphi * dphi - dphi * dphi * ddphi -
                    phi * phi * phi - g);
    }
    return T{};
}

inline double traveling_residual(EquationId eq, const WaveParams& p, double phi, double dphi,
                                 double ddphi) {
    return traveling_residual_t<double>(eq, p.c, p.g, phi, dphi, ddphi);
}

// ---------------------------------------------------------------------------
// Planar system with exact polynomial coefficients.

enum class SystemClass { type_one, type_two };

struct PlanarSystem {
    Poly2 numerator;    // dy/dz numerator Q(phi, y)
    Poly2 denominator;  // dy/dz denominator G(phi) or f(phi, y)
    SystemClass cls = SystemClass::type_one;
};

inline PlanarSystem build_system(EquationId eq, const WaveParams& p) {
    const double c = p.c, g = p.g;
    switch (eq) {
        case EquationId::gch1:
            return {Poly2({{2, 0, 4.0}, {0, 2, -2.0}, {1, 0, c}, {0, 0, g}}),
                    Poly2({{0, 0, c}, {1, 0, 2.0}}), SystemClass::type_one};
        case EquationId::gch2:
            return {Poly2({{2, 0, 8.0}, {0, 2, -2.0}, {1, 0, c}, {0, 0, g}}),
                    Poly2({{0, 0, c}, {1, 0, 4.0}, {0, 1, -2.0}}), SystemClass::type_two};
        case EquationId::gch3:
            return {Poly2({{1, 2, 1.0}, {1, 0, c}, {0, 0, -g}, {3, 0, -1.0}}),
                    Poly2({{0, 0, c}, {2, 0, -1.0}, {0, 2, 1.0}}), SystemClass::type_two};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Singular set of the planar system.

struct SingularSet {
    enum class Kind { vertical_line, straight_line, hyperbola };
    Kind kind = Kind::vertical_line;

    // vertical_line: phi = phi_s, with Y such that S+- = (phi_s, +-sqrt(Y)) when Y > 0
    double phi_s = 0.0;
    double Y = 0.0;
    std::optional<std::array<Vec2, 2>> singular_points;  // {S-, S+}

    // straight_line: a phi + b y + d = 0
    double a = 0.0, b = 0.0, d = 0.0;

    // hyperbola: phi^2 - y^2 = c_value
    double c_value = 0.0;
};

inline SingularSet singular_set(EquationId eq, const WaveParams& p) {
    SingularSet s;
    switch (eq) {
        case EquationId::gch1: {
            s.kind = SingularSet::Kind::vertical_line;
            s.phi_s = -p.c / 2.0;
            // Y = -F(phi_s)/G'(phi_s) with F = -(4 phi^2 + c phi + g), G = c + 2 phi
            s.Y = (4.0 * s.phi_s * s.phi_s + p.c * s.phi_s + p.g) / 2.0;  // = (c^2 + 2g)/4
            if (s.Y > 0.0) {
                const double ys = std::sqrt(s.Y);
                s.singular_points = {Vec2{s.phi_s, -ys}, Vec2{s.phi_s, ys}};
            }
            return s;
        }
        case EquationId::gch2:
            s.kind = SingularSet::Kind::straight_line;
            s.a = 4.0;
            s.b = -2.0;
            s.d = p.c;
            return s;
        case EquationId::gch3:
            s.kind = SingularSet::Kind::hyperbola;
            s.c_value = p.c;
            return s;
    }
    return s;
}

// Value of the time-rescaling factor (the planar denominator) at a point.
inline double singular_factor(EquationId eq, const WaveParams& p, const Vec2& v) {
    const double phi = v[0], y = v[1];
    switch (eq) {
        case EquationId::gch1: return p.c + 2.0 * phi;
        case EquationId::gch2: return p.c + 4.0 * phi - 2.0 * y;
        case EquationId::gch3: return p.c - phi * phi + y * y;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Equilibrium polynomial and its real roots.

// gch1: 4 phi^2 + c phi + g; gch2: 8 phi^2 + c phi + g; gch3: phi^3 - c phi + g
inline std::vector<double> equilibrium_polynomial(EquationId eq, const WaveParams& p) {
    switch (eq) {
        case EquationId::gch1: return {p.g, p.c, 4.0};
        case EquationId::gch2: return {p.g, p.c, 8.0};
        case EquationId::gch3: return {p.g, -p.c, 0.0, 1.0};
    }
    return {};
}

inline std::vector<RootWithMultiplicity> equilibria(EquationId eq, const WaveParams& p) {
    std::vector<RootWithMultiplicity> roots;
    switch (eq) {
        case EquationId::gch1: roots = quadratic_real_roots(4.0, p.c, p.g); break;
        case EquationId::gch2: roots = quadratic_real_roots(8.0, p.c, p.g); break;
        case EquationId::gch3: roots = cubic_real_roots(1.0, 0.0, -p.c, p.g); break;
    }
    return roots;  // solvers return ascending order
}

// ---------------------------------------------------------------------------
// Regularized system: dz = (denominator) dzeta makes the field polynomial.
//   gch1: phi_dot = y (c + 2 phi),        y_dot = 4 phi^2 - 2 y^2 + c phi + g
//   gch2: phi_dot = y (c + 4 phi - 2 y),  y_dot = 8 phi^2 - 2 y^2 + c phi + g
//   gch3: phi_dot = y (c - phi^2 + y^2),  y_dot = -g + phi (y^2 - phi^2 + c)

inline Vec2 regularized_rhs(EquationId eq, const WaveParams& p, const Vec2& v) {
    const double phi = v[0], y = v[1], c = p.c, g = p.g;
    switch (eq) {
        case EquationId::gch1:
            return {y * (c + 2.0 * phi), 4.0 * phi * phi - 2.0 * y * y + c * phi + g};
        case EquationId::gch2:
            return {y * (c + 4.0 * phi - 2.0 * y),
                    8.0 * phi * phi - 2.0 * y * y + c * phi + g};
        case EquationId::gch3:
            return {y * (c - phi * phi + y * y), -g + phi * (y * y - phi * phi + c)};
    }
    return {0.0, 0.0};
}

inline Mat2 regularized_jacobian(EquationId eq, const WaveParams& p, const Vec2& v) {
    const double phi = v[0], y = v[1], c = p.c;
    Mat2 j;
    switch (eq) {
        case EquationId::gch1:
            j.a11 = 2.0 * y;
            j.a12 = c + 2.0 * phi;
            j.a21 = 8.0 * phi + c;
            j.a22 = -4.0 * y;
            return j;
        case EquationId::gch2:
            j.a11 = 4.0 * y;
            j.a12 = c + 4.0 * phi - 4.0 * y;
            j.a21 = 16.0 * phi + c;
            j.a22 = -4.0 * y;
            return j;
        case EquationId::gch3:
            j.a11 = -2.0 * phi * y;
            j.a12 = c - phi * phi + 3.0 * y * y;
            j.a21 = y * y - 3.0 * phi * phi + c;
            j.a22 = 2.0 * phi * y;
            return j;
    }
    return j;
}

// ---------------------------------------------------------------------------
// Quantities behind the series eigenvalue problem at a regular equilibrium x0:
// the linearized traveling ODE has solutions e^{alpha z} with
// alpha^2 = series_numerator / series_denominator.

inline double series_denominator(EquationId eq, const WaveParams& p, double x0) {
    switch (eq) {
        case EquationId::gch1: return p.c + 2.0 * x0;
        case EquationId::gch2: return p.c + 4.0 * x0;
        case EquationId::gch3: return p.c - x0 * x0;
    }
    return 0.0;
}

inline double series_numerator(EquationId eq, const WaveParams& p, double x0) {
    switch (eq) {
        case EquationId::gch1: return 8.0 * x0 + p.c;
        case EquationId::gch2: return p.c + 16.0 * x0;
        case EquationId::gch3: return p.c - 3.0 * x0 * x0;  // radicand pairs with c - x0^2
    }
    return 0.0;
}

// F(k alpha) = (k alpha)^2 * denominator - numerator; the linear factor of the
// order-k recurrence equation.
inline double series_F(EquationId eq, const WaveParams& p, double x0, double k_exponent) {
    return k_exponent * k_exponent * series_denominator(eq, p, x0) -
           series_numerator(eq, p, x0);
}

}  // namespace gchtw
