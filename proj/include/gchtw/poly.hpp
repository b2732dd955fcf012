#pragma once

// Small polynomial toolbox: bivariate monomial lists for the planar systems
// and first integrals, plus real root solvers (stable quadratic, trigonometric
// cubic, and companion-matrix eigenvalues for general degree).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "gchtw/errors.hpp"

namespace gchtw {

// ---------------------------------------------------------------------------
// Bivariate polynomials in (phi, y).

struct Monomial2 {
    int dphi = 0;
    int dy = 0;
    double coeff = 0.0;
};

class Poly2 {
  public:
    Poly2() = default;
    explicit Poly2(std::vector<Monomial2> terms) : terms_(std::move(terms)) { normalize(); }

    const std::vector<Monomial2>& terms() const { return terms_; }

    double operator()(double phi, double y) const {
        double s = 0.0;
        for (const auto& m : terms_) s += m.coeff * ipow(phi, m.dphi) * ipow(y, m.dy);
        return s;
    }

    Poly2 d_dphi() const {
        std::vector<Monomial2> out;
        for (const auto& m : terms_)
            if (m.dphi > 0) out.push_back({m.dphi - 1, m.dy, m.coeff * m.dphi});
        return Poly2(std::move(out));
    }

    Poly2 d_dy() const {
        std::vector<Monomial2> out;
        for (const auto& m : terms_)
            if (m.dy > 0) out.push_back({m.dphi, m.dy - 1, m.coeff * m.dy});
        return Poly2(std::move(out));
    }

    Poly2 times_y() const {
        std::vector<Monomial2> out;
        for (const auto& m : terms_) out.push_back({m.dphi, m.dy + 1, m.coeff});
        return Poly2(std::move(out));
    }

    friend Poly2 operator+(const Poly2& a, const Poly2& b) {
        std::vector<Monomial2> out = a.terms_;
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return Poly2(std::move(out));
    }

    bool is_zero(double tol = 0.0) const {
        for (const auto& m : terms_)
            if (std::abs(m.coeff) > tol) return false;
        return true;
    }

    // Sum of |coeff|, a crude scale for relative comparisons.
    double coeff_norm() const {
        double s = 0.0;
        for (const auto& m : terms_) s += std::abs(m.coeff);
        return s;
    }

  private:
    static double ipow(double x, int n) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= x;
        return r;
    }

    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const Monomial2& a, const Monomial2& b) {
            return std::tie(a.dphi, a.dy) < std::tie(b.dphi, b.dy);
        });
        std::vector<Monomial2> merged;
        for (const auto& m : terms_) {
            if (!merged.empty() && merged.back().dphi == m.dphi && merged.back().dy == m.dy)
                merged.back().coeff += m.coeff;
            else
                merged.push_back(m);
        }
        std::erase_if(merged, [](const Monomial2& m) { return m.coeff == 0.0; });
        terms_ = std::move(merged);
    }

    std::vector<Monomial2> terms_;
};

// ---------------------------------------------------------------------------
// Univariate helpers. Coefficients ascending: p(x) = c[0] + c[1] x + ...

inline double poly_eval(const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
    return s;
}

inline double poly_eval_derivative(const std::vector<double>& c, double x) {
    double s = 0.0;
    for (std::size_t i = c.size(); i-- > 1;) s = s * x + c[i] * static_cast<double>(i);
    return s;
}

// Magnitude of the largest term at x; backward-error scale for root filtering.
inline double poly_term_scale(const std::vector<double>& c, double x) {
    double s = 0.0, xp = 1.0;
    for (double ci : c) {
        s = std::max(s, std::abs(ci * xp));
        xp *= x;
    }
    return s;
}

struct RootWithMultiplicity {
    double value = 0.0;
    int multiplicity = 1;
};

namespace detail {

inline constexpr double root_merge_rel = 1e-9;

inline std::vector<RootWithMultiplicity> merge_close_roots(std::vector<double> roots) {
    std::sort(roots.begin(), roots.end());
    std::vector<RootWithMultiplicity> out;
    for (double r : roots) {
        if (!out.empty() &&
            std::abs(r - out.back().value) <= root_merge_rel * std::max(1.0, std::abs(r))) {
            // merge as a higher-multiplicity root at the mean
            auto& b = out.back();
            b.value = (b.value * b.multiplicity + r) / (b.multiplicity + 1);
            b.multiplicity += 1;
        } else {
            out.push_back({r, 1});
        }
    }
    return out;
}

}  // namespace detail

// Numerically stable quadratic a x^2 + b x + c. Roots ascending.
inline std::vector<RootWithMultiplicity> quadratic_real_roots(double a, double b, double c) {
    if (a == 0.0) {
        if (b == 0.0) return {};
        return {{-c / b, 1}};
    }
    const double disc = b * b - 4.0 * a * c;
    const double scale = std::max({b * b, std::abs(4.0 * a * c), 1e-300});
    if (disc < 0.0) {
        // treat a vanishing discriminant (relative to scale) as a double root
        if (disc > -1e-14 * scale) return {{-b / (2.0 * a), 2}};
        return {};
    }
    if (disc == 0.0) return {{-b / (2.0 * a), 2}};
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
    std::vector<double> roots;
    roots.push_back(q / a);
    if (q != 0.0)
        roots.push_back(c / q);
    else
        roots.push_back(-b / a - q / a);
    auto merged = detail::merge_close_roots(std::move(roots));
    return merged;
}

// Real roots of x^3 + p x + q (depressed cubic), trig/Cardano split.
inline std::vector<double> depressed_cubic_real_roots(double p, double q) {
    std::vector<double> roots;
    if (p == 0.0 && q == 0.0) return {0.0, 0.0, 0.0};
    const double disc = -4.0 * p * p * p - 27.0 * q * q;
    const double disc_scale = std::max({4.0 * std::abs(p * p * p), 27.0 * q * q, 1e-300});
    if (std::abs(disc) <= 1e-12 * disc_scale && p != 0.0) {
        // vanishing discriminant: a simple root 3q/p and a double root -3q/(2p)
        return {3.0 * q / p, -1.5 * q / p, -1.5 * q / p};
    }
    if (disc > 0.0) {
        // three real roots, p < 0 here
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
    } else {
        // one real root (Cardano); boundary disc == 0 handled by merge afterwards
        const double half_q = q / 2.0;
        const double inner = half_q * half_q + p * p * p / 27.0;
        if (inner >= 0.0) {
            const double s = std::sqrt(inner);
            roots.push_back(std::cbrt(-half_q + s) + std::cbrt(-half_q - s));
        } else {
            const double m = 2.0 * std::sqrt(-p / 3.0);
            double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
            const double theta = std::acos(arg) / 3.0;
            for (int k = 0; k < 3; ++k)
                roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
        }
    }
    return roots;
}

// General cubic a3 x^3 + a2 x^2 + a1 x + a0 with one Newton polish step per root.
inline std::vector<RootWithMultiplicity> cubic_real_roots(double a3, double a2, double a1,
                                                          double a0) {
    if (a3 == 0.0) return quadratic_real_roots(a2, a1, a0);
    const double b = a2 / a3, c = a1 / a3, d = a0 / a3;
    // depress: x = t - b/3
    const double p = c - b * b / 3.0;
    const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    std::vector<double> roots = depressed_cubic_real_roots(p, q);
    const std::vector<double> coeffs = {a0, a1, a2, a3};
    for (double& r : roots) {
        r -= b / 3.0;
        for (int it = 0; it < 2; ++it) {
            const double f = poly_eval(coeffs, r);
            const double df = poly_eval_derivative(coeffs, r);
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step)) break;
            r -= step;
        }
    }
    return detail::merge_close_roots(std::move(roots));
}

// ---------------------------------------------------------------------------
// Companion-matrix eigenvalues for general-degree polynomials.

namespace detail {

inline void balance_matrix(std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a[j][i]);
                    r += std::abs(a[i][j]);
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0;
                const double s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (std::size_t j = 0; j < n; ++j) a[i][j] *= g;
                    for (std::size_t j = 0; j < n; ++j) a[j][i] *= f;
                }
            }
        }
    }
}

// Francis double-shift QR for an upper Hessenberg matrix (eigenvalues only).
inline std::vector<std::complex<double>> hessenberg_eigenvalues(
    std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::complex<double>> eig(n);
    if (n == 0) return eig;
    const double eps = std::numeric_limits<double>::epsilon();

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a[i][j]);
    if (anorm == 0.0) return eig;

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        for (;;) {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
                if (s == 0.0) s = anorm;
                if (std::abs(a[l][l - 1]) <= eps * s) {
                    a[l][l - 1] = 0.0;
                    break;
                }
            }
            double x = a[nn][nn];
            if (l == nn) {
                eig[nn--] = x + t;
                break;
            }
            double y = a[nn - 1][nn - 1];
            double w = a[nn][nn - 1] * a[nn - 1][nn];
            if (l == nn - 1) {
                double p = 0.5 * (y - x);
                double q = p * p + w;
                double z = std::sqrt(std::abs(q));
                x += t;
                if (q >= 0.0) {
                    z = p + std::copysign(z, p == 0.0 ? 1.0 : p);
                    eig[nn - 1] = eig[nn] = x + z;
                    if (z != 0.0) eig[nn] = x - w / z;
                } else {
                    eig[nn - 1] = std::complex<double>(x + p, z);
                    eig[nn] = std::complex<double>(x + p, -z);
                }
                nn -= 2;
                break;
            }
            if (its == 60) throw ill_conditioned_error("QR iteration failed to converge");
            if (its != 0 && its % 10 == 0) {
                t += x;
                for (int i = 0; i <= nn; ++i) a[i][i] -= x;
                const double s = std::abs(a[nn][nn - 1]) + std::abs(a[nn - 1][nn - 2]);
                y = x = 0.75 * s;
                w = -0.4375 * s * s;
            }
            ++its;
            int m;
            double p = 0.0, q = 0.0, r = 0.0;
            for (m = nn - 2; m >= l; --m) {
                const double z = a[m][m];
                const double rr = x - z;
                const double ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                const double scale = std::abs(p) + std::abs(q) + std::abs(r);
                p /= scale;
                q /= scale;
                r /= scale;
                if (m == l) break;
                const double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
                const double v =
                    std::abs(p) *
                    (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
                if (u <= eps * v) break;
            }
            for (int i = m + 2; i <= nn; ++i) {
                a[i][i - 2] = 0.0;
                if (i != m + 2) a[i][i - 3] = 0.0;
            }
            for (int k = m; k <= nn - 1; ++k) {
                if (k != m) {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = (k != nn - 1) ? a[k + 2][k - 1] : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0) continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                double s = std::copysign(std::sqrt(p * p + q * q + r * r),
                                         p == 0.0 ? 1.0 : p);
                if (k == m) {
                    if (l != m) a[k][k - 1] = -a[k][k - 1];
                } else {
                    a[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                y = q / s;
                double z = r / s;
                q /= p;
                r /= p;
                for (int j = k; j <= nn; ++j) {
                    double pp = a[k][j] + q * a[k + 1][j];
                    if (k != nn - 1) {
                        pp += r * a[k + 2][j];
                        a[k + 2][j] -= pp * z;
                    }
                    a[k + 1][j] -= pp * y;
                    a[k][j] -= pp * x;
                }
                const int mmin = (nn < k + 3) ? nn : k + 3;
                for (int i = l; i <= mmin; ++i) {
                    double pp = x * a[i][k] + y * a[i][k + 1];
                    if (k != nn - 1) {
                        pp += z * a[i][k + 2];
                        a[i][k + 2] -= pp * r;
                    }
                    a[i][k + 1] -= pp * q;
                    a[i][k] -= pp;
                }
            }
        }
    }
    return eig;
}

}  // namespace detail

// All complex roots of p(x) = c[0] + c[1] x + ... via companion eigenvalues.
inline std::vector<std::complex<double>> poly_roots_companion(std::vector<double> c) {
    // trim negligible leading coefficients
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) return {};
    while (c.size() > 1 && std::abs(c.back()) <= 1e-14 * cmax) c.pop_back();

    std::vector<std::complex<double>> roots;
    // deflate roots at zero
    std::size_t z = 0;
    while (z < c.size() && c[z] == 0.0) ++z;
    for (std::size_t i = 0; i < z; ++i) roots.emplace_back(0.0, 0.0);
    c.erase(c.begin(), c.begin() + z);

    const std::size_t deg = c.size() - 1;
    if (deg == 0) return roots;
    if (deg == 1) {
        roots.emplace_back(-c[0] / c[1], 0.0);
        return roots;
    }

    std::vector<std::vector<double>> a(deg, std::vector<double>(deg, 0.0));
    for (std::size_t j = 0; j < deg; ++j) a[0][j] = -c[deg - 1 - j] / c[deg];
    for (std::size_t i = 1; i < deg; ++i) a[i][i - 1] = 1.0;
    detail::balance_matrix(a);
    auto eig = detail::hessenberg_eigenvalues(std::move(a));
    roots.insert(roots.end(), eig.begin(), eig.end());
    return roots;
}

// Real roots of a general polynomial: companion eigenvalues, keep nearly-real
// ones, Newton-polish, drop roots whose backward error is large, sort, dedupe.
inline std::vector<double> poly_real_roots(const std::vector<double>& c) {
    auto all = poly_roots_companion(c);
    std::vector<double> real;
    for (const auto& r : all) {
        if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r.real()))) continue;
        double x = r.real();
        for (int it = 0; it < 3; ++it) {
            const double f = poly_eval(c, x);
            const double df = poly_eval_derivative(c, x);
            if (df == 0.0) break;
            const double step = f / df;
            if (!std::isfinite(step) || std::abs(step) > 1.0 + std::abs(x)) break;
            x -= step;
        }
        const double back_err = std::abs(poly_eval(c, x));
        const double scale = poly_term_scale(c, x);
        if (scale > 0.0 && back_err > 1e-6 * scale) continue;
        real.push_back(x);
    }
    std::sort(real.begin(), real.end());
    std::vector<double> out;
    for (double r : real) {
        if (out.empty() || std::abs(r - out.back()) > detail::root_merge_rel * std::max(1.0, std::abs(r)))
            out.push_back(r);
    }
    return out;
}

}  // namespace gchtw
