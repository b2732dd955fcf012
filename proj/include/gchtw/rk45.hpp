#pragma once

// Embedded Dormand-Prince 5(4) stepper for autonomous planar systems, with
// cubic Hermite interpolation between accepted steps. Conservation of the
// first integral is the accuracy contract checked by the tests.

#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include "gchtw/equations.hpp"

namespace gchtw {

struct RK45Step {
    double t0 = 0.0, t1 = 0.0;
    Vec2 y0{}, y1{};
    Vec2 f0{}, f1{};

    // cubic Hermite interpolant on [t0, t1]
    Vec2 interpolate(double t) const {
        const double h = t1 - t0;
        if (h == 0.0) return y1;
        const double s = (t - t0) / h;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        Vec2 out;
        for (int i = 0; i < 2; ++i)
            out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
        return out;
    }
};

class RK45 {
  public:
    using Field = std::function<Vec2(const Vec2&)>;

    RK45(Field f, Vec2 y0, double t0, double tol)
        : f_(std::move(f)), t_(t0), y_(y0), atol_(tol), rtol_(tol) {
        fy_ = f_(y_);
        h_ = initial_step();
    }

    double time() const { return t_; }
    const Vec2& state() const { return y_; }
    const Vec2& derivative() const { return fy_; }
    const RK45Step& last_step() const { return last_; }

    void set_max_step(double hmax) { hmax_ = hmax; }

    // Advance one accepted step in the given direction (+1 forward, -1 backward).
    // Returns false if the step size underflows.
    bool step(double direction) {
        const double dir = direction >= 0.0 ? 1.0 : -1.0;
        double h = std::min(h_, hmax_) * dir;
        for (int attempt = 0; attempt < 64; ++attempt) {
            Vec2 y_new, err;
            Vec2 f_new = evaluate(h, y_new, err);
            double en = error_norm(err, y_, y_new);
            if (en <= 1.0) {
                last_ = {t_, t_ + h, y_, y_new, fy_, f_new};
                t_ += h;
                y_ = y_new;
                fy_ = f_new;
                const double factor =
                    std::clamp(0.9 * std::pow(en > 0.0 ? en : 1e-10, -0.2), 0.2, 5.0);
                h_ = std::min(std::abs(h) * factor, hmax_);
                return true;
            }
            const double factor = std::clamp(0.9 * std::pow(en, -0.25), 0.1, 0.9);
            h *= factor;
            if (std::abs(h) < 1e-15 * (1.0 + std::abs(t_))) return false;
        }
        return false;
    }

  private:
    double initial_step() const {
        double scale = 0.0;
        for (int i = 0; i < 2; ++i)
            scale = std::max(scale, std::abs(fy_[i]) / (atol_ + rtol_ * std::abs(y_[i])));
        double h = (scale > 0.0) ? 0.01 / scale : 1e-3;
        return std::min(h, hmax_);
    }

    Vec2 evaluate(double h, Vec2& y_new, Vec2& err) const {
        static constexpr double a21 = 1.0 / 5.0;
        static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
        static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
        static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                                a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
        static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                                a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                                a65 = -5103.0 / 18656.0;
        static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                                b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
        static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0,
                                e3 = 500.0 / 1113.0 - 7571.0 / 16695.0,
                                e4 = 125.0 / 192.0 - 393.0 / 640.0,
                                e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0,
                                e6 = 11.0 / 84.0 - 187.0 / 2100.0, e7 = -1.0 / 40.0;

        const Vec2& k1 = fy_;
        Vec2 s;
        for (int i = 0; i < 2; ++i) s[i] = y_[i] + h * a21 * k1[i];
        Vec2 k2 = f_(s);
        for (int i = 0; i < 2; ++i) s[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
        Vec2 k3 = f_(s);
        for (int i = 0; i < 2; ++i)
            s[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        Vec2 k4 = f_(s);
        for (int i = 0; i < 2; ++i)
            s[i] = y_[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        Vec2 k5 = f_(s);
        for (int i = 0; i < 2; ++i)
            s[i] = y_[i] +
                   h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        Vec2 k6 = f_(s);
        for (int i = 0; i < 2; ++i)
            y_new[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                    b6 * k6[i]);
        Vec2 k7 = f_(y_new);
        for (int i = 0; i < 2; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        return k7;  // FSAL
    }

    double error_norm(const Vec2& err, const Vec2& y_old, const Vec2& y_new) const {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc =
                atol_ + rtol_ * std::max(std::abs(y_old[i]), std::abs(y_new[i]));
            const double e = err[i] / sc;
            s += e * e;
        }
        return std::sqrt(0.5 * s);
    }

    Field f_;
    double t_;
    Vec2 y_;
    Vec2 fy_;
    double atol_, rtol_;
    double h_ = 1e-3;
    double hmax_ = std::numeric_limits<double>::infinity();
    RK45Step last_;
};

}  // namespace gchtw
