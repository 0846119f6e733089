#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "wr/types.hpp"

namespace wr::ode {

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 500000;
    // Integration stops once norm(y) exceeds this.
    double blow_up_norm = 1e8;
};

/// Accepted steps of an adaptive run with cubic Hermite dense output.
template <class Scalar>
struct Trajectory {
    using State = VecT<Scalar>;

    std::vector<double> t;
    std::vector<State> y;
    std::vector<State> dy;
    bool blew_up = false;
    double blow_up_time = std::numeric_limits<double>::infinity();

    double start() const { return t.front(); }
    double end() const { return t.back(); }

    State at(double s) const {
        if (s <= t.front()) return y.front();
        if (s >= t.back()) {
            if (s > t.back() + 1e-12 * std::max(1.0, std::abs(t.back())))
                throw std::out_of_range("dense output requested beyond integrated range");
            return y.back();
        }
        const auto it = std::upper_bound(t.begin(), t.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
        const double h = t[i + 1] - t[i];
        const double u = (s - t[i]) / h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
        const double h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u);
        const double h11 = u * u * (u - 1);
        return h00 * y[i] + (h10 * h) * dy[i] + h01 * y[i + 1] + (h11 * h) * dy[i + 1];
    }
};

/// Dormand-Prince 5(4) with FSAL and standard step control.
/// rhs(t, y) -> dy/dt; project(y) is applied to every accepted state; norm(y) drives blow-up detection.
template <class Scalar, class Rhs, class Project, class Norm>
Trajectory<Scalar> integrate(Rhs&& rhs, VecT<Scalar> y0, double t0, double t1, const Options& opt,
                             Project&& project, Norm&& norm) {
    using State = VecT<Scalar>;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory<Scalar> out;
    project(y0);
    State k1 = rhs(t0, y0);
    out.t.push_back(t0);
    out.y.push_back(y0);
    out.dy.push_back(k1);
    const double span = t1 - t0;
    if (span <= 0.0) return out;

    auto err_norm = [&](const State& err, const State& ya, const State& yb) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double r = std::abs(err[i]) / sc;
            acc += r * r;
        }
        return std::sqrt(acc / std::max<Eigen::Index>(1, err.size()));
    };

    // initial step from the first derivative scale
    double h;
    {
        const double d0 = err_norm(y0, y0, y0);
        const double d1 = err_norm(k1, y0, y0);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min({h, span, opt.max_step});
        h = std::max(h, 1e-12 * span);
    }

    double t = t0;
    State y = y0;
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw std::runtime_error("ode: step budget exhausted");
        bool last = false;
        if (t + h >= t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
            h = t1 - t;
            last = true;
        }
        const State k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        const State k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const State k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const State k6 =
            rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        State ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const State k7 = rhs(t + h, ynew);
        const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = err_norm(err, y, ynew);
        if (!std::isfinite(en)) {
            h *= 0.25;
            if (h < 1e-14 * span) {
                out.blew_up = true;
                out.blow_up_time = t;
                return out;
            }
            continue;
        }
        if (en <= 1.0) {
            t = last ? t1 : t + h;
            project(ynew);
            y = std::move(ynew);
            k1 = k7;
            out.t.push_back(t);
            out.y.push_back(y);
            out.dy.push_back(k1);
            if (norm(y) > opt.blow_up_norm) {
                out.blew_up = true;
                out.blow_up_time = t;
                return out;
            }
            const double fac = (en == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            h = std::min(h * fac, opt.max_step);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            if (h < 1e-14 * span) {
                out.blew_up = true;
                out.blow_up_time = t;
                return out;
            }
        }
    }
    return out;
}

}  // namespace wr::ode
