#include "wr/kernels.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wr::expansion {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double hermite(int n, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::array<double, 5> bs_vega_tower(double h, double v, double k) {
    if (v < 0.0) throw std::domain_error("kernel variance must be nonnegative");
    std::array<double, 5> g{};
    if (v == 0.0) return g;
    const double sv = std::sqrt(v);
    const double d2 = (h - k) / sv - 0.5 * sv;
    const double base = std::exp(k) * norm_pdf(d2);
    double scale = 1.0 / sv;
    for (int j = 0; j < 5; ++j) {
        g[static_cast<std::size_t>(j)] = base * scale * ((j % 2) ? -1.0 : 1.0) * hermite(j, d2);
        scale /= sv;
    }
    return g;
}

KernelDerivatives bs_kernel(double h, double v, double k) {
    if (v < 0.0) throw std::domain_error("kernel variance must be nonnegative");
    KernelDerivatives out;
    const double strike = std::exp(k);
    if (v == 0.0) {
        out.d[0] = std::max(std::exp(h) - strike, 0.0);
        return out;
    }
    const double sv = std::sqrt(v);
    const double d1 = (h - k) / sv + 0.5 * sv;
    const double d2 = d1 - sv;
    const double delta = std::exp(h) * norm_cdf(d1);
    out.d[0] = delta - strike * norm_cdf(d2);
    out.d[1] = delta;
    // higher h-derivatives: d^m BS = e^h N(d1) + sum_{j<m-1} d^j G with G = strike n(d2)/sqrt(v)
    double acc = delta;
    double scale = 1.0 / sv;
    const double base = strike * norm_pdf(d2);
    for (int m = 2; m <= kMaxOrder; ++m) {
        const int j = m - 2;
        acc += base * scale * ((j % 2) ? -1.0 : 1.0) * hermite(j, d2);
        scale /= sv;
        out.d[static_cast<std::size_t>(m)] = acc;
    }
    return out;
}

KernelDerivatives bachelier_kernel(double s, double v, double K) {
    if (v < 0.0) throw std::domain_error("kernel variance must be nonnegative");
    KernelDerivatives out;
    if (v == 0.0) {
        out.d[0] = std::max(s - K, 0.0);
        return out;
    }
    const double sv = std::sqrt(v);
    const double x = (s - K) / sv;
    const double pdf = norm_pdf(x);
    out.d[0] = (s - K) * norm_cdf(x) + sv * pdf;
    out.d[1] = norm_cdf(x);
    double scale = 1.0 / sv;
    for (int m = 2; m <= kMaxOrder; ++m) {
        const int j = m - 2;
        out.d[static_cast<std::size_t>(m)] = ((j % 2) ? -1.0 : 1.0) * hermite(j, x) * pdf * scale;
        scale /= sv;
    }
    return out;
}

double bachelier_call(double forward, double K, double total_var) {
    return bachelier_kernel(forward, total_var, K).value();
}

double black_call(double forward, double K, double total_var) {
    if (forward <= 0.0 || K <= 0.0) throw std::domain_error("black_call needs positive forward and strike");
    return forward * bs_kernel(0.0, total_var, std::log(K / forward)).value();
}

double implied_vol(double price, double forward, double K, double T, VolConvention convention) {
    if (!(T > 0.0)) throw std::domain_error("implied_vol: expiry must be positive");
    const double intrinsic = std::max(forward - K, 0.0);
    auto fail = [&](const char* bound) {
        std::ostringstream os;
        os << "implied_vol: price " << price << " violates the " << bound;
        throw std::domain_error(os.str());
    };
    if (!(price > intrinsic)) fail("lower bound (intrinsic value)");

    auto model = [&](double vol) {
        const double var = vol * vol * T;
        return convention == VolConvention::normal ? bachelier_call(forward, K, var)
                                                   : black_call(forward, K, var);
    };
    auto vega = [&](double vol) {
        const double sv = vol * std::sqrt(T);
        if (convention == VolConvention::normal) return std::sqrt(T) * norm_pdf((forward - K) / sv);
        const double d1 = std::log(forward / K) / sv + 0.5 * sv;
        return forward * std::sqrt(T) * norm_pdf(d1);
    };

    double lo = 0.0, hi;
    if (convention == VolConvention::lognormal) {
        if (forward <= 0.0 || K <= 0.0) throw std::domain_error("implied_vol: lognormal quote needs positive rates");
        if (!(price < forward)) fail("upper bound (forward)");
        hi = 1.0;
        while (model(hi) < price) hi *= 2.0;
    } else {
        hi = std::max(std::abs(forward), std::abs(K)) + 1e-4;
        while (model(hi) < price) hi *= 2.0;
    }
    double vol = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double diff = model(vol) - price;
        if (diff > 0.0)
            hi = vol;
        else
            lo = vol;
        const double vg = vega(vol);
        double next = (vg > 0.0) ? vol - diff / vg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - vol) <= 1e-15 * std::max(1.0, vol) || hi - lo <= 1e-16 * hi) {
            vol = next;
            break;
        }
        vol = next;
    }
    return vol;
}

}  // namespace wr::expansion
