#pragma once

#include <array>

namespace wr::expansion {

inline constexpr int kMaxOrder = 6;

/// Price and its derivatives of orders 0..6 in the spot (or log-spot) variable.
struct KernelDerivatives {
    std::array<double, kMaxOrder + 1> d{};
    double value() const { return d[0]; }
};

double norm_pdf(double x);
double norm_cdf(double x);
/// Probabilists' Hermite polynomial He_n.
double hermite(int n, double x);

/// Black-Scholes call in the log-forward h with total variance v and strike factor e^k:
/// BS(h, v) = e^h N(d1) - e^k N(d2).
KernelDerivatives bs_kernel(double h, double v, double k);

/// Derivatives of (d^2/dh^2 - d/dh) BS in h, orders 0..4; this is also 2 dBS/dv.
std::array<double, 5> bs_vega_tower(double h, double v, double k);

/// Bachelier call BH(s, v) = (s-K) N(d) + sqrt(v) n(d), d = (s-K)/sqrt(v).
KernelDerivatives bachelier_kernel(double s, double v, double K);

enum class VolConvention { normal, lognormal };

double bachelier_call(double forward, double K, double total_var);
double black_call(double forward, double K, double total_var);

/// Volatility reproducing an undiscounted call price over expiry T.
double implied_vol(double price, double forward, double K, double T, VolConvention convention);

}  // namespace wr::expansion
