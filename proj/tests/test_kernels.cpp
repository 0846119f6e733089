#include <doctest.h>

#include <cmath>
#include <functional>
#include <stdexcept>

#include "wr/kernels.hpp"

using namespace wr::expansion;

namespace {

// Fourth-order central difference of f at x.
double fd(const std::function<double(double)>& f, double x, double e) {
    return (-f(x + 2 * e) + 8 * f(x + e) - 8 * f(x - e) + f(x - 2 * e)) / (12 * e);
}

template <class Kernel>
void check_tower(Kernel kernel, double x, double v) {
    const auto tower = kernel(x, v);
    double scale = 0.0;
    for (double d : tower.d) scale = std::max(scale, std::abs(d));
    const double e = 1e-3 * std::sqrt(v);
    for (int n = 1; n <= kMaxOrder; ++n) {
        const double num = fd([&](double z) { return kernel(z, v).d[static_cast<std::size_t>(n - 1)]; }, x, e);
        const double ref = tower.d[static_cast<std::size_t>(n)];
        INFO("order " << n << " at x=" << x << " v=" << v);
        CHECK(std::abs(num - ref) <= 1e-6 * std::max(std::abs(ref), 1e-3 * scale));
    }
}

}  // namespace

TEST_CASE("hermite polynomials") {
    const double x = 0.7;
    CHECK(hermite(0, x) == 1.0);
    CHECK(hermite(1, x) == x);
    CHECK(hermite(2, x) == doctest::Approx(x * x - 1));
    CHECK(hermite(3, x) == doctest::Approx(x * x * x - 3 * x));
    CHECK(hermite(4, x) == doctest::Approx(std::pow(x, 4) - 6 * x * x + 3));
}

TEST_CASE("Black-Scholes kernel tower matches finite differences") {
    const double k = std::log(1.005);
    for (double dh : {-0.2, -0.1, 0.0, 0.1, 0.2})
        for (double v : {0.005, 0.01, 0.02, 0.04, 0.08})
            check_tower([k](double h, double var) { return bs_kernel(h, var, k); }, k + dh, v);
}

TEST_CASE("Bachelier kernel tower matches finite differences") {
    const double K = 0.01;
    for (double ds : {-0.01, -0.005, 0.0, 0.005, 0.01})
        for (double v : {1e-6, 4e-6, 1e-5, 4e-5, 1e-4})
            check_tower([K](double s, double var) { return bachelier_kernel(s, var, K); }, K + ds, v);
}

TEST_CASE("vega tower is twice the variance derivative") {
    const double k = std::log(1.005);
    for (double h : {k - 0.1, k, k + 0.05})
        for (double v : {0.01, 0.03}) {
            const auto g = bs_vega_tower(h, v, k);
            const double dv = fd([&](double z) { return bs_kernel(h, z, k).value(); }, v, 1e-4 * v);
            CHECK(g[0] == doctest::Approx(2.0 * dv).epsilon(1e-7));
            for (int j = 1; j < 5; ++j) {
                const double num = fd([&](double z) { return bs_vega_tower(z, v, k)[static_cast<std::size_t>(j - 1)]; }, h,
                                      1e-3 * std::sqrt(v));
                CHECK(num == doctest::Approx(g[static_cast<std::size_t>(j)]).epsilon(1e-6).scale(std::abs(g[0])));
            }
        }
}

TEST_CASE("kernel limits") {
    const double K = 0.013;
    CHECK(bachelier_kernel(K, 4e-5, K).value() == doctest::Approx(std::sqrt(4e-5 / (2 * M_PI))).epsilon(1e-14));
    const double k = std::log(1.005);
    for (double h : {k - 0.01, k + 0.01})
        CHECK(bs_kernel(h, 1e-14, k).value() == doctest::Approx(std::max(std::exp(h) - std::exp(k), 0.0)).epsilon(1e-12));
    CHECK(bs_kernel(k + 0.01, 0.0, k).d[2] == 0.0);
    CHECK_THROWS_AS(bs_kernel(0.0, -1e-9, k), std::domain_error);
    CHECK_THROWS_AS(bachelier_kernel(0.0, -1e-9, K), std::domain_error);
}

TEST_CASE("implied_vol") {
    const double F = 0.012, K = 0.01, T = 1.5;
    const double sigma_n = 0.0095;
    const double price = bachelier_call(F, K, sigma_n * sigma_n * T);
    CHECK(implied_vol(price, F, K, T, VolConvention::normal) == doctest::Approx(sigma_n).epsilon(1e-10));
    for (double s : {0.05, 0.4, 1.2, 2.5}) {
        const double p = black_call(F, K, s * s * T);
        const double iv = implied_vol(p, F, K, T, VolConvention::lognormal);
        CHECK(std::abs(black_call(F, K, iv * iv * T) - p) <= 1e-12 * F);
    }
    CHECK_THROWS_AS(implied_vol(0.5 * (F - K), F, K, T, VolConvention::normal), std::domain_error);
    CHECK_THROWS_AS(implied_vol(F, F, K, T, VolConvention::lognormal), std::domain_error);
    CHECK_THROWS_AS(implied_vol(price, F, K, 0.0, VolConvention::normal), std::domain_error);
}
