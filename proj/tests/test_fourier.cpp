#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wr/expansion.hpp"
#include "wr/fourier.hpp"

using namespace wr;
using namespace wr::fourier;

namespace {

FourierConfig grid(double limit, double step) {
    FourierConfig c;
    c.upper_limit = limit;
    c.step = step;
    return c;
}

double price(const ModelParams& p, const CapletSpec& spec, const FourierConfig& c, Measure m) {
    return carr_madan_caplet(0.0, spec, c, m, p, p.x0, p.y0).quote.price;
}

}  // namespace

TEST_CASE("FourierConfig validation") {
    CHECK(FourierConfig{}.panels() == 3000);
    CHECK_THROWS_AS(grid(9.0, 1.0).panels(), config_error);
    CHECK_THROWS_AS(grid(10.0, 0.3).panels(), config_error);
    FourierConfig bad;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.panels(), config_error);
    CHECK(parse_measure("T") == Measure::T_forward);
    CHECK(parse_measure("Tdelta") == Measure::Tdelta_forward);
    CHECK_THROWS(parse_measure("U"));
}

TEST_CASE("change of variable") {
    const ModelParams p = test::two_factor();
    const CapletSpec spec{1.0, 0.5, 0.01};
    const auto bonds = riccati::bond_coeffs(p, 1.5);
    const auto cov = change_of_variable(spec, bonds);
    CHECK(cov.dA == -bonds.A(0.5));
    CHECK((cov.dB + bonds.B(0.5)).norm() == 0.0);
    CHECK((cov.dD + bonds.D(0.5)).norm() == 0.0);
}

TEST_CASE("characteristic function properties") {
    const ModelParams p = test::two_factor();
    const CapletSpec spec{1.0, 0.5, 0.01};
    for (Measure m : {Measure::Tdelta_forward, Measure::T_forward}) {
        const CapletTransform tr(0.0, spec, m, p, p.x0, p.y0);
        CHECK(tr.cf(0.0) == cplx(1.0));
        for (double u : {0.5, 7.0, 60.0, 400.0, 2000.0}) {
            const cplx a = tr.cf(u), b = tr.cf(-u);
            CHECK(std::abs(a - std::conj(b)) < 1e-12);
            CHECK(std::abs(a) <= 1.0);
        }
    }
}

TEST_CASE("eps = 0 gives a Gaussian characteristic function") {
    const ModelParams lgm = test::frozen_lgm();
    const CapletSpec spec{1.0, 0.5, 0.01};
    const double T = spec.T, U = T + spec.delta;
    // Y_T under the U-forward measure: OU mean shifted by int e^{-kappa(T-s)} V B(U-s) ds
    const Mat V = lgm.c * lgm.x0 * lgm.c.transpose();
    Mat cov(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double s = lgm.kappa(i) + lgm.kappa(j);
            cov(i, j) = V(i, j) * (1.0 - std::exp(-s * T)) / s;
        }
    const Vec b = lgm_support_B(spec.delta, lgm.kappa);
    const double var = b.dot(cov * b);
    // E^U[e^H] = P_T / P_U fixes the mean
    const double h = std::log(lgm_zc_price(0.0, T, lgm.y0, lgm, {1.0 / 160.0}) /
                              lgm_zc_price(0.0, U, lgm.y0, lgm, {1.0 / 160.0}));
    const double mu = h - 0.5 * var;
    const CapletTransform tr(0.0, spec, Measure::Tdelta_forward, lgm, lgm.x0, lgm.y0);
    for (double u : {0.3, 5.0, 40.0, 150.0}) {
        const cplx expect = std::exp(cplx(-0.5 * u * u * var, u * mu));
        CHECK(std::abs(tr.cf(u) - expect) < 1e-8);
    }
}

TEST_CASE("Carr-Madan against Black at eps = 0") {
    const ModelParams lgm = test::frozen_lgm();
    const CapletSpec spec{1.0, 0.5, 0.01};
    const auto bonds = riccati::bond_coeffs(lgm, 1.5);
    const double black = expansion::caplet_price_expanded(0.0, spec, lgm.x0, lgm.y0, lgm, bonds).price();
    for (Measure m : {Measure::Tdelta_forward, Measure::T_forward})
        CHECK(price(lgm, spec, grid(1500.0, 0.125), m) == doctest::Approx(black).epsilon(1e-6));

    // The default truncation at 375 leaves most of the damped integrand's tail out: the
    // integrand decays like exp(-u^2 var / 2) with var ~ 2e-5. Pinned as a regression value.
    const double truncated = price(lgm, spec, FourierConfig{}, Measure::Tdelta_forward);
    CHECK(truncated / black - 1.0 == doctest::Approx(2.31e-2).epsilon(0.02));
}

TEST_CASE("Carr-Madan on the reference parameter set") {
    const ModelParams p = test::two_factor();
    const CapletSpec spec{1.0, 0.5, 0.01};

    const double base = price(p, spec, grid(750.0, 0.125), Measure::Tdelta_forward);
    const double refined = price(p, spec, grid(1500.0, 0.0625), Measure::Tdelta_forward);
    CHECK(std::abs(base - refined) < 0.05e-4);

    FourierConfig sym = grid(750.0, 0.125);
    sym.symmetric = true;
    const auto r = carr_madan_caplet(0.0, spec, sym, Measure::Tdelta_forward, p, p.x0, p.y0);
    CHECK(r.imag_residual < 1e-10 * r.damped_call);
    CHECK(r.quote.price == base);

    // both measures price the same contract; the gap closes as the grid refines
    const double gap_coarse = std::abs(price(p, spec, FourierConfig{}, Measure::T_forward) -
                                       price(p, spec, FourierConfig{}, Measure::Tdelta_forward));
    const double gap_fine = std::abs(price(p, spec, grid(1500.0, 0.0625), Measure::T_forward) - refined);
    CHECK(gap_fine < gap_coarse);

    double prev = 1e300;
    for (double K : {0.0, 0.005, 0.01, 0.015, 0.02}) {
        const double v = price(p, {1.0, 0.5, K}, grid(750.0, 0.25), Measure::Tdelta_forward);
        CHECK(v < prev);
        prev = v;
    }
}
