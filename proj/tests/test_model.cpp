#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wr/riccati.hpp"

using namespace wr;

TEST_CASE("validate_params on the reference parameter set") {
    const ModelParams p = test::two_factor();
    const auto r = validate_params(p);
    CHECK(r.stationarity_ok);
    CHECK(r.weak_solution_ok);
    const auto again = validate_params(p);
    CHECK(again.stationarity_ok == r.stationarity_ok);
    CHECK(again.bond_condition_ok == r.bond_condition_ok);
    CHECK(again.messages == r.messages);
}

TEST_CASE("validate_params rejects bad inputs") {
    ModelParams p = test::two_factor();
    SUBCASE("correlation norm above one") {
        p.rho = Vec::Constant(2, 0.9);
        CHECK_THROWS_AS(validate_params(p), structural_error);
    }
    SUBCASE("negative drift matrix") {
        p.omega = -Mat::Identity(2, 2);
        CHECK_FALSE(validate_params(p).weak_solution_ok);
    }
    SUBCASE("dimension mismatch") {
        p.c = Mat::Identity(3, 2);
        CHECK_THROWS_AS(validate_params(p), structural_error);
    }
    SUBCASE("asymmetric x0") {
        p.x0(0, 1) += 1e-5;
        CHECK_THROWS_AS(validate_params(p), structural_error);
    }
}

TEST_CASE("strong solution implies weak solution") {
    ModelParams p = test::two_factor();
    for (double eps : {0.0, 0.0015, 0.01, 0.1, 1.0}) {
        p.epsilon = eps;
        const auto r = validate_params(p);
        if (r.strong_solution_ok) CHECK(r.weak_solution_ok);
    }
}

TEST_CASE("lgm_support_B") {
    Vec k1 = Vec::Constant(1, 1.0);
    CHECK(lgm_support_B(0.0, k1).norm() == 0.0);
    CHECK(lgm_support_B(1.0, k1)(0) == doctest::Approx(-0.6321205588285577).epsilon(1e-14));
    Vec k2(2);
    k2 << 0.1, 1.0;
    const Vec lim = lgm_support_B(1e6, k2);
    CHECK(std::abs(lim(0) + 10.0) < 1e-12);
    CHECK(std::abs(lim(1) + 1.0) < 1e-12);
    Vec prev = lgm_support_B(0.0, k2);
    for (double tau = 0.25; tau <= 20.0; tau += 0.25) {
        const Vec b = lgm_support_B(tau, k2);
        for (int i = 0; i < 2; ++i) {
            CHECK(b(i) < prev(i));
            CHECK(b(i) >= -1.0 / k2(i));
        }
        prev = b;
    }
}

TEST_CASE("lgm_zc_price") {
    ModelParams p = test::scalar_params(1.0, 0.0);
    p.y0(0) = 0.01;
    CHECK(lgm_zc_price(2.0, 2.0, p.y0, p) == 1.0);
    // V = 0: exp(B(1) y)
    CHECK(lgm_zc_price(0.0, 1.0, p.y0, p) == doctest::Approx(std::exp(-0.6321205588285577 * 0.01)).epsilon(1e-13));

    const ModelParams lgm = test::frozen_lgm();
    const auto bonds = riccati::bond_coeffs(lgm, 12.0);
    for (double T : {0.5, 1.0, 5.0, 10.0}) {
        // Simpson at 1/20 leaves ~1e-10 on the kappa theta term; 1/80 is well below the target
        const double closed = lgm_zc_price(0.0, T, lgm.y0, lgm, {1.0 / 80.0});
        const double affine = riccati::zc_price(0.0, T, lgm.x0, lgm.y0, bonds);
        CHECK(std::abs(closed - affine) < 1e-10);
    }
}

TEST_CASE("lgm_caplet_lognormal_var") {
    Vec k(1);
    k << 0.7;
    CHECK(lgm_caplet_lognormal_var(0.0, 2.0, 0.5, Mat::Zero(1, 1), k) == 0.0);

    // one factor: V m_11(T, delta) T
    const Mat V = Mat::Constant(1, 1, 3e-4);
    for (double T : {0.5, 1.0, 3.0}) {
        const double direct = lgm_caplet_lognormal_var(0.0, T, 0.5, V, k);
        CHECK(direct == doctest::Approx(V(0, 0) * support_weight(0, 0, T, 0.5, k) * T).epsilon(1e-9));
    }

    const ModelParams p = test::two_factor();
    const Mat Vp = p.c * test::ref_x_inf() * p.c.transpose();
    const double coarse = lgm_caplet_lognormal_var(0.0, 1.0, 0.5, Vp, p.kappa);
    const double fine = lgm_caplet_lognormal_var(0.0, 1.0, 0.5, Vp, p.kappa, {1.0 / 40.0});
    CHECK(std::abs(coarse - fine) < 1e-8);

    double prev = 0.0;
    for (double T = 0.25; T <= 10.0; T += 0.25) {
        const double v = lgm_caplet_lognormal_var(0.0, T, 0.5, Vp, p.kappa);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("support_weight") {
    Vec k(2);
    k << 0.01, 1.0;
    CHECK(support_weight(0, 1, 0.25, 0.5, k) == support_weight(1, 0, 0.25, 0.5, k));
    Vec one = Vec::Constant(1, 1.0);
    CHECK(support_weight(0, 0, 1e-9, 60.0, one) == doctest::Approx(1.0).epsilon(1e-8));
    // monotone in kappa at fixed tau, delta
    double prev = 1e300;
    for (double kap : {0.01, 0.1, 0.5, 1.0, 2.0}) {
        Vec kk = Vec::Constant(1, kap);
        const double m = support_weight(0, 0, 0.25, 0.5, kk);
        CHECK(m < prev);
        prev = m;
    }
}

namespace {

DiscountCurve flat_curve(double r, double horizon) {
    std::vector<double> t, p;
    for (double s = 0.0; s <= horizon + 1e-12; s += 0.25) {
        t.push_back(s);
        p.push_back(std::exp(-r * s));
    }
    return DiscountCurve(t, p);
}

DiscountCurve model_curve(const ModelParams& p, double horizon) {
    const auto bonds = riccati::bond_coeffs(p, horizon);
    std::vector<double> t, q;
    for (double s = 0.0; s <= horizon + 1e-12; s += 0.5) {
        t.push_back(s);
        q.push_back(riccati::zc_price(0.0, s, p.x0, p.y0, bonds));
    }
    return DiscountCurve(t, q);
}

}  // namespace

TEST_CASE("forward rates and swap weights") {
    const DiscountCurve flat = flat_curve(0.01, 10.0);
    CHECK(forward_libor(flat, 1.0, 0.5) == doctest::Approx((std::exp(0.005) - 1.0) / 0.5).epsilon(1e-12));
    CHECK(forward_libor(DiscountCurve({0.0, 1.0, 1.5}, {1.0, 0.99, 0.99}), 1.0, 0.5) == 0.0);
    CHECK_THROWS(forward_libor(flat, 9.8, 0.5));

    const SwapQuote sq = forward_swap(flat, 2.0, 10, 0.5);
    double sum = 0.0;
    for (double w : sq.weights) {
        CHECK(w > 0.0);
        CHECK(w < 1.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) < 1e-14);

    const DiscountCurve model = model_curve(test::two_factor(), 8.0);
    CHECK(std::abs(forward_libor(model, 1.0, 1.0) - 0.0102) < 2e-4);
    CHECK(std::abs(forward_swap(model, 2.0, 10, 0.5).rate - 0.013) < 2e-4);
}

TEST_CASE("lgm_swaption_normal_var") {
    const ModelParams p = test::two_factor();
    const DiscountCurve curve = flat_curve(0.01, 10.0);
    CHECK(lgm_swaption_normal_var(0.0, 2.0, 4, 0.5, Mat::Zero(2, 2), p.kappa, curve) == 0.0);

    // m = 1: B^S = (P_T B(T-u) - P_U B(U-u)) / (delta P_U) - S0 B(U-u), U = T + delta
    const Mat V = p.c * test::ref_x_inf() * p.c.transpose();
    const double T = 1.5, delta = 0.5;
    const SwapQuote sq = forward_swap(curve, T, 1, delta);
    const double ann = delta * curve.price(T + delta);
    const double w0 = curve.price(T) / ann, w1 = curve.price(T + delta) / ann;
    CHECK(sq.rate == doctest::Approx(forward_libor(curve, T, delta)).epsilon(1e-13));
    const int n = 4000;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double u = T * i / n;
        const Vec bs = w0 * lgm_support_B(T - u, p.kappa) - w1 * lgm_support_B(T + delta - u, p.kappa) -
                       sq.rate * lgm_support_B(T + delta - u, p.kappa);
        const double f = bs.dot(V * bs);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    acc *= T / n;
    CHECK(lgm_swaption_normal_var(0.0, T, 1, delta, V, p.kappa, curve) == doctest::Approx(acc).epsilon(1e-6));
}
