#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "wr/linalg.hpp"
#include "wr/riccati.hpp"

using namespace wr;
using namespace wr::riccati;

namespace {

LaplaceQuery<double> bond_query(const ModelParams& p) {
    auto q = LaplaceQuery<double>::zero(p.dims);
    q.Lambda_bar = -Vec::Ones(p.dims.p);
    q.Gamma_bar = -p.gamma;
    return q;
}

// Y law under constant covariance V: mean and covariance at T from y, with an optional
// deterministic drift term integrated by fine quadrature.
struct Gaussian {
    Vec mean;
    Mat cov;
};

Gaussian ou_law(const ModelParams& p, double T, const Vec& y, double U = -1.0) {
    const Mat V = p.c * p.x0 * p.c.transpose();
    const int np = p.dims.p;
    Gaussian g{Vec(np), Mat(np, np)};
    for (int i = 0; i < np; ++i) {
        const double ki = p.kappa(i);
        g.mean(i) = std::exp(-ki * T) * y(i) + (1.0 - std::exp(-ki * T)) * p.theta(i);
        for (int j = 0; j < np; ++j) {
            const double s = ki + p.kappa(j);
            g.cov(i, j) = V(i, j) * (1.0 - std::exp(-s * T)) / s;
        }
    }
    if (U >= T) {
        const int n = 20000;
        Vec acc = Vec::Zero(np);
        for (int k = 0; k <= n; ++k) {
            const double s = T * k / n;
            Vec f = V * lgm_support_B(U - s, p.kappa);
            for (int i = 0; i < np; ++i) f(i) *= std::exp(-p.kappa(i) * (T - s));
            acc += (k == 0 || k == n) ? 0.5 * f : f;
        }
        g.mean += acc * (T / n);
    }
    return g;
}

}  // namespace

TEST_CASE("lambda_closed_form") {
    Vec kappa(2), L(2), Lb(2);
    kappa << 0.1, 1.0;
    L << 0.3, -0.7;
    Lb << -1.0, 0.5;
    CHECK((lambda_closed_form<double>(0.0, L, Lb, kappa) - L).norm() == 0.0);
    const Vec nobar = lambda_closed_form<double>(2.0, L, Vec::Zero(2), kappa);
    CHECK(nobar(0) == doctest::Approx(0.3 * std::exp(-0.2)).epsilon(1e-15));
    CHECK(nobar(1) == doctest::Approx(-0.7 * std::exp(-2.0)).epsilon(1e-15));
    Vec one = Vec::Constant(1, 1.0);
    CHECK(lambda_closed_form<double>(1.0, Vec::Zero(1), Vec::Constant(1, -1.0), one)(0) ==
          doctest::Approx(-0.6321205588285577).epsilon(1e-14));
}

TEST_CASE("solve_mrde fixed point") {
    const ModelParams p = test::two_factor();
    const auto sol = solve_mrde(LaplaceQuery<double>::zero(p.dims), p, 5.0);
    for (double t : {0.0, 1.0, 2.5, 5.0}) {
        CHECK(sol.g(t).norm() == 0.0);
        CHECK(sol.eta(t) == 0.0);
    }
}

TEST_CASE("solve_mrde with eps = 0 and b = 0 is a plain integral") {
    ModelParams p = test::two_factor();
    p.epsilon = 0.0;
    p.b.setZero();
    auto q = LaplaceQuery<double>::zero(p.dims);
    q.Lambda << 0.3, -0.2;
    q.Lambda_bar << -1.0, -1.0;
    q.Gamma_bar = -p.gamma;
    const double T = 3.0;
    const auto sol = solve_mrde(q, p, T);
    const int n = 6000;  // Simpson panels
    Mat acc = Mat::Zero(2, 2);
    for (int k = 0; k <= n; ++k) {
        const double s = T * k / n;
        const Vec lam = lambda_closed_form<double>(s, q.Lambda, q.Lambda_bar, p.kappa);
        const Vec cl = p.c.transpose() * lam;
        Mat f = 0.5 * cl * cl.transpose() + q.Gamma_bar;
        acc += (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) * f;
    }
    acc *= T / n / 3.0;
    CHECK((sol.g(T) - acc).norm() < 1e-8);
}

TEST_CASE("solve_mrde matches the scalar Riccati closed form") {
    // g' = a g^2 + beta g + gb with a = 2 eps^2, beta = 2b, lambda^T c = 0 because c = 0
    ModelParams p = test::scalar_params(1.0, 0.2);
    p.c.setZero();
    p.epsilon = 0.5;
    p.b(0, 0) = -0.3;
    p.omega(0, 0) = 0.4;
    auto q = LaplaceQuery<double>::zero(p.dims);
    q.Gamma(0, 0) = 0.1;
    q.Gamma_bar(0, 0) = -0.2;
    const double a = 2 * p.epsilon * p.epsilon, beta = 2 * p.b(0, 0), gb = -0.2;
    const double disc = std::sqrt(beta * beta - 4 * a * gb);
    const double r1 = (-beta + disc) / (2 * a), r2 = (-beta - disc) / (2 * a);
    auto exact = [&](double t) {
        const double c0 = (0.1 - r1) / (0.1 - r2);
        const double e = c0 * std::exp(a * (r1 - r2) * t);
        return (r1 - e * r2) / (1.0 - e);
    };
    const auto sol = solve_mrde(q, p, 4.0);
    for (double t : {0.5, 1.0, 2.0, 4.0}) CHECK(std::abs(sol.g(t)(0, 0) - exact(t)) < 1e-8);
    // eta = omega * int g
    const int n = 8000;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) acc += (k == 0 || k == n ? 0.5 : 1.0) * exact(4.0 * k / n);
    acc *= 4.0 / n;
    CHECK(std::abs(sol.eta(4.0) - 0.4 * acc) < 1e-7);
}

TEST_CASE("solve_mrde keeps g symmetric and reports blow-up") {
    ModelParams p = test::two_factor();
    p.epsilon = 0.3;
    auto q = LaplaceQuery<double>::zero(p.dims);
    q.Lambda << -0.4, 0.1;
    q.Gamma << -0.2, 0.05, 0.05, -0.1;
    const auto sol = solve_mrde(q, p, 10.0);
    for (double t : sol.grid()) CHECK(linalg::asymmetry(sol.g(t)) <= 1e-12);

    ModelParams s = test::scalar_params(1.0, 0.2);
    s.epsilon = 1.0;
    auto bad = LaplaceQuery<double>::zero(s.dims);
    bad.Gamma(0, 0) = 2.0;  // g' = 2 g^2 explodes at t = 1/(2 g0) = 0.25
    const auto exploded = solve_mrde(bad, s, 1.0);
    CHECK(exploded.blew_up());
    CHECK(exploded.blow_up_time() == doctest::Approx(0.25).epsilon(1e-3));
    CHECK_THROWS_AS(laplace_transform(0.0, 1.0, bad, s, s.x0, s.y0), blow_up_error);
}

TEST_CASE("laplace_transform") {
    const ModelParams p = test::two_factor();
    CHECK(laplace_transform(0.0, 3.0, LaplaceQuery<double>::zero(p.dims), p, p.x0, p.y0) == 1.0);

    // frozen covariance: Gaussian moment generating function of Y_T
    const ModelParams lgm = test::frozen_lgm();
    auto q = LaplaceQuery<double>::zero(lgm.dims);
    q.Lambda << 2.0, -3.0;
    Vec y(2);
    y << 0.004, -0.002;
    const double T = 2.0;
    const Gaussian g = ou_law(lgm, T, y);
    const double mgf = std::exp(q.Lambda.dot(g.mean) + 0.5 * q.Lambda.dot(g.cov * q.Lambda));
    CHECK(laplace_transform(0.0, T, q, lgm, lgm.x0, y) == doctest::Approx(mgf).epsilon(1e-10));

    // characteristic function bound
    ModelParams hot = p;
    hot.epsilon = 0.05;
    auto iq = LaplaceQuery<cplx>::zero(p.dims);
    iq.Lambda << cplx(0, 40.0), cplx(0, -25.0);
    iq.Gamma << cplx(0, 300.0), cplx(0, 50.0), cplx(0, 50.0), cplx(0, -100.0);
    CHECK(std::abs(laplace_transform(0.0, 4.0, iq, hot, hot.x0, hot.y0)) <= 1.0);

    // tolerance halving
    auto rq = bond_query(p);
    rq.Lambda << -0.5, 0.2;
    const double tol = 1e-8;
    const double a = laplace_transform(0.0, 5.0, rq, p, p.x0, p.y0, {tol});
    const double b = laplace_transform(0.0, 5.0, rq, p, p.x0, p.y0, {tol / 2});
    CHECK(std::abs(a - b) < 10 * tol);
}

TEST_CASE("check_non_explosion") {
    ModelParams p = test::two_factor();
    SUBCASE("zero candidate under the bond condition") {
        p.gamma = 60.0 * Mat::Identity(2, 2);
        const auto cert = check_non_explosion(bond_query(p), p, 10.0);
        CHECK(cert.holds);
        CHECK(cert.mode == CertificateMode::zero_candidate);
    }
    SUBCASE("positive terminal weight defeats the zero candidate") {
        auto q = bond_query(p);
        q.Gamma(0, 0) = 0.5;
        const auto cert = check_non_explosion(q, p, 10.0);
        CHECK(cert.mode != CertificateMode::zero_candidate);
    }
    SUBCASE("scaled identity for small eps") {
        p.gamma.setZero();
        const auto q = bond_query(p);
        const auto cert = check_non_explosion(q, p, 10.0);
        CHECK(cert.holds);
        CHECK(cert.mode == CertificateMode::scaled_identity);
        const auto sol = solve_mrde(q, p, 10.0);
        for (double t : sol.grid()) CHECK(linalg::min_eigenvalue(cert.upsilon - sol.g(t)) >= -1e-8);
    }
}

TEST_CASE("bond_coeffs") {
    const ModelParams p = test::two_factor();
    const auto bonds = bond_coeffs(p, 50.0);
    for (double tau : bonds.grid()) CHECK(std::isfinite(bonds.A(tau)));
    ModelParams safe = p;
    safe.gamma = 60.0 * Mat::Identity(2, 2);  // satisfies the bond condition
    const auto safe_bonds = bond_coeffs(safe, 50.0);
    for (double tau : safe_bonds.grid()) CHECK(linalg::is_psd(-safe_bonds.D(tau), 1e-8));
    CHECK(bonds.A(0.0) == 0.0);
    CHECK(bonds.B(0.0).norm() == 0.0);
    CHECK(bonds.D(0.0).norm() == 0.0);
    CHECK(zc_price(3.0, 3.0, p.x0, p.y0, bonds) == 1.0);
    CHECK_THROWS(zc_price(0.0, 51.0, p.x0, p.y0, bonds));

    // x = 0 leaves the pure Y exponential
    Vec y(2);
    y << 0.01, -0.003;
    const double tau = 7.0;
    CHECK(zc_price(0.0, tau, Mat::Zero(2, 2), y, bonds) ==
          doctest::Approx(std::exp(bonds.A(tau) + bonds.B(tau).dot(y))).epsilon(1e-15));
}

TEST_CASE("forward_laplace") {
    const ModelParams p = test::two_factor();
    const double t = 0.0, T = 1.0, U = 1.5;
    CHECK(forward_laplace<double>(t, T, U, Vec::Zero(2), Mat::Zero(2, 2), p, p.x0, p.y0, ForwardRoute::composition) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(forward_laplace<cplx>(t, T, U, CVec::Zero(2), CMat::Zero(2, 2), p, p.x0, p.y0,
                                         ForwardRoute::direct) - 1.0) < 1e-9);

    Vec L(2);
    L << -0.5, 0.3;
    Mat G(2, 2);
    G << -0.6, 0.1, 0.1, -0.3;
    const double comp = forward_laplace<double>(t, T, U, L, G, p, p.x0, p.y0, ForwardRoute::composition);
    const double direct = forward_laplace<double>(t, T, U, L, G, p, p.x0, p.y0, ForwardRoute::direct);
    CHECK(std::abs(comp - direct) < 1e-7);

    ModelParams hot = p;
    hot.epsilon = 0.2;
    const CVec Li = cplx(0, 1) * L * 30.0;
    const CMat Gi = cplx(0, 1) * G.cast<cplx>() * 500.0;
    const cplx ci = forward_laplace<cplx>(t, T, U, Li, Gi, hot, hot.x0, hot.y0, ForwardRoute::composition);
    const cplx di = forward_laplace<cplx>(t, T, U, Li, Gi, hot, hot.x0, hot.y0, ForwardRoute::direct);
    CHECK(std::abs(ci - di) < 1e-7);

    // eps = 0: Gaussian under the U-forward measure
    const ModelParams lgm = test::frozen_lgm();
    Vec u(2);
    u << 3.0, -1.5;
    const Gaussian g = ou_law(lgm, T, lgm.y0, U);
    const cplx expect = std::exp(cplx(0, 1) * u.dot(g.mean) - 0.5 * u.dot(g.cov * u));
    const CVec Lu = cplx(0, 1) * u.cast<cplx>();
    const cplx got = forward_laplace<cplx>(t, T, U, Lu, CMat::Zero(2, 2), lgm, lgm.x0, lgm.y0,
                                           ForwardRoute::composition);
    CHECK(std::abs(got - expect) < 1e-8);
}
