#include "wr/expansion.hpp"

#include <cmath>
#include <functional>

#include "wr/linalg.hpp"

namespace wr::expansion {

Mat x0_flow(double s, const Mat& x, const ModelParams& p) {
    if (s < 0.0) throw std::domain_error("x0_flow: negative time");
    if (s == 0.0) return x;
    return linalg::symmetrize(linalg::linear_flow(p.b, p.omega, s).apply(x));
}

namespace {

ode::Options tight() {
    ode::Options o;
    o.rtol = 1e-11;
    o.atol = 1e-15;
    o.max_step = 0.05;
    return o;
}

Mat block(const Vec& v, int d, int k) { return Eigen::Map<const Mat>(v.data() + k * d * d, d, d); }

void set_block(Vec& v, const Mat& m, int k) {
    const auto d = m.rows();
    Eigen::Map<Mat>(v.data() + k * d * d, d, d) = m;
}

void symmetrize_blocks(Vec& v, int d, int count) {
    for (int k = 0; k < count; ++k) set_block(v, linalg::symmetrize(block(v, d, k)), k);
}

}  // namespace

SupportExpansion::SupportExpansion(const ModelParams& p, double horizon) : d_(p.dims.d) {
    const int d = d_;
    const Vec r = p.selected_rho();
    auto rhs = [&](double tau, const Vec& v) {
        const Mat d0 = block(v, d, 0);
        const Mat d1 = block(v, d, 1);
        const Vec ctb = p.c.transpose() * lgm_support_B(tau, p.kappa);
        Vec out(2 * d * d);
        set_block(out, Mat(d0 * p.b + p.b.transpose() * d0 + 0.5 * ctb * ctb.transpose() - p.gamma), 0);
        const Mat cross = d0 * r * ctb.transpose();
        set_block(out, Mat(d1 * p.b + p.b.transpose() * d1 + cross + cross.transpose()), 1);
        return out;
    };
    traj_ = ode::integrate<double>(
        rhs, Vec::Zero(2 * d * d), 0.0, std::max(horizon, 1e-12), tight(),
        [d](Vec& v) { symmetrize_blocks(v, d, 2); }, [](const Vec& v) { return v.norm(); });
}

Mat SupportExpansion::D0(double tau) const { return block(traj_.at(tau), d_, 0); }
Mat SupportExpansion::D1(double tau) const { return block(traj_.at(tau), d_, 1); }

std::pair<Mat, Mat> d_expansion(double tau, const ModelParams& params) {
    if (tau == 0.0) {
        const int d = params.dims.d;
        return {Mat::Zero(d, d), Mat::Zero(d, d)};
    }
    SupportExpansion s(params, tau);
    return {s.D0(tau), s.D1(tau)};
}

namespace {

// Uniform grid on [a,b] with an even number of panels no wider than step.
std::vector<double> simpson_grid(double a, double b, double step) {
    int n = std::max(2, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
    if (n % 2) ++n;
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
    return g;
}

double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() - 1;
    double acc = f.front() + f.back();
    for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
    return acc * h / 3.0;
}

// Time-dependent loadings feeding the generic second-order coefficient integrals.
struct Loadings {
    std::function<Vec(double)> load;        // diffusion loading of the underlying on the factors
    std::function<Vec(double)> drift;       // factor loading of the measure-change drift on X
    std::function<Mat(double)> support0;    // order-0 X loading of the underlying
    std::function<Mat(double)> support1;    // order-1 X loading of the underlying
    std::function<Mat(double)> drift_support;  // order-0 X loading of the measure-change drift
};

struct Coeffs {
    double v = 0, c1 = 0, c2 = 0, d1 = 0, d2 = 0, d3 = 0, e1 = 0, e2 = 0, e3 = 0, e4 = 0, e5 = 0, e6 = 0;
};

double base_variance(double t, double T, const Mat& x, const ModelParams& p,
                     const std::function<Vec(double)>& load, double step) {
    if (T <= t) return 0.0;
    const auto grid = simpson_grid(t, T, step);
    const double h = grid[1] - grid[0];
    const auto flow = linalg::linear_flow(p.b, p.omega, h);
    Mat X = x;
    std::vector<double> f(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (k > 0) X = flow.apply(X);
        const Vec cb = p.c.transpose() * load(grid[k]);
        f[k] = cb.dot(X * cb);
    }
    return simpson(f, h);
}

Coeffs integrate_coeffs(double t, double T, const Mat& x, const ModelParams& p, const Loadings& L,
                        double step) {
    Coeffs out;
    if (T <= t) return out;
    const int d = p.dims.d;
    const Vec r = p.selected_rho();
    const Mat sel = p.selector();

    // Tail gradients in the initial matrix, integrated backwards from expiry: block 0 for the
    // base variance, blocks 1-2 for the two first-order integrals.
    auto rhs = [&](double back, const Vec& v) {
        const double s = T - back;
        const Mat V = block(v, d, 0);
        const Mat C1 = block(v, d, 1);
        const Mat C2 = block(v, d, 2);
        const Vec cb = p.c.transpose() * L.load(s);
        const Vec ca = p.c.transpose() * L.drift(s);
        const Mat a1 = V * r * cb.transpose();
        const Mat a2 = V * r * ca.transpose() + 2.0 * L.support0(s) * r * cb.transpose();
        Vec o(3 * d * d);
        set_block(o, Mat(cb * cb.transpose() + p.b.transpose() * V + V * p.b), 0);
        set_block(o, Mat(linalg::symmetrize(a1) + p.b.transpose() * C1 + C1 * p.b), 1);
        set_block(o, Mat(linalg::symmetrize(a2) + p.b.transpose() * C2 + C2 * p.b), 2);
        return o;
    };
    const auto tail = ode::integrate<double>(
        rhs, Vec::Zero(3 * d * d), 0.0, T - t, tight(), [d](Vec& v) { symmetrize_blocks(v, d, 3); },
        [](const Vec& v) { return v.norm(); });

    const auto grid = simpson_grid(t, T, step);
    const double h = grid[1] - grid[0];
    const auto flow = linalg::linear_flow(p.b, p.omega, h);
    const std::size_t n = grid.size();
    std::vector<double> fv(n), fa1(n), fa2(n), fd1(n), fd2(n), fd3(n), fe4(n), fe5(n), fe6(n);
    Mat X = x;
    for (std::size_t k = 0; k < n; ++k) {
        const double s = grid[k];
        if (k > 0) X = linalg::symmetrize(flow.apply(X));
        const Vec state = tail.at(T - s);
        const Mat V = block(state, d, 0);
        const Mat C1 = block(state, d, 1);
        const Mat C2 = block(state, d, 2);
        const Vec cb = p.c.transpose() * L.load(s);
        const Vec ca = p.c.transpose() * L.drift(s);
        const Mat S0 = L.support0(s);
        const Mat S1 = L.support1(s);
        const Mat Dd = L.drift_support(s);
        const Vec Xcb = X * cb;
        const Vec Xca = X * ca;
        fv[k] = cb.dot(Xcb);
        fa1[k] = Xcb.dot(V * r);
        fa2[k] = Xca.dot(V * r) + 2.0 * Xcb.dot(S0 * r);
        fd1[k] = 0.5 * (sel * V * X * V).trace();
        fd2[k] = 2.0 * (S0 * X * V * sel).trace();
        fd3[k] = 2.0 * Xcb.dot(S1 * r) + 2.0 * (S0 * sel * S0 * X).trace() +
                 0.5 * (d - 1) * (sel * V).trace() + 2.0 * (X * Dd * sel * V).trace();
        fe4[k] = 2.0 * Xcb.dot(C1 * r);
        fe5[k] = 2.0 * Xca.dot(C1 * r) + 2.0 * Xcb.dot(C2 * r);
        fe6[k] = 2.0 * Xca.dot(C2 * r);
    }
    out.v = simpson(fv, h);
    out.c1 = simpson(fa1, h);
    out.c2 = simpson(fa2, h);
    out.d1 = simpson(fd1, h);
    out.d2 = simpson(fd2, h);
    out.d3 = simpson(fd3, h);
    out.e1 = 0.5 * out.c1 * out.c1;
    out.e2 = out.c1 * out.c2;
    out.e3 = 0.5 * out.c2 * out.c2;
    out.e4 = simpson(fe4, h);
    out.e5 = simpson(fe5, h);
    out.e6 = simpson(fe6, h);
    return out;
}

Loadings caplet_loadings(const CapletSpec& spec, const ModelParams& p, const SupportExpansion& sup) {
    const double T = spec.T, U = spec.T + spec.delta;
    const Vec kappa = p.kappa;
    Loadings L;
    L.load = [=](double s) { return Vec(lgm_support_B(T - s, kappa) - lgm_support_B(U - s, kappa)); };
    L.drift = [=](double s) { return lgm_support_B(U - s, kappa); };
    L.support0 = [&sup, T, U](double s) { return Mat(sup.D0(T - s) - sup.D0(U - s)); };
    L.support1 = [&sup, T, U](double s) { return Mat(sup.D1(T - s) - sup.D1(U - s)); };
    L.drift_support = [&sup, U](double s) { return sup.D0(U - s); };
    return L;
}

}  // namespace

double caplet_base_var(double t, const CapletSpec& spec, const Mat& x, const ModelParams& p,
                       QuadOptions q) {
    spec.check();
    if (t > spec.T) throw std::domain_error("caplet_base_var: t after expiry");
    const double T = spec.T, U = spec.T + spec.delta;
    const Vec kappa = p.kappa;
    return base_variance(
        t, T, x, p, [&](double s) { return Vec(lgm_support_B(T - s, kappa) - lgm_support_B(U - s, kappa)); },
        q.step);
}

CapletExpansionCoeffs caplet_expansion_coeffs(double t, const CapletSpec& spec, const Mat& x,
                                              const ModelParams& p, QuadOptions q) {
    spec.check();
    if (t > spec.T) throw std::domain_error("caplet expansion: t after expiry");
    const SupportExpansion sup(p, spec.T + spec.delta - t);
    const Coeffs c = integrate_coeffs(t, spec.T, x, p, caplet_loadings(spec, p, sup), q.step);
    return {c.v, c.c1, c.c2, c.d1, c.d2, c.d3, c.e1, c.e2, c.e3, c.e4, c.e5, c.e6};
}

double CapletExpansion::first_order_var_correction() const {
    const double v0 = coeffs.v;
    return 2.0 * (coeffs.c2 + coeffs.c1 * (0.5 - (h - log_strike) / v0));
}

CapletExpansion caplet_price_expanded_h(double t, const CapletSpec& spec, const Mat& x, double h,
                                        double numeraire, const ModelParams& p, QuadOptions q) {
    CapletExpansion e;
    e.coeffs = caplet_expansion_coeffs(t, spec, x, p, q);
    e.h = h;
    e.log_strike = std::log(spec.strike_factor());
    e.numeraire = numeraire;
    e.delta = spec.delta;
    e.epsilon = p.epsilon;
    const auto& c = e.coeffs;
    e.p0 = bs_kernel(h, c.v, e.log_strike).value();
    const auto G = bs_vega_tower(h, c.v, e.log_strike);
    // Phi = d^2/dh^2 - d/dh; Phi P0 = G, so every operator below reduces to h-derivatives of G
    const double phi_d = G[1];
    const double phi = G[0];
    const double phi2 = G[2] - G[1];
    const double phi2_dd = G[4] - G[3];
    const double phi2_d = G[3] - G[2];
    const double phi_dd = G[2];
    e.p1 = c.c1 * phi_d + c.c2 * phi;
    e.p2 = c.d1 * phi2 + c.d2 * phi_d + c.d3 * phi + c.e1 * phi2_dd + c.e2 * phi2_d + c.e3 * phi2 +
           c.e4 * phi_dd + c.e5 * phi_d + c.e6 * phi;
    return e;
}

CapletExpansion caplet_price_expanded(double t, const CapletSpec& spec, const Mat& x, const Vec& y,
                                      const ModelParams& p, const riccati::BondCoeffs& bonds,
                                      QuadOptions q) {
    const double pT = riccati::zc_price(t, spec.T, x, y, bonds);
    const double pU = riccati::zc_price(t, spec.T + spec.delta, x, y, bonds);
    return caplet_price_expanded_h(t, spec, x, std::log(pT / pU), pU, p, q);
}

PriceResult to_price_result(const CapletExpansion& e, const CapletSpec& spec, double t) {
    PriceResult r;
    r.method = "expansion";
    r.price = e.price();
    r.forward = e.forward_rate();
    r.numeraire = e.numeraire;
    const double fwd_prem = e.forward_caplet();
    const double tau = spec.T - t;
    try {
        r.normal_vol_bp = 1e4 * implied_vol(fwd_prem, r.forward, spec.K, tau, VolConvention::normal);
    } catch (const std::domain_error&) {
        r.normal_vol_bp = std::nan("");
    }
    try {
        r.lognormal_vol = implied_vol(fwd_prem, r.forward, spec.K, tau, VolConvention::lognormal);
    } catch (const std::domain_error&) {
        r.lognormal_vol = std::nan("");
    }
    return r;
}

SwaptionAffine::SwaptionAffine(double t, const SwaptionSpec& spec, const Mat& x, const Vec& y,
                               const ModelParams& p, const riccati::BondCoeffs& bonds,
                               std::optional<double> swap_rate)
    : t_(t), spec_(spec), kappa_(p.kappa), supports_(p, spec.T + spec.m * spec.delta - t) {
    spec.check();
    double sum = 0.0;
    weights_.resize(static_cast<std::size_t>(spec.m));
    for (int k = 1; k <= spec.m; ++k) {
        const double pk = riccati::zc_price(t, spec.T + k * spec.delta, x, y, bonds);
        weights_[static_cast<std::size_t>(k - 1)] = pk;
        sum += pk;
    }
    for (auto& w : weights_) w /= sum;
    annuity_ = spec.delta * sum;
    const double pT = riccati::zc_price(t, spec.T, x, y, bonds);
    const double pE = riccati::zc_price(t, spec.T + spec.m * spec.delta, x, y, bonds);
    first_ = pT / annuity_;
    last_ = pE / annuity_;
    S0_ = swap_rate.value_or((pT - pE) / annuity_);
}

Vec SwaptionAffine::B(double tau) const { return lgm_support_B(tau, kappa_); }

Vec SwaptionAffine::BS(double s) const {
    const double T = spec_.T, dl = spec_.delta;
    Vec out = first_ * B(T - s) - last_ * B(T + spec_.m * dl - s);
    for (int k = 1; k <= spec_.m; ++k) out -= S0_ * weights_[static_cast<std::size_t>(k - 1)] * B(T + k * dl - s);
    return out;
}

Mat SwaptionAffine::DS(int order, double s) const {
    auto D = [&](double tau) { return order == 0 ? supports_.D0(tau) : supports_.D1(tau); };
    const double T = spec_.T, dl = spec_.delta;
    Mat out = first_ * D(T - s) - last_ * D(T + spec_.m * dl - s);
    for (int k = 1; k <= spec_.m; ++k) out -= S0_ * weights_[static_cast<std::size_t>(k - 1)] * D(T + k * dl - s);
    return out;
}

Vec SwaptionAffine::BA(double s) const {
    Vec out = Vec::Zero(kappa_.size());
    for (int k = 1; k <= spec_.m; ++k)
        out += weights_[static_cast<std::size_t>(k - 1)] * B(spec_.T + k * spec_.delta - s);
    return out;
}

Mat SwaptionAffine::DA0(double s) const {
    Mat out = Mat::Zero(supports_.D0(0.0).rows(), supports_.D0(0.0).cols());
    for (int k = 1; k <= spec_.m; ++k)
        out += weights_[static_cast<std::size_t>(k - 1)] * supports_.D0(spec_.T + k * spec_.delta - s);
    return out;
}

SwaptionExpansionCoeffs swaption_expansion_coeffs(double t, const SwaptionAffine& a,
                                                  const SwaptionSpec& spec, const Mat& x,
                                                  const ModelParams& p, QuadOptions q) {
    Loadings L;
    L.load = [&a](double s) { return a.BS(s); };
    L.drift = [&a](double s) { return a.BA(s); };
    L.support0 = [&a](double s) { return a.DS(0, s); };
    L.support1 = [&a](double s) { return a.DS(1, s); };
    L.drift_support = [&a](double s) { return a.DA0(s); };
    const Coeffs c = integrate_coeffs(t, spec.T, x, p, L, q.step);
    SwaptionExpansionCoeffs out;
    out.vS = c.v;
    out.cS1 = c.c1;
    out.cS2 = c.c2;
    out.dS1 = c.d1;
    out.dS2 = c.d2;
    out.dS3 = c.d3;
    out.eS1 = c.e1;
    out.eS2 = c.e2;
    out.eS3 = c.e3 + c.e4;
    out.eS4 = c.e5;
    out.eS5 = c.e6;
    return out;
}

SwaptionExpansion swaption_price_expanded(double t, const SwaptionSpec& spec, const Mat& x,
                                          const Vec& y, const ModelParams& p,
                                          const riccati::BondCoeffs& bonds,
                                          std::optional<double> swap_rate, QuadOptions q) {
    spec.check();
    if (t > spec.T) throw std::domain_error("swaption expansion: t after expiry");
    const SwaptionAffine affine(t, spec, x, y, p, bonds, swap_rate);
    SwaptionExpansion e;
    e.coeffs = swaption_expansion_coeffs(t, affine, spec, x, p, q);
    e.swap_rate = affine.swap_rate();
    e.annuity = affine.annuity();
    e.epsilon = p.epsilon;
    const auto& c = e.coeffs;
    const auto k = bachelier_kernel(e.swap_rate, c.vS, spec.K);
    e.p0 = k.d[0];
    e.p1 = c.cS1 * k.d[3] + c.cS2 * k.d[2];
    e.p2 = c.dS1 * k.d[4] + c.dS2 * k.d[3] + c.dS3 * k.d[2] + c.eS1 * k.d[6] + c.eS2 * k.d[5] +
           c.eS3 * k.d[4] + c.eS4 * k.d[3] + c.eS5 * k.d[2];
    return e;
}

PriceResult to_price_result(const SwaptionExpansion& e, const SwaptionSpec& spec, double t) {
    PriceResult r;
    r.method = "expansion";
    r.price = e.price();
    r.forward = e.swap_rate;
    r.numeraire = e.annuity;
    const double tau = spec.T - t;
    try {
        r.normal_vol_bp = 1e4 * implied_vol(e.forward_premium(), e.swap_rate, spec.K, tau, VolConvention::normal);
    } catch (const std::domain_error&) {
        r.normal_vol_bp = std::nan("");
    }
    try {
        r.lognormal_vol = implied_vol(e.forward_premium(), e.swap_rate, spec.K, tau, VolConvention::lognormal);
    } catch (const std::domain_error&) {
        r.lognormal_vol = std::nan("");
    }
    return r;
}

}  // namespace wr::expansion
