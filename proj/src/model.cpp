#include "wr/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wr/linalg.hpp"

namespace wr {

double ModelParams::rho_bar() const {
    return std::sqrt(std::max(0.0, 1.0 - selected_rho().squaredNorm()));
}

Mat ModelParams::selector() const { return linalg::selector(dims.d, dims.n); }

Vec ModelParams::selected_rho() const {
    Vec r = rho;
    for (int i = dims.n; i < dims.d; ++i) r[i] = 0.0;
    return r;
}

Mat ModelParams::effective_omega() const {
    return omega + (dims.d - 1) * epsilon * epsilon * selector();
}

namespace {

void expect_shape(const char* name, Eigen::Index rows, Eigen::Index cols, Eigen::Index want_rows,
                  Eigen::Index want_cols) {
    if (rows != want_rows || cols != want_cols) {
        std::ostringstream os;
        os << name << " has shape " << rows << "x" << cols << ", expected " << want_rows << "x"
           << want_cols;
        throw structural_error(os.str());
    }
}

void expect_symmetric(const char* name, const Mat& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (linalg::asymmetry(m) > 1e-12 * scale) throw structural_error(std::string(name) + " is not symmetric");
}

}  // namespace

void check_structure(const ModelParams& p, StructureOptions opt) {
    const auto [pf, d, n] = p.dims;
    if (pf < 1 || d < 1 || n < 0 || n > d)
        throw structural_error("dimensions must satisfy p >= 1, d >= 1, 0 <= n <= d");
    expect_shape("kappa", p.kappa.size(), 1, pf, 1);
    expect_shape("theta", p.theta.size(), 1, pf, 1);
    expect_shape("y0", p.y0.size(), 1, pf, 1);
    expect_shape("x0", p.x0.rows(), p.x0.cols(), d, d);
    expect_shape("omega", p.omega.rows(), p.omega.cols(), d, d);
    expect_shape("b", p.b.rows(), p.b.cols(), d, d);
    expect_shape("c", p.c.rows(), p.c.cols(), pf, d);
    expect_shape("rho", p.rho.size(), 1, d, 1);
    expect_shape("gamma", p.gamma.rows(), p.gamma.cols(), d, d);
    expect_symmetric("x0", p.x0);
    expect_symmetric("omega", p.omega);
    expect_symmetric("gamma", p.gamma);
    if (!(p.epsilon >= 0.0)) throw structural_error("epsilon must be nonnegative");
    if (p.selected_rho().squaredNorm() > 1.0 + 1e-14)
        throw structural_error("|rho|^2 exceeds 1");
    if (opt.require_ordered_kappa) {
        for (int i = 0; i < pf; ++i) {
            if (!(p.kappa[i] > 0.0)) throw structural_error("kappa entries must be positive");
            if (i > 0 && !(p.kappa[i] - p.kappa[i - 1] >= 1e-8 * p.kappa[i]))
                throw structural_error("kappa entries must be strictly increasing");
        }
    } else {
        for (int i = 0; i < pf; ++i)
            if (!(p.kappa[i] >= 0.0)) throw structural_error("kappa entries must be nonnegative");
    }
}

ModelParams normalized(ModelParams params) {
    for (int i = params.dims.n; i < params.rho.size(); ++i) params.rho[i] = 0.0;
    return params;
}

ValidationReport validate_params(const ModelParams& p, StructureOptions opt) {
    check_structure(p, opt);
    ValidationReport r;
    const double eps2 = p.epsilon * p.epsilon;
    const bool x_psd = linalg::is_psd(p.x0);
    const bool omega_psd = linalg::is_psd(p.omega);
    r.weak_solution_ok = x_psd && omega_psd;
    if (!x_psd) r.messages.emplace_back("x0 is not positive semidefinite");
    if (!omega_psd) r.messages.emplace_back("omega is not positive semidefinite");

    const bool strong_drift = linalg::is_psd(p.omega - 2.0 * eps2 * p.selector());
    const bool x_pd = linalg::is_positive_definite(p.x0);
    r.strong_solution_ok = r.weak_solution_ok && strong_drift && x_pd;
    if (!strong_drift) r.messages.emplace_back("omega - 2 eps^2 I^n is not positive semidefinite");
    if (!x_pd) r.messages.emplace_back("x0 is not positive definite");

    double inv_k2 = 0.0;
    bool finite = true;
    for (int i = 0; i < p.dims.p; ++i) {
        if (p.kappa[i] > 0.0)
            inv_k2 += 1.0 / (p.kappa[i] * p.kappa[i]);
        else
            finite = false;
    }
    r.bond_condition_ok = finite && linalg::is_psd(p.gamma - 0.5 * inv_k2 * p.c.transpose() * p.c);
    if (!r.bond_condition_ok)
        r.messages.emplace_back("gamma - sum(1/kappa_i^2) c^T c / 2 is not positive semidefinite");

    r.stationarity_ok = linalg::is_positive_definite(-(p.b + p.b.transpose()));
    if (!r.stationarity_ok) r.messages.emplace_back("-(b + b^T) is not positive definite");
    return r;
}

Vec lgm_support_B(double tau, const Vec& kappa) {
    Vec out(kappa.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        const double k = kappa[i];
        out[i] = (k == 0.0) ? -tau : std::expm1(-k * tau) / k;
    }
    return out;
}

namespace {

// Composite Simpson on [a,b] with an even panel count and panels no wider than h.
template <class F>
double simpson(F&& f, double a, double b, double h) {
    if (b <= a) return 0.0;
    int n = std::max(2, static_cast<int>(std::ceil((b - a) / h - 1e-12)));
    if (n % 2) ++n;
    const double step = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * step);
    return acc * step / 3.0;
}

}  // namespace

double lgm_zc_price(double t, double T, const Vec& y, const ModelParams& p, QuadratureOptions q) {
    if (T < t) throw std::domain_error("lgm_zc_price: T < t");
    const double tau = T - t;
    const Mat V = p.c * p.x0 * p.c.transpose();
    const Vec kt = p.kappa.cwiseProduct(p.theta);
    const double shift = p.phi + (p.gamma * p.x0).trace();
    const double e = simpson(
                         [&](double s) {
                             const Vec B = lgm_support_B(s, p.kappa);
                             return B.dot(kt) + 0.5 * B.dot(V * B);
                         },
                         0.0, tau, q.step) -
                     shift * tau;
    return std::exp(e + lgm_support_B(tau, p.kappa).dot(y));
}

double lgm_caplet_lognormal_var(double t, double T, double delta, const Mat& V, const Vec& kappa,
                                QuadratureOptions q) {
    return simpson(
        [&](double u) {
            const Vec dB = lgm_support_B(T - u, kappa) - lgm_support_B(T + delta - u, kappa);
            return dB.dot(V * dB);
        },
        t, T, q.step);
}

double support_weight(int i, int j, double tau, double delta, const Vec& kappa) {
    auto ratio = [](double k, double s) { return k == 0.0 ? s : -std::expm1(-k * s) / k; };
    const double ki = kappa[i], kj = kappa[j];
    return ratio(ki, delta) * ratio(kj, delta) * ratio(ki + kj, tau) / tau;
}

DiscountCurve::DiscountCurve(std::vector<double> times, std::vector<double> prices)
    : times_(std::move(times)), prices_(std::move(prices)) {
    if (times_.size() != prices_.size() || times_.size() < 2)
        throw structural_error("discount curve needs at least two matching pillars");
    if (times_.front() != 0.0 || std::abs(prices_.front() - 1.0) > 1e-14)
        throw structural_error("discount curve must start at t=0 with price 1");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw structural_error("pillar times must increase");
        if (!(prices_[i] > 0.0)) throw structural_error("discount prices must be positive");
    }
}

double DiscountCurve::price(double t) const {
    if (t < 0.0 || t > times_.back() * (1 + 1e-12))
        throw std::out_of_range("discount curve queried outside [0, horizon]");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) return prices_.back();
    const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
    const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
    return std::exp((1 - w) * std::log(prices_[i]) + w * std::log(prices_[i + 1]));
}

double forward_libor(const DiscountCurve& curve, double T, double delta) {
    return (curve.price(T) / curve.price(T + delta) - 1.0) / delta;
}

SwapQuote forward_swap(const DiscountCurve& curve, double T, int m, double delta) {
    if (m < 1) throw structural_error("swap needs at least one period");
    SwapQuote q;
    double sum = 0.0;
    q.weights.resize(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k) {
        q.weights[static_cast<std::size_t>(k - 1)] = curve.price(T + k * delta);
        sum += q.weights[static_cast<std::size_t>(k - 1)];
    }
    for (auto& w : q.weights) w /= sum;
    q.annuity = delta * sum;
    q.rate = (curve.price(T) - curve.price(T + m * delta)) / q.annuity;
    return q;
}

double lgm_swaption_normal_var(double t, double T, int m, double delta, const Mat& V,
                               const Vec& kappa, const DiscountCurve& curve, QuadratureOptions q) {
    const SwapQuote sq = forward_swap(curve, T, m, delta);
    const double sum = sq.annuity / delta;
    const double first = curve.price(T) / sum / delta;
    const double last = curve.price(T + m * delta) / sum / delta;
    return simpson(
        [&](double u) {
            Vec bs = first * lgm_support_B(T - u, kappa) - last * lgm_support_B(T + m * delta - u, kappa);
            for (int k = 1; k <= m; ++k)
                bs -= sq.rate * sq.weights[static_cast<std::size_t>(k - 1)] *
                      lgm_support_B(T + k * delta - u, kappa);
            return bs.dot(V * bs);
        },
        t, T, q.step);
}

}  // namespace wr
