#include "wr/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "wr/kernels.hpp"

namespace wr::sim {

SchemeKind parse_scheme(const std::string& s) {
    if (s == "1" || s == "scheme1") return SchemeKind::scheme1;
    if (s == "2" || s == "scheme2") return SchemeKind::scheme2;
    if (s == "3" || s == "scheme3") return SchemeKind::scheme3;
    throw config_error("unknown scheme '" + s + "' (expected 1, 2 or 3)");
}

Composition parse_composition(const std::string& s) {
    if (s == "strang") return Composition::strang;
    if (s == "bernoulli") return Composition::bernoulli;
    throw config_error("unknown composition '" + s + "' (expected strang or bernoulli)");
}

std::string to_string(SchemeKind s) {
    switch (s) {
        case SchemeKind::scheme1: return "scheme1";
        case SchemeKind::scheme2: return "scheme2";
        case SchemeKind::scheme3: return "scheme3";
    }
    return "?";
}

std::string to_string(Composition c) { return c == Composition::strang ? "strang" : "bernoulli"; }

int SimConfig::steps_for(double horizon) const {
    if (total_steps > 0) return total_steps;
    return std::max(1, static_cast<int>(std::ceil(horizon * steps_per_year - 1e-9)));
}

void SimConfig::check() const {
    if (total_steps <= 0 && !(steps_per_year > 0.0))
        throw config_error("simulation needs steps_per_year > 0 or total_steps >= 1");
    if (n_paths < 1) throw config_error("simulation needs n_paths >= 1");
    if (threads < 1) throw config_error("simulation needs threads >= 1");
}

Vec ou_flow(const Vec& y, double t, const Vec& kappa, const Vec& theta) {
    Vec out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double decay = std::exp(-kappa[i] * t);
        out[i] = decay * y[i] + (1.0 - decay) * theta[i];
    }
    return out;
}

Mat wishart_drift_flow(const Mat& x, double t, const Mat& b, const Mat& omega) {
    return linalg::symmetrize(linalg::linear_flow(b, omega, t).apply(x));
}

Vec gaussian_corr_step(const Vec& y, const Mat& x, double dt, const Vec& rho, Stream& rng) {
    const double scale = std::sqrt(std::max(0.0, 1.0 - rho.squaredNorm()) * dt);
    if (scale == 0.0) return y;
    Vec g(y.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = rng.normal();
    return y + scale * (linalg::psd_factor(x) * g);
}

namespace {

// Squared Bessel process of dimension delta, exact over time t (Poisson mixture of gammas).
double besq_exact(double delta, double u, double t, Stream& rng) {
    const long n = rng.poisson(u / (2.0 * t));
    return 2.0 * t * rng.gamma(0.5 * delta + static_cast<double>(n));
}

// Second-order scheme for dU = delta dt + 2 sqrt(U) dZ.
double besq_order2(double delta, double u, double t, Stream& rng) {
    const double shift = (delta - 1.0) * t / 2.0;
    bool explicit_ok = delta >= 1.0;
    if (!explicit_ok) {
        const double gap = (1.0 - delta) * t / 2.0;
        const double k2 = gap + std::pow(std::sqrt(gap) + std::sqrt(3.0 * t), 2);
        explicit_ok = u >= k2;
    }
    if (explicit_ok) {
        const double root = std::sqrt(std::max(0.0, u + shift)) + std::sqrt(t) * rng.three_point();
        return std::max(0.0, root * root + shift);
    }
    // two-point law matching the first two moments
    const double m1 = u + delta * t;
    if (m1 <= 0.0) return 0.0;
    const double m2 = m1 * m1 + 4.0 * t * (u + delta * t / 2.0);
    const double pi = 0.5 * (1.0 - std::sqrt(1.0 - m1 * m1 / m2));
    return rng.uniform() < pi ? m1 / (2.0 * pi) : m1 / (2.0 * (1.0 - pi));
}

}  // namespace

void elementary_wishart_step(Mat& x, Vec& ytilde, int q, double dt, double epsilon, double rho_q,
                             WishartMode mode, Stream& rng) {
    const int d = static_cast<int>(x.rows());
    if (epsilon == 0.0) {
        if (rho_q != 0.0) throw std::logic_error("elementary Wishart step called with epsilon = 0 and rho_q != 0");
        return;
    }
    const double tp = epsilon * epsilon * dt;
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::swap(idx[0], idx[static_cast<std::size_t>(q)]);
    Mat xp(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) xp(i, j) = x(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);

    // x = [[x11, x1^T], [x1, x22]], x22 = c c^T with c of full column rank r, x1 = c u
    int r = 0;
    Mat cfac;
    Vec u;
    if (d > 1) {
        const Mat x22 = xp.bottomRightCorner(d - 1, d - 1);
        const double tol = 1e-13 * std::max(xp.trace(), 1e-300);
        Eigen::LLT<Mat> llt(x22);
        if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().minCoeff() > std::sqrt(tol)) {
            r = d - 1;
            cfac = llt.matrixL();
            u = llt.matrixL().solve(xp.col(0).tail(d - 1));
        } else {
            Eigen::SelfAdjointEigenSolver<Mat> es(x22);
            const Vec& lam = es.eigenvalues();
            for (int i = 0; i < d - 1; ++i) r += lam[i] > tol ? 1 : 0;
            cfac = es.eigenvectors().rightCols(r) * lam.tail(r).cwiseSqrt().asDiagonal();
            u = lam.tail(r).cwiseSqrt().cwiseInverse().asDiagonal() *
                (es.eigenvectors().rightCols(r).transpose() * xp.col(0).tail(d - 1));
        }
    } else {
        u = Vec::Zero(0);
    }
    const double u11 = std::max(0.0, xp(0, 0) - u.squaredNorm());
    const double delta = static_cast<double>(d - 1 - r);
    Vec u_new(r);
    double u11_new = 0.0;
    const double sq = std::sqrt(tp);
    if (mode == WishartMode::exact) {
        for (int j = 0; j < r; ++j) u_new[j] = u[j] + sq * rng.normal();
        u11_new = besq_exact(delta, u11, tp, rng);
    } else {
        for (int j = 0; j < r; ++j) u_new[j] = u[j] + sq * rng.three_point();
        u11_new = besq_order2(delta, u11, tp, rng);
    }
    Mat xn = xp;
    xn(0, 0) = u11_new + u_new.squaredNorm();
    if (d > 1) {
        const Vec col = cfac * u_new;
        xn.col(0).tail(d - 1) = col;
        xn.row(0).tail(d - 1) = col.transpose();
    }
    Mat x_new(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) x_new(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = xn(i, j);

    if (rho_q != 0.0) {
        for (int i = 0; i < d; ++i) {
            if (i == q) {
                ytilde[i] += rho_q / (2.0 * epsilon) *
                             (x_new(q, q) - x(q, q) - epsilon * epsilon * (d - 1) * dt);
            } else {
                ytilde[i] += rho_q / epsilon * (x_new(q, i) - x(q, i));
            }
        }
    }
    x = x_new;
}

void fast_column_step(Mat& u, Vec& ytilde, int q, double dt, double epsilon, double rho_q, Stream& rng) {
    const int d = static_cast<int>(u.rows());
    Vec w(d);
    const double sq = std::sqrt(dt);
    for (int j = 0; j < d; ++j) w[j] = sq * rng.normal();
    if (rho_q != 0.0) {
        const Vec proj = u.transpose() * w;  // sum_j u_{j,m} w_j
        ytilde += rho_q * proj;
        ytilde[q] += 0.5 * epsilon * rho_q * (w.squaredNorm() - d * dt);
    }
    u.col(q) += epsilon * w;
}

void repair_psd(Mat& x) {
    x = linalg::symmetrize(x);
    if (Eigen::LLT<Mat>(x).info() == Eigen::Success) return;
    const double m = linalg::min_eigenvalue(x);
    if (m >= 0.0) return;
    const double tr = x.trace();
    if (m < -1e-10 * std::max(tr, 0.0)) throw numeric_error("covariance state left the PSD cone");
    x = linalg::clip_psd(x);
}

Stepper::Stepper(const ModelParams& params, SchemeKind scheme, Composition composition, double dt)
    : params_(&params), scheme_(scheme), composition_(composition), dt_(dt) {
    if (!(dt > 0.0)) throw config_error("simulation step must be positive");
    const double eps = params.epsilon;
    rho_ = params.selected_rho();
    omega_drift_ = params.omega;
    if (eps > 0.0) {
        for (int q = 0; q < params.dims.n; ++q) active_q_.push_back(q);
        gauss_factor_ = std::max(0.0, 1.0 - rho_.squaredNorm());
    }
    if (scheme == SchemeKind::scheme3) {
        omega_drift_ = params.omega - eps * eps * params.selector();
        if (!linalg::is_psd(omega_drift_))
            throw config_error("scheme3 needs omega - eps^2 I^n to be positive semidefinite");
    }
    nodes_ = {{Op::kappa, -1}, {Op::drift, -1}, {Op::gauss, -1}};
    if (!active_q_.empty()) {
        if (scheme == SchemeKind::scheme3) {
            nodes_.push_back({Op::hat, -1});
        } else {
            for (int q : active_q_) nodes_.push_back({Op::elementary, q});
        }
    }
    for (double h : {dt / 2.0, dt}) {
        flow_steps_.push_back(h);
        drift_flows_.push_back(linalg::linear_flow(params.b, omega_drift_, h));
    }

    if (eps == 0.0) {
        // z = [vec X; vec M; 1] with X' = omega + b X + X b^T, M' = c X c^T - kappa M - M kappa
        frozen_ = true;
        const int d = params.dims.d, np = params.dims.p;
        const int n1 = d * d, n2 = np * np;
        auto kron = [](const Mat& a, const Mat& b) {
            Mat out(a.rows() * b.rows(), a.cols() * b.cols());
            for (Eigen::Index i = 0; i < a.rows(); ++i)
                for (Eigen::Index j = 0; j < a.cols(); ++j)
                    out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
            return out;
        };
        const Mat K = params.kappa.asDiagonal();
        Mat gen = Mat::Zero(n1 + n2 + 1, n1 + n2 + 1);
        gen.topLeftCorner(n1, n1) = kron(Mat::Identity(d, d), params.b) + kron(params.b, Mat::Identity(d, d));
        gen.block(0, n1 + n2, n1, 1) = Eigen::Map<const Vec>(omega_drift_.data(), n1);
        gen.block(n1, 0, n2, n1) = kron(params.c, params.c);
        gen.block(n1, n1, n2, n2) = -(kron(Mat::Identity(np, np), K) + kron(K, Mat::Identity(np, np)));
        const Mat e = (gen * dt).exp();
        frozen_cov_.resize(n2, n1 + 1);
        frozen_cov_.leftCols(n1) = e.block(n1, 0, n2, n1);
        frozen_cov_.col(n1) = e.block(n1, n1 + n2, n2, 1);
    }
}

void Stepper::frozen_step(PathState& s, const RandomSource& rng, std::uint64_t path, std::uint32_t step) const {
    const ModelParams& p = *params_;
    const int d = p.dims.d, np = p.dims.p;
    Vec xv(d * d + 1);
    xv << Eigen::Map<const Vec>(s.X.data(), d * d), 1.0;
    const Vec cv = frozen_cov_ * xv;
    const Mat cov = linalg::symmetrize(Eigen::Map<const Mat>(cv.data(), np, np));
    Stream st = rng.stream(path, step, 1);
    Vec g(np);
    for (int i = 0; i < np; ++i) g[i] = scheme_ == SchemeKind::scheme2 ? st.three_point() : st.normal();
    s.Y = ou_flow(s.Y, dt_, p.kappa, p.theta) + linalg::psd_factor(cov) * g;
    s.X = linalg::symmetrize(drift_flow(dt_).apply(s.X));
}

const linalg::AffineFlow& Stepper::drift_flow(double h) const {
    for (std::size_t i = 0; i < flow_steps_.size(); ++i)
        if (flow_steps_[i] == h) return drift_flows_[i];
    throw std::logic_error("drift flow requested for an unplanned step");
}

double Stepper::short_rate(const PathState& s) const {
    return params_->phi + s.Y.sum() + (params_->gamma * s.X).trace();
}

void Stepper::add_reduced(PathState& s, const Vec& dyt) const { s.Y += params_->c * dyt; }

void Stepper::apply(const Node& node, double h, PathState& s, Stream& rng) const {
    const ModelParams& p = *params_;
    const int d = p.dims.d;
    switch (node.op) {
        case Op::kappa:
            s.Y = ou_flow(s.Y, h, p.kappa, p.theta);
            break;
        case Op::drift:
            s.X = linalg::symmetrize(drift_flow(h).apply(s.X));
            break;
        case Op::gauss: {
            const double scale = std::sqrt(gauss_factor_ * h);
            if (scale == 0.0) break;
            Vec g(d);
            for (int i = 0; i < d; ++i)
                g[i] = scheme_ == SchemeKind::scheme2 ? rng.three_point() : rng.normal();
            add_reduced(s, scale * (linalg::psd_factor(s.X) * g));
            break;
        }
        case Op::elementary: {
            Vec yt = Vec::Zero(d);
            elementary_wishart_step(s.X, yt, node.q, h, p.epsilon, rho_[node.q],
                                    scheme_ == SchemeKind::scheme2 ? WishartMode::order2 : WishartMode::exact, rng);
            add_reduced(s, yt);
            break;
        }
        case Op::hat:
            throw std::logic_error("hat operator is applied through its own nesting");
    }
}

void Stepper::hat_nest(int i, double h, Mat& u, Vec& yt, const RandomSource& rng, std::uint64_t path,
                       std::uint32_t step, std::uint32_t& subop) const {
    const int q = active_q_[static_cast<std::size_t>(i)];
    const bool last = i + 1 == static_cast<int>(active_q_.size());
    auto run = [&](double hh) {
        Stream st = rng.stream(path, step, subop++);
        fast_column_step(u, yt, q, hh, params_->epsilon, rho_[q], st);
    };
    if (last) {
        run(h);
        return;
    }
    run(h / 2.0);
    hat_nest(i + 1, h, u, yt, rng, path, step, subop);
    run(h / 2.0);
}

void Stepper::nest(std::size_t i, double h, PathState& s, const RandomSource& rng, std::uint64_t path,
                   std::uint32_t step, std::uint32_t& subop) const {
    const Node& node = nodes_[i];
    const bool last = i + 1 == nodes_.size();
    auto run = [&](double hh) {
        if (node.op == Op::hat) {
            Mat u = linalg::psd_factor(s.X).transpose();
            Vec yt = Vec::Zero(params_->dims.d);
            hat_nest(0, hh, u, yt, rng, path, step, subop);
            s.X = linalg::symmetrize(u.transpose() * u);
            add_reduced(s, yt);
            return;
        }
        Stream st = rng.stream(path, step, subop++);
        apply(node, hh, s, st);
    };
    if (last) {
        run(h);
        return;
    }
    run(h / 2.0);
    nest(i + 1, h, s, rng, path, step, subop);
    run(h / 2.0);
}

void Stepper::step(PathState& s, const RandomSource& rng, std::uint64_t path, std::uint32_t step) const {
    const double r0 = short_rate(s);
    std::uint32_t subop = 1;
    if (frozen_) {
        frozen_step(s, rng, path, step);
    } else if (composition_ == Composition::strang) {
        nest(0, dt_, s, rng, path, step, subop);
    } else {
        Stream coin = rng.stream(path, step, 0);
        const bool kappa_first = coin.uniform() < 0.5;
        if (kappa_first) apply(nodes_[0], dt_, s, coin);
        nest(1, dt_, s, rng, path, step, subop);
        if (!kappa_first) apply(nodes_[0], dt_, s, coin);
    }
    repair_psd(s.X);
    s.int_r += 0.5 * dt_ * (r0 + short_rate(s));
    s.t += dt_;
}

namespace {

template <class T>
std::vector<T> run_paths(const SimConfig& config, const ModelParams& params, double horizon,
                         const std::function<T(const PathState&)>& f) {
    config.check();
    if (!(horizon > 0.0)) throw config_error("simulation horizon must be positive");
    const int n_steps = config.steps_for(horizon);
    const Stepper stepper(params, config.scheme, config.composition, horizon / n_steps);
    const RandomSource rng(config.seed);
    std::vector<T> out(static_cast<std::size_t>(config.n_paths));
    auto work = [&](long begin, long end) {
        for (long path = begin; path < end; ++path) {
            PathState s{params.x0, params.y0, 0.0, 0.0};
            for (int k = 0; k < n_steps; ++k)
                stepper.step(s, rng, static_cast<std::uint64_t>(path), static_cast<std::uint32_t>(k));
            s.t = horizon;
            out[static_cast<std::size_t>(path)] = f(s);
        }
    };
    const int threads = static_cast<int>(std::min<long>(config.threads, config.n_paths));
    if (threads <= 1) {
        work(0, config.n_paths);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const long chunk = (config.n_paths + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const long begin = w * chunk, end = std::min(config.n_paths, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace

std::vector<double> sample_paths(const SimConfig& config, const ModelParams& params, double horizon,
                                 const std::function<double(const PathState&)>& f) {
    return run_paths<double>(config, params, horizon, f);
}

std::vector<cplx> sample_paths_complex(const SimConfig& config, const ModelParams& params,
                                       double horizon, const std::function<cplx(const PathState&)>& f) {
    return run_paths<cplx>(config, params, horizon, f);
}

std::vector<PathState> simulate_paths(const SimConfig& config, const ModelParams& params, double horizon) {
    return run_paths<PathState>(config, params, horizon, [](const PathState& s) { return s; });
}

void write_ensemble_csv(std::ostream& os, const std::vector<PathState>& paths) {
    const auto old = os.precision(9);
    os << "path_id,t";
    if (!paths.empty()) {
        const auto d = paths.front().X.rows();
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) os << ",x" << i + 1 << j + 1;
        for (Eigen::Index i = 0; i < paths.front().Y.size(); ++i) os << ",y" << i + 1;
    }
    os << ",int_r\n";
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const auto& s = paths[k];
        os << k << ',' << s.t;
        for (Eigen::Index i = 0; i < s.X.rows(); ++i)
            for (Eigen::Index j = 0; j < s.X.cols(); ++j) os << ',' << s.X(i, j);
        for (Eigen::Index i = 0; i < s.Y.size(); ++i) os << ',' << s.Y[i];
        os << ',' << s.int_r << '\n';
    }
    os.precision(old);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += v[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

McEstimate summarize(const std::vector<double>& samples) {
    McEstimate e;
    e.n = static_cast<long>(samples.size());
    if (samples.empty()) return e;
    e.mean = pairwise_sum(samples.data(), samples.size()) / static_cast<double>(e.n);
    if (e.n > 1) {
        std::vector<double> dev(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) dev[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
        const double var = pairwise_sum(dev.data(), dev.size()) / static_cast<double>(e.n - 1);
        e.std_error = std::sqrt(var / static_cast<double>(e.n));
    }
    e.ci_half_width = 1.959963984540054 * e.std_error;
    return e;
}

namespace {

double bond(const riccati::BondCoeffs& bc, double tau, const PathState& s) {
    return std::exp(bc.A(tau) + bc.B(tau).dot(s.Y) + (bc.D(tau) * s.X).trace());
}

void fill_vols(PriceResult& r, double forward_premium, double K, double T) {
    try {
        r.normal_vol_bp = 1e4 * expansion::implied_vol(forward_premium, r.forward, K, T, expansion::VolConvention::normal);
    } catch (const std::domain_error&) {
        r.normal_vol_bp = std::nan("");
    }
    try {
        r.lognormal_vol = expansion::implied_vol(forward_premium, r.forward, K, T, expansion::VolConvention::lognormal);
    } catch (const std::domain_error&) {
        r.lognormal_vol = std::nan("");
    }
}

}  // namespace

std::vector<PriceResult> mc_price_strikes(const InstrumentSpec& instrument, const std::vector<double>& strikes,
                                          const SimConfig& config, const ModelParams& params) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t nk = strikes.size();
    std::vector<PriceResult> out(nk);
    double expiry = 0.0, forward = 0.0, numeraire = 0.0;
    std::vector<Vec> samples;
    if (const auto* cs = std::get_if<CapletSpec>(&instrument)) {
        cs->check();
        expiry = cs->T;
        const auto bc = riccati::bond_coeffs(params, cs->T + cs->delta);
        const double dl = cs->delta;
        samples = run_paths<Vec>(config, params, cs->T, [&](const PathState& s) {
            const double pu = bond(bc, dl, s);
            const double libor = (1.0 / pu - 1.0) / dl;
            const double disc = std::exp(-s.int_r) * pu;
            Vec v(static_cast<Eigen::Index>(nk));
            for (std::size_t k = 0; k < nk; ++k) v[static_cast<Eigen::Index>(k)] = disc * std::max(libor - strikes[k], 0.0);
            return v;
        });
        const double p0t = riccati::zc_price(0.0, cs->T, params.x0, params.y0, bc);
        numeraire = riccati::zc_price(0.0, cs->T + dl, params.x0, params.y0, bc);
        forward = (p0t / numeraire - 1.0) / dl;
    } else {
        const auto& ss = std::get<SwaptionSpec>(instrument);
        ss.check();
        expiry = ss.T;
        const auto bc = riccati::bond_coeffs(params, ss.T + ss.m * ss.delta);
        samples = run_paths<Vec>(config, params, ss.T, [&](const PathState& s) {
            double annuity = 0.0;
            for (int k = 1; k <= ss.m; ++k) annuity += ss.delta * bond(bc, k * ss.delta, s);
            const double rate = (1.0 - bond(bc, ss.m * ss.delta, s)) / annuity;
            const double disc = std::exp(-s.int_r) * annuity;
            Vec v(static_cast<Eigen::Index>(nk));
            for (std::size_t k = 0; k < nk; ++k) v[static_cast<Eigen::Index>(k)] = disc * std::max(rate - strikes[k], 0.0);
            return v;
        });
        for (int k = 1; k <= ss.m; ++k)
            numeraire += ss.delta * riccati::zc_price(0.0, ss.T + k * ss.delta, params.x0, params.y0, bc);
        const double p0t = riccati::zc_price(0.0, ss.T, params.x0, params.y0, bc);
        const double p0e = riccati::zc_price(0.0, ss.T + ss.m * ss.delta, params.x0, params.y0, bc);
        forward = (p0t - p0e) / numeraire;
    }
    std::vector<double> column(samples.size());
    for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i][static_cast<Eigen::Index>(k)];
        const McEstimate e = summarize(column);
        PriceResult& r = out[k];
        r.method = "mc";
        r.price = e.mean;
        r.std_error = e.std_error;
        r.ci_half_width = e.ci_half_width;
        r.forward = forward;
        r.numeraire = numeraire;
        fill_vols(r, e.mean / numeraire, strikes[k], expiry);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (auto& r : out) r.seconds = secs;
    return out;
}

PriceResult mc_price(const InstrumentSpec& instrument, const SimConfig& config, const ModelParams& params) {
    const double K = std::visit([](const auto& spec) { return spec.K; }, instrument);
    return mc_price_strikes(instrument, {K}, config, params).front();
}

cplx weak_error_reference(const ModelParams& params, const Mat& Gamma, const Vec& Lambda, double T) {
    riccati::LaplaceQuery<cplx> q = riccati::LaplaceQuery<cplx>::zero(params.dims);
    q.Lambda = cplx(0.0, -1.0) * Lambda.cast<cplx>();
    q.Gamma = cplx(0.0, -1.0) * Gamma.cast<cplx>();
    return riccati::laplace_transform<cplx>(0.0, T, q, params, params.x0, params.y0);
}

WeakErrorTable weak_error_cf(const std::vector<int>& steps, const SimConfig& base,
                             const ModelParams& params, const Mat& Gamma, const Vec& Lambda, double T) {
    WeakErrorTable table;
    const cplx ref = weak_error_reference(params, Gamma, Lambda, T);
    for (int n : steps) {
        const auto start = std::chrono::steady_clock::now();
        SimConfig cfg = base;
        cfg.total_steps = n;
        const auto samples = sample_paths_complex(cfg, params, T, [&](const PathState& s) {
            return std::exp(cplx(0.0, -((Gamma * s.X).trace() + Lambda.dot(s.Y))));
        });
        std::vector<double> re(samples.size()), im(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            re[i] = samples[i].real();
            im[i] = samples[i].imag();
        }
        const McEstimate er = summarize(re), ei = summarize(im);
        WeakErrorRow row;
        row.steps = n;
        row.estimate = cplx(er.mean, ei.mean);
        row.ci_real = er.ci_half_width;
        row.ci_imag = ei.ci_half_width;
        row.reference = ref;
        row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        table.rows.push_back(row);
    }
    // least squares of log|error| on log(step size)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& row : table.rows) {
        const double err = std::abs(row.estimate - row.reference);
        if (!(err > 0.0)) continue;
        const double x = std::log(T / row.steps), y = std::log(err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    table.slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : std::nan("");
    return table;
}

void write_weak_error_csv(std::ostream& os, const WeakErrorTable& table) {
    const auto old = os.precision(9);
    os << "N,real_est,imag_est,ci,ref_real,ref_imag\n";
    for (const auto& row : table.rows)
        os << row.steps << ',' << row.estimate.real() << ',' << row.estimate.imag() << ','
           << std::max(row.ci_real, row.ci_imag) << ',' << row.reference.real() << ','
           << row.reference.imag() << '\n';
    os.precision(old);
}

}  // namespace wr::sim
