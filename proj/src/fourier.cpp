#include "wr/fourier.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "wr/kernels.hpp"

namespace wr::fourier {

int FourierConfig::panels() const {
    if (!(alpha > 0.0)) throw config_error("fourier: alpha must be positive");
    if (!(step > 0.0) || !(upper_limit > 0.0))
        throw config_error("fourier: step and upper limit must be positive");
    const double n = upper_limit / step;
    const long rounded = std::lround(n);
    if (std::abs(n - static_cast<double>(rounded)) > 1e-9 * n || rounded % 2 != 0)
        throw config_error("fourier: upper_limit/step must be an even integer for Simpson");
    return static_cast<int>(rounded);
}

Measure parse_measure(const std::string& s) {
    if (s == "T") return Measure::T_forward;
    if (s == "Tdelta") return Measure::Tdelta_forward;
    throw config_error("unknown measure '" + s + "' (expected T or Tdelta)");
}

std::string to_string(Measure m) { return m == Measure::T_forward ? "T" : "Tdelta"; }

CapletChangeOfVariable change_of_variable(const CapletSpec& spec, const riccati::BondCoeffs& bonds) {
    return {-bonds.A(spec.delta), -bonds.B(spec.delta), -bonds.D(spec.delta)};
}

CapletTransform::CapletTransform(double t, const CapletSpec& spec, Measure measure,
                                 const ModelParams& params, const Mat& x, const Vec& y,
                                 riccati::SolverOptions opt)
    : t_(t),
      spec_(spec),
      measure_(measure),
      params_(&params),
      x_(x),
      y_(y),
      opt_(opt),
      bonds_(riccati::bond_coeffs(params, spec.T + spec.delta - t, opt)),
      cov_(change_of_variable(spec, bonds_)) {
    spec.check();
    if (t > spec.T) throw std::domain_error("fourier: valuation time after expiry");
}

double CapletTransform::horizon_bond(double maturity) const {
    return riccati::zc_price(t_, maturity, x_, y_, bonds_);
}

cplx CapletTransform::cf(cplx u) const {
    if (u == cplx(0.0)) return 1.0;
    const cplx iu = cplx(0.0, 1.0) * u;
    // the T-forward underlying is -H_T
    const double sign = measure_ == Measure::Tdelta_forward ? 1.0 : -1.0;
    const CVec Lambda = (iu * sign) * cov_.dB.cast<cplx>();
    const CMat Gamma = (iu * sign) * cov_.dD.cast<cplx>();
    const double U = measure_ == Measure::Tdelta_forward ? spec_.T + spec_.delta : spec_.T;
    const auto fc = riccati::forward_coeffs<cplx>(t_, spec_.T, U, Lambda, Gamma, *params_, bonds_,
                                                  riccati::ForwardRoute::composition, opt_);
    return std::exp(iu * sign * cov_.dA) * fc.evaluate(x_, y_);
}

cplx forward_cf(cplx u, double t, const CapletSpec& spec, Measure measure, const ModelParams& params,
                const Mat& x, const Vec& y) {
    return CapletTransform(t, spec, measure, params, x, y).cf(u);
}

namespace {

template <class F>
void parallel_for(int n, int threads, F&& f) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += threads) f(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

FourierResult carr_madan_caplet(double t, const CapletSpec& spec, const FourierConfig& config,
                                Measure measure, const ModelParams& params, const Mat& x,
                                const Vec& y, riccati::SolverOptions opt) {
    const auto start = std::chrono::steady_clock::now();
    const int n = config.panels();
    const double h = config.upper_limit / n;
    const double a = config.alpha;
    const CapletTransform tr(t, spec, measure, params, x, y, opt);

    const double strike_factor = spec.strike_factor();
    // log-strike of the call on the log underlying
    const double k = measure == Measure::Tdelta_forward ? std::log(strike_factor) : -std::log(strike_factor);

    auto psi = [&](double u) {
        const cplx w(u, -(a + 1.0));
        const cplx den(a * a + a - u * u, (2.0 * a + 1.0) * u);
        return std::exp(cplx(0.0, -u * k)) * tr.cf(w) / den;
    };

    const int sides = config.symmetric ? 2 : 1;
    std::vector<cplx> values(static_cast<std::size_t>((n + 1) * sides));
    parallel_for((n + 1) * sides, config.threads, [&](int i) {
        const int j = i % (n + 1);
        const double u = (i <= n ? 1.0 : -1.0) * j * h;
        values[static_cast<std::size_t>(i)] = psi(u);
    });

    auto simpson = [&](int offset) {
        cplx acc = values[static_cast<std::size_t>(offset)] + values[static_cast<std::size_t>(offset + n)];
        for (int j = 1; j < n; ++j) acc += (j % 2 ? 4.0 : 2.0) * values[static_cast<std::size_t>(offset + j)];
        return acc * (h / 3.0);
    };
    const cplx positive = simpson(0);
    const double call = std::exp(-a * k) / std::numbers::pi * positive.real();

    FourierResult out;
    out.evaluations = static_cast<int>(values.size());
    out.damped_call = call;
    if (config.symmetric) {
        const cplx total = positive + simpson(n + 1);
        out.imag_residual = std::abs(std::exp(-a * k) / (2.0 * std::numbers::pi) * total.imag());
    }

    const double pT = tr.horizon_bond(spec.T);
    const double pU = tr.horizon_bond(spec.T + spec.delta);
    double fwd_caplet = 0.0;  // E^{T+delta}[(L_T - K)^+], per unit accrual
    if (measure == Measure::Tdelta_forward) {
        fwd_caplet = call / spec.delta;
    } else {
        // put on P(T,T+delta) struck at 1/(1+delta K) via parity with its T-forward value
        const double bond_fwd = pU / pT;
        const double put = call - bond_fwd + 1.0 / strike_factor;
        fwd_caplet = pT * strike_factor * put / (spec.delta * pU);
    }

    PriceResult& r = out.quote;
    r.method = "fourier_" + to_string(measure);
    r.numeraire = pU;
    r.forward = (pT / pU - 1.0) / spec.delta;
    r.price = pU * fwd_caplet;
    const double tau = spec.T - t;
    try {
        r.normal_vol_bp = 1e4 * expansion::implied_vol(fwd_caplet, r.forward, spec.K, tau,
                                                       expansion::VolConvention::normal);
    } catch (const std::domain_error&) {
        r.normal_vol_bp = std::nan("");
    }
    try {
        r.lognormal_vol = expansion::implied_vol(fwd_caplet, r.forward, spec.K, tau,
                                                 expansion::VolConvention::lognormal);
    } catch (const std::domain_error&) {
        r.lognormal_vol = std::nan("");
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

}  // namespace wr::fourier
