#include "wr/riccati.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "wr/linalg.hpp"

namespace wr::riccati {

namespace {

template <class S>
MatT<S> unpack(const VecT<S>& v, int d, int offset = 0) {
    return Eigen::Map<const MatT<S>>(v.data() + offset, d, d);
}

template <class S>
void pack(VecT<S>& v, const MatT<S>& m, int offset = 0) {
    Eigen::Map<MatT<S>>(v.data() + offset, m.rows(), m.cols()) = m;
}

template <class S>
void symmetrize_block(VecT<S>& v, int d, int offset = 0) {
    Eigen::Map<MatT<S>> m(v.data() + offset, d, d);
    const MatT<S> s = (m + m.transpose()) * S(0.5);
    m = s;
}

template <class S>
double block_norm(const VecT<S>& v, int d, int offset = 0) {
    return Eigen::Map<const MatT<S>>(v.data() + offset, d, d).norm();
}

// Quadratic Riccati vector field shared by every transform: the g-part of the system for a given
// linear weight lambda(t).
template <class S>
MatT<S> riccati_field(const MatT<S>& g, const VecT<S>& lam, const ModelParams& p, const Mat& sel,
                      const Vec& srho, const Mat& running) {
    const double eps = p.epsilon;
    const MatT<S> c = p.c.cast<S>();
    const VecT<S> ct_lam = c.transpose() * lam;
    const MatT<S> drift = p.b.cast<S>() + S(eps) * srho.cast<S>() * ct_lam.transpose();
    MatT<S> out = g * drift + drift.transpose() * g + S(0.5) * ct_lam * ct_lam.transpose() + running.cast<S>();
    if (eps != 0.0) out += S(2.0 * eps * eps) * g * sel.cast<S>() * g;
    return out;
}

ode::Options ode_options(const SolverOptions& opt) {
    ode::Options o;
    o.rtol = opt.tol;
    o.atol = opt.tol * 1e-2;
    o.max_step = opt.max_step;
    o.blow_up_norm = opt.blow_up_threshold;
    return o;
}

}  // namespace

template <class S>
LaplaceQuery<S> LaplaceQuery<S>::zero(const Dimensions& dims) {
    return {VecT<S>::Zero(dims.p), MatT<S>::Zero(dims.d, dims.d), Vec::Zero(dims.p),
            Mat::Zero(dims.d, dims.d)};
}

template <class S>
VecT<S> lambda_closed_form(double t, const VecT<S>& Lambda, const Vec& Lambda_bar, const Vec& kappa) {
    VecT<S> out(kappa.size());
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        const double k = kappa[i];
        if (k == 0.0) {
            out[i] = Lambda[i] + S(Lambda_bar[i] * t);
        } else {
            const double decay = std::exp(-k * t);
            out[i] = Lambda[i] * decay - S(Lambda_bar[i] / k * std::expm1(-k * t));
        }
    }
    return out;
}

template <class S>
RiccatiSolution<S>::RiccatiSolution(LaplaceQuery<S> query, Vec kappa, int d, ode::Trajectory<S> traj,
                                    double horizon)
    : query_(std::move(query)), kappa_(std::move(kappa)), d_(d), traj_(std::move(traj)), horizon_(horizon) {}

template <class S>
VecT<S> RiccatiSolution<S>::lambda(double t) const {
    return lambda_closed_form<S>(t, query_.Lambda, query_.Lambda_bar, kappa_);
}

template <class S>
MatT<S> RiccatiSolution<S>::g(double t) const {
    return unpack<S>(traj_.at(t), d_);
}

template <class S>
S RiccatiSolution<S>::eta(double t) const {
    return traj_.at(t)[d_ * d_];
}

template <class S>
RiccatiSolution<S> solve_mrde(const LaplaceQuery<S>& q, const ModelParams& p, double horizon,
                              SolverOptions opt) {
    const int d = p.dims.d;
    if (q.Lambda.size() != p.dims.p || q.Lambda_bar.size() != p.dims.p || q.Gamma.rows() != d ||
        q.Gamma.cols() != d || q.Gamma_bar.rows() != d || q.Gamma_bar.cols() != d)
        throw structural_error("Laplace query does not match model dimensions");
    if (!(horizon > 0.0)) throw std::domain_error("solve_mrde: horizon must be positive");

    const Mat sel = p.selector();
    const Vec srho = p.selected_rho();
    const Mat om = p.effective_omega();
    const Vec kt = p.kappa.cwiseProduct(p.theta);

    auto rhs = [&](double t, const VecT<S>& v) {
        const MatT<S> g = unpack<S>(v, d);
        const VecT<S> lam = lambda_closed_form<S>(t, q.Lambda, q.Lambda_bar, p.kappa);
        VecT<S> out(d * d + 1);
        pack<S>(out, riccati_field<S>(g, lam, p, sel, srho, q.Gamma_bar));
        out[d * d] = lam.cwiseProduct(kt.cast<S>()).sum() + (g * om.cast<S>()).trace();
        return out;
    };
    VecT<S> y0(d * d + 1);
    pack<S>(y0, MatT<S>((q.Gamma + q.Gamma.transpose()) * S(0.5)));
    y0[d * d] = S(0);
    auto traj = ode::integrate<S>(rhs, y0, 0.0, horizon, ode_options(opt),
                                  [d](VecT<S>& v) { symmetrize_block<S>(v, d); },
                                  [d](const VecT<S>& v) { return block_norm<S>(v, d); });
    return RiccatiSolution<S>(q, p.kappa, d, std::move(traj), horizon);
}

template <class S>
S laplace_transform(double t, double T, const LaplaceQuery<S>& q, const ModelParams& p, const Mat& x,
                    const Vec& y, SolverOptions opt) {
    const double tau = T - t;
    if (tau < 0.0) throw std::domain_error("laplace_transform: T < t");
    if (tau == 0.0) {
        return std::exp(q.Lambda.cwiseProduct(y.cast<S>()).sum() + (q.Gamma * x.cast<S>()).trace());
    }
    const auto sol = solve_mrde<S>(q, p, tau, opt);
    if (sol.blew_up()) throw blow_up_error("Riccati solution blows up before maturity", sol.blow_up_time());
    return std::exp(sol.eta(tau) + (sol.g(tau) * x.cast<S>()).trace() + sol.lambda(tau).cwiseProduct(y.cast<S>()).sum());
}

NonExplosionCertificate check_non_explosion(const LaplaceQuery<double>& q, const ModelParams& p,
                                            double horizon) {
    const int d = p.dims.d;
    const Mat ctc = p.c.transpose() * p.c;
    NonExplosionCertificate cert;

    // zero candidate: bound |lambda_i(t)| by max(|Lambda_i|, |Lambda_bar_i / kappa_i|)
    {
        double bound = 0.0;
        bool finite = true;
        for (int i = 0; i < p.dims.p; ++i) {
            double m = std::abs(q.Lambda[i]);
            if (q.Lambda_bar[i] != 0.0) {
                if (p.kappa[i] > 0.0)
                    m = std::max(m, std::abs(q.Lambda_bar[i] / p.kappa[i]));
                else
                    finite = false;
            }
            bound += m * m;
        }
        if (finite && linalg::is_psd(-q.Gamma) &&
            linalg::is_psd(-q.Gamma_bar - 0.5 * bound * ctc)) {
            cert.upsilon = Mat::Zero(d, d);
            cert.holds = true;
            cert.mode = CertificateMode::zero_candidate;
            return cert;
        }
    }

    const double mu = linalg::min_eigenvalue(-(p.b + p.b.transpose()));
    if (!(mu > 0.0)) return cert;
    const double eps = p.epsilon;
    const Mat sel = p.selector();
    const Vec srho = p.selected_rho();
    constexpr int kGrid = 512;

    auto holds_for = [&](double s) {
        const Mat ups = s * Mat::Identity(d, d);
        if (!linalg::is_psd(ups - q.Gamma)) return false;
        for (int k = 0; k < kGrid; ++k) {
            const double t = horizon * k / (kGrid - 1);
            const Vec lam = lambda_closed_form<double>(t, q.Lambda, q.Lambda_bar, p.kappa);
            const Mat drift = p.b + eps * srho * (p.c.transpose() * lam).transpose();
            const Vec ctl = p.c.transpose() * lam;
            const Mat m = 2 * eps * eps * ups * sel * ups + ups * drift + drift.transpose() * ups +
                          0.5 * ctl * ctl.transpose() + q.Gamma_bar;
            if (!linalg::is_psd(-m)) return false;
        }
        return true;
    };

    double s;
    if (eps > 0.0) {
        s = mu / (4 * eps * eps);
    } else {
        // without the quadratic term any large enough multiple of the identity works
        double need = std::max(0.0, linalg::min_eigenvalue(-q.Gamma) * -1.0);
        for (int k = 0; k < kGrid; ++k) {
            const double t = horizon * k / (kGrid - 1);
            const Vec ctl = p.c.transpose() * lambda_closed_form<double>(t, q.Lambda, q.Lambda_bar, p.kappa);
            const Mat rest = 0.5 * ctl * ctl.transpose() + q.Gamma_bar;
            need = std::max(need, 2.0 * std::max(0.0, -linalg::min_eigenvalue(-rest)) / mu);
        }
        s = 2.0 * need + 1.0;
    }
    if (holds_for(s)) {
        cert.upsilon = s * Mat::Identity(d, d);
        cert.holds = true;
        cert.mode = CertificateMode::scaled_identity;
    }
    return cert;
}

BondCoeffs::BondCoeffs(RiccatiSolution<double> sol, double phi) : sol_(std::move(sol)), phi_(phi) {}

void BondCoeffs::check_range(double tau) const {
    if (tau < 0.0 || tau > horizon() * (1 + 1e-12))
        throw std::out_of_range("bond coefficients requested outside [0, horizon]");
}

double BondCoeffs::A(double tau) const {
    check_range(tau);
    return sol_.eta(tau) - phi_ * tau;
}

Vec BondCoeffs::B(double tau) const {
    check_range(tau);
    return sol_.lambda(tau);
}

Mat BondCoeffs::D(double tau) const {
    check_range(tau);
    return sol_.g(tau);
}

void BondCoeffs::write_csv(std::ostream& os, const std::vector<double>& taus) const {
    const Eigen::Index p = B(0.0).size();
    const Eigen::Index d = D(0.0).rows();
    os << "tau,A";
    for (Eigen::Index i = 0; i < p; ++i) os << ",B" << i + 1;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) os << ",D" << i + 1 << j + 1;
    os << '\n';
    const auto old = os.precision(9);
    for (double tau : taus) {
        const Vec b = B(tau);
        const Mat dm = D(tau);
        os << tau << ',' << A(tau);
        for (Eigen::Index i = 0; i < p; ++i) os << ',' << b[i];
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) os << ',' << dm(i, j);
        os << '\n';
    }
    os.precision(old);
}

BondCoeffs bond_coeffs(const ModelParams& p, double horizon, SolverOptions opt) {
    auto q = LaplaceQuery<double>::zero(p.dims);
    q.Lambda_bar = -Vec::Ones(p.dims.p);
    q.Gamma_bar = -p.gamma;
    auto sol = solve_mrde<double>(q, p, horizon, opt);
    if (sol.blew_up()) {
        std::ostringstream os;
        os << "bond coefficients blow up; maximal safe horizon is " << sol.blow_up_time();
        throw blow_up_error(os.str(), sol.blow_up_time());
    }
    // under gamma >= sum(1/kappa_i^2) c^T c / 2 the support D stays negative semidefinite
    double inv_k2 = 0.0;
    bool finite = true;
    for (int i = 0; i < p.dims.p; ++i) {
        if (p.kappa[i] > 0.0)
            inv_k2 += 1.0 / (p.kappa[i] * p.kappa[i]);
        else
            finite = false;
    }
    if (finite && linalg::is_psd(p.gamma - 0.5 * inv_k2 * p.c.transpose() * p.c)) {
        for (double tau : sol.grid()) {
            const Mat dm = sol.g(tau);
            if (!linalg::is_psd(-dm, 1e-8) && dm.norm() > 1e-14)
                throw std::runtime_error("bond coefficient D is not negative semidefinite");
        }
    }
    return BondCoeffs(std::move(sol), p.phi);
}

double zc_price(double t, double T, const Mat& x, const Vec& y, const BondCoeffs& coeffs) {
    const double tau = T - t;
    if (tau < 0.0) throw std::domain_error("zc_price: T < t");
    return std::exp(coeffs.A(tau) + coeffs.B(tau).dot(y) + (coeffs.D(tau) * x).trace());
}

template <class S>
S ForwardCoeffs<S>::evaluate(const Mat& x, const Vec& y) const {
    return std::exp(A + (D * x.cast<S>()).trace() + B.cwiseProduct(y.cast<S>()).sum());
}

namespace {

template <class S>
void check_forward_preconditions(double t, double T, double U, const VecT<S>& Lambda,
                                 const MatT<S>& Gamma, const ModelParams& p) {
    if (!(t <= T && T <= U)) throw std::domain_error("forward transform needs t <= T <= U");
    if (Lambda.size() != p.dims.p || Gamma.rows() != p.dims.d || Gamma.cols() != p.dims.d)
        throw structural_error("forward transform weights do not match model dimensions");
    if constexpr (std::is_same_v<S, double>) {
        for (int i = 0; i < p.dims.p; ++i) {
            const double k = p.kappa[i];
            if (k > 0.0 && std::abs(Lambda[i]) > std::exp(-k * (U - T)) / k)
                throw std::domain_error("forward transform: |Lambda_i| exceeds exp(-kappa_i (U-T))/kappa_i");
        }
        if (!linalg::is_psd(-Gamma)) throw std::domain_error("forward transform: -Gamma is not PSD");
    }
}

template <class S>
ForwardCoeffs<S> compose(double t, double T, double U, const VecT<S>& Lambda, const MatT<S>& Gamma,
                         const ModelParams& p, const BondCoeffs& bonds, SolverOptions opt) {
    const double tau = T - t;
    const double gap = U - T;
    ForwardCoeffs<S> out;
    if (tau == 0.0) {
        out.A = S(0);
        out.B = Lambda;
        out.D = Gamma;
        return out;
    }
    LaplaceQuery<S> q;
    q.Lambda = Lambda + bonds.B(gap).cast<S>();
    q.Gamma = Gamma + bonds.D(gap).cast<S>();
    q.Lambda_bar = -Vec::Ones(p.dims.p);
    q.Gamma_bar = -p.gamma;
    const auto sol = solve_mrde<S>(q, p, tau, opt);
    if (sol.blew_up()) throw blow_up_error("forward transform blows up", T - sol.blow_up_time());
    out.A = sol.eta(tau) - S(p.phi * tau) + S(bonds.A(gap) - bonds.A(U - t));
    out.B = sol.lambda(tau) - bonds.B(U - t).cast<S>();
    out.D = sol.g(tau) - bonds.D(U - t).cast<S>();
    return out;
}

// Forward-measure system integrated in time-to-expiry, carrying the bond support D(U-T+tau) along.
template <class S>
ForwardCoeffs<S> direct(double t, double T, double U, const VecT<S>& Lambda, const MatT<S>& Gamma,
                        const ModelParams& p, const BondCoeffs& bonds, SolverOptions opt) {
    const int d = p.dims.d;
    const int dd = d * d;
    const double tau_end = T - t;
    const double gap = U - T;
    ForwardCoeffs<S> out;
    if (tau_end == 0.0) {
        out.A = S(0);
        out.B = Lambda;
        out.D = Gamma;
        return out;
    }
    const double eps = p.epsilon;
    const Mat sel = p.selector();
    const Vec srho = p.selected_rho();
    const Mat om = p.effective_omega();
    const Vec kt = p.kappa.cwiseProduct(p.theta);
    const MatT<S> c = p.c.cast<S>();
    const Vec ones = Vec::Ones(p.dims.p);
    const Vec zero_p = Vec::Zero(p.dims.p);

    auto rhs = [&](double tau, const VecT<S>& v) {
        const MatT<S> du = unpack<S>(v, d, 0);
        const Mat db = unpack<S>(v, d, dd + 1).real();
        const VecT<S> bu = lambda_closed_form<S>(tau, Lambda, zero_p, p.kappa);
        const Vec bb = lambda_closed_form<double>(gap + tau, Vec::Zero(p.dims.p), -ones, p.kappa);
        const VecT<S> ct_bu = c.transpose() * bu;
        const Vec ct_bb = p.c.transpose() * bb;
        const MatT<S> bfwd = (p.b + 2 * eps * eps * sel * db + eps * srho * ct_bb.transpose()).cast<S>();
        const MatT<S> drift = bfwd + S(eps) * srho.cast<S>() * ct_bu.transpose();
        MatT<S> ddu = du * drift + drift.transpose() * du + S(0.5) * ct_bu * ct_bu.transpose() +
                      S(0.5) * (ct_bu * ct_bb.cast<S>().transpose() + ct_bb.cast<S>() * ct_bu.transpose());
        if (eps != 0.0) {
            ddu += S(2 * eps * eps) * du * sel.cast<S>() * du;
            const MatT<S> cross = db.cast<S>() * srho.cast<S>() * ct_bu.transpose();
            ddu += S(eps) * (cross + cross.transpose());
        }
        const Mat bond_drift = p.b + eps * srho * ct_bb.transpose();
        Mat ddb = db * bond_drift + bond_drift.transpose() * db + 0.5 * ct_bb * ct_bb.transpose() - p.gamma;
        if (eps != 0.0) ddb += 2 * eps * eps * db * sel * db;
        VecT<S> outv(2 * dd + 1);
        pack<S>(outv, ddu, 0);
        outv[dd] = bu.cwiseProduct(kt.cast<S>()).sum() + (du * om.cast<S>()).trace();
        pack<S>(outv, MatT<S>(ddb.cast<S>()), dd + 1);
        return outv;
    };

    VecT<S> y0(2 * dd + 1);
    pack<S>(y0, MatT<S>((Gamma + Gamma.transpose()) * S(0.5)), 0);
    y0[dd] = S(0);
    pack<S>(y0, MatT<S>(bonds.D(gap).cast<S>()), dd + 1);
    auto traj = ode::integrate<S>(
        rhs, y0, 0.0, tau_end, ode_options(opt),
        [d, dd](VecT<S>& v) {
            symmetrize_block<S>(v, d, 0);
            symmetrize_block<S>(v, d, dd + 1);
        },
        [d](const VecT<S>& v) { return block_norm<S>(v, d, 0); });
    if (traj.blew_up) throw blow_up_error("forward transform blows up", T - traj.blow_up_time);
    const VecT<S> end = traj.y.back();
    out.D = unpack<S>(end, d, 0);
    out.A = end[dd];
    out.B = lambda_closed_form<S>(tau_end, Lambda, zero_p, p.kappa);
    return out;
}

}  // namespace

template <class S>
ForwardCoeffs<S> forward_coeffs(double t, double T, double U, const VecT<S>& Lambda,
                                const MatT<S>& Gamma, const ModelParams& p, const BondCoeffs& bonds,
                                ForwardRoute route, SolverOptions opt) {
    check_forward_preconditions<S>(t, T, U, Lambda, Gamma, p);
    if (route == ForwardRoute::composition) return compose<S>(t, T, U, Lambda, Gamma, p, bonds, opt);
    return direct<S>(t, T, U, Lambda, Gamma, p, bonds, opt);
}

template <class S>
S forward_laplace(double t, double T, double U, const VecT<S>& Lambda, const MatT<S>& Gamma,
                  const ModelParams& p, const Mat& x, const Vec& y, ForwardRoute route,
                  SolverOptions opt) {
    const BondCoeffs bonds = bond_coeffs(p, std::max(U - t, 1e-8), opt);
    return forward_coeffs<S>(t, T, U, Lambda, Gamma, p, bonds, route, opt).evaluate(x, y);
}

#define WR_RICCATI_INSTANTIATE(S)                                                                   \
    template struct LaplaceQuery<S>;                                                                \
    template VecT<S> lambda_closed_form<S>(double, const VecT<S>&, const Vec&, const Vec&);        \
    template class RiccatiSolution<S>;                                                              \
    template RiccatiSolution<S> solve_mrde<S>(const LaplaceQuery<S>&, const ModelParams&, double,   \
                                              SolverOptions);                                       \
    template S laplace_transform<S>(double, double, const LaplaceQuery<S>&, const ModelParams&,     \
                                    const Mat&, const Vec&, SolverOptions);                         \
    template struct ForwardCoeffs<S>;                                                               \
    template ForwardCoeffs<S> forward_coeffs<S>(double, double, double, const VecT<S>&,             \
                                                const MatT<S>&, const ModelParams&,                 \
                                                const BondCoeffs&, ForwardRoute, SolverOptions);    \
    template S forward_laplace<S>(double, double, double, const VecT<S>&, const MatT<S>&,           \
                                  const ModelParams&, const Mat&, const Vec&, ForwardRoute,         \
                                  SolverOptions);

WR_RICCATI_INSTANTIATE(double)
WR_RICCATI_INSTANTIATE(cplx)

#undef WR_RICCATI_INSTANTIATE

}  // namespace wr::riccati
