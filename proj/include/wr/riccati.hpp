#pragma once

#include <iosfwd>
#include <vector>

#include "wr/model.hpp"
#include "wr/ode.hpp"
#include "wr/types.hpp"

namespace wr::riccati {

/// Exponential-affine transform E[exp(Lambda.Y_T + Tr(Gamma X_T) + int (Lambda_bar.Y + Tr(Gamma_bar X)))].
/// Terminal weights may be complex; running weights are real.
template <class S>
struct LaplaceQuery {
    VecT<S> Lambda;
    MatT<S> Gamma;
    Vec Lambda_bar;
    Mat Gamma_bar;

    static LaplaceQuery zero(const Dimensions& dims);
};

struct SolverOptions {
    double tol = 1e-10;
    double blow_up_threshold = 1e8;
    double max_step = 0.1;
};

template <class S>
VecT<S> lambda_closed_form(double t, const VecT<S>& Lambda, const Vec& Lambda_bar, const Vec& kappa);

/// Solution of the matrix Riccati system for (lambda, g, eta) on [0, horizon].
template <class S>
class RiccatiSolution {
public:
    RiccatiSolution(LaplaceQuery<S> query, Vec kappa, int d, ode::Trajectory<S> traj, double horizon);

    double horizon() const { return horizon_; }
    bool blew_up() const { return traj_.blew_up; }
    double blow_up_time() const { return traj_.blow_up_time; }
    const std::vector<double>& grid() const { return traj_.t; }

    VecT<S> lambda(double t) const;
    MatT<S> g(double t) const;
    S eta(double t) const;

private:
    LaplaceQuery<S> query_;
    Vec kappa_;
    int d_;
    ode::Trajectory<S> traj_;
    double horizon_;
};

template <class S>
RiccatiSolution<S> solve_mrde(const LaplaceQuery<S>& query, const ModelParams& params,
                              double horizon, SolverOptions opt = {});

/// exp(eta + Tr(g x) + lambda.y) at time-to-maturity T - t. Throws blow_up_error.
template <class S>
S laplace_transform(double t, double T, const LaplaceQuery<S>& query, const ModelParams& params,
                    const Mat& x, const Vec& y, SolverOptions opt = {});

enum class CertificateMode { none, zero_candidate, scaled_identity };

struct NonExplosionCertificate {
    Mat upsilon;
    bool holds = false;
    CertificateMode mode = CertificateMode::none;
};

NonExplosionCertificate check_non_explosion(const LaplaceQuery<double>& query,
                                            const ModelParams& params, double horizon);

/// Zero-coupon coefficients: P(t,T) = exp(A(T-t) + B(T-t).y + Tr(D(T-t) x)).
class BondCoeffs {
public:
    BondCoeffs(RiccatiSolution<double> sol, double phi);

    double horizon() const { return sol_.horizon(); }
    double A(double tau) const;
    Vec B(double tau) const;
    Mat D(double tau) const;
    const std::vector<double>& grid() const { return sol_.grid(); }

    /// Columns: tau, A, B_1..B_p, vec(D) row-major.
    void write_csv(std::ostream& os, const std::vector<double>& taus) const;

private:
    void check_range(double tau) const;

    RiccatiSolution<double> sol_;
    double phi_;
};

BondCoeffs bond_coeffs(const ModelParams& params, double horizon, SolverOptions opt = {});

double zc_price(double t, double T, const Mat& x, const Vec& y, const BondCoeffs& coeffs);

enum class ForwardRoute { composition, direct };

/// Coefficients of E^U[exp(Lambda.Y_T + Tr(Gamma X_T)) | X_t = x, Y_t = y] = exp(A + Tr(D x) + B.y).
template <class S>
struct ForwardCoeffs {
    S A;
    VecT<S> B;
    MatT<S> D;

    S evaluate(const Mat& x, const Vec& y) const;
};

template <class S>
ForwardCoeffs<S> forward_coeffs(double t, double T, double U, const VecT<S>& Lambda,
                                const MatT<S>& Gamma, const ModelParams& params,
                                const BondCoeffs& bonds, ForwardRoute route, SolverOptions opt = {});

template <class S>
S forward_laplace(double t, double T, double U, const VecT<S>& Lambda, const MatT<S>& Gamma,
                  const ModelParams& params, const Mat& x, const Vec& y, ForwardRoute route,
                  SolverOptions opt = {});

}  // namespace wr::riccati
