#pragma once

#include <string>
#include <vector>

#include "wr/types.hpp"

namespace wr {

struct Dimensions {
    int p = 1;  // yield-curve factors
    int d = 1;  // order of the covariance driver
    int n = 0;  // rank of the perturbation selector
};

/// Full parameter set of the factor model driven by a matrix covariance process.
struct ModelParams {
    Dimensions dims;
    Vec kappa;
    Vec theta;
    Vec y0;
    Mat x0;
    Mat omega;
    Mat b;
    double epsilon = 0.0;
    Mat c;  // p x d
    Vec rho;
    Mat gamma;
    double phi = 0.0;

    double rho_bar() const;
    Mat selector() const;            // I^n_d
    Vec selected_rho() const;        // I^n_d rho
    Mat effective_omega() const;     // omega + (d-1) eps^2 I^n_d
};

struct StructureOptions {
    // The model convention needs 0 < kappa_1 < ... < kappa_p; transform studies may relax it.
    bool require_ordered_kappa = true;
};

/// Throws structural_error on shape mismatch, asymmetric inputs, |rho|>1 or kappa convention breaches.
void check_structure(const ModelParams& params, StructureOptions opt = {});

/// Zeroes rho beyond the first n entries.
ModelParams normalized(ModelParams params);

struct ValidationReport {
    bool weak_solution_ok = false;
    bool strong_solution_ok = false;
    bool bond_condition_ok = false;
    bool stationarity_ok = false;
    std::vector<std::string> messages;
};

ValidationReport validate_params(const ModelParams& params, StructureOptions opt = {});

// Constant-covariance limit and curve utilities.

Vec lgm_support_B(double tau, const Vec& kappa);

struct QuadratureOptions {
    double step = 1.0 / 20.0;
};

/// Zero-coupon price in the constant covariance limit V = c x0 c^T (short rate shifted by Tr(gamma x0)).
double lgm_zc_price(double t, double T, const Vec& y, const ModelParams& params,
                    QuadratureOptions q = {});

/// Integrated log-normal caplet variance over [t,T] for a constant factor covariance V.
double lgm_caplet_lognormal_var(double t, double T, double delta, const Mat& V, const Vec& kappa,
                                QuadratureOptions q = {});

double support_weight(int i, int j, double tau, double delta, const Vec& kappa);

/// Log-linear interpolation of zero-coupon prices.
class DiscountCurve {
public:
    DiscountCurve(std::vector<double> times, std::vector<double> prices);

    double price(double t) const;
    double horizon() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& prices() const { return prices_; }

private:
    std::vector<double> times_;
    std::vector<double> prices_;
};

double forward_libor(const DiscountCurve& curve, double T, double delta);

struct SwapQuote {
    double rate = 0.0;
    double annuity = 0.0;
    std::vector<double> weights;  // omega^k, k = 1..m
};

SwapQuote forward_swap(const DiscountCurve& curve, double T, int m, double delta);

double lgm_swaption_normal_var(double t, double T, int m, double delta, const Mat& V,
                               const Vec& kappa, const DiscountCurve& curve,
                               QuadratureOptions q = {});

}  // namespace wr
