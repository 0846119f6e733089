#pragma once

#include <optional>
#include <vector>

#include "wr/instrument.hpp"
#include "wr/kernels.hpp"
#include "wr/model.hpp"
#include "wr/ode.hpp"
#include "wr/riccati.hpp"

namespace wr::expansion {

/// Deterministic covariance flow x' = omega + b x + x b^T started at x, evaluated at time s.
Mat x0_flow(double s, const Mat& x, const ModelParams& params);

/// First two terms of the bond support in powers of epsilon: D = D0 + eps D1 + O(eps^2).
class SupportExpansion {
public:
    SupportExpansion(const ModelParams& params, double horizon);

    Mat D0(double tau) const;
    Mat D1(double tau) const;
    double horizon() const { return traj_.end(); }

private:
    int d_;
    ode::Trajectory<double> traj_;
};

std::pair<Mat, Mat> d_expansion(double tau, const ModelParams& params);

struct QuadOptions {
    double step = 1.0 / 20.0;
};

double caplet_base_var(double t, const CapletSpec& spec, const Mat& x, const ModelParams& params,
                       QuadOptions q = {});

struct CapletExpansionCoeffs {
    double v = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0, e5 = 0.0, e6 = 0.0;
};

CapletExpansionCoeffs caplet_expansion_coeffs(double t, const CapletSpec& spec, const Mat& x,
                                              const ModelParams& params, QuadOptions q = {});

/// Orders of the expanded forward price E^{T+delta}[(e^{H_T} - (1 + delta K))^+].
struct CapletExpansion {
    CapletExpansionCoeffs coeffs;
    double h = 0.0;           // log(P(t,T) / P(t,T+delta))
    double log_strike = 0.0;  // log(1 + delta K)
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double numeraire = 0.0;   // P(t, T+delta)
    double delta = 0.0;
    double epsilon = 0.0;

    double forward_premium() const { return p0 + epsilon * p1 + epsilon * epsilon * p2; }
    /// (1/delta) forward premium: the undiscounted caplet per unit accrual.
    double forward_caplet() const { return forward_premium() / delta; }
    double price() const { return numeraire * forward_caplet(); }
    double forward_rate() const { return std::expm1(h) / delta; }
    /// h-derivative form of the first order implied variance correction.
    double first_order_var_correction() const;
};

/// Expansion at log-forward h (time-t value); numeraire P(t,T+delta) supplied by the caller.
CapletExpansion caplet_price_expanded_h(double t, const CapletSpec& spec, const Mat& x, double h,
                                        double numeraire, const ModelParams& params, QuadOptions q = {});

/// Expansion at factor state y; h and the numeraire come from the bond coefficients.
CapletExpansion caplet_price_expanded(double t, const CapletSpec& spec, const Mat& x, const Vec& y,
                                      const ModelParams& params, const riccati::BondCoeffs& bonds,
                                      QuadOptions q = {});

PriceResult to_price_result(const CapletExpansion& e, const CapletSpec& spec, double t);

/// Frozen-weight affine proxy of the forward swap rate.
class SwaptionAffine {
public:
    SwaptionAffine(double t, const SwaptionSpec& spec, const Mat& x, const Vec& y,
                   const ModelParams& params, const riccati::BondCoeffs& bonds,
                   std::optional<double> swap_rate = std::nullopt);

    double swap_rate() const { return S0_; }
    double annuity() const { return annuity_; }
    const std::vector<double>& weights() const { return weights_; }
    double first_weight() const { return first_; }  // P(t,T) / (delta sum P)
    double last_weight() const { return last_; }    // P(t,T+m delta) / (delta sum P)

    Vec BS(double s) const;
    Mat DS(int order, double s) const;  // order 0 or 1
    Vec BA(double s) const;
    Mat DA0(double s) const;

    const SupportExpansion& supports() const { return supports_; }

private:
    Vec B(double tau) const;

    double t_;
    SwaptionSpec spec_;
    Vec kappa_;
    SupportExpansion supports_;
    std::vector<double> weights_;
    double first_ = 0.0, last_ = 0.0, S0_ = 0.0, annuity_ = 0.0;
};

struct SwaptionExpansionCoeffs {
    double vS = 0.0;
    double cS1 = 0.0, cS2 = 0.0;
    double dS1 = 0.0, dS2 = 0.0, dS3 = 0.0;
    double eS1 = 0.0, eS2 = 0.0, eS3 = 0.0, eS4 = 0.0, eS5 = 0.0;
};

SwaptionExpansionCoeffs swaption_expansion_coeffs(double t, const SwaptionAffine& affine,
                                                  const SwaptionSpec& spec, const Mat& x,
                                                  const ModelParams& params, QuadOptions q = {});

struct SwaptionExpansion {
    SwaptionExpansionCoeffs coeffs;
    double swap_rate = 0.0;
    double annuity = 0.0;
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double epsilon = 0.0;

    double forward_premium() const { return p0 + epsilon * p1 + epsilon * epsilon * p2; }
    double price() const { return annuity * forward_premium(); }
};

SwaptionExpansion swaption_price_expanded(double t, const SwaptionSpec& spec, const Mat& x,
                                          const Vec& y, const ModelParams& params,
                                          const riccati::BondCoeffs& bonds,
                                          std::optional<double> swap_rate = std::nullopt,
                                          QuadOptions q = {});

PriceResult to_price_result(const SwaptionExpansion& e, const SwaptionSpec& spec, double t);

}  // namespace wr::expansion
