#pragma once

#include <string>

#include "wr/instrument.hpp"
#include "wr/model.hpp"
#include "wr/riccati.hpp"

namespace wr::fourier {

struct FourierConfig {
    double alpha = 1.25;
    double upper_limit = 375.0;
    double step = 1.0 / 8.0;
    int threads = 1;
    /// Also integrate the negative half-line to report the imaginary residual.
    bool symmetric = false;

    int panels() const;  // throws config_error unless the Simpson panel count is a positive even integer
};

enum class Measure { T_forward, Tdelta_forward };

Measure parse_measure(const std::string& s);  // "T" or "Tdelta"
std::string to_string(Measure m);

/// log(P(T,T)/P(T,T+delta)) = dA + Tr(dD X_T) + dB.Y_T.
struct CapletChangeOfVariable {
    double dA = 0.0;
    Vec dB;
    Mat dD;
};

CapletChangeOfVariable change_of_variable(const CapletSpec& spec, const riccati::BondCoeffs& bonds);

/// Characteristic function of the log underlying of one caplet, with the bond stage solved once.
/// Under the (T+delta)-forward measure the underlying is H_T; under the T-forward measure it is
/// log P(T,T+delta) = -H_T.
class CapletTransform {
public:
    CapletTransform(double t, const CapletSpec& spec, Measure measure, const ModelParams& params,
                    const Mat& x, const Vec& y, riccati::SolverOptions opt = {});

    cplx cf(cplx u) const;

    double horizon_bond(double maturity) const;  // P(t, maturity)
    const CapletChangeOfVariable& change() const { return cov_; }
    Measure measure() const { return measure_; }

private:
    double t_;
    CapletSpec spec_;
    Measure measure_;
    const ModelParams* params_;
    Mat x_;
    Vec y_;
    riccati::SolverOptions opt_;
    riccati::BondCoeffs bonds_;
    CapletChangeOfVariable cov_;
};

cplx forward_cf(cplx u, double t, const CapletSpec& spec, Measure measure, const ModelParams& params,
                const Mat& x, const Vec& y);

struct FourierResult {
    PriceResult quote;
    double damped_call = 0.0;     // undiscounted call on the log underlying
    double imag_residual = 0.0;   // only filled when the symmetric integral is requested
    int evaluations = 0;
};

FourierResult carr_madan_caplet(double t, const CapletSpec& spec, const FourierConfig& config,
                                Measure measure, const ModelParams& params, const Mat& x,
                                const Vec& y, riccati::SolverOptions opt = {});

}  // namespace wr::fourier
