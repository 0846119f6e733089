#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wr/instrument.hpp"
#include "wr/linalg.hpp"
#include "wr/model.hpp"
#include "wr/random.hpp"
#include "wr/riccati.hpp"

namespace wr::sim {

enum class SchemeKind { scheme1, scheme2, scheme3 };
enum class Composition { strang, bernoulli };
enum class WishartMode { exact, order2 };

SchemeKind parse_scheme(const std::string& s);  // "1", "2", "3" or "scheme1".."scheme3"
Composition parse_composition(const std::string& s);
std::string to_string(SchemeKind s);
std::string to_string(Composition c);

struct SimConfig {
    double steps_per_year = 8.0;
    int total_steps = 0;  // overrides steps_per_year when positive
    long n_paths = 100000;
    std::uint64_t seed = 20240101;
    SchemeKind scheme = SchemeKind::scheme1;
    Composition composition = Composition::strang;
    int threads = 1;

    int steps_for(double horizon) const;
    void check() const;
};

struct PathState {
    Mat X;
    Vec Y;
    double int_r = 0.0;
    double t = 0.0;
};

Vec ou_flow(const Vec& y, double t, const Vec& kappa, const Vec& theta);
Mat wishart_drift_flow(const Mat& x, double t, const Mat& b, const Mat& omega);

/// y + sqrt((1-|rho|^2) dt) sqrt(x) G in the reduced d-dimensional coordinates.
Vec gaussian_corr_step(const Vec& y, const Mat& x, double dt, const Vec& rho, Stream& rng);

/// One elementary Wishart sub-step on (X, Ytilde) with noise on row/column q. Requires epsilon > 0
/// unless rho_q = 0.
void elementary_wishart_step(Mat& x, Vec& ytilde, int q, double dt, double epsilon, double rho_q,
                             WishartMode mode, Stream& rng);

/// Exact draw of the column-q operator of the fast scheme on a factor u with x = u^T u.
void fast_column_step(Mat& u, Vec& ytilde, int q, double dt, double epsilon, double rho_q, Stream& rng);

/// Clips round-off negative eigenvalues; throws numeric_error beyond -1e-10 trace.
void repair_psd(Mat& x);

/// One full splitting step for a fixed step size.
class Stepper {
public:
    Stepper(const ModelParams& params, SchemeKind scheme, Composition composition, double dt);

    void step(PathState& s, const RandomSource& rng, std::uint64_t path, std::uint32_t step) const;
    double dt() const { return dt_; }
    double short_rate(const PathState& s) const;

private:
    enum class Op { kappa, drift, gauss, elementary, hat };
    struct Node {
        Op op;
        int q;
    };

    void apply(const Node& node, double h, PathState& s, Stream& rng) const;
    void nest(std::size_t i, double h, PathState& s, const RandomSource& rng, std::uint64_t path,
              std::uint32_t step, std::uint32_t& subop) const;
    void hat_nest(int i, double h, Mat& u, Vec& yt, const RandomSource& rng, std::uint64_t path,
                  std::uint32_t step, std::uint32_t& subop) const;
    void add_reduced(PathState& s, const Vec& dyt) const;

    const ModelParams* params_;
    SchemeKind scheme_;
    Composition composition_;
    double dt_;
    std::vector<Node> nodes_;
    std::vector<int> active_q_;
    Mat omega_drift_;
    Vec rho_;
    double gauss_factor_ = 1.0;
    // flows for the step sizes met in the nesting, keyed by the half-step depth
    std::vector<linalg::AffineFlow> drift_flows_;
    std::vector<double> flow_steps_;
    const linalg::AffineFlow& drift_flow(double h) const;

    // eps = 0: X is deterministic and Y is sampled from its exact Gaussian transition, whose
    // covariance is affine in the starting X: vec(cov) = frozen_cov_ * [vec(X); 1]
    void frozen_step(PathState& s, const RandomSource& rng, std::uint64_t path, std::uint32_t step) const;
    bool frozen_ = false;
    Mat frozen_cov_;
};

/// Runs n_paths paths to the horizon and maps each terminal state through f, in path order.
std::vector<double> sample_paths(const SimConfig& config, const ModelParams& params, double horizon,
                                 const std::function<double(const PathState&)>& f);

/// Complex version of sample_paths.
std::vector<cplx> sample_paths_complex(const SimConfig& config, const ModelParams& params,
                                       double horizon,
                                       const std::function<cplx(const PathState&)>& f);

std::vector<PathState> simulate_paths(const SimConfig& config, const ModelParams& params, double horizon);

/// Ensemble dump: path_id, t, vec(X) row-major, Y, int_r.
void write_ensemble_csv(std::ostream& os, const std::vector<PathState>& paths);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    double ci_half_width = 0.0;  // 95%
    long n = 0;
};

/// Sample mean with deterministic pairwise summation.
McEstimate summarize(const std::vector<double>& samples);
double pairwise_sum(const double* v, std::size_t n);

/// Risk-neutral discounted payoff averages with 95% intervals; quotes per unit notional (caplets per
/// unit accrual), paid on the numeraire P(0,T+delta) or the annuity.
PriceResult mc_price(const InstrumentSpec& instrument, const SimConfig& config, const ModelParams& params);

/// Same paths, several strikes (the instrument's own strike is ignored).
std::vector<PriceResult> mc_price_strikes(const InstrumentSpec& instrument, const std::vector<double>& strikes,
                                          const SimConfig& config, const ModelParams& params);

struct WeakErrorRow {
    int steps = 0;
    cplx estimate;
    double ci_real = 0.0;
    double ci_imag = 0.0;
    cplx reference;
    double seconds = 0.0;
};

struct WeakErrorTable {
    std::vector<WeakErrorRow> rows;
    double slope = 0.0;  // least-squares slope of log|error| against log(T/N)
};

/// Monte Carlo estimates of E[exp(-i(Tr(Gamma X_T) + Lambda.Y_T))] for each step count.
WeakErrorTable weak_error_cf(const std::vector<int>& steps, const SimConfig& base,
                             const ModelParams& params, const Mat& Gamma, const Vec& Lambda, double T);

cplx weak_error_reference(const ModelParams& params, const Mat& Gamma, const Vec& Lambda, double T);

/// Columns: N, real_est, imag_est, ci, ref_real, ref_imag.
void write_weak_error_csv(std::ostream& os, const WeakErrorTable& table);

}  // namespace wr::sim
