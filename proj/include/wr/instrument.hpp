#pragma once

#include <string>
#include <variant>

namespace wr {

struct CapletSpec {
    double T = 1.0;
    double delta = 0.5;
    double K = 0.01;

    double strike_factor() const { return 1.0 + delta * K; }
    void check() const;
};

struct SwaptionSpec {
    double T = 1.0;
    int m = 1;
    double delta = 0.5;
    double K = 0.01;

    void check() const;
};

using InstrumentSpec = std::variant<CapletSpec, SwaptionSpec>;

/// Parses "caplet:T,delta,K" or "swaption:T,m,delta,K".
InstrumentSpec parse_instrument(const std::string& text);
std::string describe(const InstrumentSpec& spec);

/// Premium quoted per unit notional (caplets per unit accrual), with quotes implied from it.
struct PriceResult {
    std::string method;
    double price = 0.0;
    double std_error = 0.0;    // Monte Carlo standard error, zero otherwise
    double ci_half_width = 0.0;
    double forward = 0.0;      // forward Libor or swap rate
    double numeraire = 0.0;    // P(0, T+delta) or the annuity
    double normal_vol_bp = 0.0;
    double lognormal_vol = 0.0;
    double seconds = 0.0;
};

}  // namespace wr
