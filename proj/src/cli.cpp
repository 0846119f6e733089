#include "wr/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "wr/config.hpp"
#include "wr/expansion.hpp"
#include "wr/fourier.hpp"
#include "wr/report.hpp"
#include "wr/riccati.hpp"
#include "wr/simulation.hpp"

namespace wr::cli {

namespace {

const std::set<std::string> kCommands = {"validate", "curve", "price", "smile", "simulate", "weak-error", "compare"};
const std::set<std::string> kMethods = {"expansion", "mc", "fourier", "all"};

bool any_mc_option(const RunConfig& r) {
    return r.paths || r.steps || r.steps_per_year || r.seed || r.scheme || r.composition || r.threads;
}

bool any_fourier_option(const RunConfig& r) { return r.alpha || r.limit || r.fstep || r.measure; }

}  // namespace

void RunConfig::check() const {
    if (!kCommands.count(command)) throw config_error("unknown command '" + command + "'");
    if (config_path.empty()) throw config_error("--config is required");
    if (!std::filesystem::exists(config_path)) throw config_error("config file not found: " + config_path);
    parse_format(format);
    if (method && !kMethods.count(*method)) throw config_error("unknown method '" + *method + "'");
    const bool priced = command == "price" || command == "smile" || command == "compare";
    if ((command == "price" || command == "smile") && !instrument)
        throw config_error("--instrument is required for " + command);
    if (method && !priced) throw config_error("--method only applies to price, smile and compare");
    const std::string m = method.value_or(command == "smile" ? "expansion" : "all");
    const bool mc_ok = command == "simulate" || command == "weak-error" || command == "compare" ||
                       (priced && (m == "mc" || m == "all"));
    if (any_mc_option(*this) && !mc_ok) throw config_error("Monte Carlo options need --method mc or all");
    const bool fourier_ok = command == "compare" || (priced && (m == "fourier" || m == "all"));
    if (any_fourier_option(*this) && !fourier_ok) throw config_error("Fourier options need --method fourier or all");
    if (coeffs && command != "curve") throw config_error("--coeffs only applies to curve");
}

namespace {

struct Loaded {
    LoadedConfig cfg;
};

LoadedConfig load(const RunConfig& run, std::ostream& log) {
    LoadedConfig cfg = load_config(run.config_path);
    if (run.epsilon || run.rho) {
        ModelParams p = cfg.params;
        if (run.epsilon) p.epsilon = *run.epsilon;
        if (run.rho) {
            if (static_cast<int>(run.rho->size()) != p.dims.d)
                throw config_error("--rho needs " + std::to_string(p.dims.d) + " entries");
            p.rho = Eigen::Map<const Vec>(run.rho->data(), p.dims.d);
        }
        p = normalized(p);
        try {
            cfg.report = validate_params(p, cfg.structure);
        } catch (const structural_error& e) {
            throw config_error(std::string("invalid model override: ") + e.what());
        }
        if (!cfg.report.weak_solution_ok) throw config_error("model override breaks the weak-solution condition");
        cfg.params = p;
    }
    for (const auto& msg : cfg.report.messages) log << "note: " << msg << '\n';
    return cfg;
}

sim::SimConfig sim_config(const RunConfig& run) {
    sim::SimConfig c;
    if (run.paths) c.n_paths = *run.paths;
    if (run.steps) c.total_steps = *run.steps;
    if (run.steps_per_year) c.steps_per_year = *run.steps_per_year;
    if (run.seed) c.seed = *run.seed;
    if (run.scheme) c.scheme = sim::parse_scheme(*run.scheme);
    if (run.composition) c.composition = sim::parse_composition(*run.composition);
    if (run.threads) c.threads = *run.threads;
    c.check();
    return c;
}

fourier::FourierConfig fourier_config(const RunConfig& run) {
    fourier::FourierConfig c;
    if (run.alpha) c.alpha = *run.alpha;
    if (run.limit) c.upper_limit = *run.limit;
    if (run.fstep) c.step = *run.fstep;
    if (run.threads) c.threads = *run.threads;
    c.panels();
    return c;
}

std::vector<fourier::Measure> measures(const RunConfig& run) {
    if (run.measure) return {fourier::parse_measure(*run.measure)};
    return {fourier::Measure::T_forward, fourier::Measure::Tdelta_forward};
}

// Redirects to run.out when given.
class Sink {
public:
    Sink(const RunConfig& run, std::ostream& fallback) : os_(&fallback) {
        if (!run.out.empty()) {
            file_.open(run.out);
            if (!file_) throw std::runtime_error("cannot open " + run.out + " for writing");
            os_ = &file_;
        }
    }
    std::ostream& get() { return *os_; }

private:
    std::ofstream file_;
    std::ostream* os_;
};

double timed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

PriceResult expansion_row(const InstrumentSpec& inst, const ModelParams& p) {
    const auto start = std::chrono::steady_clock::now();
    PriceResult r;
    if (const auto* cs = std::get_if<CapletSpec>(&inst)) {
        const auto bonds = riccati::bond_coeffs(p, cs->T + cs->delta);
        r = expansion::to_price_result(expansion::caplet_price_expanded(0.0, *cs, p.x0, p.y0, p, bonds), *cs, 0.0);
    } else {
        const auto& ss = std::get<SwaptionSpec>(inst);
        const auto bonds = riccati::bond_coeffs(p, ss.T + ss.m * ss.delta);
        r = expansion::to_price_result(expansion::swaption_price_expanded(0.0, ss, p.x0, p.y0, p, bonds), ss, 0.0);
    }
    r.seconds = timed_seconds(start);
    return r;
}

std::vector<PriceResult> price_rows(const RunConfig& run, const InstrumentSpec& inst, const ModelParams& p,
                                    const std::string& method, std::ostream& log) {
    std::vector<PriceResult> rows;
    const bool all = method == "all";
    if (all || method == "expansion") rows.push_back(expansion_row(inst, p));
    if (all || method == "fourier") {
        if (const auto* cs = std::get_if<CapletSpec>(&inst)) {
            const auto fc = fourier_config(run);
            for (auto m : measures(run)) rows.push_back(fourier::carr_madan_caplet(0.0, *cs, fc, m, p, p.x0, p.y0).quote);
        } else if (!all) {
            throw config_error("Fourier pricing is only available for caplets");
        } else {
            log << "note: Fourier pricing skipped for swaptions\n";
        }
    }
    if (all || method == "mc") rows.push_back(sim::mc_price(inst, sim_config(run), p));
    return rows;
}

int cmd_validate(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    const auto& r = cfg.report;
    out << "weak_solution_ok," << r.weak_solution_ok << '\n'
        << "strong_solution_ok," << r.strong_solution_ok << '\n'
        << "bond_condition_ok," << r.bond_condition_ok << '\n'
        << "stationarity_ok," << r.stationarity_ok << '\n';
    return 0;
}

int cmd_curve(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    const ModelParams& p = cfg.params;
    if (!(run.horizon > 0.0) || !(run.grid_step > 0.0)) throw config_error("curve needs positive horizon and grid step");
    const auto bonds = riccati::bond_coeffs(p, run.horizon);
    const int n = static_cast<int>(std::floor(run.horizon / run.grid_step + 1e-9));
    std::vector<double> taus;
    for (int i = 0; i <= n; ++i) taus.push_back(i * run.grid_step);
    if (run.coeffs) {
        bonds.write_csv(out, taus);
        return 0;
    }
    out << "T,zc_price,zero_rate\n";
    for (double T : taus) {
        const double price = riccati::zc_price(0.0, T, p.x0, p.y0, bonds);
        out << fmt9(T) << ',' << fmt9(price) << ',' << fmt9(T > 0.0 ? -std::log(price) / T : std::nan("")) << '\n';
    }
    return 0;
}

int cmd_price(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    const InstrumentSpec inst = parse_instrument(*run.instrument);
    ComparisonReport rep;
    rep.instrument = describe(inst);
    rep.with_timings = run.timings;
    rep.rows = price_rows(run, inst, cfg.params, run.method.value_or("all"), log);
    emit_report(rep, out, parse_format(run.format));
    return 0;
}

InstrumentSpec with_strike(InstrumentSpec inst, double K) {
    std::visit([K](auto& s) { s.K = K; }, inst);
    return inst;
}

int cmd_smile(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    const ModelParams& p = cfg.params;
    const InstrumentSpec inst = parse_instrument(*run.instrument);
    const std::string method = run.method.value_or("expansion");
    const PriceResult atm = expansion_row(inst, p);
    std::vector<double> strikes;
    for (double off : run.offsets_pct) strikes.push_back(atm.forward + off / 100.0);

    std::vector<SmileRow> rows;
    auto push = [&](std::size_t i, const PriceResult& r) {
        rows.push_back({run.offsets_pct[i], strikes[i], r.price, r.normal_vol_bp, r.lognormal_vol, r.method});
    };
    const bool all = method == "all";
    if (all || method == "expansion")
        for (std::size_t i = 0; i < strikes.size(); ++i) push(i, expansion_row(with_strike(inst, strikes[i]), p));
    if (all || method == "fourier") {
        if (const auto* cs = std::get_if<CapletSpec>(&inst)) {
            const auto fc = fourier_config(run);
            for (auto m : measures(run))
                for (std::size_t i = 0; i < strikes.size(); ++i) {
                    CapletSpec k = *cs;
                    k.K = strikes[i];
                    push(i, fourier::carr_madan_caplet(0.0, k, fc, m, p, p.x0, p.y0).quote);
                }
        } else if (!all) {
            throw config_error("Fourier pricing is only available for caplets");
        }
    }
    if (all || method == "mc") {
        const auto mc = sim::mc_price_strikes(inst, strikes, sim_config(run), p);
        for (std::size_t i = 0; i < strikes.size(); ++i) push(i, mc[i]);
    }
    emit_smile(rows, out, parse_format(run.format));
    return 0;
}

int cmd_simulate(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    if (!(run.horizon > 0.0)) throw config_error("simulate needs a positive --horizon");
    const auto paths = sim::simulate_paths(sim_config(run), cfg.params, run.horizon);
    sim::write_ensemble_csv(out, paths);
    return 0;
}

int cmd_weak_error(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    if (!cfg.transform) throw config_error("weak-error needs a 'transform' block in the config");
    sim::SimConfig sc = sim_config(run);
    if (!run.paths) sc.n_paths = 1000000;
    const auto& t = *cfg.transform;
    const auto table = sim::weak_error_cf(run.steps_list, sc, cfg.params, t.gamma, t.lambda, t.horizon);
    sim::write_weak_error_csv(out, table);
    log << "slope " << fmt9(table.slope) << '\n';
    return 0;
}

int cmd_compare(const RunConfig& run, std::ostream& out, std::ostream& log) {
    const LoadedConfig cfg = load(run, log);
    const InstrumentSpec inst = parse_instrument(run.instrument.value_or("caplet:1,0.5,0.01"));
    ComparisonReport rep;
    rep.instrument = describe(inst);
    rep.with_timings = true;
    rep.rows = price_rows(run, inst, cfg.params, run.method.value_or("all"), log);
    emit_report(rep, out, parse_format(run.format));
    return 0;
}

}  // namespace

int run_command(const RunConfig& run, std::ostream& out, std::ostream& log) {
    try {
        run.check();
        Sink sink(run, out);
        std::ostream& os = sink.get();
        if (run.command == "validate") return cmd_validate(run, os, log);
        if (run.command == "curve") return cmd_curve(run, os, log);
        if (run.command == "price") return cmd_price(run, os, log);
        if (run.command == "smile") return cmd_smile(run, os, log);
        if (run.command == "simulate") return cmd_simulate(run, os, log);
        if (run.command == "weak-error") return cmd_weak_error(run, os, log);
        return cmd_compare(run, os, log);
    } catch (const config_error& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    } catch (const blow_up_error& e) {
        log << "error: " << e.what() << " (time " << e.time() << ")\n";
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace wr::cli
