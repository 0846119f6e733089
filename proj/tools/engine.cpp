#include <iostream>

#include <CLI11.hpp>

#include "wr/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Pricing engine for a factor model with matrix-valued stochastic covariance"};
    app.require_subcommand(1, 1);

    wr::cli::RunConfig run;
    std::vector<double> rho;
    double epsilon = 0.0;
    long paths = 0;
    int steps = 0, threads = 0;
    double steps_per_year = 0.0, alpha = 0.0, limit = 0.0, fstep = 0.0;
    std::uint64_t seed = 0;
    std::string instrument, method, scheme, composition, measure;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", run.config_path, "model configuration (JSON)")->required();
        sub->add_option("--out", run.out, "output file (default: stdout)");
        sub->add_option("--format", run.format, "csv or json");
        sub->add_option("--epsilon", epsilon, "override epsilon");
        sub->add_option("--rho", rho, "override rho (d entries)");
        sub->add_option("--threads", threads, "worker threads");
    };
    auto mc_opts = [&](CLI::App* sub) {
        sub->add_option("--paths", paths, "Monte Carlo paths");
        sub->add_option("--steps", steps, "total time steps (overrides steps per year)");
        sub->add_option("--steps-per-year", steps_per_year, "time steps per year");
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--scheme", scheme, "1, 2 or 3");
        sub->add_option("--composition", composition, "strang or bernoulli");
    };
    auto fourier_opts = [&](CLI::App* sub) {
        sub->add_option("--alpha", alpha, "damping parameter");
        sub->add_option("--limit", limit, "upper integration limit");
        sub->add_option("--fstep", fstep, "integration step");
        sub->add_option("--measure", measure, "T or Tdelta");
    };
    auto priced = [&](CLI::App* sub) {
        common(sub);
        mc_opts(sub);
        fourier_opts(sub);
        sub->add_option("--instrument", instrument, "caplet:T,delta,K or swaption:T,m,delta,K");
        sub->add_option("--method", method, "expansion, mc, fourier or all");
    };

    auto* validate = app.add_subcommand("validate", "check the parameter set");
    common(validate);
    auto* curve = app.add_subcommand("curve", "zero-coupon curve");
    common(curve);
    curve->add_option("--horizon", run.horizon, "last maturity in years");
    curve->add_option("--grid", run.grid_step, "maturity spacing");
    curve->add_flag("--coeffs", run.coeffs, "dump the Riccati coefficients instead");
    auto* price = app.add_subcommand("price", "price one instrument");
    priced(price);
    price->add_flag("--timings", run.timings, "add a seconds column");
    auto* smile = app.add_subcommand("smile", "prices and implied vols across strikes");
    priced(smile);
    smile->add_option("--offsets", run.offsets_pct, "strike offsets from the forward in percent");
    auto* simulate = app.add_subcommand("simulate", "dump simulated terminal states");
    common(simulate);
    mc_opts(simulate);
    simulate->add_option("--horizon", run.horizon, "simulation horizon in years")->required();
    auto* weak = app.add_subcommand("weak-error", "weak convergence of the discretisation");
    common(weak);
    mc_opts(weak);
    weak->add_option("--steps-list", run.steps_list, "numbers of time steps");
    auto* compare = app.add_subcommand("compare", "all methods side by side with timings");
    priced(compare);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    run.command = sub->get_name();
    auto given = [&](const char* name) {
        try {
            return sub->count(name) > 0;
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
    };
    if (given("--epsilon")) run.epsilon = epsilon;
    if (given("--rho")) run.rho = rho;
    if (given("--threads")) run.threads = threads;
    if (given("--paths")) run.paths = paths;
    if (given("--steps")) run.steps = steps;
    if (given("--steps-per-year")) run.steps_per_year = steps_per_year;
    if (given("--seed")) run.seed = seed;
    if (given("--scheme")) run.scheme = scheme;
    if (given("--composition")) run.composition = composition;
    if (given("--alpha")) run.alpha = alpha;
    if (given("--limit")) run.limit = limit;
    if (given("--fstep")) run.fstep = fstep;
    if (given("--measure")) run.measure = measure;
    if (given("--instrument")) run.instrument = instrument;
    if (given("--method")) run.method = method;

    return wr::cli::run_command(run, std::cout, std::cerr);
}
