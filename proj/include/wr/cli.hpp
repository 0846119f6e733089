#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wr::cli {

struct RunConfig {
    std::string command;
    std::string config_path;
    std::optional<std::string> instrument;
    std::optional<std::string> method;  // expansion | mc | fourier | all

    // model overrides
    std::optional<double> epsilon;
    std::optional<std::vector<double>> rho;

    // Monte Carlo
    std::optional<long> paths;
    std::optional<int> steps;
    std::optional<double> steps_per_year;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    std::optional<std::string> composition;
    std::optional<int> threads;

    // Fourier
    std::optional<double> alpha;
    std::optional<double> limit;
    std::optional<double> fstep;
    std::optional<std::string> measure;

    // command specific
    std::vector<double> offsets_pct = {-1.0, -0.5, 0.0, 0.5, 1.0};
    std::vector<int> steps_list = {1, 2, 4, 8};
    double horizon = 30.0;
    double grid_step = 0.5;
    bool coeffs = false;
    bool timings = false;

    std::string out;  // empty: standard output
    std::string format = "csv";

    /// Throws config_error when options do not fit the command or method.
    void check() const;
};

/// Runs one command; artifacts go to run.out (or `out`), diagnostics to `log`. Returns the exit status.
int run_command(const RunConfig& run, std::ostream& out, std::ostream& log);

}  // namespace wr::cli
