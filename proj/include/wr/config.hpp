#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "wr/model.hpp"

namespace wr {

/// Optional test function E[exp(-i(Tr(gamma X_T) + lambda.Y_T))] for the weak-error study.
struct TransformTarget {
    Mat gamma;
    Vec lambda;
    double horizon = 1.0;
};

struct LoadedConfig {
    ModelParams params;
    StructureOptions structure;
    ValidationReport report;
    std::optional<TransformTarget> transform;
};

/// Parses the JSON model description (comments allowed). Throws config_error naming the offending key.
LoadedConfig parse_config(const std::string& text);

/// Reads, parses and validates; throws config_error when the SDE has no weak solution.
LoadedConfig load_config(const std::filesystem::path& path);

}  // namespace wr
