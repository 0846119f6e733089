#include "wr/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wr {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw config_error(std::string("missing key '") + key + "'");
    return *it;
}

double read_number(const json& j, const char* key) {
    const json& v = require(j, key);
    if (!v.is_number()) throw config_error(std::string("key '") + key + "' must be a number");
    return v.get<double>();
}

Vec read_vector(const json& j, const char* key, int size) {
    const json& v = require(j, key);
    if (!v.is_array() || static_cast<int>(v.size()) != size)
        throw config_error(std::string("key '") + key + "' must be a list of " + std::to_string(size) + " numbers");
    Vec out(size);
    for (int i = 0; i < size; ++i) {
        if (!v[static_cast<std::size_t>(i)].is_number())
            throw config_error(std::string("key '") + key + "' holds a non-numeric entry");
        out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
}

Mat read_matrix(const json& j, const char* key, int rows, int cols) {
    const json& v = require(j, key);
    const std::string shape = std::to_string(rows) + "x" + std::to_string(cols);
    if (!v.is_array() || static_cast<int>(v.size()) != rows)
        throw config_error(std::string("key '") + key + "' must be a " + shape + " list of rows");
    Mat out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw config_error(std::string("key '") + key + "' must be a " + shape + " list of rows");
        for (int k = 0; k < cols; ++k) {
            if (!row[static_cast<std::size_t>(k)].is_number())
                throw config_error(std::string("key '") + key + "' holds a non-numeric entry");
            out(i, k) = row[static_cast<std::size_t>(k)].get<double>();
        }
    }
    return out;
}

std::string locate(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

LoadedConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw config_error("config parse error at " + locate(text, e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");

    LoadedConfig out;
    ModelParams& p = out.params;
    const json& dims = require(j, "dims");
    try {
        p.dims.p = require(dims, "p").get<int>();
        p.dims.d = require(dims, "d").get<int>();
        p.dims.n = require(dims, "n").get<int>();
    } catch (const json::type_error&) {
        throw config_error("dims entries must be integers");
    }
    if (p.dims.p < 1 || p.dims.d < 1) throw config_error("dims must be positive");
    const int pf = p.dims.p, d = p.dims.d;

    p.kappa = read_vector(j, "kappa", pf);
    p.theta = read_vector(j, "theta", pf);
    p.y0 = read_vector(j, "y0", pf);
    p.x0 = read_matrix(j, "x0", d, d);
    p.b = read_matrix(j, "b", d, d);
    if (j.contains("omega")) {
        p.omega = read_matrix(j, "omega", d, d);
    } else if (j.contains("x_inf")) {
        const Mat x_inf = read_matrix(j, "x_inf", d, d);
        const double shift = read_number(j, "omega_shift");
        p.omega = -(p.b * x_inf + x_inf * p.b.transpose()) + shift * Mat::Identity(d, d);
    } else {
        throw config_error("missing key 'omega' (or 'x_inf' with 'omega_shift')");
    }
    p.epsilon = read_number(j, "epsilon");
    p.c = read_matrix(j, "c", pf, d);
    p.rho = read_vector(j, "rho", d);
    p.gamma = read_matrix(j, "gamma", d, d);
    p.phi = read_number(j, "phi");
    if (j.contains("allow_unordered_kappa"))
        out.structure.require_ordered_kappa = !j.at("allow_unordered_kappa").get<bool>();

    if (j.contains("transform")) {
        const json& t = j.at("transform");
        TransformTarget target;
        target.gamma = read_matrix(t, "gamma", d, d);
        target.lambda = read_vector(t, "lambda", pf);
        target.horizon = read_number(t, "horizon");
        if (!(target.horizon > 0.0)) throw config_error("key 'horizon' must be positive");
        out.transform = target;
    }

    p = normalized(std::move(p));
    try {
        out.report = validate_params(p, out.structure);
    } catch (const structural_error& e) {
        throw config_error(std::string("invalid model: ") + e.what());
    }
    return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    LoadedConfig cfg = parse_config(ss.str());
    if (!cfg.report.weak_solution_ok) {
        std::string why = "model validation failed:";
        for (const auto& m : cfg.report.messages) why += " " + m + ";";
        throw config_error(why);
    }
    return cfg;
}

}  // namespace wr
