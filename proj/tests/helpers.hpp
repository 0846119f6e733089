#pragma once

#include <string>

#include "wr/config.hpp"
#include "wr/model.hpp"

namespace wr::test {

inline std::string config_path(const std::string& name) { return std::string(WR_CONFIG_DIR) + "/" + name; }

inline ModelParams two_factor() { return load_config(config_path("two_factor.cfg")).params; }

inline Mat ref_x_inf() {
    Mat x(2, 2);
    x << 1.0e-4, -0.125e-4, -0.125e-4, 0.25e-4;
    return x;
}

/// Parameter set with eps = 0 and the covariance driver frozen at its stationary point x_inf.
inline ModelParams frozen_lgm() {
    ModelParams p = two_factor();
    p.epsilon = 0.0;
    p.x0 = ref_x_inf();
    p.omega = -p.b * p.x0 - p.x0 * p.b.transpose();
    return p;
}

/// One factor, one covariance entry.
inline ModelParams scalar_params(double kappa, double x0) {
    ModelParams p;
    p.dims = {1, 1, 1};
    p.kappa = Vec::Constant(1, kappa);
    p.theta = Vec::Zero(1);
    p.y0 = Vec::Zero(1);
    p.x0 = Mat::Constant(1, 1, x0);
    p.omega = Mat::Zero(1, 1);
    p.b = Mat::Zero(1, 1);
    p.c = Mat::Identity(1, 1);
    p.rho = Vec::Zero(1);
    p.gamma = Mat::Zero(1, 1);
    return p;
}

}  // namespace wr::test
