#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Relative tolerance for every positive semidefiniteness test.
inline constexpr double kTolPsd = 1e-10;

/// Malformed input: wrong dimensions, asymmetric matrices, impossible constraints.
class structural_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A valid computation ran past the point where the affine transform exists.
class blow_up_error : public std::runtime_error {
public:
    blow_up_error(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine produced a state outside its domain (e.g. an indefinite covariance).
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wr
