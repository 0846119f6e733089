#include "wr/linalg.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace wr::linalg {

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Mat& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

double min_eigenvalue(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

namespace {

Vec eigenvalues(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

bool is_psd(const Mat& m, double tol_rel) {
    if (m.size() == 0) return true;
    const Vec ev = eigenvalues(m);
    const double scale = ev.cwiseAbs().maxCoeff();
    return ev.minCoeff() >= -tol_rel * scale;
}

bool is_positive_definite(const Mat& m, double tol_rel) {
    if (m.size() == 0) return false;
    const Vec ev = eigenvalues(m);
    const double scale = ev.cwiseAbs().maxCoeff();
    return scale > 0.0 && ev.minCoeff() > tol_rel * scale;
}

Mat psd_sqrt(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    const Vec root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

Mat psd_factor(const Mat& m) {
    Eigen::LLT<Mat> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Mat clip_psd(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    const Vec ev = es.eigenvalues().cwiseMax(0.0);
    return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

Mat selector(int d, int n) {
    Mat s = Mat::Zero(d, d);
    for (int i = 0; i < std::min(n, d); ++i) s(i, i) = 1.0;
    return s;
}

AffineFlow linear_flow(const Mat& b, const Mat& omega, double t) {
    const Eigen::Index d = b.rows();
    // exp([[b, omega], [0, -b^T]] t) carries int_0^t e^{b(t-s)} omega e^{-b^T s} ds in its upper right block
    Mat big = Mat::Zero(2 * d, 2 * d);
    big.topLeftCorner(d, d) = b * t;
    big.topRightCorner(d, d) = omega * t;
    big.bottomRightCorner(d, d) = -b.transpose() * t;
    const Mat e = big.exp();
    AffineFlow flow;
    flow.E = e.topLeftCorner(d, d);
    flow.Q = symmetrize(e.topRightCorner(d, d) * flow.E.transpose());
    return flow;
}

}  // namespace wr::linalg
