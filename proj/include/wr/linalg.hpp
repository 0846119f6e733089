#pragma once

#include "wr/types.hpp"

namespace wr::linalg {

Mat symmetrize(const Mat& m);
double asymmetry(const Mat& m);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue(const Mat& m);

/// min eigenvalue >= -tol * max(|eigenvalues|); the zero matrix is PSD.
bool is_psd(const Mat& m, double tol_rel = kTolPsd);
bool is_positive_definite(const Mat& m, double tol_rel = kTolPsd);

/// Symmetric square root through the eigendecomposition, negative round-off clipped.
Mat psd_sqrt(const Mat& m);

/// Some L with L L^T = m: Cholesky when it succeeds, otherwise a scaled eigenbasis.
Mat psd_factor(const Mat& m);

/// Eigenvalue clipping at zero.
Mat clip_psd(const Mat& m);

/// Diagonal selector with ones on the first n entries.
Mat selector(int d, int n);

/// Exact flow of x' = omega + b x + x b^T over a fixed time t: x -> E x E^T + Q.
struct AffineFlow {
    Mat E;
    Mat Q;
    Mat apply(const Mat& x) const { return E * x * E.transpose() + Q; }
};

AffineFlow linear_flow(const Mat& b, const Mat& omega, double t);

}  // namespace wr::linalg
