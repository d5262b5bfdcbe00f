#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace swivel {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Eigen-decomposition of a real symmetric 3x3 matrix.
/// values are ascending; vectors.col(i) is the unit eigenvector of values(i).
struct SymmetricEigen3 {
  Vec3 values;
  Mat3 vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// tol * ||A||_F. The input is symmetrized first.
SymmetricEigen3 symmetric_eigen(const Mat3& a, double tol = 1e-12);

struct QrEigenOptions {
  int max_iterations = 500;  // total QR sweeps across all deflations
  bool balance = true;
};

/// Eigenvalues of a small dense real matrix by Householder reduction to upper
/// Hessenberg form followed by Francis double-shift QR. Complex pairs are
/// returned adjacent, positive imaginary part first. Throws InvalidArgument if
/// the iteration cap is hit.
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixXd& a,
                                              const QrEigenOptions& opts = {});

/// In-place Householder reduction; returns the Hessenberg matrix (entries
/// below the first subdiagonal are exactly zero).
Eigen::MatrixXd hessenberg(Eigen::MatrixXd a);

}  // namespace swivel
