#pragma once

#include <Eigen/Dense>

namespace lsqstab {

struct SymmetricEigen {
  /// Eigenvalues in ascending order.
  Eigen::VectorXd values;
  /// Column k is the unit eigenvector of values[k] (empty unless requested).
  Eigen::MatrixXd vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi eigenvalue algorithm for a symmetric matrix. Sweeps until the
/// off-diagonal Frobenius norm is at most off_tol times the Frobenius norm of the
/// matrix. Deterministic: the rotation order is fixed (row-cyclic).
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, bool want_vectors = false, double off_tol = 1e-13,
                            int max_sweeps = 100);

}  // namespace lsqstab
