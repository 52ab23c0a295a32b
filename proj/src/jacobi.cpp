#include "lsqstab/jacobi.hpp"

#include "lsqstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace lsqstab {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(2.0 * s);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, bool want_vectors, double off_tol, int max_sweeps) {
  if (input.rows() != input.cols()) {
    throw InvalidArgument("jacobi_eigen: matrix must be square");
  }
  const Eigen::Index n = input.rows();
  Eigen::MatrixXd a = input;
  Eigen::MatrixXd v;
  if (want_vectors) {
    v = Eigen::MatrixXd::Identity(n, n);
  }

  const double scale = a.norm();
  SymmetricEigen out;
  if (scale > 0.0) {
    const double target = off_tol * scale;
    while (out.sweeps < max_sweeps && off_diagonal_norm(a) > target) {
      for (Eigen::Index p = 0; p + 1 < n; ++p) {
        for (Eigen::Index q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (apq == 0.0) continue;
          const double app = a(p, p);
          const double aqq = a(q, q);
          // Symmetric Schur decomposition of the 2x2 block; t = tan(theta) with |theta| <= pi/4.
          const double theta = (aqq - app) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;

          auto col_p = a.col(p);
          auto col_q = a.col(q);
          for (Eigen::Index k = 0; k < n; ++k) {
            const double akp = col_p[k];
            const double akq = col_q[k];
            col_p[k] = c * akp - s * akq;
            col_q[k] = s * akp + c * akq;
          }
          a(p, p) = app - t * apq;
          a(q, q) = aqq + t * apq;
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (Eigen::Index k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            a(p, k) = a(k, p);
            a(q, k) = a(k, q);
          }
          if (want_vectors) {
            auto vp = v.col(p);
            auto vq = v.col(q);
            for (Eigen::Index k = 0; k < n; ++k) {
              const double xp = vp[k];
              const double xq = vq[k];
              vp[k] = c * xp - s * xq;
              vq[k] = s * xp + c * xq;
            }
          }
        }
      }
      ++out.sweeps;
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = a(src, src);
    if (want_vectors) out.vectors.col(k) = v.col(src);
  }
  return out;
}

}  // namespace lsqstab
