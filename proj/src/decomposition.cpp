#include "nulltank/decomposition.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nulltank/errors.hpp"

namespace nulltank {
namespace {

// Best permutation + sign assignment of `basis` rows against `prev` rows,
// maximising sum_i |prev_i . basis_{perm(i)}|. Exhaustive for small m2 (the
// usual case), greedy beyond.
Mat align_rows(const Mat& basis, const Mat& prev) {
  const int m2 = static_cast<int>(basis.rows());
  Mat dots = prev * basis.transpose();  // m2 x m2, dots(i,j) = prev_i . new_j

  std::vector<int> best(m2);
  std::iota(best.begin(), best.end(), 0);

  if (m2 <= 4) {
    std::vector<int> perm = best;
    double best_score = -1.0;
    do {
      double score = 0.0;
      for (int i = 0; i < m2; ++i) score += std::abs(dots(i, perm[i]));
      if (score > best_score) {
        best_score = score;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    std::vector<bool> taken(m2, false);
    for (int i = 0; i < m2; ++i) {
      int arg = -1;
      double mx = -1.0;
      for (int j = 0; j < m2; ++j) {
        if (!taken[j] && std::abs(dots(i, j)) > mx) {
          mx = std::abs(dots(i, j));
          arg = j;
        }
      }
      taken[arg] = true;
      best[i] = arg;
    }
  }

  Mat aligned(m2, basis.cols());
  for (int i = 0; i < m2; ++i) {
    const double sign = dots(i, best[i]) < 0.0 ? -1.0 : 1.0;
    aligned.row(i) = sign * basis.row(best[i]);
  }
  return aligned;
}

}  // namespace

Mat selection_matrix(const std::vector<int>& axes, int m) {
  Mat G = Mat::Zero(static_cast<int>(axes.size()), m);
  std::vector<bool> used(m, false);
  for (int r = 0; r < static_cast<int>(axes.size()); ++r) {
    const int a = axes[r];
    if (a < 0 || a >= m) {
      throw ConfigError("task_axes: index " + std::to_string(a) +
                        " out of range [0," + std::to_string(m) + ")");
    }
    if (used[a]) {
      throw ConfigError("task_axes: duplicate index " + std::to_string(a));
    }
    used[a] = true;
    G(r, a) = 1.0;
  }
  return G;
}

Mat task_jacobian(const Mat& J, const Mat& G) {
  if (G.cols() != J.rows()) {
    throw ConfigError("task_jacobian: G has " + std::to_string(G.cols()) +
                      " columns, J has " + std::to_string(J.rows()) + " rows");
  }
  return G * J;
}

PinvResult pseudo_inverse(const Mat& J1, double sigma_tol) {
  Eigen::JacobiSVD<Mat> svd(J1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = sigma_tol * sigma_max;

  PinvResult out;
  out.sigma_max = sigma_max;
  out.pinv = Mat::Zero(J1.cols(), J1.rows());
  if (sigma_max == 0.0) {
    return out;  // zero matrix: zero pseudo-inverse, rank 0
  }

  Vec inv_sv = Vec::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      inv_sv(i) = 1.0 / sv(i);
      out.rank = i + 1;
      out.sigma_min = sv(i);
    }
  }
  out.pinv = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

Mat null_space_basis(const Mat& J1, double sigma_tol, const Mat* prev_Z) {
  const int m1 = static_cast<int>(J1.rows());
  const int n = static_cast<int>(J1.cols());

  Eigen::JacobiSVD<Mat> svd(J1, Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > sigma_tol * sigma_max) ++rank;
  }
  if (rank < m1) {
    throw SingularityError(
        "null_space_basis: task Jacobian row rank " + std::to_string(rank) +
            " < " + std::to_string(m1),
        sv.size() > 0 ? sv(sv.size() - 1) : 0.0);
  }

  const int m2 = n - rank;
  Mat Z = svd.matrixV().rightCols(m2).transpose();
  if (prev_Z != nullptr && prev_Z->rows() == m2 && prev_Z->cols() == n) {
    Z = align_rows(Z, *prev_Z);
  }
  return Z;
}

void extend(const Mat& J1, const Mat& J1_pinv, const Mat& Z, Mat& Je,
            Mat& Je_inv, double tol) {
  const int m1 = static_cast<int>(J1.rows());
  const int m2 = static_cast<int>(Z.rows());
  const int n = static_cast<int>(J1.cols());

  Je.resize(m1 + m2, n);
  Je << J1, Z;
  Je_inv.resize(n, m1 + m2);
  Je_inv << J1_pinv, Z.transpose();

  const double residual =
      (Je * Je_inv - Mat::Identity(m1 + m2, m1 + m2)).cwiseAbs().maxCoeff();
  if (residual > tol) {
    throw SingularityError(
        "extend: Je * Je_inv deviates from identity by " +
            std::to_string(residual),
        0.0);
  }
}

TaskDecomposition decompose(const Mat& J, const Mat& G, double sigma_tol,
                            const Mat* prev_Z) {
  TaskDecomposition dec;
  dec.J1 = task_jacobian(J, G);
  const int m1 = static_cast<int>(dec.J1.rows());
  const int n = static_cast<int>(dec.J1.cols());

  // One full SVD serves both the pseudo-inverse and the null basis.
  Eigen::JacobiSVD<Mat> svd(dec.J1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  dec.sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  const double cutoff = sigma_tol * dec.sigma_max;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      rank = i + 1;
      dec.sigma_min = sv(i);
    }
  }
  if (rank < m1) {
    throw SingularityError(
        "decompose: task Jacobian rank " + std::to_string(rank) + " < " +
            std::to_string(m1) + " (sigma_min " +
            std::to_string(sv.size() > 0 ? sv(sv.size() - 1) : 0.0) + ")",
        sv.size() > 0 ? sv(sv.size() - 1) : 0.0);
  }
  dec.rank = rank;
  dec.J1_pinv = svd.matrixV().leftCols(rank) *
                sv.head(rank).cwiseInverse().asDiagonal() *
                svd.matrixU().leftCols(rank).transpose();
  dec.Z = svd.matrixV().rightCols(n - rank).transpose();
  if (prev_Z != nullptr && prev_Z->rows() == dec.Z.rows() &&
      prev_Z->cols() == n && dec.Z.rows() > 0) {
    dec.Z = align_rows(dec.Z, *prev_Z);
  }
  // With orthonormal Z rows, (Z Z^T)^-1 Z collapses to Z itself.
  dec.N = dec.Z;
  extend(dec.J1, dec.J1_pinv, dec.Z, dec.Je, dec.Je_inv);
  return dec;
}

Vec compose_joint_velocity(const TaskDecomposition& dec, const Vec& x1dot,
                           const Vec& v2) {
  if (x1dot.size() != dec.J1_pinv.cols() || v2.size() != dec.Z.rows()) {
    throw ConfigError("compose_joint_velocity: dimension mismatch");
  }
  return dec.J1_pinv * x1dot + dec.Z.transpose() * v2;
}

}  // namespace nulltank
