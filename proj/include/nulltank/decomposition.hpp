#pragma once

#include <optional>
#include <vector>

#include "nulltank/types.hpp"

namespace nulltank {

/// Velocity-level split of a redundant chain into a primary task and its
/// orthogonal self-motion complement.
///
/// J1 = G J is the m1 x n task Jacobian, Z holds an orthonormal row basis of
/// its null space (m2 = n - m1 rows), and the extended map
///   Je = [J1; Z],  Je_inv = [J1_pinv  Z^T]
/// factors joint velocity as qdot = J1_pinv x1dot + Z^T v2.
struct TaskDecomposition {
  Mat J1;       ///< m1 x n task Jacobian
  Mat J1_pinv;  ///< n x m1 Moore-Penrose pseudo-inverse
  Mat Z;        ///< m2 x n orthonormal null-space basis (rows)
  Mat N;        ///< null-space projector rows; equals Z for orthonormal Z
  Mat Je;       ///< (m1+m2) x n extended Jacobian
  Mat Je_inv;   ///< n x (m1+m2) extended inverse
  int rank = 0;
  double sigma_min = 0.0;  ///< smallest retained singular value of J1
  double sigma_max = 0.0;
};

/// Builds the m1 x m rows-of-identity selection matrix picking `axes` out of
/// an m-dimensional twist. Throws ConfigError on duplicate or out-of-range
/// axes.
Mat selection_matrix(const std::vector<int>& axes, int m);

/// J1 = G J. Dimensions must agree.
Mat task_jacobian(const Mat& J, const Mat& G);

struct PinvResult {
  Mat pinv;
  int rank = 0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// SVD pseudo-inverse. Singular values below sigma_tol * sigma_max are
/// truncated; an all-zero matrix yields a zero pseudo-inverse with rank 0.
PinvResult pseudo_inverse(const Mat& J1, double sigma_tol);

/// Orthonormal null-space row basis of a full-row-rank J1. When prev_Z is
/// given, the SVD basis rows are reordered and sign-flipped to maximise
/// trace(Z prev_Z^T) so that null coordinates stay continuous along a
/// trajectory. Throws SingularityError if J1 is row rank deficient.
Mat null_space_basis(const Mat& J1, double sigma_tol,
                     const Mat* prev_Z = nullptr);

/// Assembles Je and Je_inv from the pieces. Throws SingularityError if the
/// assembled product deviates from identity beyond tol.
void extend(const Mat& J1, const Mat& J1_pinv, const Mat& Z, Mat& Je,
            Mat& Je_inv, double tol = 1e-9);

/// Full pipeline: task Jacobian, pseudo-inverse, aligned null basis, extended
/// maps. Throws SingularityError when rank(J1) < m1.
TaskDecomposition decompose(const Mat& J, const Mat& G, double sigma_tol,
                            const Mat* prev_Z = nullptr);

/// qdot = J1_pinv x1dot + Z^T v2.
Vec compose_joint_velocity(const TaskDecomposition& dec, const Vec& x1dot,
                           const Vec& v2);

}  // namespace nulltank
