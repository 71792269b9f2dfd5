#pragma once

#include <vector>

#include "nulltank/types.hpp"

namespace nulltank {

/// One revolute joint described by a standard Denavit-Hartenberg row.
/// The joint rotates about the local z axis; the frame transform is
/// Rz(theta_offset + q) * Tz(offset) * Tx(length) * Rx(twist).
struct DhJoint {
  double length = 0.0;        ///< link length a [m]
  double twist = 0.0;         ///< link twist alpha [rad]
  double offset = 0.0;        ///< link offset d [m]
  double theta_offset = 0.0;  ///< constant joint-angle offset [rad]
};

/// Serial chain of revolute DH joints.
struct ChainModel {
  std::vector<DhJoint> joints;

  int dof() const { return static_cast<int>(joints.size()); }

  /// Nominal 6-DOF table with UR10e-like standard DH values. `scale`
  /// multiplies every length and offset, which is handy for scenarios whose
  /// task trajectories sweep far more workspace than a tabletop arm has.
  static ChainModel ur10e_like(double scale = 1.0);
};

/// Joint-space state attached to a chain.
struct ChainState {
  Vec q;     ///< joint positions [rad]
  Vec qdot;  ///< joint velocities [rad/s]
  double t = 0.0;
};

struct Pose {
  Vec3 position = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
};

/// End-effector pose for joint vector q. Throws ConfigError on dimension
/// mismatch or an empty chain.
Pose forward_kinematics(const ChainModel& model, const Vec& q);

/// Geometric Jacobian, 6 x n: translational rows first, rotational rows
/// below, all expressed in the base frame.
Mat geometric_jacobian(const ChainModel& model, const Vec& q);

}  // namespace nulltank
