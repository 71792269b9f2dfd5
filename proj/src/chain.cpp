#include "nulltank/chain.hpp"

#include <cmath>
#include <numbers>

#include "nulltank/errors.hpp"

namespace nulltank {
namespace {

void check_dims(const ChainModel& model, const Vec& q) {
  if (model.dof() == 0) {
    throw ConfigError("chain: model has no joints");
  }
  if (q.size() != model.dof()) {
    throw ConfigError("chain: q has " + std::to_string(q.size()) +
                      " entries, model has " + std::to_string(model.dof()) +
                      " joints");
  }
}

// Frame i-1 -> i for a standard DH row at joint angle q.
void dh_transform(const DhJoint& j, double q, Mat3& R, Vec3& p) {
  const double ct = std::cos(j.theta_offset + q);
  const double st = std::sin(j.theta_offset + q);
  const double ca = std::cos(j.twist);
  const double sa = std::sin(j.twist);

  R << ct, -st * ca, st * sa,
       st, ct * ca, -ct * sa,
       0.0, sa, ca;
  p << j.length * ct, j.length * st, j.offset;
}

}  // namespace

ChainModel ChainModel::ur10e_like(double scale) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  ChainModel m;
  m.joints = {
      {0.0, half_pi, 0.1807 * scale, 0.0},
      {-0.6127 * scale, 0.0, 0.0, 0.0},
      {-0.57155 * scale, 0.0, 0.0, 0.0},
      {0.0, half_pi, 0.17415 * scale, 0.0},
      {0.0, -half_pi, 0.11985 * scale, 0.0},
      {0.0, 0.0, 0.11655 * scale, 0.0},
  };
  return m;
}

Pose forward_kinematics(const ChainModel& model, const Vec& q) {
  check_dims(model, q);

  Pose pose;
  Mat3 R;
  Vec3 p;
  for (int i = 0; i < model.dof(); ++i) {
    dh_transform(model.joints[i], q[i], R, p);
    pose.position += pose.rotation * p;
    pose.rotation = pose.rotation * R;
  }
  return pose;
}

Mat geometric_jacobian(const ChainModel& model, const Vec& q) {
  check_dims(model, q);

  const int n = model.dof();

  // Origins and z axes of every joint frame, plus the end-effector origin.
  std::vector<Vec3> origin(n);
  std::vector<Vec3> z_axis(n);
  Mat3 R_acc = Mat3::Identity();
  Vec3 p_acc = Vec3::Zero();
  Mat3 R;
  Vec3 p;
  for (int i = 0; i < n; ++i) {
    // Joint i rotates about the z axis of frame i-1.
    origin[i] = p_acc;
    z_axis[i] = R_acc.col(2);
    dh_transform(model.joints[i], q[i], R, p);
    p_acc += R_acc * p;
    R_acc = R_acc * R;
  }

  Mat J = Mat::Zero(6, n);
  for (int i = 0; i < n; ++i) {
    J.block<3, 1>(0, i) = z_axis[i].cross(p_acc - origin[i]);
    J.block<3, 1>(3, i) = z_axis[i];
  }
  return J;
}

}  // namespace nulltank
