#include "nulltank/null_dynamics.hpp"

#include <cmath>

#include "nulltank/errors.hpp"

namespace nulltank {

NullState NullState::make(int m2, double delta) {
  if (delta <= 0.0) {
    throw ConfigError("null dynamics: delta must be positive");
  }
  NullState s;
  s.v2 = Vec::Zero(m2);
  s.delta = delta;
  s.d_N = delta;
  return s;
}

Vec f_null(double T, double T_star, const Vec& gains, double omega,
           double phase) {
  if (T >= T_star) {
    return Vec::Zero(gains.size());
  }
  return gains * (std::abs(T - T_star) * std::sin(omega * phase));
}

double d_N_update(const NullState& s, bool tank_at_floor, int gamma,
                  double P_M, double P_D, double v2_eps) {
  const double v2_sq = s.v2.squaredNorm();
  if (tank_at_floor && v2_sq > v2_eps * v2_eps) {
    return std::max((gamma * P_M - P_D) / v2_sq, s.delta);
  }
  return s.delta;
}

void null_step(NullState& s, const Vec& F_null, double dt) {
  if (F_null.size() != s.v2.size()) {
    throw ConfigError("null_step: F_null dimension mismatch");
  }
  s.v2 = (s.v2 + F_null * dt) / (1.0 + s.d_N * dt);
  if (!s.v2.allFinite()) {
    throw NumericError("null_step: non-finite null velocity");
  }
}

double p_null(const NullState& s) { return s.d_N * s.v2.squaredNorm(); }

}  // namespace nulltank
