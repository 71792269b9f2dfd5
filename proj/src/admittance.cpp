#include "nulltank/admittance.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "nulltank/errors.hpp"

namespace nulltank {

AdmittanceState AdmittanceState::make(int m1, double m0, double d0) {
  AdmittanceState s;
  s.x1 = Vec::Zero(m1);
  s.x1dot = Vec::Zero(m1);
  s.M = m0 * Mat::Identity(m1, m1);
  s.D = d0 * Mat::Identity(m1, m1);
  s.Mdot = Mat::Zero(m1, m1);
  return s;
}

void admittance_step(AdmittanceState& s, const Vec& F1, double dt) {
  if (F1.size() != s.x1.size()) {
    throw ConfigError("admittance_step: F1 dimension mismatch");
  }
  const Vec damping_force =
      s.D * s.x1dot + s.psi * s.x1dot;
  const Vec a = s.M.llt().solve(F1 - damping_force);
  s.x1dot += a * dt;
  s.x1 += s.x1dot * dt;
  if (!s.x1dot.allFinite() || !s.x1.allFinite()) {
    throw NumericError("admittance_step: non-finite state");
  }
}

Powers compute_powers(const AdmittanceState& s) {
  Powers p;
  p.P_psi = s.psi * s.x1dot.squaredNorm();
  p.P_D = s.x1dot.dot(s.D * s.x1dot) + p.P_psi;
  p.P_M = 0.5 * s.x1dot.dot(s.Mdot * s.x1dot);
  return p;
}

double psi_update(const AdmittanceState& s, bool tank_at_floor, const Vec& v2,
                  double P_M, double P_D, double v2_eps, double x_eps) {
  if (!tank_at_floor) return 0.0;
  if (v2.size() > 0 && v2.norm() > v2_eps) return 0.0;
  const double speed_sq = s.x1dot.squaredNorm();
  if (speed_sq <= x_eps * x_eps) return 0.0;
  return std::max((P_M - P_D) / speed_sq, 0.0);
}

InertiaSchedule::InertiaSchedule(Config cfg) : cfg_(std::move(cfg)) {
  next_direction_ = cfg_.first_direction >= 0 ? +1 : -1;
  if (cfg_.ramp_duration <= 0.0) {
    throw ConfigError("schedule: ramp_duration must be positive");
  }
}

void InertiaSchedule::trigger(double signed_delta) {
  total_delta_ += signed_delta;
  pending_.push_back(signed_delta);
}

Mat InertiaSchedule::advance(double t, double dt, const Vec& F1, int m1) {
  // Detect new triggers first.
  if (cfg_.mode == Mode::kForceSign && cfg_.delta_M != 0.0) {
    const double f = F1.size() > cfg_.force_axis ? F1[cfg_.force_axis] : 0.0;
    const int sign = f > cfg_.hysteresis ? +1 : (f < -cfg_.hysteresis ? -1 : 0);
    if (sign != 0) {
      if (prev_sign_ != 0 && sign != prev_sign_) {
        trigger(next_direction_ * cfg_.delta_M);
        next_direction_ = -next_direction_;
      }
      prev_sign_ = sign;
    }
  } else if (cfg_.mode == Mode::kTimeTable) {
    while (next_table_entry_ < cfg_.table.size() &&
           cfg_.table[next_table_entry_].first <= t + 0.5 * dt) {
      trigger(cfg_.table[next_table_entry_].second);
      ++next_table_entry_;
    }
  }

  // Start the next queued ramp if idle.
  if (ramp_remaining_ <= 0.0 && !pending_.empty()) {
    ramp_delta_ = pending_.front();
    pending_.pop_front();
    ramp_remaining_ =
        cfg_.style == Style::kInstant ? dt : cfg_.ramp_duration;
    ramp_rate_ = ramp_delta_ / ramp_remaining_;
    ramp_applied_ = 0.0;
  }

  double dm = 0.0;
  if (ramp_remaining_ > 0.0) {
    if (ramp_remaining_ <= dt * (1.0 + 1e-9)) {
      dm = ramp_delta_ - ramp_applied_;  // exact close-out
      ramp_remaining_ = 0.0;
    } else {
      dm = ramp_rate_ * dt;
      ramp_remaining_ -= dt;
    }
    ramp_applied_ += dm;
  }
  return dm * Mat::Identity(m1, m1);
}

}  // namespace nulltank
