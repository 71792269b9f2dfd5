#pragma once

#include <deque>
#include <vector>

#include "nulltank/types.hpp"

namespace nulltank {

/// Task-space admittance state: M xddot + (D + psi I) xdot = F1.
struct AdmittanceState {
  Vec x1;      ///< task position [m]
  Vec x1dot;   ///< task velocity [m/s]
  Mat M;       ///< virtual inertia [kg]
  Mat D;       ///< virtual damping [Ns/m]
  Mat Mdot;    ///< inertia rate applied this step [kg/s]
  double psi = 0.0;  ///< variable damping injected when the tank floors [Ns/m]

  static AdmittanceState make(int m1, double m0, double d0);
};

/// One integration step, semi-implicit Euler:
///   a      = M^-1 (F1 - (D + psi I) x1dot)
///   x1dot += a dt
///   x1    += x1dot dt   (updated velocity)
/// Throws NumericError on non-finite results.
void admittance_step(AdmittanceState& s, const Vec& F1, double dt);

struct Powers {
  double P_D = 0.0;    ///< xdot^T (D + psi I) xdot, total damping dissipation
  double P_M = 0.0;    ///< 1/2 xdot^T Mdot xdot, inertia-variation power
  double P_psi = 0.0;  ///< psi * xdot^T xdot, share of P_D due to psi
};

/// Instantaneous powers of the admittance at its current state.
Powers compute_powers(const AdmittanceState& s);

/// Variable damping law, active only with the tank at its floor, no null
/// motion left (|v2| <= v2_eps) and |x1dot| > x_eps:
///   psi = max((P_M - P_D) / (x1dot^T x1dot), 0)
/// Returns 0 otherwise. P_D is the dissipation stream credited to the tank
/// excluding the current psi share; passing the total would subtract psi
/// from its own target and the assignment would oscillate.
double psi_update(const AdmittanceState& s, bool tank_at_floor, const Vec& v2,
                  double P_M, double P_D, double v2_eps = 1e-6,
                  double x_eps = 1e-6);

/// Scheduled inertia steps. Steps are triggered either by sign inversions of
/// a monitored force component (with a small hysteresis band) or by an
/// explicit time table, and are applied as linear ramps of `ramp_duration`
/// seconds. `instant` style applies the whole step in a single integration
/// step, which charges or discharges the tank by 1/2 xdot^T dM xdot at once.
/// Triggers arriving while a ramp is active are queued; ramps never overlap.
class InertiaSchedule {
 public:
  enum class Mode { kForceSign, kTimeTable };
  enum class Style { kRamp, kInstant };

  struct Config {
    Mode mode = Mode::kForceSign;
    Style style = Style::kRamp;
    double delta_M = 0.0;        ///< magnitude of each inertia step [kg]
    double ramp_duration = 0.5;  ///< [s]
    int first_direction = +1;    ///< sign of the first force-triggered step
    int force_axis = 0;          ///< monitored component of F1 (task index)
    double hysteresis = 1e-3;    ///< [N]
    std::vector<std::pair<double, double>> table;  ///< (time, signed dM)
  };

  InertiaSchedule() = default;
  explicit InertiaSchedule(Config cfg);

  /// Inertia change over [t, t+dt), as an isotropic m1 x m1 increment.
  /// The caller applies it: M += delta, Mdot = delta / dt.
  Mat advance(double t, double dt, const Vec& F1, int m1);

  bool ramp_active() const { return ramp_remaining_ > 0.0; }
  /// Signed sum of every step triggered so far (including queued ones).
  double total_delta() const { return total_delta_; }

 private:
  void trigger(double signed_delta);

  Config cfg_;
  int prev_sign_ = 0;
  std::size_t next_table_entry_ = 0;
  int next_direction_ = +1;
  double ramp_rate_ = 0.0;       ///< [kg/s] while a ramp is active
  double ramp_remaining_ = 0.0;  ///< [s]
  double ramp_delta_ = 0.0;      ///< signed total of the active ramp [kg]
  double ramp_applied_ = 0.0;    ///< portion already applied [kg]
  std::deque<double> pending_;
  double total_delta_ = 0.0;
};

}  // namespace nulltank
