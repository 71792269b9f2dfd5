#pragma once

#include <optional>

#include "nulltank/types.hpp"

namespace nulltank {

/// Energy tank T = 1/2 x_t^2 with storage gate phi and extraction gate gamma.
/// The energy level is integrated directly; x_t is derived on demand.
struct TankState {
  double T = 0.0;          ///< stored energy [J]
  double T_star = 0.0;     ///< refill target [J]
  double T_bar = 0.0;      ///< storage cap [J]
  double eps_floor = 0.0;  ///< hard depletion floor [J]
  double eps_band = 0.01;  ///< band width used to detect "at floor" [J]
  int phi = 1;             ///< storage gate used in the last step
  int gamma = 1;           ///< extraction gate used in the last step
  double last_flow = 0.0;  ///< phi (P_D + P_N) - gamma P_M of the last step
  long clamp_count = 0;    ///< depletion clamp events so far
  bool clamped_last = false;

  double xt() const;  ///< tank coordinate sqrt(2 T)

  static TankState make(double T0, double T_star, double T_bar,
                        double eps_floor, double eps_band = 0.01);
};

/// Storage gate: 1 while T <= T_bar, 0 above (further storage is discarded).
int phi_gate(double T, double T_bar);

/// Extraction gate from the inertia rate: 0 when Mdot is negative
/// semidefinite (isotropic diagonal, entries <= 0), 1 when positive.
/// A mixed-sign diagonal is rejected as a configuration error.
int gamma_gate(const Mat& Mdot);

/// One bookkeeping step:
///   T += (phi (P_D + P_N) - gamma P_M) dt
/// phi is re-evaluated from the pre-step energy; gamma must already be set
/// by the caller (it depends on the inertia schedule, not on tank state).
/// If the result would drop below eps_floor, T is clamped there and the
/// event is counted. Preconditions: dt > 0 and P_D, P_N >= 0.
/// forced_phi overrides the gate (stress-test hook, bypasses the cap logic).
void tank_step(TankState& tank, double P_D, double P_N, double P_M, double dt,
               std::optional<int> forced_phi = std::nullopt);

/// True while the tank is below its refill target (strict).
bool needs_refill(const TankState& tank);

}  // namespace nulltank
