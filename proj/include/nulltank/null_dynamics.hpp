#pragma once

#include "nulltank/types.hpp"

namespace nulltank {

/// Self-motion velocity with unit virtual inertia:
///   v2dot = -d_N v2 + F_null
/// Damping is isotropic; d_N floats above the baseline `delta` only while
/// the tank sits at its floor.
struct NullState {
  Vec v2;              ///< null-space velocity coordinates
  double d_N = 0.0;    ///< current damping [Ns/m]
  double delta = 0.0;  ///< baseline damping [Ns/m]

  static NullState make(int m2, double delta);
};

/// Oscillating refill force, componentwise gamma_i |T - T_star| sin(omega t),
/// active only while T < T_star (strict). `phase` is the time argument the
/// oscillator should use (global run time by default; engines may restart it
/// at refill onset).
Vec f_null(double T, double T_star, const Vec& gains, double omega,
           double phase);

/// Damping update. At the tank floor with meaningful null velocity the
/// damping rises so harvested power covers the gated extraction:
///   d_N = max((gamma P_M - P_D) / (v2^T v2), delta)
/// Otherwise it returns the baseline delta.
double d_N_update(const NullState& s, bool tank_at_floor, int gamma,
                  double P_M, double P_D, double v2_eps = 1e-6);

/// Semi-implicit step: v2 <- (v2 + F_null dt) / (1 + d_N dt).
void null_step(NullState& s, const Vec& F_null, double dt);

/// Harvested power P_N = d_N v2^T v2 (isotropic D_N).
double p_null(const NullState& s);

}  // namespace nulltank
