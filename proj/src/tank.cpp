#include "nulltank/tank.hpp"

#include <cmath>
#include <string>

#include "nulltank/errors.hpp"

namespace nulltank {

double TankState::xt() const { return std::sqrt(2.0 * T); }

TankState TankState::make(double T0, double T_star, double T_bar,
                          double eps_floor, double eps_band) {
  if (!(0.0 < eps_floor && eps_floor < T_star && T_star < T_bar)) {
    throw ConfigError(
        "tank: need 0 < eps_floor < T_star < T_bar, got eps_floor=" +
        std::to_string(eps_floor) + " T_star=" + std::to_string(T_star) +
        " T_bar=" + std::to_string(T_bar) +
        (eps_floor >= T_star ? " (floor exceeds target)" : ""));
  }
  if (T0 < eps_floor || T0 > T_bar) {
    throw ConfigError("tank: T0 must lie in [eps_floor, T_bar]");
  }
  TankState t;
  t.T = T0;
  t.T_star = T_star;
  t.T_bar = T_bar;
  t.eps_floor = eps_floor;
  t.eps_band = eps_band;
  return t;
}

int phi_gate(double T, double T_bar) { return T <= T_bar ? 1 : 0; }

int gamma_gate(const Mat& Mdot) {
  const double scale = Mdot.cwiseAbs().maxCoeff();
  if (scale > 0.0) {
    const double off =
        (Mdot - Mdot.diagonal().asDiagonal().toDenseMatrix())
            .cwiseAbs()
            .maxCoeff();
    if (off > 1e-12 * scale) {
      throw ConfigError("gamma_gate: Mdot must be diagonal");
    }
  }
  const double mn = Mdot.diagonal().minCoeff();
  const double mx = Mdot.diagonal().maxCoeff();
  if (mn < 0.0 && mx > 0.0) {
    throw ConfigError("gamma_gate: indefinite Mdot (mixed-sign diagonal)");
  }
  return mx > 0.0 ? 1 : 0;
}

void tank_step(TankState& tank, double P_D, double P_N, double P_M, double dt,
               std::optional<int> forced_phi) {
  if (dt <= 0.0) {
    throw ConfigError("tank_step: dt must be positive");
  }
  if (P_D < 0.0 || P_N < 0.0) {
    throw ConfigError("tank_step: P_D and P_N must be non-negative");
  }
  tank.phi = forced_phi ? *forced_phi : phi_gate(tank.T, tank.T_bar);
  tank.last_flow = tank.phi * (P_D + P_N) - tank.gamma * P_M;
  tank.T += tank.last_flow * dt;
  tank.clamped_last = tank.T < tank.eps_floor;
  if (tank.clamped_last) {
    tank.T = tank.eps_floor;
    ++tank.clamp_count;
  }
}

bool needs_refill(const TankState& tank) { return tank.T < tank.T_star; }

}  // namespace nulltank
