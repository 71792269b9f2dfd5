#include "nulltank/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nulltank/decomposition.hpp"
#include "nulltank/errors.hpp"

namespace nulltank {
namespace {

long step_count(const Scenario& sc) {
  return std::lround(sc.duration / sc.dt);
}

}  // namespace

std::vector<IdealStep> ideal_reference(const Scenario& sc) {
  const int m1 = sc.m1();
  const Mat G = selection_matrix(sc.task_axes, 6);
  AdmittanceState adm = AdmittanceState::make(m1, sc.M0, sc.D0);
  InertiaSchedule schedule(sc.schedule);

  const long steps = step_count(sc);
  std::vector<IdealStep> out;
  out.reserve(steps);
  for (long k = 0; k < steps; ++k) {
    const double t = k * sc.dt;
    const Vec F1 = G * sc.force.sample(t);
    adm.M += schedule.advance(t, sc.dt, F1, m1);
    admittance_step(adm, F1, sc.dt);
    out.push_back({adm.x1, adm.x1dot});
  }
  return out;
}

RunResult run(const Scenario& sc) {
  sc.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  const int n = sc.chain.dof();
  const int m1 = sc.m1();
  const int m2 = sc.m2();
  const Mat G = selection_matrix(sc.task_axes, 6);

  AdmittanceState adm = AdmittanceState::make(m1, sc.M0, sc.D0);
  TankState tank =
      TankState::make(sc.T0, sc.T_star, sc.T_bar, sc.eps_floor, sc.eps_band);
  NullState null = NullState::make(m2, sc.null_delta);
  InertiaSchedule schedule(sc.schedule);

  Vec q = sc.q0;
  Mat prev_Z;
  Vec prev_q;
  bool have_prev = false;
  bool was_below = false;
  double onset_time = 0.0;

  RunResult res;
  const long steps = step_count(sc);
  res.records.reserve(steps);

  PassivityLedger& led = res.ledger;
  led.S0 = tank.T;  // x1dot and v2 start at rest
  double S_prev = led.S0;

  RunSummary& sum = res.summary;
  sum.name = sc.name;
  sum.steps = steps;
  sum.min_T = tank.T;
  sum.max_T = tank.T;
  sum.min_sigma_min = 1e300;
  long psi_zero_steps = 0;

  try {
    for (long k = 0; k < steps; ++k) {
      const double t = k * sc.dt;

      // Kinematics and task split.
      const Mat J = geometric_jacobian(sc.chain, q);
      TaskDecomposition dec =
          decompose(J, G, sc.tol.sigma_tol, have_prev ? &prev_Z : nullptr);
      sum.min_sigma_min = std::min(sum.min_sigma_min, dec.sigma_min);
      const bool sigma_near =
          dec.sigma_min < 10.0 * sc.tol.sigma_tol * dec.sigma_max;
      if (sigma_near) ++sum.singularity_warnings;
      if (have_prev && m2 > 0) {
        // Carry v2 into the freshly aligned basis.
        null.v2 = dec.Z * (prev_Z.transpose() * null.v2);
        const double dq = (q - prev_q).norm();
        if (dq > 1e-12) {
          const double dz = (dec.Z - prev_Z).cwiseAbs().maxCoeff();
          sum.basis_continuity_c = std::max(sum.basis_continuity_c, dz / dq);
        }
      }

      // Inputs and inertia schedule.
      const Vec F1 = G * sc.force.sample(t);
      const Mat dM = schedule.advance(t, sc.dt, F1, m1);
      adm.M += dM;
      adm.Mdot = dM / sc.dt;

      if (sc.strategy == Strategy::kDampingInjection) {
        const double d = needs_refill(tank) ? sc.D_injected : sc.D0;
        adm.D = d * Mat::Identity(m1, m1);
      }

      // Gates and pre-step powers (the tank trades on start-of-step state).
      const int gamma =
          sc.force_gamma ? *sc.force_gamma : gamma_gate(adm.Mdot);
      tank.gamma = gamma;
      const Powers pw = compute_powers(adm);
      const double P_D = sc.zero_P_D ? 0.0 : pw.P_D;
      const double P_M = pw.P_M;

      // Anticipatory floor test: already inside the band, or one baseline
      // step would enter it. Raising d_N on this prediction keeps the flow
      // non-negative before the floor is actually hit.
      const double band = sc.eps_floor + sc.eps_band;
      const double v2_sq = null.v2.squaredNorm();
      const int phi_now =
          sc.force_phi ? *sc.force_phi : phi_gate(tank.T, tank.T_bar);
      const double baseline_flow =
          phi_now * (P_D + null.delta * v2_sq) - gamma * P_M;
      const bool at_floor =
          tank.T <= band || tank.T + baseline_flow * sc.dt <= band;

      // Admittance step (midpoint velocity kept for the port integral).
      const Vec x1dot_pre = adm.x1dot;
      admittance_step(adm, F1, sc.dt);
      const Vec x1dot_mid = 0.5 * (x1dot_pre + adm.x1dot);

      // Null-space side.
      const bool below = needs_refill(tank);
      if (below && !was_below) onset_time = t;
      was_below = below;
      Vec F_null = Vec::Zero(m2);
      if (m2 > 0 && sc.strategy == Strategy::kNullRefill) {
        const double phase =
            sc.phase_mode == PhaseMode::kOnset ? t - onset_time : t;
        F_null = f_null(tank.T, sc.T_star, sc.null_gains, sc.omega, phase);
      }
      null.d_N = d_N_update(null, at_floor, gamma, P_M, P_D, sc.tol.v2_eps);
      const double P_N = p_null(null);
      const Vec v2_pre = null.v2;
      null_step(null, F_null, sc.dt);
      const Vec v2_mid = 0.5 * (v2_pre + null.v2);

      // Tank bookkeeping.
      tank_step(tank, P_D, P_N, P_M, sc.dt, sc.force_phi);
      if (tank.clamped_last && v2_sq > sc.tol.v2_eps * sc.tol.v2_eps) {
        ++sum.clamp_with_v2_count;
      }

      // Variable damping for the next step, sized against the psi-free
      // stream: feeding the total back would subtract the current psi from
      // its own target and make the update alternate instead of settling.
      const double psi_used = adm.psi;
      const double psi_base = sc.zero_P_D ? 0.0 : (pw.P_D - pw.P_psi);
      adm.psi = psi_update(adm, at_floor, null.v2, P_M, psi_base,
                           sc.tol.v2_eps, sc.tol.x_eps);

      // Joint motion.
      const Vec qdot = compose_joint_velocity(dec, adm.x1dot, null.v2);
      prev_q = q;
      q += qdot * sc.dt;
      prev_Z = dec.Z;
      have_prev = true;

      // Passivity ledger: port energy via midpoint rule, storage at end of
      // step.
      const double E_step =
          (x1dot_mid.dot(F1) + v2_mid.dot(F_null)) * sc.dt;
      led.E_in += E_step;
      const double H1 = 0.5 * adm.x1dot.dot(adm.M * adm.x1dot);
      const double H2 = 0.5 * null.v2.squaredNorm();
      const double S = H1 + tank.T + H2;
      const double monitor = led.E_in + led.S0 - S;
      if (monitor < led.worst_violation) {
        led.worst_violation = monitor;
        led.worst_violation_t = t;
      }
      const double deficit = (E_step - (S - S_prev)) / sc.dt;
      if (deficit < led.worst_power_deficit) {
        led.worst_power_deficit = deficit;
        led.worst_power_deficit_t = t;
      }
      S_prev = S;

      // Step record.
      StepRecord rec;
      rec.t = t;
      rec.q = q;
      rec.qdot = qdot;
      rec.x1 = adm.x1;
      rec.x1dot = adm.x1dot;
      rec.v2 = null.v2;
      rec.F1 = F1;
      rec.F_null = F_null;
      rec.M_trace = adm.M.trace();
      rec.D_trace = adm.D.trace();
      rec.psi = psi_used;
      rec.d_N = null.d_N;
      rec.T_tank = tank.T;
      rec.phi = tank.phi;
      rec.gamma = gamma;
      rec.P_D = P_D;
      rec.P_N = P_N;
      rec.P_M = P_M;
      rec.P_psi = pw.P_psi;
      rec.S = S;
      rec.E_in = led.E_in;
      rec.flags = (tank.clamped_last ? kFlagDepletionClamp : 0) |
                  (sigma_near ? kFlagSingularityNear : 0) |
                  (at_floor ? kFlagTankAtFloor : 0);
      res.records.push_back(std::move(rec));

      // Run statistics.
      if (psi_used == 0.0) ++psi_zero_steps;
      sum.min_T = std::min(sum.min_T, tank.T);
      sum.max_T = std::max(sum.max_T, tank.T);
      sum.harvested_energy += P_N * sc.dt;
      sum.max_v2_norm = std::max(sum.max_v2_norm, null.v2.norm());
    }
    sum.completed = true;
  } catch (const SingularityError& e) {
    sum.completed = false;
    sum.singular_abort = true;
    sum.note = e.what();
  } catch (const NumericError& e) {
    sum.completed = false;
    sum.note = e.what();
  }

  const long done = static_cast<long>(res.records.size());
  sum.steps = done;
  sum.clamp_count = tank.clamp_count;
  sum.final_T = tank.T;
  sum.psi_zero_fraction =
      done > 0 ? static_cast<double>(psi_zero_steps) / done : 1.0;
  if (sum.min_sigma_min == 1e300) sum.min_sigma_min = 0.0;

  sum.passivity_tol = sc.tol.passivity_c * done * sc.dt;
  sum.worst_violation = led.worst_violation;
  sum.worst_power_deficit = led.worst_power_deficit;
  sum.passivity_pass =
      sum.completed && led.worst_violation >= -sum.passivity_tol;
  sum.pointwise_ok =
      led.worst_power_deficit >= -sc.tol.pointwise_power_tol;

  if (sum.completed) {
    sum.max_velocity_deviation =
        velocity_deviation(res.records, ideal_reference(sc));
  }

  sum.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    wall_start)
          .count();
  return res;
}

PassivityReport passivity_check(const std::vector<StepRecord>& records,
                                double S0, double dt, double tol_integral,
                                double tol_power) {
  PassivityReport rep;
  rep.tol_integral = tol_integral;
  rep.tol_power = tol_power;
  double E_prev = 0.0;
  double S_prev = S0;
  for (const StepRecord& r : records) {
    const double monitor = r.E_in + S0 - r.S;
    rep.worst_violation = std::min(rep.worst_violation, monitor);
    const double deficit = ((r.E_in - E_prev) - (r.S - S_prev)) / dt;
    rep.worst_power_deficit = std::min(rep.worst_power_deficit, deficit);
    E_prev = r.E_in;
    S_prev = r.S;
  }
  rep.integral_pass = rep.worst_violation >= -tol_integral;
  rep.pointwise_pass = rep.worst_power_deficit >= -tol_power;
  return rep;
}

double velocity_deviation(const std::vector<StepRecord>& records,
                          const std::vector<IdealStep>& ideal) {
  double worst = 0.0;
  const std::size_t count = std::min(records.size(), ideal.size());
  for (std::size_t k = 0; k < count; ++k) {
    if (records[k].psi != 0.0) continue;
    const double dev =
        (records[k].x1dot - ideal[k].x1dot).cwiseAbs().maxCoeff();
    worst = std::max(worst, dev);
  }
  return worst;
}

}  // namespace nulltank
