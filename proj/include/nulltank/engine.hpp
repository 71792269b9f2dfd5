#pragma once

#include <string>
#include <vector>

#include "nulltank/admittance.hpp"
#include "nulltank/null_dynamics.hpp"
#include "nulltank/scenario.hpp"
#include "nulltank/tank.hpp"
#include "nulltank/types.hpp"

namespace nulltank {

/// Step flags (bitmask).
enum StepFlag : int {
  kFlagDepletionClamp = 1,
  kFlagSingularityNear = 2,
  kFlagTankAtFloor = 4,
};

/// Full state snapshot after one control step. `t` is the time at which the
/// step's inputs were sampled; states are end-of-step values.
struct StepRecord {
  double t = 0.0;
  Vec q;
  Vec qdot;
  Vec x1;
  Vec x1dot;
  Vec v2;
  Vec F1;
  Vec F_null;
  double M_trace = 0.0;
  double D_trace = 0.0;
  double psi = 0.0;
  double d_N = 0.0;
  double T_tank = 0.0;
  int phi = 1;
  int gamma = 0;
  double P_D = 0.0;   ///< damping dissipation credited to the tank stream
  double P_N = 0.0;
  double P_M = 0.0;
  double P_psi = 0.0;
  double S = 0.0;     ///< storage H1 + T + H2 at end of step
  double E_in = 0.0;  ///< cumulative port energy up to end of step
  int flags = 0;
};

/// Cumulative passivity bookkeeping for one run. The monitor is
///   m(t) = E_in(t) + S(0) - S(t)
/// which stays non-negative (up to integration tolerance) for a passive
/// execution; see passivity_check.
struct PassivityLedger {
  double S0 = 0.0;
  double E_in = 0.0;
  double worst_violation = 0.0;       ///< min over time of m(t), <= 0
  double worst_violation_t = 0.0;
  double worst_power_deficit = 0.0;   ///< min over steps of port - dS/dt
  double worst_power_deficit_t = 0.0;
};

struct RunSummary {
  std::string name;
  long steps = 0;
  bool completed = false;
  bool singular_abort = false;
  std::string note;

  bool passivity_pass = false;  ///< integral monitor within tolerance
  bool pointwise_ok = false;    ///< differential check within tolerance
  double passivity_tol = 0.0;   ///< [J]
  double worst_violation = 0.0;
  double worst_power_deficit = 0.0;

  double max_velocity_deviation = 0.0;  ///< vs ideal reference, on psi == 0
  double psi_zero_fraction = 1.0;
  double min_T = 0.0;
  double max_T = 0.0;
  double final_T = 0.0;
  long clamp_count = 0;
  long clamp_with_v2_count = 0;  ///< clamps that hit with |v2| > v2_eps
  double harvested_energy = 0.0; ///< integral of P_N dt
  double max_v2_norm = 0.0;
  long singularity_warnings = 0;
  double min_sigma_min = 0.0;
  double basis_continuity_c = 0.0;  ///< max |dZ|_max / |dq|_2 over the run
  double wall_time_s = 0.0;
};

struct RunResult {
  std::vector<StepRecord> records;
  PassivityLedger ledger;
  RunSummary summary;
};

/// Per-step reference states of the unconstrained admittance (no tank, no
/// psi, nominal damping, same inertia schedule and force profile).
struct IdealStep {
  Vec x1;
  Vec x1dot;
};

std::vector<IdealStep> ideal_reference(const Scenario& sc);

/// Runs a scenario to completion (or until a kinematic singularity aborts
/// it). Deterministic: identical scenarios produce identical results.
RunResult run(const Scenario& sc);

struct PassivityReport {
  bool integral_pass = false;
  bool pointwise_pass = false;
  double worst_violation = 0.0;
  double worst_power_deficit = 0.0;
  double tol_integral = 0.0;
  double tol_power = 0.0;
};

/// Re-derives the monitor from recorded S and E_in columns and applies the
/// given tolerances (tol_integral in J, tol_power in W).
PassivityReport passivity_check(const std::vector<StepRecord>& records,
                                double S0, double dt, double tol_integral,
                                double tol_power);

/// Max componentwise |x1dot - ideal.x1dot| over steps where psi == 0.
double velocity_deviation(const std::vector<StepRecord>& records,
                          const std::vector<IdealStep>& ideal);

}  // namespace nulltank
