#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nulltank/admittance.hpp"
#include "nulltank/chain.hpp"
#include "nulltank/types.hpp"

namespace nulltank {

/// External wrench source, sampled at the controller rate. All profiles are
/// pure functions of time (the noisy variant derives its per-cycle jitter
/// from the seed), so identical scenarios always see identical forces.
class ForceProfile {
 public:
  enum class Type { kSquare, kNoisySquare, kConstant, kSamples };

  Type type = Type::kSquare;
  int axis = 2;             ///< wrench component the profile drives
  double amplitude = 0.0;   ///< [N]
  double half_period = 0.0; ///< [s] square-wave half period
  int first_sign = +1;
  double jitter = 0.0;      ///< relative amplitude jitter per half cycle
  std::uint64_t seed = 0;
  std::vector<std::pair<double, Vec6>> samples;  ///< zero-order hold

  Vec6 sample(double t) const;
};

enum class Strategy { kNullRefill, kDampingInjection, kNone };

enum class PhaseMode { kGlobal, kOnset };

struct Tolerances {
  double sigma_tol = 1e-8;   ///< relative singular-value cutoff
  double v2_eps = 1e-6;      ///< null velocity deadband
  double x_eps = 1e-6;       ///< task velocity deadband
  double passivity_c = 1e-5; ///< [W]; integral budget = passivity_c * duration
  double pointwise_power_tol = 0.1;  ///< [W] for the differential check
};

/// Everything needed to reproduce one run.
struct Scenario {
  std::string name = "scenario";
  double duration = 60.0;
  double dt = 0.002;
  Strategy strategy = Strategy::kNullRefill;
  bool zero_P_D = false;  ///< discard the admittance dissipation stream

  ChainModel chain;
  Vec q0;
  std::vector<int> task_axes{0, 1, 2};

  double M0 = 6.0;   ///< [kg]
  double D0 = 0.75;  ///< [Ns/m]
  double D_injected = 4.0;  ///< [Ns/m], damping-injection strategy only

  InertiaSchedule::Config schedule;
  ForceProfile force;

  double T0 = 25.0;
  double T_star = 25.0;
  double T_bar = 40.0;
  double eps_floor = 0.1;
  double eps_band = 0.01;

  double null_delta = 0.01;  ///< baseline d_N [Ns/m]
  Vec null_gains;            ///< size m2
  double omega = 1.0;        ///< [rad/s]
  PhaseMode phase_mode = PhaseMode::kGlobal;

  Tolerances tol;
  std::uint64_t seed = 0;

  /// Test hooks: force a gate to a fixed value for the whole run.
  std::optional<int> force_phi;
  std::optional<int> force_gamma;

  int m1() const { return static_cast<int>(task_axes.size()); }
  int m2() const { return chain.dof() - m1(); }

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
};

struct LoadedScenario {
  Scenario scenario;
  std::vector<std::string> defaulted;  ///< keys filled from defaults
};

/// Parses and validates a scenario config file (JSON). Unknown keys are
/// rejected; missing optional keys fall back to defaults and are reported.
LoadedScenario load_scenario(const std::string& path);

/// Same, from an in-memory JSON document.
LoadedScenario parse_scenario(const std::string& json_text);

}  // namespace nulltank
