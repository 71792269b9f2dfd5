#include "nulltank/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nulltank/errors.hpp"

namespace nulltank {
namespace {

using nlohmann::json;

// Deterministic per-cycle jitter in [-1, 1] (splitmix64).
double cycle_noise(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z = z ^ (z >> 31);
  return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
}

void reject_unknown(const json& obj, const std::string& path,
                    const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("scenario: unknown key '" + path + item.key() + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key,
         T def, std::vector<std::string>& defaulted) {
  if (!obj.contains(key)) {
    defaulted.push_back(path + key);
    return def;
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("scenario: bad value for '" + path + key +
                      "': " + e.what());
  }
}

Vec to_vec(const json& arr, const std::string& what) {
  if (!arr.is_array()) {
    throw ConfigError("scenario: '" + what + "' must be an array");
  }
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      throw ConfigError("scenario: '" + what + "' must be numeric");
    }
    v(static_cast<int>(i)) = arr[i].get<double>();
  }
  return v;
}

ChainModel parse_chain(const json& j, std::vector<std::string>& defaulted) {
  if (!j.contains("chain")) {
    defaulted.push_back("chain");
    return ChainModel::ur10e_like();
  }
  const json& c = j.at("chain");
  reject_unknown(c, "chain.", {"preset", "scale", "joints"});
  if (c.contains("joints")) {
    ChainModel m;
    for (const auto& row : c.at("joints")) {
      reject_unknown(row, "chain.joints[].",
                     {"length", "twist", "offset", "theta_offset"});
      DhJoint joint;
      joint.length = row.value("length", 0.0);
      joint.twist = row.value("twist", 0.0);
      joint.offset = row.value("offset", 0.0);
      joint.theta_offset = row.value("theta_offset", 0.0);
      m.joints.push_back(joint);
    }
    return m;
  }
  const std::string preset = c.value("preset", std::string("ur10e_like"));
  if (preset != "ur10e_like") {
    throw ConfigError("scenario: unknown chain preset '" + preset + "'");
  }
  return ChainModel::ur10e_like(c.value("scale", 1.0));
}

ForceProfile parse_force(const json& j, std::vector<std::string>& defaulted) {
  ForceProfile f;
  if (!j.contains("force")) {
    defaulted.push_back("force");
    f.amplitude = 2.0;
    f.half_period = 10.0;
    return f;
  }
  const json& c = j.at("force");
  reject_unknown(c, "force.",
                 {"type", "axis", "amplitude", "half_period", "first_sign",
                  "jitter", "samples"});
  const std::string type = get_or<std::string>(c, "force.", "type", "square",
                                               defaulted);
  if (type == "square") {
    f.type = ForceProfile::Type::kSquare;
  } else if (type == "noisy_square") {
    f.type = ForceProfile::Type::kNoisySquare;
  } else if (type == "constant") {
    f.type = ForceProfile::Type::kConstant;
  } else if (type == "samples") {
    f.type = ForceProfile::Type::kSamples;
  } else {
    throw ConfigError("scenario: unknown force type '" + type + "'");
  }
  f.axis = get_or<int>(c, "force.", "axis", 2, defaulted);
  f.amplitude = get_or<double>(c, "force.", "amplitude", 2.0, defaulted);
  f.half_period = get_or<double>(c, "force.", "half_period", 10.0, defaulted);
  f.first_sign = c.value("first_sign", 1) >= 0 ? +1 : -1;
  f.jitter = c.value("jitter", 0.0);
  if (c.contains("samples")) {
    for (const auto& s : c.at("samples")) {
      reject_unknown(s, "force.samples[].", {"t", "wrench"});
      Vec w = to_vec(s.at("wrench"), "force.samples[].wrench");
      if (w.size() != 6) {
        throw ConfigError("scenario: force sample wrench must have 6 entries");
      }
      f.samples.emplace_back(s.at("t").get<double>(), Vec6(w));
    }
    std::sort(f.samples.begin(), f.samples.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return f;
}

InertiaSchedule::Config parse_schedule(const json& j,
                                       std::vector<std::string>& defaulted) {
  InertiaSchedule::Config s;
  if (!j.contains("schedule")) {
    defaulted.push_back("schedule");
    s.delta_M = 3.0;
    return s;
  }
  const json& c = j.at("schedule");
  reject_unknown(c, "schedule.",
                 {"mode", "style", "delta_M", "ramp_duration",
                  "first_direction", "hysteresis", "table"});
  const std::string mode =
      get_or<std::string>(c, "schedule.", "mode", "force_sign", defaulted);
  if (mode == "force_sign") {
    s.mode = InertiaSchedule::Mode::kForceSign;
  } else if (mode == "time_table") {
    s.mode = InertiaSchedule::Mode::kTimeTable;
  } else {
    throw ConfigError("scenario: unknown schedule mode '" + mode + "'");
  }
  const std::string style =
      get_or<std::string>(c, "schedule.", "style", "ramp", defaulted);
  if (style == "ramp") {
    s.style = InertiaSchedule::Style::kRamp;
  } else if (style == "instant") {
    s.style = InertiaSchedule::Style::kInstant;
  } else {
    throw ConfigError("scenario: unknown schedule style '" + style + "'");
  }
  s.delta_M = get_or<double>(c, "schedule.", "delta_M", 3.0, defaulted);
  s.ramp_duration =
      get_or<double>(c, "schedule.", "ramp_duration", 0.5, defaulted);
  s.first_direction = c.value("first_direction", 1) >= 0 ? +1 : -1;
  s.hysteresis = c.value("hysteresis", 1e-3);
  if (c.contains("table")) {
    for (const auto& e : c.at("table")) {
      reject_unknown(e, "schedule.table[].", {"t", "delta"});
      s.table.emplace_back(e.at("t").get<double>(),
                           e.at("delta").get<double>());
    }
    std::sort(s.table.begin(), s.table.end());
  }
  return s;
}

Scenario parse(const json& j, std::vector<std::string>& defaulted) {
  reject_unknown(j, "",
                 {"name", "duration", "dt", "strategy", "zero_P_D", "chain",
                  "q0", "task_axes", "admittance", "schedule", "force",
                  "tank", "null", "tolerances", "seed", "overrides"});

  Scenario sc;
  sc.name = get_or<std::string>(j, "", "name", "scenario", defaulted);
  sc.duration = get_or<double>(j, "", "duration", 60.0, defaulted);
  sc.dt = get_or<double>(j, "", "dt", 0.002, defaulted);
  const std::string strategy =
      get_or<std::string>(j, "", "strategy", "null_refill", defaulted);
  if (strategy == "null_refill") {
    sc.strategy = Strategy::kNullRefill;
  } else if (strategy == "damping_injection") {
    sc.strategy = Strategy::kDampingInjection;
  } else if (strategy == "none") {
    sc.strategy = Strategy::kNone;
  } else {
    throw ConfigError("scenario: unknown strategy '" + strategy + "'");
  }
  sc.zero_P_D = get_or<bool>(j, "", "zero_P_D", false, defaulted);
  sc.seed = get_or<std::uint64_t>(j, "", "seed", 0, defaulted);

  sc.chain = parse_chain(j, defaulted);
  if (j.contains("q0")) {
    sc.q0 = to_vec(j.at("q0"), "q0");
  } else {
    defaulted.push_back("q0");
    sc.q0 = Vec::Zero(sc.chain.dof());
    if (sc.chain.dof() == 6) {
      sc.q0 << 0.0, -1.2, 1.9, -0.7, -1.5707963267948966, 0.0;
    }
  }
  sc.task_axes = get_or<std::vector<int>>(j, "", "task_axes",
                                          std::vector<int>{0, 1, 2}, defaulted);

  if (j.contains("admittance")) {
    const json& a = j.at("admittance");
    reject_unknown(a, "admittance.", {"M0", "D0", "D_injected"});
    sc.M0 = get_or<double>(a, "admittance.", "M0", 6.0, defaulted);
    sc.D0 = get_or<double>(a, "admittance.", "D0", 0.75, defaulted);
    sc.D_injected =
        get_or<double>(a, "admittance.", "D_injected", 4.0, defaulted);
  } else {
    defaulted.push_back("admittance");
  }

  sc.schedule = parse_schedule(j, defaulted);
  sc.force = parse_force(j, defaulted);
  sc.force.seed = sc.seed;
  // The schedule watches the driven wrench axis through the task selection.
  for (std::size_t i = 0; i < sc.task_axes.size(); ++i) {
    if (sc.task_axes[i] == sc.force.axis) {
      sc.schedule.force_axis = static_cast<int>(i);
    }
  }

  if (j.contains("tank")) {
    const json& t = j.at("tank");
    reject_unknown(t, "tank.",
                   {"T0", "T_star", "T_bar", "eps_floor", "eps_band"});
    sc.T_star = get_or<double>(t, "tank.", "T_star", 25.0, defaulted);
    sc.T0 = get_or<double>(t, "tank.", "T0", sc.T_star, defaulted);
    sc.T_bar = get_or<double>(t, "tank.", "T_bar", 40.0, defaulted);
    sc.eps_floor = get_or<double>(t, "tank.", "eps_floor", 0.1, defaulted);
    sc.eps_band = get_or<double>(t, "tank.", "eps_band", 0.01, defaulted);
  } else {
    defaulted.push_back("tank");
    sc.T0 = sc.T_star;
  }

  if (j.contains("null")) {
    const json& n = j.at("null");
    reject_unknown(n, "null.", {"delta", "gains", "omega", "phase_mode"});
    sc.null_delta = get_or<double>(n, "null.", "delta", 0.01, defaulted);
    if (n.contains("gains")) {
      sc.null_gains = to_vec(n.at("gains"), "null.gains");
    } else {
      defaulted.push_back("null.gains");
    }
    sc.omega = get_or<double>(n, "null.", "omega", 1.0, defaulted);
    const std::string pm =
        get_or<std::string>(n, "null.", "phase_mode", "global", defaulted);
    if (pm == "global") {
      sc.phase_mode = PhaseMode::kGlobal;
    } else if (pm == "onset") {
      sc.phase_mode = PhaseMode::kOnset;
    } else {
      throw ConfigError("scenario: unknown phase_mode '" + pm + "'");
    }
  } else {
    defaulted.push_back("null");
  }
  if (sc.null_gains.size() == 0) {
    sc.null_gains = Vec::Zero(std::max(sc.m2(), 0));
  }

  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, "tolerances.",
                   {"sigma_tol", "v2_eps", "x_eps", "passivity_c",
                    "pointwise_power_tol"});
    sc.tol.sigma_tol =
        get_or<double>(t, "tolerances.", "sigma_tol", 1e-8, defaulted);
    sc.tol.v2_eps = get_or<double>(t, "tolerances.", "v2_eps", 1e-6, defaulted);
    sc.tol.x_eps = get_or<double>(t, "tolerances.", "x_eps", 1e-6, defaulted);
    sc.tol.passivity_c =
        get_or<double>(t, "tolerances.", "passivity_c", 1e-5, defaulted);
    sc.tol.pointwise_power_tol = get_or<double>(
        t, "tolerances.", "pointwise_power_tol", 0.1, defaulted);
  } else {
    defaulted.push_back("tolerances");
  }

  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    reject_unknown(o, "overrides.", {"force_phi", "force_gamma"});
    if (o.contains("force_phi")) sc.force_phi = o.at("force_phi").get<int>();
    if (o.contains("force_gamma")) {
      sc.force_gamma = o.at("force_gamma").get<int>();
    }
  }

  sc.validate();
  return sc;
}

}  // namespace

Vec6 ForceProfile::sample(double t) const {
  Vec6 w = Vec6::Zero();
  switch (type) {
    case Type::kConstant:
      w[axis] = amplitude;
      break;
    case Type::kSquare:
    case Type::kNoisySquare: {
      if (half_period <= 0.0) {
        throw ConfigError("force: square wave needs half_period > 0");
      }
      const auto k = static_cast<std::uint64_t>(std::floor(t / half_period));
      const double sign = (k % 2 == 0) ? first_sign : -first_sign;
      double a = amplitude;
      if (type == Type::kNoisySquare) {
        a *= 1.0 + jitter * cycle_noise(seed, k);
      }
      w[axis] = sign * a;
      break;
    }
    case Type::kSamples: {
      // Zero-order hold; zero before the first stamp.
      auto it = std::upper_bound(
          samples.begin(), samples.end(), t,
          [](double v, const auto& s) { return v < s.first; });
      if (it != samples.begin()) {
        w = std::prev(it)->second;
      }
      break;
    }
  }
  return w;
}

void Scenario::validate() const {
  if (dt <= 0.0) throw ConfigError("scenario: dt must be positive");
  if (duration < dt) {
    throw ConfigError("scenario: duration must cover at least one step");
  }
  if (chain.dof() < 1) throw ConfigError("scenario: chain needs joints");
  if (q0.size() != chain.dof()) {
    throw ConfigError("scenario: q0 size " + std::to_string(q0.size()) +
                      " does not match chain dof " +
                      std::to_string(chain.dof()));
  }
  if (task_axes.empty() || m1() > 6) {
    throw ConfigError("scenario: task_axes must select between 1 and 6 axes");
  }
  for (int a : task_axes) {
    if (a < 0 || a > 5) {
      throw ConfigError("scenario: task axis out of range: " +
                        std::to_string(a));
    }
  }
  {
    std::vector<int> axes = task_axes;
    std::sort(axes.begin(), axes.end());
    if (std::adjacent_find(axes.begin(), axes.end()) != axes.end()) {
      throw ConfigError("scenario: duplicate task axis");
    }
  }
  if (m1() > chain.dof()) {
    throw ConfigError("scenario: more task axes than joints");
  }
  if (M0 <= 0.0) throw ConfigError("scenario: M0 must be positive");
  if (D0 < 0.0) throw ConfigError("scenario: D0 must be non-negative");
  if (schedule.delta_M < 0.0) {
    throw ConfigError("scenario: schedule.delta_M must be non-negative");
  }
  if (schedule.delta_M >= M0 &&
      schedule.mode == InertiaSchedule::Mode::kForceSign) {
    throw ConfigError(
        "scenario: delta_M must stay below M0 or inertia may lose positive "
        "definiteness");
  }
  if (schedule.ramp_duration <= 0.0) {
    throw ConfigError("scenario: schedule.ramp_duration must be positive");
  }
  if (!(0.0 < eps_floor && eps_floor < T_star && T_star < T_bar)) {
    throw ConfigError(
        "scenario: need 0 < eps_floor < T_star < T_bar" +
        std::string(eps_floor >= T_star ? " (floor exceeds target)" : ""));
  }
  if (T0 < eps_floor || T0 > T_bar) {
    throw ConfigError("scenario: T0 must lie in [eps_floor, T_bar]");
  }
  if (eps_band <= 0.0) {
    throw ConfigError("scenario: eps_band must be positive");
  }
  if (null_delta <= 0.0) {
    throw ConfigError("scenario: null.delta must be positive");
  }
  if (null_gains.size() != m2()) {
    throw ConfigError("scenario: null.gains needs one entry per null "
                      "direction (" +
                      std::to_string(m2()) + ")");
  }
  if (strategy == Strategy::kNullRefill) {
    if (m2() < 1) {
      throw ConfigError(
          "scenario: null_refill strategy needs a redundant chain (m2 >= 1)");
    }
    if (omega <= 0.0) {
      throw ConfigError("scenario: null.omega must be positive");
    }
  }
  if (strategy == Strategy::kDampingInjection && D_injected < D0) {
    throw ConfigError("scenario: D_injected must not be below D0");
  }
  if (tol.sigma_tol <= 0.0 || tol.v2_eps <= 0.0 || tol.x_eps <= 0.0 ||
      tol.passivity_c <= 0.0) {
    throw ConfigError("scenario: tolerances must be positive");
  }
  if (force.axis < 0 || force.axis > 5) {
    throw ConfigError("scenario: force.axis out of range");
  }
}

LoadedScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("scenario: cannot open '" + path + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

LoadedScenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: parse error: ") + e.what());
  }
  LoadedScenario out;
  out.scenario = parse(j, out.defaulted);
  return out;
}

}  // namespace nulltank
