#include "nulltank/recorder.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nulltank/errors.hpp"

namespace nulltank {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_vec_columns(std::vector<std::string>& cols, const std::string& base,
                        int count) {
  for (int i = 0; i < count; ++i) {
    cols.push_back(base + std::to_string(i));
  }
}

}  // namespace

std::vector<std::string> csv_columns(int n, int m1, int m2) {
  std::vector<std::string> cols{"t"};
  append_vec_columns(cols, "q", n);
  append_vec_columns(cols, "qd", n);
  append_vec_columns(cols, "x1_", m1);
  append_vec_columns(cols, "x1d_", m1);
  append_vec_columns(cols, "v2_", m2);
  append_vec_columns(cols, "F1_", m1);
  append_vec_columns(cols, "Fn_", m2);
  for (const char* name :
       {"M_trace", "D_trace", "psi", "d_N", "T_tank", "phi", "gamma", "P_D",
        "P_N", "P_M", "P_psi", "S", "E_in", "flags"}) {
    cols.push_back(name);
  }
  return cols;
}

void write_csv(const std::string& path, const std::vector<StepRecord>& records,
               int n, int m1, int m2) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw NumericError("write_csv: cannot open " + tmp);
    }

    const auto cols = csv_columns(n, m1, m2);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << cols[i];
    }
    out << "\n";

    auto put_vec = [&out](const Vec& v, int expect) {
      if (v.size() != expect) {
        throw NumericError("write_csv: record dimension mismatch");
      }
      for (int i = 0; i < expect; ++i) out << "," << fmt(v(i));
    };

    for (const StepRecord& r : records) {
      out << fmt(r.t);
      put_vec(r.q, n);
      put_vec(r.qdot, n);
      put_vec(r.x1, m1);
      put_vec(r.x1dot, m1);
      put_vec(r.v2, m2);
      put_vec(r.F1, m1);
      put_vec(r.F_null, m2);
      out << "," << fmt(r.M_trace) << "," << fmt(r.D_trace) << ","
          << fmt(r.psi) << "," << fmt(r.d_N) << "," << fmt(r.T_tank) << ","
          << r.phi << "," << r.gamma << "," << fmt(r.P_D) << "," << fmt(r.P_N)
          << "," << fmt(r.P_M) << "," << fmt(r.P_psi) << "," << fmt(r.S)
          << "," << fmt(r.E_in) << "," << r.flags << "\n";
    }
    if (!out.good()) {
      throw NumericError("write_csv: write failed on " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw NumericError("write_csv: rename to " + path + " failed");
  }
}

std::vector<StepRecord> read_csv(const std::string& path, int n, int m1,
                                 int m2) {
  std::ifstream in(path);
  if (!in) {
    throw NumericError("read_csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw NumericError("read_csv: empty file " + path);
  }
  const std::size_t expect_cols = csv_columns(n, m1, m2).size();

  std::vector<StepRecord> records;
  std::vector<double> vals;
  vals.reserve(expect_cols);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vals.clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (vals.size() != expect_cols) {
      throw NumericError("read_csv: row with " + std::to_string(vals.size()) +
                         " cells, expected " + std::to_string(expect_cols));
    }

    StepRecord r;
    std::size_t i = 0;
    auto take_vec = [&](int count) {
      Vec v(count);
      for (int j = 0; j < count; ++j) v(j) = vals[i++];
      return v;
    };
    r.t = vals[i++];
    r.q = take_vec(n);
    r.qdot = take_vec(n);
    r.x1 = take_vec(m1);
    r.x1dot = take_vec(m1);
    r.v2 = take_vec(m2);
    r.F1 = take_vec(m1);
    r.F_null = take_vec(m2);
    r.M_trace = vals[i++];
    r.D_trace = vals[i++];
    r.psi = vals[i++];
    r.d_N = vals[i++];
    r.T_tank = vals[i++];
    r.phi = static_cast<int>(vals[i++]);
    r.gamma = static_cast<int>(vals[i++]);
    r.P_D = vals[i++];
    r.P_N = vals[i++];
    r.P_M = vals[i++];
    r.P_psi = vals[i++];
    r.S = vals[i++];
    r.E_in = vals[i++];
    r.flags = static_cast<int>(vals[i++]);
    records.push_back(std::move(r));
  }
  return records;
}

std::string summary_json(const RunSummary& sum, const PassivityLedger& led,
                         const std::vector<std::string>& defaulted) {
  nlohmann::ordered_json j;
  j["name"] = sum.name;
  j["steps"] = sum.steps;
  j["completed"] = sum.completed;
  j["singular_abort"] = sum.singular_abort;
  j["note"] = sum.note;
  j["passivity"] = {
      {"pass", sum.passivity_pass},
      {"pointwise_ok", sum.pointwise_ok},
      {"tolerance_J", sum.passivity_tol},
      {"worst_violation_J", sum.worst_violation},
      {"worst_violation_t", led.worst_violation_t},
      {"worst_power_deficit_W", sum.worst_power_deficit},
      {"worst_power_deficit_t", led.worst_power_deficit_t},
      {"S0_J", led.S0},
      {"E_in_J", led.E_in},
  };
  j["tank"] = {
      {"min_T_J", sum.min_T},
      {"max_T_J", sum.max_T},
      {"final_T_J", sum.final_T},
      {"clamp_count", sum.clamp_count},
      {"clamp_with_v2_count", sum.clamp_with_v2_count},
      {"harvested_energy_J", sum.harvested_energy},
  };
  j["motion"] = {
      {"max_velocity_deviation", sum.max_velocity_deviation},
      {"psi_zero_fraction", sum.psi_zero_fraction},
      {"max_v2_norm", sum.max_v2_norm},
  };
  j["kinematics"] = {
      {"singularity_warnings", sum.singularity_warnings},
      {"min_sigma_min", sum.min_sigma_min},
      {"basis_continuity_c", sum.basis_continuity_c},
  };
  j["wall_time_s"] = sum.wall_time_s;
  j["defaulted_keys"] = defaulted;
  return j.dump(2) + "\n";
}

}  // namespace nulltank
