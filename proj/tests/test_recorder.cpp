#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nulltank/errors.hpp"
#include "nulltank/recorder.hpp"

using namespace nulltank;

namespace {

StepRecord awkward_record(int n, int m1, int m2) {
  StepRecord r;
  r.t = 1.0 / 3.0;
  r.q = Vec::Constant(n, 0.1 + 1e-17);
  r.qdot = Vec::Constant(n, -0.0);
  r.x1 = Vec::Constant(m1, 123456789.123456789);
  r.x1dot = Vec::Constant(m1, 2.0 / 3.0);
  r.v2 = Vec::Constant(m2, -1e-300);
  r.F1 = Vec::Constant(m1, 5e300);
  r.F_null = Vec::Constant(m2, 0.0);
  r.M_trace = 18.000000000000004;
  r.D_trace = 2.25;
  r.psi = 0.0;
  r.d_N = 1e15;
  r.T_tank = 24.999999999999996;
  r.phi = 1;
  r.gamma = 0;
  r.P_D = 0.75;
  r.P_N = 1e-17;
  r.P_M = -3.0;
  r.P_psi = 0.0;
  r.S = 25.3333333333333333;
  r.E_in = -0.1;
  r.flags = 5;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("CSV round-trips doubles bitwise") {
  const auto dir = std::filesystem::temp_directory_path() / "nulltank_rec";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "roundtrip.csv").string();

  std::vector<StepRecord> recs = {awkward_record(2, 1, 1),
                                  awkward_record(2, 1, 1)};
  recs[1].t = 2.0 / 3.0;
  recs[1].v2(0) = 0.1;
  write_csv(path, recs, 2, 1, 1);

  const auto back = read_csv(path, 2, 1, 1);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].t == recs[i].t);
    CHECK(back[i].q == recs[i].q);
    CHECK(back[i].x1 == recs[i].x1);
    CHECK(back[i].x1dot == recs[i].x1dot);
    CHECK(back[i].v2 == recs[i].v2);
    CHECK(back[i].F1 == recs[i].F1);
    CHECK(back[i].M_trace == recs[i].M_trace);
    CHECK(back[i].T_tank == recs[i].T_tank);
    CHECK(back[i].d_N == recs[i].d_N);
    CHECK(back[i].P_N == recs[i].P_N);
    CHECK(back[i].S == recs[i].S);
    CHECK(back[i].phi == recs[i].phi);
    CHECK(back[i].flags == recs[i].flags);
  }

  // Negative zero survives the trip with its sign.
  CHECK(std::signbit(back[0].qdot(0)));
}

TEST_CASE("the temp file is renamed away after a write") {
  const auto dir = std::filesystem::temp_directory_path() / "nulltank_rec";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "atomic.csv").string();
  write_csv(path, {awkward_record(1, 1, 1)}, 1, 1, 1);
  CHECK(std::filesystem::exists(path));
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST_CASE("doubles are printed with 17 significant digits") {
  const auto dir = std::filesystem::temp_directory_path() / "nulltank_rec";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "digits.csv").string();
  write_csv(path, {awkward_record(1, 1, 1)}, 1, 1, 1);
  const std::string text = slurp(path);
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  CHECK(text.find("24.999999999999996") != std::string::npos);
}

TEST_CASE("column header matches the layout") {
  const auto cols = csv_columns(2, 1, 1);
  CHECK(cols.front() == "t");
  CHECK(cols.back() == "flags");
  // t + 2q + 2qd + x1 + x1d + v2 + F1 + Fn + 14 scalars
  CHECK(cols.size() == 1 + 2 + 2 + 1 + 1 + 1 + 1 + 1 + 14);
}

TEST_CASE("dimension mismatches and missing files are reported") {
  const auto dir = std::filesystem::temp_directory_path() / "nulltank_rec";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "bad.csv").string();
  CHECK_THROWS_AS(write_csv(path, {awkward_record(3, 1, 1)}, 2, 1, 1),
                  NumericError);
  CHECK_THROWS_AS(read_csv((dir / "nope.csv").string(), 2, 1, 1),
                  NumericError);

  write_csv(path, {awkward_record(2, 1, 1)}, 2, 1, 1);
  CHECK_THROWS_AS(read_csv(path, 3, 1, 1), NumericError);
}

TEST_CASE("summary JSON carries the run verdict") {
  RunSummary sum;
  sum.name = "demo";
  sum.steps = 42;
  sum.completed = true;
  sum.passivity_pass = true;
  sum.passivity_tol = 1e-3;
  sum.worst_violation = -1e-7;
  PassivityLedger led;
  led.S0 = 25.0;
  led.E_in = 1.5;

  const std::string text = summary_json(sum, led, {"tolerances"});
  const auto j = nlohmann::json::parse(text);
  CHECK(j["name"] == "demo");
  CHECK(j["steps"] == 42);
  CHECK(j["passivity"]["pass"] == true);
  CHECK(j["passivity"]["S0_J"] == 25.0);
  CHECK(j["defaulted_keys"][0] == "tolerances");
}
