#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nulltank/cli.hpp"
#include "nulltank/recorder.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kScenarioDir = NULLTANK_SCENARIO_DIR;

int cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("nulltank");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return nulltank::run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("nulltank_cli_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  REQUIRE(out.good());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fast planar 3R scenario used by most CLI tests (2 s, 1000 steps).
std::string micro_json(const std::string& extra = "") {
  return std::string(R"({
  "name": "cli_micro",
  "duration": 2.0,
  "dt": 0.002,
  "strategy": "null_refill",
  "zero_P_D": false,
  "chain": {"joints": [{"length": 1.0}, {"length": 0.8}, {"length": 0.6}]},
  "q0": [0.3, 0.5, 0.4],
  "task_axes": [0, 1],
  "admittance": {"M0": 2.0, "D0": 1.0, "D_injected": 4.0},
  "schedule": {"mode": "time_table", "style": "ramp", "ramp_duration": 0.1,
               "table": [{"t": 0.5, "delta": 0.6}, {"t": 1.2, "delta": -0.6}]},
  "force": {"type": "constant", "axis": 0, "amplitude": -1.0},
  "tank": {"T0": 5.0, "T_star": 5.0, "T_bar": 8.0,
           "eps_floor": 0.1, "eps_band": 0.01},
  "null": {"delta": 0.05, "gains": [0.3], "omega": 2.0})") +
         extra + "\n}\n";
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text) n += (c == '\n');
  return n;
}

}  // namespace

TEST_CASE("cli validates the bundled scenarios") {
  for (const char* name :
       {"sim_null_refill.json", "sim_damping_injection.json",
        "bench_probe.json"}) {
    CHECK(cli({"validate", kScenarioDir + "/" + name}) == 0);
  }
}

TEST_CASE("cli rejects bad input with exit code 2") {
  TempDir dir("bad");
  const std::string bogus = dir.file("bogus.json");
  write_file(bogus, R"({"name": "x", "not_a_key": 1})");
  CHECK(cli({"validate", bogus}) == 2);
  CHECK(cli({"validate", dir.file("missing.json")}) == 2);
  CHECK(cli({"run", dir.file("missing.json"), "-o", dir.file("out")}) == 2);
  CHECK(cli({"definitely-not-a-subcommand"}) == 2);
  CHECK(cli({}) == 2);
}

TEST_CASE("cli run writes csv, summary, and the plot helper") {
  TempDir dir("run");
  const std::string sc = dir.file("cli_micro.json");
  write_file(sc, micro_json());
  const std::string out = dir.file("out");

  CHECK(cli({"run", sc, "-o", out, "--quiet"}) == 0);
  const std::string csv_path = out + "/cli_micro.csv";
  REQUIRE(fs::exists(csv_path));
  REQUIRE(fs::exists(out + "/cli_micro.summary.json"));
  CHECK(fs::exists(out + "/plot_run.py"));

  CHECK(count_lines(read_file(csv_path)) == 1 + 1000);  // header + steps

  const auto j = nlohmann::json::parse(read_file(out +
                                                 "/cli_micro.summary.json"));
  CHECK(j.at("completed").get<bool>());
  CHECK(j.at("steps").get<long>() == 1000);
  CHECK(j.at("passivity").at("pass").get<bool>());
  CHECK(j.at("tank").at("clamp_count").get<long>() == 0);
  CHECK(j.at("defaulted_keys").is_array());
}

TEST_CASE("cli run honours --no-csv") {
  TempDir dir("nocsv");
  const std::string sc = dir.file("cli_micro.json");
  write_file(sc, micro_json());
  const std::string out = dir.file("out");
  CHECK(cli({"run", sc, "-o", out, "--no-csv", "-q"}) == 0);
  CHECK_FALSE(fs::exists(out + "/cli_micro.csv"));
  CHECK(fs::exists(out + "/cli_micro.summary.json"));
}

TEST_CASE("repeat runs are byte identical and compare agrees") {
  TempDir dir("det");
  const std::string sc = dir.file("cli_micro.json");
  write_file(sc, micro_json());
  const std::string out1 = dir.file("out1");
  const std::string out2 = dir.file("out2");
  REQUIRE(cli({"run", sc, "-o", out1, "-q"}) == 0);
  REQUIRE(cli({"run", sc, "-o", out2, "-q"}) == 0);

  const std::string a = out1 + "/cli_micro.csv";
  const std::string b = out2 + "/cli_micro.csv";
  CHECK(read_file(a) == read_file(b));
  CHECK(cli({"compare", a, b}) == 0);
}

TEST_CASE("compare flags perturbed data and respects --tol") {
  TempDir dir("cmp");
  const std::string sc = dir.file("cli_micro.json");
  write_file(sc, micro_json());
  const std::string out = dir.file("out");
  REQUIRE(cli({"run", sc, "-o", out, "-q"}) == 0);
  const std::string a = out + "/cli_micro.csv";
  const std::string b = out + "/perturbed.csv";

  auto records = nulltank::read_csv(a, 3, 2, 1);
  REQUIRE(records.size() > 500);
  records[500].x1(0) += 1e-9;
  nulltank::write_csv(b, records, 3, 2, 1);

  CHECK(cli({"compare", a, b}) == 1);
  CHECK(cli({"compare", a, b, "--tol", "1e-6"}) == 0);

  // Structural mismatch is always an error, tolerance or not.
  write_file(dir.file("short.csv"), read_file(a) + "1,2,3\n");
  CHECK(cli({"compare", a, dir.file("short.csv"), "--tol", "1e9"}) == 1);
}

TEST_CASE("a singular scenario exits with code 3") {
  TempDir dir("sing");
  const std::string sc = dir.file("straight.json");
  std::string text = micro_json();
  const auto pos = text.find("[0.3, 0.5, 0.4]");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("[0.3, 0.5, 0.4]").size(),
               "[0.0, 0.0, 0.0]");
  write_file(sc, text);
  CHECK(cli({"run", sc, "-o", dir.file("out"), "-q"}) == 3);
}

TEST_CASE("a passivity violation exits with code 1") {
  TempDir dir("viol");
  const std::string sc = dir.file("gate_off.json");
  std::string text = micro_json(
      ",\n  \"overrides\": {\"force_gamma\": 0}");
  const auto pos = text.find("\"T_bar\": 8.0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"T_bar\": 8.0").size(),
               "\"T_bar\": 1e9");
  write_file(sc, text);
  CHECK(cli({"run", sc, "-o", dir.file("out"), "-q"}) == 1);

  const auto j = nlohmann::json::parse(
      read_file(dir.file("out") + "/gate_off.summary.json"));
  CHECK_FALSE(j.at("passivity").at("pass").get<bool>());
  CHECK(j.at("passivity").at("worst_violation_J").get<double>() < -0.01);
}

TEST_CASE("NULLTANK_OUT provides the default output directory") {
  TempDir dir("env");
  const std::string sc = dir.file("cli_micro.json");
  write_file(sc, micro_json());
  const std::string out = dir.file("env_out");
  REQUIRE(setenv("NULLTANK_OUT", out.c_str(), 1) == 0);
  const int rc = cli({"run", sc, "-q"});
  unsetenv("NULLTANK_OUT");
  CHECK(rc == 0);
  CHECK(fs::exists(out + "/cli_micro.csv"));
}
