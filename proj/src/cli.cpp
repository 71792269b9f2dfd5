#include "nulltank/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nulltank/engine.hpp"
#include "nulltank/errors.hpp"
#include "nulltank/recorder.hpp"
#include "nulltank/scenario.hpp"

namespace nulltank {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSingular = 3;

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Quick-look plots for a run CSV: python3 plot_run.py <run.csv>"""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(path):
    rows = list(csv.DictReader(open(path)))
    t = [float(r["t"]) for r in rows]

    def series(prefix):
        keys = sorted(k for k in rows[0] if k.startswith(prefix)
                      and k[len(prefix):].isdigit())
        return {k: [float(r[k]) for r in rows] for k in keys}

    fig, axes = plt.subplots(4, 1, figsize=(10, 12), sharex=True)
    for k, v in series("x1d_").items():
        axes[0].plot(t, v, label=k)
    axes[0].set_ylabel("task velocity [m/s]")
    axes[0].legend(loc="upper right")

    for k, v in series("v2_").items():
        axes[1].plot(t, v, label=k)
    axes[1].set_ylabel("null velocity")
    axes[1].legend(loc="upper right")

    axes[2].plot(t, [float(r["T_tank"]) for r in rows], label="T")
    axes[2].set_ylabel("tank energy [J]")
    axes[2].legend(loc="upper right")

    axes[3].plot(t, [float(r["psi"]) for r in rows], label="psi")
    axes[3].plot(t, [float(r["d_N"]) for r in rows], label="d_N")
    axes[3].set_ylabel("damping")
    axes[3].set_xlabel("time [s]")
    axes[3].legend(loc="upper right")

    out = path.rsplit(".", 1)[0] + ".png"
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    print(out)


if __name__ == "__main__":
    main(sys.argv[1])
)PY";

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out.good()) {
    throw NumericError("cannot write " + path.string());
  }
}

int do_run(const std::vector<std::string>& scenario_paths,
           const std::string& out_dir, bool no_csv, bool quiet) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_dir << ": "
              << ec.message() << "\n";
    return kExitConfig;
  }

  bool any_fail = false;
  bool any_singular = false;
  for (const std::string& path : scenario_paths) {
    LoadedScenario loaded = load_scenario(path);
    const Scenario& sc = loaded.scenario;

    RunResult res = run(sc);
    const RunSummary& sum = res.summary;

    const std::filesystem::path base =
        std::filesystem::path(out_dir) / stem_of(path);
    if (!no_csv) {
      write_csv(base.string() + ".csv", res.records, sc.chain.dof(), sc.m1(),
                sc.m2());
    }
    write_text(base.string() + ".summary.json",
               summary_json(sum, res.ledger, loaded.defaulted));

    if (!quiet) {
      std::printf(
          "%-32s steps=%-6ld monitor_min=% .3e J (tol %.3e)  T=[%.3f, "
          "%.3f] J  clamps=%ld  %s\n",
          sum.name.c_str(), sum.steps, sum.worst_violation, sum.passivity_tol,
          sum.min_T, sum.max_T, sum.clamp_count,
          !sum.completed ? (sum.singular_abort ? "SINGULAR" : "ABORTED")
          : sum.passivity_pass ? "pass"
                               : "PASSIVITY FAIL");
      if (!sum.note.empty()) {
        std::printf("  note: %s\n", sum.note.c_str());
      }
    }

    if (sum.singular_abort) {
      any_singular = true;
    } else if (!sum.completed || !sum.passivity_pass) {
      any_fail = true;
    }
  }

  write_text(std::filesystem::path(out_dir) / "plot_run.py", kPlotScript);

  if (any_singular) return kExitSingular;
  if (any_fail) return kExitRunFail;
  return kExitOk;
}

int do_validate(const std::vector<std::string>& scenario_paths) {
  for (const std::string& path : scenario_paths) {
    LoadedScenario loaded = load_scenario(path);
    std::printf("%s: ok (%s", path.c_str(), loaded.scenario.name.c_str());
    if (!loaded.defaulted.empty()) {
      std::printf("; defaulted:");
      for (const std::string& k : loaded.defaulted) {
        std::printf(" %s", k.c_str());
      }
    }
    std::printf(")\n");
  }
  return kExitOk;
}

int do_compare(const std::string& a_path, const std::string& b_path,
               double tol) {
  std::ifstream a(a_path), b(b_path);
  if (!a || !b) {
    std::cerr << "error: cannot open input files\n";
    return kExitConfig;
  }

  std::string la, lb;
  long line_no = 0;
  bool identical = true;
  double worst = 0.0;
  long worst_line = 0;
  while (true) {
    const bool ga = static_cast<bool>(std::getline(a, la));
    const bool gb = static_cast<bool>(std::getline(b, lb));
    ++line_no;
    if (!ga && !gb) break;
    if (ga != gb) {
      std::printf("differ: line count mismatch at line %ld\n", line_no);
      return kExitRunFail;
    }
    if (la == lb) continue;
    identical = false;

    // Tolerant numeric comparison, cell by cell.
    std::stringstream sa(la), sb(lb);
    std::string ca, cb;
    while (true) {
      const bool ha = static_cast<bool>(std::getline(sa, ca, ','));
      const bool hb = static_cast<bool>(std::getline(sb, cb, ','));
      if (!ha && !hb) break;
      if (ha != hb) {
        std::printf("differ: cell count mismatch at line %ld\n", line_no);
        return kExitRunFail;
      }
      if (ca == cb) continue;
      char* ea = nullptr;
      char* eb = nullptr;
      const double va = std::strtod(ca.c_str(), &ea);
      const double vb = std::strtod(cb.c_str(), &eb);
      if (ea == ca.c_str() || eb == cb.c_str()) {
        std::printf("differ: non-numeric cells at line %ld\n", line_no);
        return kExitRunFail;
      }
      const double d = std::abs(va - vb);
      if (d > worst) {
        worst = d;
        worst_line = line_no;
      }
    }
  }

  if (identical) {
    std::printf("identical\n");
    return kExitOk;
  }
  std::printf("max abs difference %.17g (line %ld)\n", worst, worst_line);
  if (worst <= tol) {
    std::printf("within tolerance %.3e\n", tol);
    return kExitOk;
  }
  return kExitRunFail;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "Tank-gated variable admittance simulator for redundant chains"};
  app.require_subcommand(1);

  std::vector<std::string> run_paths;
  std::string out_dir;
  if (const char* env = std::getenv("NULLTANK_OUT")) {
    out_dir = env;
  } else {
    out_dir = "out";
  }
  bool no_csv = false;
  bool quiet = false;
  CLI::App* cmd_run = app.add_subcommand(
      "run", "Run scenarios; writes <name>.csv and <name>.summary.json");
  cmd_run->add_option("scenario", run_paths, "scenario JSON file(s)")
      ->required()
      ->expected(-1);
  cmd_run->add_option("-o,--out", out_dir,
                      "output directory (default $NULLTANK_OUT or ./out)");
  cmd_run->add_flag("--no-csv", no_csv, "skip the per-step CSV");
  cmd_run->add_flag("-q,--quiet", quiet, "suppress the per-run summary line");

  std::vector<std::string> validate_paths;
  CLI::App* cmd_validate = app.add_subcommand(
      "validate", "Parse and validate scenarios without running them");
  cmd_validate->add_option("scenario", validate_paths, "scenario JSON file(s)")
      ->required()
      ->expected(-1);

  std::string cmp_a, cmp_b;
  double cmp_tol = 0.0;
  CLI::App* cmd_compare =
      app.add_subcommand("compare", "Compare two run CSV files");
  cmd_compare->add_option("a", cmp_a, "first CSV")->required();
  cmd_compare->add_option("b", cmp_b, "second CSV")->required();
  cmd_compare->add_option("--tol", cmp_tol,
                          "numeric tolerance (default 0: exact)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cmd_run->parsed()) {
      return do_run(run_paths, out_dir, no_csv, quiet);
    }
    if (cmd_validate->parsed()) {
      return do_validate(validate_paths);
    }
    if (cmd_compare->parsed()) {
      return do_compare(cmp_a, cmp_b, cmp_tol);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SingularityError& e) {
    std::cerr << "singularity: " << e.what() << "\n";
    return kExitSingular;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRunFail;
  }
  return kExitConfig;
}

}  // namespace nulltank
