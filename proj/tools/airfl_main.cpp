// Copyright 2026 The AirFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airfl/experiment.hpp"
#include "airfl/selfcheck.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  bool emit_config = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path,
                  "flat key = value configuration file");
  cmd->add_option("--set", args->overrides,
                  "override a config key, e.g. --set seed=7 (repeatable)");
  cmd->add_flag("--emit-config", args->emit_config,
                "print the fully resolved configuration before running");
}

airfl::SystemConfig build_config(const CommonArgs& args,
                                 const airfl::Scheme* force_scheme = nullptr) {
  airfl::SystemConfig cfg;
  if (!args.config_path.empty())
    cfg = airfl::load_config_file(args.config_path);
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw airfl::ConfigError("--set expects key=value, got '" + kv + "'");
    airfl::apply_config_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (force_scheme != nullptr) cfg.scheme = *force_scheme;
  airfl::resolve_and_validate(cfg);
  if (args.emit_config) std::fputs(airfl::dump_config(cfg).c_str(), stdout);
  return cfg;
}

std::string sweep_file_tag(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Over-the-air federated learning with channel-noise differential "
      "privacy: simulator, accountant and beamforming optimizer"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  std::string sim_out = "out";
  CLI::App* sim = app.add_subcommand("simulate", "run one experiment");
  add_common(sim, &sim_args);
  sim->add_option("--out", sim_out, "output directory");

  CommonArgs sweep_args;
  std::string sweep_axis = "T";
  std::vector<double> sweep_values;
  std::string sweep_out = "out";
  bool sweep_per_round = false;
  CLI::App* swp =
      app.add_subcommand("sweep", "run one experiment per axis value");
  add_common(swp, &sweep_args);
  swp->add_option("--axis", sweep_axis, "sweep axis: T, eps or snr")
      ->required();
  swp->add_option("--values", sweep_values, "axis values")
      ->required()
      ->expected(-1);
  swp->add_option("--out", sweep_out, "output directory");
  swp->add_flag("--per-round", sweep_per_round,
                "also write a rounds CSV per (value, scheme)");

  CommonArgs curve_args;
  std::string curve_out = "privacy_curve.csv";
  CLI::App* curve = app.add_subcommand(
      "privacy-curve", "privacy loss versus the number of rounds");
  add_common(curve, &curve_args);
  curve->add_option("--out", curve_out, "output CSV path");

  CommonArgs opt_args;
  std::string opt_out = "allocation.csv";
  CLI::App* opt = app.add_subcommand(
      "optimize", "solve the combiner-norm allocation only");
  add_common(opt, &opt_args);
  opt->add_option("--out", opt_out, "output CSV path");

  std::string validate_scratch =
      (std::filesystem::temp_directory_path() / "airfl-validate").string();
  CLI::App* val =
      app.add_subcommand("validate", "run the oracle verification suites");
  val->add_option("--scratch", validate_scratch,
                  "scratch directory for temporary artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sim->parsed()) {
      const airfl::SystemConfig cfg = build_config(sim_args);
      airfl::run_simulate_files(cfg, sim_out);
      std::ofstream provenance(sim_out + "/resolved_config.txt");
      provenance << airfl::dump_config(cfg);
      std::printf("wrote %s/rounds.csv\n", sim_out.c_str());
    } else if (swp->parsed()) {
      const airfl::SystemConfig cfg = build_config(sweep_args);
      const airfl::SweepAxis axis = airfl::sweep_axis_from_string(sweep_axis);
      const airfl::SweepResult result =
          airfl::sweep(cfg, axis, sweep_values, airfl::all_schemes());
      std::filesystem::create_directories(sweep_out);
      airfl::write_sweep_csv(result, sweep_out + "/sweep.csv");
      if (sweep_per_round) {
        for (const airfl::SweepRun& run : result.runs) {
          const std::string path = sweep_out + "/rounds_" + sweep_axis + "=" +
                                   sweep_file_tag(run.axis_value) + "_" +
                                   airfl::to_string(run.scheme) + ".csv";
          airfl::write_rounds_csv(run.result, path);
        }
      }
      std::printf("wrote %s/sweep.csv (%zu rows)\n", sweep_out.c_str(),
                  result.rows.size());
    } else if (curve->parsed()) {
      const airfl::SystemConfig cfg = build_config(curve_args);
      const airfl::PlanSummary plan = airfl::plan_for_config(cfg);
      airfl::write_privacy_curve_csv(plan.ledger, curve_out);
      std::printf("wrote %s (%zu rounds)\n", curve_out.c_str(),
                  plan.ledger.curve.size());
    } else if (opt->parsed()) {
      const airfl::Scheme dp = airfl::Scheme::kAirflDp;  // allocation implies
      const airfl::SystemConfig cfg = build_config(opt_args, &dp);
      const airfl::PlanSummary plan = airfl::plan_for_config(cfg);
      airfl::write_allocation_csv(plan.pi, plan.allocation, plan.budget,
                                  opt_out);
      std::printf("wrote %s (scaled = %d, A = %g)\n", opt_out.c_str(),
                  plan.allocation.scaled ? 1 : 0, plan.budget.A);
    } else if (val->parsed()) {
      const std::vector<airfl::CheckResult> results =
          airfl::run_acceptance_checks(validate_scratch);
      if (!airfl::report_checks(results)) return kExitNumerical;
    }
  } catch (const airfl::CdeltaError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const airfl::InfeasibleError& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const airfl::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const airfl::ParameterError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const airfl::IoError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const airfl::SingularMatrixError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
