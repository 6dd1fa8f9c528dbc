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
#pragma once

#include <string>
#include <vector>

#include "airfl/beamform.hpp"
#include "airfl/config.hpp"
#include "airfl/privacy.hpp"
#include "airfl/types.hpp"

namespace airfl {

// Unwritable or unreadable artifact path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RoundMetrics {
  int trial = 0;
  int t = 0;
  double train_loss = 0.0;
  double grad_norm_sq = 0.0;
  double clip_fraction = 0.0;  // mean of min(1, c/|Delta_i|) over active
  double mse = 0.0;            // realized |delta_hat - sum clipped|^2
  double lambda_t = 0.0;       // analytic misalignment
  double w_norm = 0.0;
  double phi_t = 0.0;
  double dp_eps = 0.0;         // cumulative; +inf for noiseless schemes
};

struct TrialRecord {
  std::vector<RoundMetrics> rounds;
  std::vector<double> holdout_accuracy;  // per round, logistic task only
  PrivacyLedger ledger;  // populated for the over-the-air schemes
  bool has_ledger = false;
  AllocationSolution allocation;  // populated for airfl-dp
  bool has_allocation = false;
  PrivacyBudget budget;
  bool perk = false;
  std::vector<double> pi;  // per-round ZF norms
  double final_loss = 0.0;
  std::vector<Vector> trajectory;  // theta after each round, when recorded
};

struct ExperimentResult {
  SystemConfig cfg;
  std::vector<TrialRecord> trials;
};

struct RunOptions {
  bool record_trajectory = false;
};

// Runs the configured scheme for T rounds x trials. The airfl-dp pipeline is
// channels -> ZF -> privacy budget -> norm allocation -> scaled combiners ->
// training loop. Deterministic in (config, seed).
ExperimentResult run_experiment(const SystemConfig& cfg,
                                const RunOptions& options = RunOptions());

enum class SweepAxis { kRounds, kEpsTilde, kSnr };

SweepAxis sweep_axis_from_string(const std::string& s);
std::string to_string(SweepAxis axis);

struct SweepRow {
  double axis_value = 0.0;
  Scheme scheme = Scheme::kVanilla;
  double final_loss_mean = 0.0;
  double final_loss_stderr = 0.0;
  double dp_eps = 0.0;  // mean final dp epsilon over trials
};

struct SweepRun {
  double axis_value = 0.0;
  Scheme scheme = Scheme::kVanilla;
  ExperimentResult result;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::kRounds;
  std::vector<SweepRow> rows;
  std::vector<SweepRun> runs;
};

// One run_experiment per (axis value, scheme). The T axis overrides the
// round count, the eps axis the per-dimension privacy target, and the snr
// axis the transmit power P = snr * sigma2 / path_loss(1 km) so the axis
// value is the worst-case receive SNR.
SweepResult sweep(const SystemConfig& config_template, SweepAxis axis,
                  const std::vector<double>& values,
                  const std::vector<Scheme>& schemes);

// Default benchmark set, in the order the summaries are emitted.
std::vector<Scheme> all_schemes();

double mean_of(const std::vector<double>& values);
double stderr_of(const std::vector<double>& values);  // sample sd / sqrt(n)

// CSV writers. Numeric cells are printed with %.17g so replays with the same
// seed are byte-identical.
void write_rounds_csv(const ExperimentResult& result, const std::string& path);
void write_accuracy_csv(const ExperimentResult& result,
                        const std::string& path);
void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_privacy_curve_csv(const PrivacyLedger& ledger,
                             const std::string& path);
void write_allocation_csv(const std::vector<double>& pi,
                          const AllocationSolution& alloc,
                          const PrivacyBudget& budget, const std::string& path);

// `simulate` entry point: runs and writes rounds.csv (and accuracy.csv for
// the logistic task) under out_dir.
ExperimentResult run_simulate_files(const SystemConfig& cfg,
                                    const std::string& out_dir);

// Uplink design for one trial without running any training: channels, ZF
// norms, budget, allocation and the privacy ledger. Used by the
// `privacy-curve` and `optimize` subcommands.
struct PlanSummary {
  std::vector<double> pi;
  AllocationSolution allocation;
  bool has_allocation = false;
  PrivacyBudget budget;
  bool perk = false;
  PrivacyLedger ledger;
};

PlanSummary plan_for_config(const SystemConfig& cfg, int trial = 0);

}  // namespace airfl
