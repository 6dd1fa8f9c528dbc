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
#include "airfl/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <utility>

#include "airfl/channel.hpp"
#include "airfl/fl.hpp"

namespace airfl {
namespace {

constexpr Index kLogisticHoldoutPerDevice = 10;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

struct Federation {
  std::vector<LocalDataset> train;
  std::vector<LocalDataset> holdout;  // logistic only
  BoundConstants bounds;
};

Federation build_federation(const SystemConfig& cfg, const RngStream& rng) {
  Federation fed;
  const Index extra =
      cfg.task == TaskKind::kLogistic ? kLogisticHoldoutPerDevice : 0;
  std::vector<LocalDataset> full = make_synthetic_task(
      cfg.task, cfg.d, cfg.n, cfg.samples_per_device + extra, rng);
  fed.train.reserve(full.size());
  if (extra > 0) fed.holdout.reserve(full.size());
  for (LocalDataset& ds : full) {
    LocalDataset train_ds{ds.device, {}, ds.task};
    train_ds.samples.assign(
        ds.samples.begin(),
        ds.samples.begin() + static_cast<std::ptrdiff_t>(cfg.samples_per_device));
    if (extra > 0) {
      LocalDataset hold_ds{ds.device, {}, ds.task};
      hold_ds.samples.assign(
          ds.samples.begin() +
              static_cast<std::ptrdiff_t>(cfg.samples_per_device),
          ds.samples.end());
      fed.holdout.push_back(std::move(hold_ds));
    }
    fed.train.push_back(std::move(train_ds));
  }
  fed.bounds.L = cfg.smoothness_L > 0.0 ? cfg.smoothness_L
                                        : task_smoothness(fed.train, 1.0);
  fed.bounds.D = cfg.D;
  if (cfg.task == TaskKind::kQuadratic)
    fed.bounds.f_star = quadratic_f_star(fed.train);
  return fed;
}

double holdout_accuracy(const Vector& theta,
                        const std::vector<LocalDataset>& holdout) {
  std::size_t correct = 0;
  std::size_t total = 0;
  for (const LocalDataset& ds : holdout)
    for (const Sample& s : ds.samples) {
      const double predicted = s.x.dot(theta) >= 0.0 ? 1.0 : -1.0;
      if (predicted == s.y) ++correct;
      ++total;
    }
  return total == 0 ? 0.0
                    : static_cast<double>(correct) / static_cast<double>(total);
}

// Everything the uplink needs for one precomputed horizon.
struct AirPlan {
  std::vector<std::vector<Index>> active;
  std::vector<ChannelRealization> channels;
  std::vector<ZfSolution> zf;
  std::vector<Combiner> combiners;
  std::vector<PowerScaling> scalings;
  std::vector<double> pi;
  std::vector<RoundPrivacy> privacy;
  PrivacyLedger ledger;
  AllocationSolution allocation;
  bool has_allocation = false;
  PrivacyBudget budget;
  bool perk = false;
};

AirPlan build_air_plan(const SystemConfig& cfg, const Federation& fed,
                       const RngStream& trial_rng) {
  AirPlan plan;
  const DeviceGeometry geometry =
      sample_geometry(cfg.n, cfg.carrier_freq, trial_rng);

  plan.active.reserve(static_cast<std::size_t>(cfg.T));
  plan.channels.reserve(static_cast<std::size_t>(cfg.T));
  plan.zf.reserve(static_cast<std::size_t>(cfg.T));
  for (int t = 0; t < cfg.T; ++t) {
    RngStream sampling_rng = trial_rng
                                 .child(stream::kRound,
                                        static_cast<std::uint64_t>(t))
                                 .child(stream::kSampling);
    plan.active.push_back(sample_active_devices(cfg.n, cfg.r, sampling_rng));
    plan.channels.push_back(
        sample_channel(t, cfg.m, plan.active.back(), geometry, trial_rng));
    plan.zf.push_back(zf_combiner(plan.channels.back(), cfg.c, cfg.d, cfg.P));
    plan.pi.push_back(plan.zf.back().pi);
  }

  const double sigma2_eff =
      effective_sigma2(cfg.sigma2, cfg.complex_noise_convention);

  std::optional<double> accountant_c_delta;
  if (cfg.c_delta > 0.0) accountant_c_delta = cfg.c_delta;

  if (cfg.scheme == Scheme::kAirflDp) {
    const double eps_target =
        cfg.eps_tilde * std::sqrt(static_cast<double>(cfg.d));
    // Consistency of the conversion constant with the target epsilon:
    // c_delta >= 2 eps / log(1/delta), floored at the conservative 8.
    const double c_delta =
        cfg.c_delta > 0.0
            ? cfg.c_delta
            : std::max(8.0, 2.0 * eps_target / std::log(1.0 / cfg.delta));
    plan.budget = privacy_budget_A(eps_target, cfg.delta, c_delta, cfg.r,
                                   cfg.c, sigma2_eff);
    PerkParams perk_params;
    perk_params.power = cfg.P;
    perk_params.sigma2_eff = sigma2_eff;
    perk_params.epsilon = eps_target;
    perk_params.delta = cfg.delta;
    perk_params.c_delta = c_delta;
    perk_params.sampling_rate = cfg.r;
    perk_params.dim = cfg.d;
    perk_params.clip_threshold = cfg.c;
    plan.perk = perk_condition(plan.zf, plan.budget, perk_params).perk;

    if (cfg.allocation_mode == AllocationMode::kJoint) {
      plan.allocation = solve_allocation(plan.pi, plan.budget.A);
    } else {
      // Online fallback: every round receives an equal share A/T of the
      // budget, so no lookahead over the horizon is needed.
      const double level =
          std::sqrt(static_cast<double>(cfg.T) / plan.budget.A);
      plan.allocation.q.reserve(plan.pi.size());
      bool raised = false;
      for (double p : plan.pi) {
        plan.allocation.q.push_back(std::max(p, level));
        raised = raised || level > p;
      }
      plan.allocation.mu_star = 0.0;
      plan.allocation.scaled = raised;
    }
    plan.has_allocation = true;
    plan.combiners = optimal_combiners(plan.zf, plan.allocation);
    accountant_c_delta = c_delta;
  } else {
    plan.combiners.reserve(plan.zf.size());
    for (const ZfSolution& sol : plan.zf)
      plan.combiners.push_back(Combiner{sol.round, sol.w_zf});
  }

  plan.privacy.reserve(static_cast<std::size_t>(cfg.T));
  plan.scalings.reserve(static_cast<std::size_t>(cfg.T));
  for (int t = 0; t < cfg.T; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    plan.scalings.push_back(channel_inversion_scaling(
        plan.combiners[idx], plan.channels[idx], cfg.c, cfg.d, cfg.P));
    RoundPrivacy rp;
    rp.phi = phi_round(plan.combiners[idx], plan.channels[idx],
                       plan.scalings[idx]);
    rp.kappa = kappa_round(plan.combiners[idx], plan.channels[idx],
                           plan.scalings[idx], cfg.eta, fed.bounds.L);
    rp.w_norm = plan.combiners[idx].w.norm();
    plan.privacy.push_back(rp);
  }

  if (cfg.sigma2 > 0.0) {
    AccountantOptions options;
    options.delta = cfg.delta;
    options.sampling_rate = cfg.r;
    options.clip_threshold = cfg.c;
    options.sigma2_eff = sigma2_eff;
    options.local_steps = cfg.Q;
    options.diameter = cfg.D;
    options.n_devices = cfg.n;
    options.eta = cfg.eta;
    if (cfg.alpha > 1.0) options.alpha = cfg.alpha;
    options.c_delta = accountant_c_delta;
    plan.ledger = privacy_curve(plan.privacy, options);
  } else {
    // Noiseless channel: no privacy is bought, the ledger reports +inf.
    double running = 0.0;
    for (std::size_t t = 0; t < plan.privacy.size(); ++t) {
      plan.ledger.phi.push_back(plan.privacy[t].phi);
      running += plan.privacy[t].phi;
      PrivacyCurvePoint point;
      point.rounds = static_cast<int>(t) + 1;
      point.sum_phi = running;
      point.cap = std::numeric_limits<double>::infinity();
      point.rdp_eps = std::numeric_limits<double>::infinity();
      point.dp_eps = std::numeric_limits<double>::infinity();
      plan.ledger.curve.push_back(point);
    }
    plan.ledger.kappa_max = kappa_max(plan.privacy);
    plan.ledger.cap = std::numeric_limits<double>::infinity();
  }
  return plan;
}

TrialRecord run_trial(const SystemConfig& cfg, int trial,
                      const RunOptions& options) {
  const RngStream trial_rng =
      RngStream(cfg.seed).child(stream::kTrial,
                                static_cast<std::uint64_t>(trial));
  const Federation fed = build_federation(cfg, trial_rng);
  const Index rn = active_count(cfg);
  const bool over_the_air =
      cfg.scheme == Scheme::kAirflZf || cfg.scheme == Scheme::kAirflDp;

  TrialRecord record;
  AirPlan plan;
  if (over_the_air) {
    plan = build_air_plan(cfg, fed, trial_rng);
    record.ledger = plan.ledger;
    record.has_ledger = true;
    record.allocation = plan.allocation;
    record.has_allocation = plan.has_allocation;
    record.budget = plan.budget;
    record.perk = plan.perk;
    record.pi = plan.pi;
  }

  ModelState theta = Vector::Zero(cfg.d);
  const ModelState center = theta;

  record.rounds.reserve(static_cast<std::size_t>(cfg.T));
  for (int t = 0; t < cfg.T; ++t) {
    const auto idx = static_cast<std::size_t>(t);
    const RngStream round_rng =
        trial_rng.child(stream::kRound, static_cast<std::uint64_t>(t));
    std::vector<Index> active;
    if (over_the_air) {
      active = plan.active[idx];
    } else {
      RngStream sampling_rng = round_rng.child(stream::kSampling);
      active = sample_active_devices(cfg.n, cfg.r, sampling_rng);
    }

    std::vector<Vector> raw;
    std::vector<Vector> clipped;
    raw.reserve(active.size());
    clipped.reserve(active.size());
    double clip_fraction_sum = 0.0;
    for (Index device : active) {
      RngStream batch_rng =
          round_rng.child(stream::kBatch, static_cast<std::uint64_t>(device));
      const ModelState local = local_sgd(
          theta, fed.train[static_cast<std::size_t>(device)], cfg.Q, cfg.eta,
          cfg.batch, batch_rng);
      raw.push_back(model_diff(theta, local, cfg.eta));
      clipped.push_back(clip(raw.back(), cfg.c));
      clip_fraction_sum += clip_factor(raw.back(), cfg.c);
    }

    RoundMetrics metrics;
    metrics.trial = trial;
    metrics.t = t;
    metrics.clip_fraction =
        clip_fraction_sum / static_cast<double>(active.size());
    metrics.dp_eps = std::numeric_limits<double>::infinity();

    switch (cfg.scheme) {
      case Scheme::kVanilla:
        theta = project_to_domain(
            aggregate_noiseless(raw, theta, cfg.eta, rn), center, cfg.D);
        break;
      case Scheme::kClip:
        theta = project_to_domain(
            aggregate_noiseless(clipped, theta, cfg.eta, rn), center, cfg.D);
        break;
      case Scheme::kAirflZf:
      case Scheme::kAirflDp: {
        RngStream noise_rng = round_rng.child(stream::kNoise);
        const AggregateEstimate est = air_aggregate(
            clipped, plan.scalings[idx], plan.channels[idx],
            plan.combiners[idx], NoiseParams{cfg.sigma2, cfg.seed},
            cfg.complex_noise_convention, noise_rng);
        Vector truth = Vector::Zero(cfg.d);
        for (const Vector& u : clipped) truth += u;
        metrics.mse = (est.delta_hat - truth).squaredNorm();
        metrics.lambda_t = est.misalignment;
        metrics.w_norm = plan.privacy[idx].w_norm;
        metrics.phi_t = plan.privacy[idx].phi;
        metrics.dp_eps = plan.ledger.curve[idx].dp_eps;
        theta = global_update_air(theta, est, cfg.eta, rn, center, cfg.D);
        break;
      }
    }

    metrics.train_loss = global_loss(theta, fed.train);
    metrics.grad_norm_sq = global_grad(theta, fed.train).squaredNorm();
    record.rounds.push_back(metrics);
    if (cfg.task == TaskKind::kLogistic)
      record.holdout_accuracy.push_back(holdout_accuracy(theta, fed.holdout));
    if (options.record_trajectory) record.trajectory.push_back(theta);
  }
  record.final_loss = record.rounds.back().train_loss;
  return record;
}

}  // namespace

ExperimentResult run_experiment(const SystemConfig& cfg_in,
                                const RunOptions& options) {
  SystemConfig cfg = cfg_in;
  resolve_and_validate(cfg);
  ExperimentResult result;
  result.cfg = cfg;
  result.trials.reserve(static_cast<std::size_t>(cfg.trials));
  for (int trial = 0; trial < cfg.trials; ++trial)
    result.trials.push_back(run_trial(cfg, trial, options));
  return result;
}

SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "T") return SweepAxis::kRounds;
  if (s == "eps") return SweepAxis::kEpsTilde;
  if (s == "snr") return SweepAxis::kSnr;
  throw ConfigError("sweep: unknown axis '" + s + "' (expected T, eps, snr)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kRounds: return "T";
    case SweepAxis::kEpsTilde: return "eps";
    case SweepAxis::kSnr: return "snr";
  }
  return "?";
}

std::vector<Scheme> all_schemes() {
  return {Scheme::kVanilla, Scheme::kClip, Scheme::kAirflZf, Scheme::kAirflDp};
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw ParameterError("mean_of: empty input");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double stderr_of(const std::vector<double>& values) {
  if (values.empty()) throw ParameterError("stderr_of: empty input");
  if (values.size() == 1) return 0.0;
  const double mu = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  const auto n = static_cast<double>(values.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

SweepResult sweep(const SystemConfig& config_template, SweepAxis axis,
                  const std::vector<double>& values,
                  const std::vector<Scheme>& schemes) {
  if (values.empty()) throw ParameterError("sweep: no axis values");
  if (schemes.empty()) throw ParameterError("sweep: no schemes");
  SweepResult out;
  out.axis = axis;
  for (double value : values) {
    for (Scheme scheme : schemes) {
      SystemConfig cfg = config_template;
      cfg.scheme = scheme;
      switch (axis) {
        case SweepAxis::kRounds:
          cfg.T = static_cast<int>(std::llround(value));
          if (cfg.T < 1) throw ConfigError("sweep: T values must be >= 1");
          break;
        case SweepAxis::kEpsTilde:
          cfg.eps_tilde = value;
          break;
        case SweepAxis::kSnr: {
          // Axis value is the worst-case receive SNR P * gain(1 km) / sigma2.
          const double worst_gain = path_loss(1000.0, cfg.carrier_freq);
          cfg.P = value * cfg.sigma2 / worst_gain;
          break;
        }
      }
      SweepRun run;
      run.axis_value = value;
      run.scheme = scheme;
      run.result = run_experiment(cfg);

      std::vector<double> finals;
      std::vector<double> eps_finals;
      finals.reserve(run.result.trials.size());
      for (const TrialRecord& trial : run.result.trials) {
        finals.push_back(trial.final_loss);
        eps_finals.push_back(trial.rounds.back().dp_eps);
      }
      SweepRow row;
      row.axis_value = value;
      row.scheme = scheme;
      row.final_loss_mean = mean_of(finals);
      row.final_loss_stderr = stderr_of(finals);
      row.dp_eps = mean_of(eps_finals);
      out.rows.push_back(row);
      out.runs.push_back(std::move(run));
    }
  }
  return out;
}

void write_rounds_csv(const ExperimentResult& result,
                      const std::string& path) {
  if (result.trials.empty()) throw ParameterError("write_rounds_csv: no data");
  std::ofstream out = open_for_write(path);
  out << "# desk-scale synthetic-task analogue: train_loss is the training "
         "objective, not a large-scale benchmark metric\n";
  out << "trial,t,train_loss,grad_norm_sq,clip_fraction,mse,lambda_t,w_norm,"
         "phi_t,dp_eps\n";
  for (const TrialRecord& trial : result.trials)
    for (const RoundMetrics& m : trial.rounds)
      out << m.trial << ',' << m.t << ',' << fmt(m.train_loss) << ','
          << fmt(m.grad_norm_sq) << ',' << fmt(m.clip_fraction) << ','
          << fmt(m.mse) << ',' << fmt(m.lambda_t) << ',' << fmt(m.w_norm)
          << ',' << fmt(m.phi_t) << ',' << fmt(m.dp_eps) << '\n';
  if (!out) throw IoError("write_rounds_csv: write to '" + path + "' failed");
}

void write_accuracy_csv(const ExperimentResult& result,
                        const std::string& path) {
  if (result.trials.empty())
    throw ParameterError("write_accuracy_csv: no data");
  std::ofstream out = open_for_write(path);
  out << "trial,t,holdout_accuracy\n";
  for (std::size_t trial = 0; trial < result.trials.size(); ++trial) {
    const TrialRecord& rec = result.trials[trial];
    for (std::size_t t = 0; t < rec.holdout_accuracy.size(); ++t)
      out << trial << ',' << t << ',' << fmt(rec.holdout_accuracy[t]) << '\n';
  }
  if (!out)
    throw IoError("write_accuracy_csv: write to '" + path + "' failed");
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  if (result.rows.empty()) throw ParameterError("write_sweep_csv: no data");
  std::ofstream out = open_for_write(path);
  out << "axis_value,scheme,final_loss_mean,final_loss_stderr,dp_eps\n";
  for (const SweepRow& row : result.rows)
    out << fmt(row.axis_value) << ',' << to_string(row.scheme) << ','
        << fmt(row.final_loss_mean) << ',' << fmt(row.final_loss_stderr)
        << ',' << fmt(row.dp_eps) << '\n';
  if (!out) throw IoError("write_sweep_csv: write to '" + path + "' failed");
}

void write_privacy_curve_csv(const PrivacyLedger& ledger,
                             const std::string& path) {
  if (ledger.curve.empty())
    throw ParameterError("write_privacy_curve_csv: empty curve");
  std::ofstream out = open_for_write(path);
  out << "T,sum_phi,Phi,rdp_eps,dp_eps\n";
  for (const PrivacyCurvePoint& p : ledger.curve)
    out << p.rounds << ',' << fmt(p.sum_phi) << ',' << fmt(p.cap) << ','
        << fmt(p.rdp_eps) << ',' << fmt(p.dp_eps) << '\n';
  if (!out)
    throw IoError("write_privacy_curve_csv: write to '" + path + "' failed");
}

void write_allocation_csv(const std::vector<double>& pi,
                          const AllocationSolution& alloc,
                          const PrivacyBudget& budget,
                          const std::string& path) {
  if (pi.size() != alloc.q.size() || pi.empty())
    throw ParameterError("write_allocation_csv: inconsistent allocation");
  std::ofstream out = open_for_write(path);
  out << "t,pi_t,q_t,scaled,mu_star,A,sum_inv_q2\n";
  const double sum_inv = sum_inverse_squares(alloc.q);
  for (std::size_t t = 0; t < pi.size(); ++t)
    out << t << ',' << fmt(pi[t]) << ',' << fmt(alloc.q[t]) << ','
        << (alloc.scaled ? 1 : 0) << ',' << fmt(alloc.mu_star) << ','
        << fmt(budget.A) << ',' << fmt(sum_inv) << '\n';
  if (!out)
    throw IoError("write_allocation_csv: write to '" + path + "' failed");
}

PlanSummary plan_for_config(const SystemConfig& cfg_in, int trial) {
  SystemConfig cfg = cfg_in;
  resolve_and_validate(cfg);
  if (cfg.scheme != Scheme::kAirflZf && cfg.scheme != Scheme::kAirflDp)
    throw ConfigError(
        "plan_for_config: needs an over-the-air scheme (airfl-zf, airfl-dp)");
  const RngStream trial_rng =
      RngStream(cfg.seed).child(stream::kTrial,
                                static_cast<std::uint64_t>(trial));
  const Federation fed = build_federation(cfg, trial_rng);
  AirPlan plan = build_air_plan(cfg, fed, trial_rng);
  PlanSummary summary;
  summary.pi = std::move(plan.pi);
  summary.allocation = std::move(plan.allocation);
  summary.has_allocation = plan.has_allocation;
  summary.budget = plan.budget;
  summary.perk = plan.perk;
  summary.ledger = std::move(plan.ledger);
  return summary;
}

ExperimentResult run_simulate_files(const SystemConfig& cfg,
                                    const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
  ExperimentResult result = run_experiment(cfg);
  write_rounds_csv(result, out_dir + "/rounds.csv");
  if (result.cfg.task == TaskKind::kLogistic)
    write_accuracy_csv(result, out_dir + "/accuracy.csv");
  return result;
}

}  // namespace airfl
