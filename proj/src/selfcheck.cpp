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
#include "airfl/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "airfl/experiment.hpp"

namespace airfl {
namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
  std::string message;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw Failure{message};
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CMatrix random_cmatrix(Index rows, Index cols, RngStream& rng,
                       double variance = 1.0) {
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = rng.cnormal(variance);
  return out;
}

ChannelRealization make_channel(const CMatrix& H, int round = 0) {
  ChannelRealization ch;
  ch.round = round;
  ch.H = H;
  ch.path_loss = Vector::Ones(H.cols());
  ch.distances = Vector::Ones(H.cols());
  return ch;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion 1: ZF alignment is exact -----------------------------------

std::string check_zf_exactness() {
  RngStream rng(20260801);
  double worst_rel = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const Index m = 4 + static_cast<Index>(rng.below(61));  // 4..64
    const Index rn = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
    const double c = 0.3 + 2.0 * rng.uniform();
    const Index d = 1 + static_cast<Index>(rng.below(64));
    const double P = 0.05 + rng.uniform();
    const ChannelRealization ch = make_channel(random_cmatrix(m, rn, rng));
    const ZfSolution zf = zf_combiner(ch, c, d, P);
    const double target = c / std::sqrt(static_cast<double>(d) * P);
    for (Index i = 0; i < rn; ++i) {
      const double mag = std::abs(zf.w_zf.dot(ch.H.col(i)));
      worst_rel = std::max(worst_rel, std::abs(mag - target) / target);
    }
  }
  require(worst_rel <= 1e-9,
          "alignment deviation " + num(worst_rel) + " exceeds 1e-9");
  return "max relative alignment error " + num(worst_rel) +
         " over 100 instances";
}

// --- criterion 2: channel inversion kills the misalignment ----------------

std::string check_misalignment_vanishes() {
  RngStream rng(20260802);
  double worst_ratio = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const Index m = 2 + static_cast<Index>(rng.below(7));
    const Index rn = 1 + static_cast<Index>(rng.below(5));
    const Index d = 4 + static_cast<Index>(rng.below(13));
    const ChannelRealization ch = make_channel(random_cmatrix(m, rn, rng));
    Combiner w{0, CVector(m)};
    for (Index i = 0; i < m; ++i) w.w[i] = rng.cnormal(1.0);
    // Generous power budget: this check is about alignment, not power.
    const PowerScaling s = channel_inversion_scaling(w, ch, 1.0, 1, 1e12);
    std::vector<Vector> updates;
    double energy = 0.0;
    for (Index i = 0; i < rn; ++i) {
      Vector u(d);
      for (Index j = 0; j < d; ++j) u[j] = rng.normal();
      updates.push_back(clip(u, 1.0));
      energy += updates.back().squaredNorm();
    }
    for (NoiseConvention conv : {NoiseConvention::kHalf, NoiseConvention::kFull}) {
      const EstimationErrorStats stats =
          estimation_error_stats(updates, s, ch, w, 0.0, conv);
      worst_ratio = std::max(worst_ratio, stats.misalignment / energy);
    }
  }
  require(worst_ratio <= 1e-15, "misalignment ratio " + num(worst_ratio) +
                                    " exceeds 1e-15 of signal energy");
  return "max misalignment / signal energy = " + num(worst_ratio);
}

// --- criterion 3: KKT bisection vs analytic and oracle solutions ----------

std::string check_allocation_kkt() {
  // Analytic instance 1: pi = [1, 1], A = 1 -> mu = 4, q = [sqrt(2), sqrt(2)].
  {
    const AllocationSolution alloc = solve_allocation({1.0, 1.0}, 1.0);
    require(alloc.scaled, "pi=[1,1], A=1 should bind the budget");
    const double root2 = std::sqrt(2.0);
    require(std::abs(alloc.q[0] - root2) <= 1e-6 &&
                std::abs(alloc.q[1] - root2) <= 1e-6,
            "pi=[1,1] solution is not [sqrt 2, sqrt 2]");
    require(std::abs(alloc.mu_star - 4.0) <= 1e-6, "mu* != 4");
  }
  // Analytic instance 2: pi = [1, 3], A = 0.5 -> q = [(A - 1/9)^(-1/2), 3].
  {
    const AllocationSolution alloc = solve_allocation({1.0, 3.0}, 0.5);
    const double q0 = 1.0 / std::sqrt(0.5 - 1.0 / 9.0);
    require(std::abs(alloc.q[0] - q0) <= 1e-6 &&
                std::abs(alloc.q[1] - 3.0) <= 1e-6,
            "pi=[1,3] solution mismatch: got q0 = " + num(alloc.q[0]) +
                " want " + num(q0));
  }

  RngStream rng(20260803);
  double worst_rel = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t rounds = 1 + rng.below(8);
    std::vector<double> pi(rounds);
    for (double& p : pi) p = 0.2 + 3.0 * rng.uniform();
    const double sum_inv = sum_inverse_squares(pi);
    const double A = sum_inv * (0.3 + 1.2 * rng.uniform());
    const AllocationSolution fast = solve_allocation(pi, A);
    const AllocationSolution slow = oracle_allocation(pi, A);
    double obj_fast = 0.0;
    double obj_slow = 0.0;
    for (std::size_t t = 0; t < rounds; ++t) {
      obj_fast += fast.q[t] * fast.q[t];
      obj_slow += slow.q[t] * slow.q[t];
    }
    worst_rel = std::max(worst_rel,
                         std::abs(obj_fast - obj_slow) / std::abs(obj_slow));
    require(obj_fast <= obj_slow * (1.0 + 1e-4),
            "KKT objective worse than oracle by more than 1e-4");
  }
  require(worst_rel <= 1e-4, "objective gap " + num(worst_rel) +
                                 " above 1e-4 over 50 random instances");
  return "analytic instances exact to 1e-6; max oracle gap " + num(worst_rel);
}

// --- criterion 4: perk condition <=> unscaled allocation ------------------

std::string check_threshold_dichotomy() {
  RngStream rng(20260804);
  int perk_count = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t rounds = 1 + rng.below(6);
    const Index m = 2 + static_cast<Index>(rng.below(8));
    const Index rn = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
    const double c = 0.3 + rng.uniform();
    const Index d = 2 + static_cast<Index>(rng.below(30));
    const double P = 0.05 + rng.uniform();
    std::vector<ZfSolution> zf;
    std::vector<double> pi;
    for (std::size_t t = 0; t < rounds; ++t) {
      const ChannelRealization ch =
          make_channel(random_cmatrix(m, rn, rng), static_cast<int>(t));
      zf.push_back(zf_combiner(ch, c, d, P));
      pi.push_back(zf.back().pi);
    }
    const double sum_inv = sum_inverse_squares(pi);
    const double delta = 1e-5;
    const double c_delta = 8.0;
    const double sigma2_eff = std::pow(10.0, -4.0 * rng.uniform());
    const double sampling = 1.0;
    // Aim the budget at a ratio of sum 1/pi^2 spanning both regimes.
    const double ratio = 0.2 + 2.3 * rng.uniform();
    const double eps =
        std::sqrt(ratio * sum_inv * (2.0 * c_delta + 8.0) *
                  std::log(1.0 / delta) * sampling * c * c / sigma2_eff);
    const PrivacyBudget budget =
        privacy_budget_A(eps, delta, c_delta, sampling, c, sigma2_eff);
    PerkParams params;
    params.power = P;
    params.sigma2_eff = sigma2_eff;
    params.epsilon = eps;
    params.delta = delta;
    params.c_delta = c_delta;
    params.sampling_rate = sampling;
    params.dim = d;
    params.clip_threshold = c;
    const PerkCheck perk = perk_condition(zf, budget, params);
    const AllocationSolution alloc = solve_allocation(pi, budget.A);
    require(perk.perk == !alloc.scaled,
            "perk flag and allocation scaling disagree at instance " +
                std::to_string(inst));
    if (perk.perk) ++perk_count;
  }
  require(perk_count >= 20 && perk_count <= 180,
          "fuzz did not span both regimes (perk count " +
              std::to_string(perk_count) + ")");

  // In the perk regime the DP-aware run must follow the unconstrained ZF run
  // exactly, seed for seed.
  SystemConfig cfg;
  cfg.n = 4;
  cfg.m = 8;
  cfg.d = 6;
  cfg.T = 5;
  cfg.trials = 2;
  cfg.seed = 77;
  double P_try = 1e-6;
  ExperimentResult dp_run;
  bool found_perk = false;
  for (int attempt = 0; attempt < 8 && !found_perk; ++attempt) {
    cfg.P = P_try;
    cfg.scheme = Scheme::kAirflDp;
    RunOptions opts;
    opts.record_trajectory = true;
    dp_run = run_experiment(cfg, opts);
    found_perk = dp_run.trials.front().perk;
    if (!found_perk) P_try *= 1e-2;
  }
  require(found_perk, "could not reach the perk regime by lowering P");
  cfg.scheme = Scheme::kAirflZf;
  RunOptions opts;
  opts.record_trajectory = true;
  const ExperimentResult zf_run = run_experiment(cfg, opts);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < dp_run.trials.size(); ++trial)
    for (std::size_t t = 0; t < dp_run.trials[trial].trajectory.size(); ++t) {
      const Vector& a = dp_run.trials[trial].trajectory[t];
      const Vector& b = zf_run.trials[trial].trajectory[t];
      worst = std::max(worst, (a - b).norm() / std::max(1.0, b.norm()));
    }
  require(worst <= 1e-10, "perk-regime trajectories differ by " + num(worst));
  return "0 disagreements on 200 fuzzed configs (" +
         std::to_string(perk_count) +
         " perk); perk-regime trajectory gap " + num(worst);
}

// --- criterion 5: privacy curve saturates at the cap ----------------------

std::string check_privacy_saturation() {
  AccountantOptions options;
  options.delta = 1e-5;
  options.sampling_rate = 1.0;
  options.clip_threshold = 0.8;
  options.sigma2_eff = 0.5;
  options.local_steps = 5;
  options.diameter = 0.3;
  options.n_devices = 10;
  options.eta = 0.5;

  const double phi = 0.04;  // constant rounds, |w| = 5
  std::vector<RoundPrivacy> rounds(60, RoundPrivacy{phi, 0.01, 5.0});
  const PrivacyLedger ledger = privacy_curve(rounds, options);
  require(std::isfinite(ledger.cap), "cap should be finite for finite D");
  const int knee = static_cast<int>(std::ceil(ledger.cap / phi));
  require(knee >= 2 && knee < 60, "knee outside the horizon, check inputs");
  for (std::size_t t = 1; t < ledger.curve.size(); ++t)
    require(ledger.curve[t].rdp_eps >= ledger.curve[t - 1].rdp_eps,
            "rdp curve decreased at T = " + std::to_string(t + 1));
  for (std::size_t t = 0; t < ledger.curve.size(); ++t) {
    const int T = ledger.curve[t].rounds;
    if (T < knee)
      require(ledger.curve[t].rdp_eps <
                  ledger.curve[static_cast<std::size_t>(knee) - 1].rdp_eps,
              "curve flat before the knee");
    else
      require(ledger.curve[t].rdp_eps ==
                  ledger.curve[static_cast<std::size_t>(knee) - 1].rdp_eps,
              "curve not exactly constant past the knee");
  }
  require(ledger.burn_in_round.has_value() && *ledger.burn_in_round == knee,
          "burn-in round != ceil(Phi / phi)");

  AccountantOptions unbounded = options;
  unbounded.diameter = std::numeric_limits<double>::infinity();
  const PrivacyLedger linear = privacy_curve(rounds, unbounded);
  for (std::size_t t = 1; t < linear.curve.size(); ++t)
    require(linear.curve[t].rdp_eps > linear.curve[t - 1].rdp_eps,
            "unbounded-domain curve must increase strictly");
  require(!linear.burn_in_round.has_value(),
          "unbounded-domain curve must not saturate");
  return "knee at T = " + std::to_string(knee) +
         ", flat tail exact, unbounded curve strictly increasing";
}

// --- criterion 6: RDP->DP conversion matches the closed form --------------

std::string check_two_path_dp() {
  RngStream rng(20260806);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const double delta = std::pow(10.0, -1.0 - 6.0 * rng.uniform());
    const double sampling = 0.05 + 0.95 * rng.uniform();
    const double c = 0.1 + 2.0 * rng.uniform();
    const double sigma2_eff = std::pow(10.0, -6.0 + 6.0 * rng.uniform());
    const double min_term = std::pow(10.0, -8.0 + 8.0 * rng.uniform()) *
                            sigma2_eff / (sampling * c * c);
    const double c_delta =
        resolve_c_delta(min_term, delta, sampling, c, sigma2_eff, 0.0);
    const double eps =
        dp_epsilon(min_term, delta, c_delta, sampling, c, sigma2_eff);
    const double alpha = 1.0 + 2.0 * std::log(1.0 / delta) / eps;
    const double rdp = rdp_epsilon({min_term},
                                   std::numeric_limits<double>::infinity(),
                                   alpha, sampling, c, sigma2_eff);
    worst = std::max(worst, std::abs(rdp - eps / 2.0) / (eps / 2.0));
    const double converted = rdp_to_dp(alpha, rdp, delta);
    worst = std::max(worst, std::abs(converted - eps) / eps);
  }
  require(worst <= 1e-9,
          "two-path relative deviation " + num(worst) + " above 1e-9");
  return "max relative deviation " + num(worst) + " over 100 draws";
}

// --- criterion 7: Monte Carlo MSE matches the decomposition ---------------

std::string check_mse_decomposition() {
  RngStream rng(20260807);
  const int draws = 10000;
  double worst_sigmas = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const Index m = 3 + static_cast<Index>(rng.below(5));
    const Index rn = 1 + static_cast<Index>(rng.below(3));
    const Index d = std::max<Index>(8, rn) + static_cast<Index>(rng.below(9));
    const ChannelRealization ch = make_channel(random_cmatrix(m, rn, rng));
    Combiner w{0, CVector(m)};
    for (Index i = 0; i < m; ++i) w.w[i] = rng.cnormal(1.0);
    PowerScaling s{0, CVector(rn)};
    for (Index i = 0; i < rn; ++i) s.s[i] = 0.35 * rng.cnormal(1.0);

    // Updates orthogonalized across devices so the per-device decomposition
    // is exact (no cross-device interference terms).
    Matrix raw(d, rn);
    for (Index j = 0; j < rn; ++j)
      for (Index i = 0; i < d; ++i) raw(i, j) = rng.normal();
    const Eigen::HouseholderQR<Matrix> qr(raw);
    const Matrix basis =
        qr.householderQ() * Matrix::Identity(d, rn);
    std::vector<Vector> updates;
    for (Index j = 0; j < rn; ++j)
      updates.push_back(basis.col(j) * (0.2 + 0.8 * rng.uniform()));

    Vector truth = Vector::Zero(d);
    for (const Vector& u : updates) truth += u;

    const double sigma2 = 0.05 + 0.4 * rng.uniform();
    const EstimationErrorStats stats = estimation_error_stats(
        updates, s, ch, w, sigma2, NoiseConvention::kHalf);
    const double analytic = stats.misalignment + stats.noise_power;

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < draws; ++k) {
      const AggregateEstimate est =
          air_aggregate(updates, s, ch, w, NoiseParams{sigma2, 0},
                        NoiseConvention::kHalf, rng);
      const double err = (est.delta_hat - truth).squaredNorm();
      sum += err;
      sum_sq += err * err;
    }
    const double mean = sum / draws;
    const double variance =
        std::max(0.0, sum_sq / draws - mean * mean) * draws / (draws - 1.0);
    const double se = std::sqrt(variance / draws);
    const double sigmas = std::abs(mean - analytic) / se;
    worst_sigmas = std::max(worst_sigmas, sigmas);
    require(sigmas <= 5.0, "instance " + std::to_string(inst) +
                               " off by " + num(sigmas) + " standard errors");
  }
  return "max deviation " + num(worst_sigmas) +
         " standard errors over 10 instances x 10^4 draws";
}

// --- criterion 8: noiseless equivalence and unbiasedness -------------------

std::string check_benchmark_equivalence() {
  SystemConfig cfg;
  cfg.n = 5;
  cfg.m = 10;
  cfg.d = 12;
  cfg.T = 10;
  cfg.trials = 2;
  cfg.sigma2 = 0.0;
  cfg.seed = 31;
  RunOptions opts;
  opts.record_trajectory = true;
  cfg.scheme = Scheme::kClip;
  const ExperimentResult clip_run = run_experiment(cfg, opts);
  cfg.scheme = Scheme::kAirflZf;
  const ExperimentResult air_run = run_experiment(cfg, opts);
  double worst = 0.0;
  for (std::size_t trial = 0; trial < clip_run.trials.size(); ++trial)
    for (std::size_t t = 0; t < clip_run.trials[trial].trajectory.size(); ++t) {
      const Vector& a = clip_run.trials[trial].trajectory[t];
      const Vector& b = air_run.trials[trial].trajectory[t];
      worst = std::max(worst, (a - b).norm() / std::max(1e-12, a.norm()));
    }
  require(worst <= 1e-10, "noiseless equivalence gap " + num(worst));

  // Unbiasedness of the noisy aggregate under channel inversion.
  RngStream rng(20260808);
  const Index m = 4;
  const Index rn = 3;
  const Index d = 10;
  const ChannelRealization ch = make_channel(random_cmatrix(m, rn, rng));
  Combiner w{0, CVector(m)};
  for (Index i = 0; i < m; ++i) w.w[i] = rng.cnormal(1.0);
  const PowerScaling s = channel_inversion_scaling(w, ch, 1.0, 1, 1e12);
  std::vector<Vector> updates;
  Vector truth = Vector::Zero(d);
  for (Index i = 0; i < rn; ++i) {
    Vector u(d);
    for (Index j = 0; j < d; ++j) u[j] = rng.normal();
    updates.push_back(clip(u, 1.0));
    truth += updates.back();
  }
  const double sigma2 = 0.2;
  const int trials = 10000;
  Vector mean = Vector::Zero(d);
  for (int k = 0; k < trials; ++k)
    mean += air_aggregate(updates, s, ch, w, NoiseParams{sigma2, 0},
                          NoiseConvention::kHalf, rng)
                .delta_hat;
  mean /= static_cast<double>(trials);
  const double coord_se =
      std::sqrt(w.w.squaredNorm() * sigma2 / 2.0 / trials);
  double worst_sigmas = 0.0;
  for (Index j = 0; j < d; ++j)
    worst_sigmas =
        std::max(worst_sigmas, std::abs(mean[j] - truth[j]) / coord_se);
  require(worst_sigmas <= 5.0, "aggregate mean off by " + num(worst_sigmas) +
                                   " standard errors");
  return "noiseless gap " + num(worst) + "; unbiasedness max " +
         num(worst_sigmas) + " standard errors";
}

// --- criterion 9: learning trends across the three sweeps -----------------

std::string check_learning_trends() {
  SystemConfig base;  // desk-scale defaults
  base.seed = 5;

  // (a) relaxing the privacy target never hurts the final loss.
  const std::vector<double> eps_values = {0.05, 0.1, 0.2, 0.4, 0.8};
  const SweepResult eps_sweep =
      sweep(base, SweepAxis::kEpsTilde, eps_values, {Scheme::kAirflDp});
  for (std::size_t k = 1; k < eps_sweep.rows.size(); ++k) {
    const SweepRow& prev = eps_sweep.rows[k - 1];
    const SweepRow& curr = eps_sweep.rows[k];
    const double slack = 2.0 * std::sqrt(prev.final_loss_stderr *
                                             prev.final_loss_stderr +
                                         curr.final_loss_stderr *
                                             curr.final_loss_stderr);
    require(curr.final_loss_mean <= prev.final_loss_mean + slack,
            "final loss increased from eps_tilde = " + num(prev.axis_value) +
                " to " + num(curr.axis_value));
  }

  // (b) the DP-to-ZF gap closes toward (and at) the perk threshold.
  const std::vector<double> snr_values = {1e-8, 1e-7, 1e-6, 1e-4, 1e-2};
  const SweepResult snr_sweep =
      sweep(base, SweepAxis::kSnr, snr_values,
            {Scheme::kAirflZf, Scheme::kAirflDp});
  std::vector<double> gap;
  std::vector<double> gap_slack;
  std::vector<bool> perk_flags;
  for (std::size_t k = 0; k < snr_values.size(); ++k) {
    const SweepRow& zf_row = snr_sweep.rows[2 * k];
    const SweepRow& dp_row = snr_sweep.rows[2 * k + 1];
    gap.push_back(dp_row.final_loss_mean - zf_row.final_loss_mean);
    gap_slack.push_back(2.0 *
                        std::sqrt(zf_row.final_loss_stderr *
                                      zf_row.final_loss_stderr +
                                  dp_row.final_loss_stderr *
                                      dp_row.final_loss_stderr));
    const SweepRun& dp_run = snr_sweep.runs[2 * k + 1];
    bool all_perk = true;
    for (const TrialRecord& trial : dp_run.result.trials)
      all_perk = all_perk && trial.perk;
    perk_flags.push_back(all_perk);
  }
  require(perk_flags.front(), "lowest SNR point should be in the perk regime");
  require(!perk_flags.back(), "highest SNR point should exceed the threshold");
  for (std::size_t k = 0; k < gap.size(); ++k) {
    if (perk_flags[k])
      require(std::abs(gap[k]) <= 1e-10,
              "perk-regime gap nonzero at SNR " + num(snr_values[k]));
    if (k > 0)
      require(gap[k - 1] <= gap[k] + std::max(gap_slack[k - 1], gap_slack[k]),
              "gap did not shrink toward the threshold at SNR " +
                  num(snr_values[k]));
  }

  // (c) ZF over the fading channel tracks clipped FedAvg on a clean channel.
  SystemConfig pair_cfg = base;
  pair_cfg.scheme = Scheme::kClip;
  const ExperimentResult clip_run = run_experiment(pair_cfg);
  pair_cfg.scheme = Scheme::kAirflZf;
  const ExperimentResult zf_run = run_experiment(pair_cfg);
  std::vector<double> clip_finals;
  std::vector<double> zf_finals;
  for (const TrialRecord& t : clip_run.trials) clip_finals.push_back(t.final_loss);
  for (const TrialRecord& t : zf_run.trials) zf_finals.push_back(t.final_loss);
  const double diff = std::abs(mean_of(zf_finals) - mean_of(clip_finals));
  const double combined =
      std::sqrt(stderr_of(zf_finals) * stderr_of(zf_finals) +
                stderr_of(clip_finals) * stderr_of(clip_finals));
  require(diff <= 2.0 * std::max(combined, 1e-12),
          "ZF vs clipped-FedAvg diff " + num(diff) + " above 2 SE (" +
              num(combined) + ")");
  return "eps trend monotone; SNR gap monotone with exact perk match; "
         "|ZF - clip| = " +
         num(diff) + " <= 2 SE";
}

// --- criterion 10: byte-identical replays ----------------------------------

std::string check_determinism(const std::string& scratch_dir) {
  SystemConfig cfg;
  cfg.T = 20;
  cfg.trials = 3;
  cfg.seed = 99;
  cfg.scheme = Scheme::kAirflDp;
  const std::string dir_a = scratch_dir + "/replay_a";
  const std::string dir_b = scratch_dir + "/replay_b";
  run_simulate_files(cfg, dir_a);
  run_simulate_files(cfg, dir_b);
  const std::string a = read_file(dir_a + "/rounds.csv");
  const std::string b = read_file(dir_b + "/rounds.csv");
  require(!a.empty() && a == b, "replayed rounds.csv differs byte-wise");
  return "rounds.csv byte-identical across replays (" +
         std::to_string(a.size()) + " bytes)";
}

CheckResult run_one(const std::string& name, double time_limit_s,
                    const std::function<std::string()>& body) {
  CheckResult result;
  result.name = name;
  const auto start = Clock::now();
  try {
    result.detail = body();
    result.passed = true;
  } catch (const Failure& failure) {
    result.detail = failure.message;
    result.passed = false;
  } catch (const std::exception& e) {
    result.detail = std::string("exception: ") + e.what();
    result.passed = false;
  }
  result.seconds =
      std::chrono::duration<double>(Clock::now() - start).count();
  if (result.passed && time_limit_s > 0.0 && result.seconds > time_limit_s) {
    result.passed = false;
    result.detail += " [exceeded " + num(time_limit_s) + " s budget: " +
                     num(result.seconds) + " s]";
  }
  return result;
}

}  // namespace

std::vector<CheckResult> run_acceptance_checks(const std::string& scratch_dir) {
  std::filesystem::create_directories(scratch_dir);
  std::vector<CheckResult> results;
  results.push_back(run_one("zf-exactness", 5.0, check_zf_exactness));
  results.push_back(
      run_one("misalignment-vanishes", 0.0, check_misalignment_vanishes));
  results.push_back(run_one("allocation-kkt", 10.0, check_allocation_kkt));
  results.push_back(
      run_one("threshold-dichotomy", 0.0, check_threshold_dichotomy));
  results.push_back(
      run_one("privacy-saturation", 1.0, check_privacy_saturation));
  results.push_back(run_one("two-path-dp", 0.0, check_two_path_dp));
  results.push_back(
      run_one("mse-decomposition", 0.0, check_mse_decomposition));
  results.push_back(
      run_one("benchmark-equivalence", 0.0, check_benchmark_equivalence));
  results.push_back(run_one("learning-trends", 120.0, check_learning_trends));
  results.push_back(run_one("determinism", 0.0, [&scratch_dir] {
    return check_determinism(scratch_dir);
  }));
  return results;
}

bool report_checks(const std::vector<CheckResult>& results) {
  bool all = true;
  for (const CheckResult& r : results) {
    std::printf("[%s] %-22s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.detail.c_str());
    all = all && r.passed;
  }
  std::printf("%zu/%zu checks passed\n",
              static_cast<std::size_t>(
                  std::count_if(results.begin(), results.end(),
                                [](const CheckResult& r) { return r.passed; })),
              results.size());
  return all;
}

}  // namespace airfl
