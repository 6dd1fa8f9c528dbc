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
#include "airfl/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace airfl {
namespace {

double allocation_residual(const std::vector<double>& pi, double mu) {
  const double level = std::pow(mu, 0.25);
  double sum = 0.0;
  for (double p : pi) {
    const double q = std::max(p, level);
    sum += 1.0 / (q * q);
  }
  return sum;
}

}  // namespace

ZfSolution zf_combiner(const ChannelRealization& channel,
                       double clip_threshold, Index dim, double power,
                       const CVector* u_phases) {
  const Index m = channel.H.rows();
  const Index rn = channel.H.cols();
  if (m < rn)
    throw ConfigError("zf_combiner: need at least as many antennas as active "
                      "devices (m >= rn)");
  if (clip_threshold <= 0.0 || power <= 0.0 || dim < 1)
    throw ParameterError("zf_combiner: c, d, P must be positive");

  CVector u = CVector::Ones(rn);
  if (u_phases != nullptr) {
    if (u_phases->size() != rn)
      throw ParameterError("zf_combiner: phase vector length != rn");
    for (Index i = 0; i < rn; ++i)
      if (std::abs(std::abs((*u_phases)[i]) - 1.0) > 1e-12)
        throw ParameterError("zf_combiner: phase entries must be unit modulus");
    u = *u_phases;
  }

  const CVector x = gram_solve(channel.H, u);
  ZfSolution zf;
  zf.round = channel.round;
  const CVector direction = channel.H * x;
  zf.raw_norm = direction.norm();
  const double scale =
      clip_threshold / std::sqrt(static_cast<double>(dim) * power);
  zf.w_zf = scale * direction;
  zf.pi = zf.w_zf.norm();
  return zf;
}

PrivacyBudget privacy_budget_A(double epsilon, double delta, double c_delta,
                               double sampling_rate, double clip_threshold,
                               double sigma2_eff) {
  if (epsilon <= 0.0) throw ParameterError("privacy_budget_A: eps must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("privacy_budget_A: delta must lie in (0, 1)");
  if (c_delta < 0.0 || sampling_rate <= 0.0 || clip_threshold <= 0.0 ||
      sigma2_eff <= 0.0)
    throw ParameterError("privacy_budget_A: nonpositive parameter");
  PrivacyBudget budget;
  budget.A = epsilon * epsilon * sigma2_eff /
             ((2.0 * c_delta + 8.0) * std::log(1.0 / delta) * sampling_rate *
              clip_threshold * clip_threshold);
  return budget;
}

double sum_inverse_squares(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) {
    if (v <= 0.0) throw ParameterError("sum_inverse_squares: nonpositive entry");
    sum += 1.0 / (v * v);
  }
  return sum;
}

bool budget_feasible_as_is(double sum_inv_sq, double A) {
  return sum_inv_sq <= A;
}

PerkCheck perk_condition(const std::vector<ZfSolution>& zf,
                         const PrivacyBudget& budget,
                         const PerkParams& params) {
  if (zf.empty()) throw ParameterError("perk_condition: empty round list");
  std::vector<double> pi;
  pi.reserve(zf.size());
  for (const ZfSolution& sol : zf) pi.push_back(sol.pi);
  const double sum_inv = sum_inverse_squares(pi);

  PerkCheck check;
  check.perk = budget_feasible_as_is(sum_inv, budget.A);
  check.margin = budget.A - sum_inv;

  // Equivalent threshold on the SNR: P / sigma2 <= eps^2 / (K r d h_eff)
  // with h_eff built from the unscaled combiner norms.
  double h_eff = 0.0;
  for (const ZfSolution& sol : zf)
    h_eff += 1.0 / (sol.raw_norm * sol.raw_norm);
  check.snr = params.power / params.sigma2_eff;
  check.snr_threshold =
      params.epsilon * params.epsilon /
      ((2.0 * params.c_delta + 8.0) * std::log(1.0 / params.delta) *
       params.sampling_rate * static_cast<double>(params.dim) * h_eff);
  const bool snr_form = check.snr <= check.snr_threshold;
  const double rel_margin =
      std::abs(check.margin) / std::max(budget.A, sum_inv);
  if (snr_form != check.perk && rel_margin > 1e-9)
    throw NumericalError(
        "perk_condition: budget and SNR threshold forms disagree");
  return check;
}

AllocationSolution solve_allocation(const std::vector<double>& pi, double A) {
  if (pi.empty()) throw ParameterError("solve_allocation: empty round list");
  if (A <= 0.0) throw ParameterError("solve_allocation: budget must be > 0");
  const double sum_inv = sum_inverse_squares(pi);  // validates pi > 0

  AllocationSolution alloc;
  if (budget_feasible_as_is(sum_inv, A)) {
    alloc.q = pi;
    alloc.mu_star = 0.0;
    alloc.scaled = false;
    return alloc;
  }

  const auto rounds = static_cast<double>(pi.size());
  double max_pi = 0.0;
  for (double p : pi) max_pi = std::max(max_pi, p);
  const double bracket_hi =
      1.1 * std::max(std::pow(max_pi, 4.0), (rounds / A) * (rounds / A));

  double lo = 0.0;        // h(0) = sum_inv > A
  double hi = bracket_hi; // h(hi) <= T / sqrt(hi) < A
  if (allocation_residual(pi, hi) >= A)
    throw NumericalError("solve_allocation: bracket construction failed");
  double mu = hi;
  for (int iter = 0; iter < kBisectionMaxIter; ++iter) {
    mu = 0.5 * (lo + hi);
    const double h = allocation_residual(pi, mu);
    if (std::abs(h - A) <= kBisectionRelTol * A) break;
    if (h > A)
      lo = mu;
    else
      hi = mu;
  }

  // Exact polish on the active set identified by the bisection point.
  const double level = std::pow(mu, 0.25);
  double inactive_sum = 0.0;
  int active = 0;
  for (double p : pi) {
    if (p < level)
      ++active;
    else
      inactive_sum += 1.0 / (p * p);
  }
  if (active > 0) {
    const double remainder = A - inactive_sum;
    if (remainder > 0.0) {
      const double exact_mu =
          std::pow(static_cast<double>(active) / remainder, 2.0);
      const double exact_level = std::pow(exact_mu, 0.25);
      bool consistent = true;
      for (double p : pi) {
        const bool was_active = p < level;
        if (was_active && p > exact_level * (1.0 + 1e-12)) consistent = false;
        if (!was_active && p < exact_level * (1.0 - 1e-12)) consistent = false;
      }
      if (consistent) mu = exact_mu;
    }
  }

  if (std::abs(allocation_residual(pi, mu) - A) > 1e-8 * A)
    throw NumericalError("solve_allocation: KKT residual above tolerance");

  alloc.mu_star = mu;
  alloc.scaled = true;
  const double q_level = std::pow(mu, 0.25);
  alloc.q.reserve(pi.size());
  for (double p : pi) alloc.q.push_back(std::max(p, q_level));
  return alloc;
}

AllocationSolution oracle_allocation(const std::vector<double>& pi, double A) {
  if (pi.empty()) throw ParameterError("oracle_allocation: empty round list");
  if (A <= 0.0) throw ParameterError("oracle_allocation: budget must be > 0");
  const std::size_t rounds = pi.size();

  std::vector<double> z_bar(rounds);
  double cap_sum = 0.0;
  for (std::size_t t = 0; t < rounds; ++t) {
    if (pi[t] <= 0.0)
      throw ParameterError("oracle_allocation: nonpositive norm");
    z_bar[t] = 1.0 / (pi[t] * pi[t]);
    cap_sum += z_bar[t];
  }

  AllocationSolution alloc;
  if (budget_feasible_as_is(cap_sum, A)) {
    alloc.q = pi;
    alloc.mu_star = 0.0;
    alloc.scaled = false;
    return alloc;
  }

  const auto objective = [&](const std::vector<double>& v) {
    double f = 0.0;
    for (double zi : v) {
      if (zi <= 0.0) return std::numeric_limits<double>::infinity();
      f += 1.0 / zi;
    }
    return f;
  };

  // Euclidean projection onto {z <= z_bar, sum z <= A}: clip at the caps,
  // then subtract a common shift found by bisection until the budget holds.
  const auto project = [&](std::vector<double> v) {
    double clipped_sum = 0.0;
    for (std::size_t t = 0; t < rounds; ++t)
      clipped_sum += std::min(v[t], z_bar[t]);
    if (clipped_sum <= A) {
      for (std::size_t t = 0; t < rounds; ++t) v[t] = std::min(v[t], z_bar[t]);
      return v;
    }
    double shift_lo = 0.0;
    double shift_hi = 0.0;
    for (double vi : v) shift_hi = std::max(shift_hi, vi);
    for (int iter = 0; iter < 200; ++iter) {
      const double shift = 0.5 * (shift_lo + shift_hi);
      double s = 0.0;
      for (std::size_t t = 0; t < rounds; ++t)
        s += std::min(z_bar[t], v[t] - shift);
      if (s > A)
        shift_lo = shift;
      else
        shift_hi = shift;
    }
    const double shift = 0.5 * (shift_lo + shift_hi);
    std::vector<double> out(rounds);
    for (std::size_t t = 0; t < rounds; ++t)
      out[t] = std::min(z_bar[t], v[t] - shift);
    return out;
  };

  // Projected gradient with Barzilai-Borwein steps and a nonmonotone Armijo
  // safeguard; a projected-gradient fixed point is a KKT point of this
  // convex problem, and the BB step rule copes with the cubic curvature
  // spread across rounds. Two deterministic starts guard against slow faces.
  const auto descend = [&](std::vector<double> z) {
    const auto gradient = [&](const std::vector<double>& v) {
      std::vector<double> g(rounds);
      for (std::size_t t = 0; t < rounds; ++t) g[t] = -1.0 / (v[t] * v[t]);
      return g;
    };
    std::vector<double> grad = gradient(z);
    std::vector<double> z_prev;
    std::vector<double> grad_prev;
    std::vector<double> f_window(10, objective(z));
    double gamma = 1.0;
    {
      double z_min = z[0];
      for (double zi : z) z_min = std::min(z_min, zi);
      gamma = 0.5 * z_min * z_min * z_min;  // ~1/L at the start
    }
    for (int iter = 0; iter < 50000; ++iter) {
      if (!z_prev.empty()) {
        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t t = 0; t < rounds; ++t) {
          const double dz = z[t] - z_prev[t];
          ss += dz * dz;
          sy += dz * (grad[t] - grad_prev[t]);
        }
        if (sy > 0.0 && std::isfinite(ss / sy)) gamma = ss / sy;
      }
      gamma = std::clamp(gamma, 1e-18, 1e18);

      double f_ref = f_window[0];
      for (double f : f_window) f_ref = std::max(f_ref, f);
      std::vector<double> candidate;
      double f_cand = std::numeric_limits<double>::infinity();
      bool accepted = false;
      for (int bt = 0; bt < 100; ++bt) {
        std::vector<double> trial(rounds);
        for (std::size_t t = 0; t < rounds; ++t)
          trial[t] = z[t] - gamma * grad[t];
        trial = project(std::move(trial));
        const double f_trial = objective(trial);
        double move_sq = 0.0;
        for (std::size_t t = 0; t < rounds; ++t)
          move_sq += (trial[t] - z[t]) * (trial[t] - z[t]);
        if (f_trial <= f_ref - 1e-4 * move_sq / gamma) {
          candidate = std::move(trial);
          f_cand = f_trial;
          accepted = true;
          break;
        }
        gamma *= 0.5;
      }
      if (!accepted) break;
      double move = 0.0;
      for (std::size_t t = 0; t < rounds; ++t)
        move = std::max(move, std::abs(candidate[t] - z[t]));
      z_prev = std::move(z);
      grad_prev = std::move(grad);
      z = std::move(candidate);
      grad = gradient(z);
      f_window[static_cast<std::size_t>(iter) % f_window.size()] = f_cand;
      double scale = 0.0;
      for (double zi : z) scale = std::max(scale, std::abs(zi));
      if (move <= 1e-15 * std::max(1.0, scale)) break;
    }
    return z;
  };

  std::vector<double> start_scaled(rounds);
  std::vector<double> start_even(rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    start_scaled[t] = z_bar[t] * (A / cap_sum);
    start_even[t] = std::min(z_bar[t], A / static_cast<double>(rounds));
  }
  std::vector<double> best = descend(std::move(start_scaled));
  const std::vector<double> other = descend(std::move(start_even));
  if (objective(other) < objective(best)) best = other;

  alloc.q.resize(rounds);
  for (std::size_t t = 0; t < rounds; ++t)
    alloc.q[t] = 1.0 / std::sqrt(best[t]);
  alloc.mu_star = 0.0;  // dual variable not produced by this route
  alloc.scaled = true;
  return alloc;
}

std::vector<Combiner> optimal_combiners(const std::vector<ZfSolution>& zf,
                                        const AllocationSolution& alloc) {
  if (zf.size() != alloc.q.size())
    throw ParameterError("optimal_combiners: length mismatch");
  std::vector<Combiner> out;
  out.reserve(zf.size());
  for (std::size_t t = 0; t < zf.size(); ++t) {
    Combiner w;
    w.round = zf[t].round;
    if (!alloc.scaled || alloc.q[t] == zf[t].pi) {
      w.w = zf[t].w_zf;
    } else {
      w.w = (alloc.q[t] / zf[t].pi) * zf[t].w_zf;
    }
    out.push_back(std::move(w));
  }
  return out;
}

}  // namespace airfl
