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

#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/channel.hpp"
#include "airfl/types.hpp"

namespace airfl {

// Zero-forcing combiner for one round. Every active device's alignment
// magnitude |w_zf^H h_i| equals clip / sqrt(d P); pi is the combiner norm and
// raw_norm the norm of H (H^H H)^{-1} u before the clip/power scaling.
struct ZfSolution {
  int round = 0;
  CVector w_zf;
  double pi = 0.0;
  double raw_norm = 0.0;
};

// Privacy budget of the norm-allocation problem: allowed sum_t 1/|w^(t)|^2.
struct PrivacyBudget {
  double A = 0.0;
};

// Optimal per-round combiner norms. When `scaled` the privacy constraint is
// active: sum_t 1/q_t^2 = A and q_t = max(pi_t, mu_star^(1/4)).
struct AllocationSolution {
  std::vector<double> q;
  double mu_star = 0.0;
  bool scaled = false;
};

struct PerkCheck {
  bool perk = false;        // unconstrained ZF already meets the DP target
  double margin = 0.0;      // A - sum_t 1/pi_t^2
  double snr = 0.0;         // P / sigma2_eff
  double snr_threshold = 0.0;
};

struct PerkParams {
  double power = 0.0;  // P
  double sigma2_eff = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double c_delta = 0.0;
  double sampling_rate = 0.0;
  Index dim = 0;
  double clip_threshold = 0.0;
};

// w_zf = (c / sqrt(dP)) H (H^H H)^{-1} u with u all-ones unless supplied
// (entries of a supplied u must have unit modulus). Requires m >= rn.
ZfSolution zf_combiner(const ChannelRealization& channel,
                       double clip_threshold, Index dim, double power,
                       const CVector* u_phases = nullptr);

// A = eps^2 sigma2_eff / ((2 c_delta + 8) log(1/delta) r c^2).
PrivacyBudget privacy_budget_A(double epsilon, double delta, double c_delta,
                               double sampling_rate, double clip_threshold,
                               double sigma2_eff);

// Sum of 1/pi_t^2; the single comparison point shared by perk_condition and
// solve_allocation so the two can never disagree.
double sum_inverse_squares(const std::vector<double>& values);
bool budget_feasible_as_is(double sum_inv_sq, double A);

// True iff the plain ZF norms already satisfy the budget. Also evaluates the
// equivalent SNR-threshold form from the raw combiner norms and checks the
// two forms agree away from the feasibility boundary.
PerkCheck perk_condition(const std::vector<ZfSolution>& zf,
                         const PrivacyBudget& budget, const PerkParams& params);

// KKT solution of the norm-allocation problem: bisection on the dual
// variable mu over [0, 1.1 max(max_t pi_t^4, (T/A)^2)] followed by an exact
// active-set polish; q_t = max(pi_t, mu^(1/4)).
AllocationSolution solve_allocation(const std::vector<double>& pi, double A);

// Independent verification solver: projected gradient descent on the
// transformed variables z_t = 1/q_t^2 (linear budget constraint, exact
// Euclidean projection), to objective tolerance ~1e-6. Desk scale, T <= 8.
AllocationSolution oracle_allocation(const std::vector<double>& pi, double A);

// Scales each ZF combiner to its allocated norm, preserving its direction;
// returns the ZF combiners untouched when the allocation is unscaled.
std::vector<Combiner> optimal_combiners(const std::vector<ZfSolution>& zf,
                                        const AllocationSolution& alloc);

inline constexpr double kBisectionRelTol = 1e-10;
inline constexpr int kBisectionMaxIter = 200;

}  // namespace airfl
