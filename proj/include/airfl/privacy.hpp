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

#include <optional>
#include <vector>

#include "airfl/aircomp.hpp"
#include "airfl/channel.hpp"
#include "airfl/types.hpp"

namespace airfl {

// User-level DP targets. alpha is the Renyi order; c_delta the slack
// constant of the RDP-to-DP conversion.
struct PrivacyParams {
  double epsilon_target = 0.0;
  double delta = 1e-5;
  double c_delta = 8.0;
  double alpha = 2.0;
};

// Scalars the accountant needs from one executed round.
struct RoundPrivacy {
  double phi = 0.0;     // per-round privacy cost
  double kappa = 0.0;   // per-round expansion coefficient
  double w_norm = 0.0;  // combiner norm
};

struct PrivacyCurvePoint {
  int rounds = 0;     // T
  double sum_phi = 0.0;
  double cap = 0.0;   // Phi
  double rdp_eps = 0.0;
  double dp_eps = 0.0;
};

// Cumulative privacy loss of a T-round run under the convergent bound.
struct PrivacyLedger {
  std::vector<double> phi;  // per-round cost
  std::vector<PrivacyCurvePoint> curve;
  double alpha = 0.0;
  double c_delta = 0.0;
  double kappa_max = 0.0;
  double cap = 0.0;  // Phi at the horizon
  std::optional<int> burn_in_round;  // first T with sum_phi >= Phi
};

struct AccountantOptions {
  double delta = 1e-5;
  double sampling_rate = 1.0;  // r
  double clip_threshold = 0.0;
  double sigma2_eff = 0.0;     // sigma^2 scaled by the noise convention
  int local_steps = 1;         // Q
  double diameter = std::numeric_limits<double>::infinity();  // D
  Index n_devices = 1;
  double eta = 0.0;
  std::optional<double> alpha;    // default: 1 + 2 log(1/delta) / eps(T)
  std::optional<double> c_delta;  // default: fixed-point resolution
};

// c_delta supplied to the RDP-to-DP conversion is inconsistent with the
// epsilon it produces; carries the smallest admissible value.
class CdeltaError : public InfeasibleError {
 public:
  CdeltaError(const std::string& what, double minimal_admissible)
      : InfeasibleError(what), minimal_admissible_(minimal_admissible) {}
  double minimal_admissible() const { return minimal_admissible_; }

 private:
  double minimal_admissible_;
};

// Per-round privacy cost: worst active device's squared effective gain over
// the combiner energy, max_i |w^H h_i s_i|^2 / |w|^2. Channel inversion
// makes this exactly 1 / |w|^2.
double phi_round(const Combiner& w, const ChannelRealization& channel,
                 const PowerScaling& s);

// Expansion coefficient of one noisy update map,
// (eta L / rn) * Re(sum_i w^H h_i s_i); equals eta * L under channel
// inversion. See the accountant notes on the real-part reading.
double kappa_round(const Combiner& w, const ChannelRealization& channel,
                   const PowerScaling& s, double eta, double smoothness);

double kappa_max(const std::vector<RoundPrivacy>& rounds);

// Saturation cap Phi: the bounded-domain ceiling on cumulative cost,
// (sqrt(phi_last) + (1 + kappa_max)^Q sqrt(r) D n / (2 eta c w_norm))^2.
// Returns +infinity when the diameter is infinite (no saturation) and
// phi_last when the diameter is zero.
double saturation_cap(double phi_last, double kappa_mx, int local_steps,
                      double sampling_rate, double diameter, Index n_devices,
                      double eta, double clip_threshold, double w_last_norm);

// Cumulative Renyi-DP loss (2 alpha r c^2 / sigma2_eff) * min(sum phi, Phi).
double rdp_epsilon(const std::vector<double>& phis, double cap, double alpha,
                   double sampling_rate, double clip_threshold,
                   double sigma2_eff);

// Order-alpha RDP to (eps, delta)-DP: eps = rdp_eps + log(1/delta)/(alpha-1).
double rdp_to_dp(double alpha, double rdp_eps, double delta);

// Closed-form (eps, delta)-DP level
// sqrt((2 c_delta + 8) log(1/delta) r c^2 min_term / sigma2_eff).
// Throws CdeltaError when c_delta < 2 eps / log(1/delta).
double dp_epsilon(double min_term, double delta, double c_delta,
                  double sampling_rate, double clip_threshold,
                  double sigma2_eff);

// Smallest c_delta consistent with its own closed-form epsilon.
double minimal_admissible_c_delta(double min_term, double delta,
                                  double sampling_rate, double clip_threshold,
                                  double sigma2_eff);

// Fixed-point resolution of the default c_delta: starts at `floor` and
// iterates c <- max(floor, 2 eps(c) / log(1/delta)) to 1e-9.
double resolve_c_delta(double min_term, double delta, double sampling_rate,
                       double clip_threshold, double sigma2_eff,
                       double floor = 8.0);

// Full ledger for a horizon of rounds: one curve point per prefix length T,
// all sharing the horizon's Phi, alpha and c_delta so the reported loss is
// nondecreasing in T and caps at (2 alpha r c^2 / sigma2_eff) * Phi.
PrivacyLedger privacy_curve(const std::vector<RoundPrivacy>& rounds,
                            const AccountantOptions& options);

inline double effective_sigma2(double sigma2, NoiseConvention conv) {
  return sigma2 * convention_factor(conv);
}

}  // namespace airfl
