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
#include "airfl/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace airfl {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw ParameterError("delta must lie in (0, 1)");
}

double bound_coefficient(double sampling_rate, double clip_threshold,
                         double sigma2_eff) {
  if (sampling_rate <= 0.0 || sampling_rate > 1.0)
    throw ParameterError("sampling rate must lie in (0, 1]");
  if (clip_threshold <= 0.0)
    throw ParameterError("clip threshold must be > 0");
  if (sigma2_eff <= 0.0) throw ParameterError("noise power must be > 0");
  return sampling_rate * clip_threshold * clip_threshold / sigma2_eff;
}

}  // namespace

double phi_round(const Combiner& w, const ChannelRealization& channel,
                 const PowerScaling& s) {
  const double w_energy = w.w.squaredNorm();
  if (w_energy <= 0.0) throw ParameterError("phi_round: zero combiner");
  const CVector gains = effective_gains(w, channel, s);
  double worst = 0.0;
  for (Index i = 0; i < gains.size(); ++i)
    worst = std::max(worst, std::norm(gains[i]));
  return worst / w_energy;
}

double kappa_round(const Combiner& w, const ChannelRealization& channel,
                   const PowerScaling& s, double eta, double smoothness) {
  if (eta < 0.0) throw ParameterError("kappa_round: eta must be >= 0");
  if (smoothness < 0.0) throw ParameterError("kappa_round: L must be >= 0");
  const CVector gains = effective_gains(w, channel, s);
  const Complex total = gains.sum();
  const auto rn = static_cast<double>(gains.size());
  return eta * smoothness / rn * total.real();
}

double kappa_max(const std::vector<RoundPrivacy>& rounds) {
  if (rounds.empty()) throw ParameterError("kappa_max: empty history");
  double worst = rounds.front().kappa;
  for (const RoundPrivacy& r : rounds) worst = std::max(worst, r.kappa);
  return worst;
}

double saturation_cap(double phi_last, double kappa_mx, int local_steps,
                      double sampling_rate, double diameter, Index n_devices,
                      double eta, double clip_threshold, double w_last_norm) {
  if (phi_last < 0.0 || kappa_mx < 0.0 || local_steps < 0 ||
      sampling_rate < 0.0 || diameter < 0.0 || n_devices < 0)
    throw ParameterError("saturation_cap: negative input");
  if (std::isinf(diameter)) return std::numeric_limits<double>::infinity();
  if (diameter == 0.0) return phi_last;
  if (eta <= 0.0 || clip_threshold <= 0.0 || w_last_norm <= 0.0)
    throw ParameterError("saturation_cap: eta, c and |w| must be > 0");
  const double shift = std::pow(1.0 + kappa_mx, local_steps) *
                       std::sqrt(sampling_rate) * diameter *
                       static_cast<double>(n_devices) /
                       (2.0 * eta * clip_threshold * w_last_norm);
  const double root = std::sqrt(phi_last) + shift;
  return root * root;
}

double rdp_epsilon(const std::vector<double>& phis, double cap, double alpha,
                   double sampling_rate, double clip_threshold,
                   double sigma2_eff) {
  if (alpha <= 1.0) throw ParameterError("rdp_epsilon: alpha must be > 1");
  const double sum = std::accumulate(phis.begin(), phis.end(), 0.0);
  const double coeff =
      bound_coefficient(sampling_rate, clip_threshold, sigma2_eff);
  return 2.0 * alpha * coeff * std::min(sum, cap);
}

double rdp_to_dp(double alpha, double rdp_eps, double delta) {
  if (alpha <= 1.0) throw ParameterError("rdp_to_dp: alpha must be > 1");
  check_delta(delta);
  return rdp_eps + std::log(1.0 / delta) / (alpha - 1.0);
}

double dp_epsilon(double min_term, double delta, double c_delta,
                  double sampling_rate, double clip_threshold,
                  double sigma2_eff) {
  check_delta(delta);
  if (min_term < 0.0) throw ParameterError("dp_epsilon: negative bound term");
  if (c_delta < 0.0) throw ParameterError("dp_epsilon: c_delta must be >= 0");
  const double log_inv_delta = std::log(1.0 / delta);
  const double coeff =
      bound_coefficient(sampling_rate, clip_threshold, sigma2_eff);
  const double eps =
      std::sqrt((2.0 * c_delta + 8.0) * log_inv_delta * coeff * min_term);
  // The conversion needs eps' = eps / 2 <= (c_delta / 4) log(1/delta).
  if (c_delta * log_inv_delta < 2.0 * eps * (1.0 - 1e-9)) {
    const double minimal = minimal_admissible_c_delta(
        min_term, delta, sampling_rate, clip_threshold, sigma2_eff);
    throw CdeltaError("dp_epsilon: c_delta = " + std::to_string(c_delta) +
                          " inconsistent; minimal admissible is " +
                          std::to_string(minimal),
                      minimal);
  }
  return eps;
}

double minimal_admissible_c_delta(double min_term, double delta,
                                  double sampling_rate, double clip_threshold,
                                  double sigma2_eff) {
  check_delta(delta);
  if (min_term <= 0.0) return 0.0;
  const double log_inv_delta = std::log(1.0 / delta);
  const double b = bound_coefficient(sampling_rate, clip_threshold,
                                     sigma2_eff) *
                   min_term;
  // Equality c * log(1/delta) = 2 sqrt((2c + 8) log(1/delta) b) solved for c.
  return (4.0 * b + std::sqrt(16.0 * b * b + 32.0 * b * log_inv_delta)) /
         log_inv_delta;
}

double resolve_c_delta(double min_term, double delta, double sampling_rate,
                       double clip_threshold, double sigma2_eff,
                       double floor) {
  check_delta(delta);
  if (floor < 0.0) throw ParameterError("resolve_c_delta: negative floor");
  // Fixed point of c <- max(floor, 2 eps(c) / log(1/delta)); eps does not
  // feed back into the bound term, so the consistent value is just the
  // minimal admissible constant, floored.
  return std::max(floor, minimal_admissible_c_delta(min_term, delta,
                                                    sampling_rate,
                                                    clip_threshold,
                                                    sigma2_eff));
}

PrivacyLedger privacy_curve(const std::vector<RoundPrivacy>& rounds,
                            const AccountantOptions& options) {
  if (rounds.empty()) throw ParameterError("privacy_curve: no rounds");
  check_delta(options.delta);
  for (const RoundPrivacy& r : rounds)
    if (r.phi < 0.0) throw ParameterError("privacy_curve: negative phi");

  PrivacyLedger ledger;
  ledger.phi.reserve(rounds.size());
  for (const RoundPrivacy& r : rounds) ledger.phi.push_back(r.phi);
  ledger.kappa_max = kappa_max(rounds);
  ledger.cap = saturation_cap(rounds.back().phi, ledger.kappa_max,
                              options.local_steps, options.sampling_rate,
                              options.diameter, options.n_devices, options.eta,
                              options.clip_threshold, rounds.back().w_norm);

  double sum_phi = 0.0;
  for (const RoundPrivacy& r : rounds) sum_phi += r.phi;
  const double min_term = std::min(sum_phi, ledger.cap);

  ledger.c_delta =
      options.c_delta.has_value()
          ? *options.c_delta
          : resolve_c_delta(min_term, options.delta, options.sampling_rate,
                            options.clip_threshold, options.sigma2_eff);
  const double horizon_eps =
      dp_epsilon(min_term, options.delta, ledger.c_delta,
                 options.sampling_rate, options.clip_threshold,
                 options.sigma2_eff);
  if (options.alpha.has_value()) {
    ledger.alpha = *options.alpha;
  } else if (horizon_eps > 0.0) {
    ledger.alpha = 1.0 + 2.0 * std::log(1.0 / options.delta) / horizon_eps;
  } else {
    ledger.alpha = 2.0;
  }
  if (ledger.alpha <= 1.0)
    throw ParameterError("privacy_curve: alpha must be > 1");

  const double coeff = bound_coefficient(
      options.sampling_rate, options.clip_threshold, options.sigma2_eff);
  const double log_inv_delta = std::log(1.0 / options.delta);
  ledger.curve.reserve(rounds.size());
  double running = 0.0;
  for (std::size_t t = 0; t < rounds.size(); ++t) {
    running += rounds[t].phi;
    PrivacyCurvePoint point;
    point.rounds = static_cast<int>(t) + 1;
    point.sum_phi = running;
    point.cap = ledger.cap;
    const double m = std::min(running, ledger.cap);
    point.rdp_eps = 2.0 * ledger.alpha * coeff * m;
    point.dp_eps =
        std::sqrt((2.0 * ledger.c_delta + 8.0) * log_inv_delta * coeff * m);
    if (!ledger.burn_in_round.has_value() && running >= ledger.cap)
      ledger.burn_in_round = point.rounds;
    ledger.curve.push_back(point);
  }
  return ledger;
}

}  // namespace airfl
