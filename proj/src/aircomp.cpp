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
#include "airfl/aircomp.hpp"

#include <cmath>
#include <string>

#include "airfl/fl.hpp"

namespace airfl {

CVector effective_gains(const Combiner& combiner,
                        const ChannelRealization& channel,
                        const PowerScaling& scaling) {
  if (combiner.w.size() != channel.H.rows())
    throw ParameterError("effective_gains: combiner/channel size mismatch");
  if (scaling.s.size() != channel.H.cols())
    throw ParameterError("effective_gains: scaling/channel size mismatch");
  const CVector alignments = channel.H.adjoint() * combiner.w;  // conj pairs
  return alignments.conjugate().cwiseProduct(scaling.s);
}

PowerScaling channel_inversion_scaling(const Combiner& w,
                                       const ChannelRealization& channel,
                                       double clip_threshold, Index dim,
                                       double power) {
  if (w.w.size() != channel.H.rows())
    throw ParameterError("channel_inversion_scaling: size mismatch");
  if (clip_threshold <= 0.0 || power <= 0.0 || dim < 1)
    throw ParameterError("channel_inversion_scaling: bad parameters");

  const Index rn = channel.H.cols();
  PowerScaling scaling;
  scaling.round = channel.round;
  scaling.s.resize(rn);
  const double channel_scale = channel.H.norm() * w.w.norm();
  const double budget = static_cast<double>(dim) * power;
  for (Index i = 0; i < rn; ++i) {
    const Complex gain = w.w.dot(channel.H.col(i));  // w^H h_i
    if (std::abs(gain) <= 1e-14 * std::max(1.0, channel_scale))
      throw InfeasibleError(
          "channel_inversion_scaling: effective channel of device " +
          std::to_string(i) + " is zero");
    scaling.s[i] = 1.0 / gain;
    const double symbol_energy =
        clip_threshold * clip_threshold * std::norm(scaling.s[i]);
    if (symbol_energy > budget * (1.0 + kPowerAuditRelTol))
      throw InfeasibleError(
          "channel_inversion_scaling: power constraint violated at device " +
          std::to_string(i) + " (c^2|s|^2 = " + std::to_string(symbol_energy) +
          " > dP = " + std::to_string(budget) + ")");
  }
  return scaling;
}

AggregateEstimate air_aggregate(const std::vector<Vector>& clipped_updates,
                                const PowerScaling& scaling,
                                const ChannelRealization& channel,
                                const Combiner& combiner,
                                const NoiseParams& noise,
                                NoiseConvention convention, RngStream& rng) {
  const Index rn = channel.H.cols();
  if (static_cast<Index>(clipped_updates.size()) != rn)
    throw ParameterError("air_aggregate: update count != active devices");
  if (rn == 0) throw ParameterError("air_aggregate: empty active set");
  if (noise.sigma2 < 0.0)
    throw ParameterError("air_aggregate: negative noise power");
  const Index dim = clipped_updates.front().size();
  for (const Vector& u : clipped_updates)
    if (u.size() != dim) throw ParameterError("air_aggregate: ragged updates");

  const CVector gains = effective_gains(combiner, channel, scaling);

  AggregateEstimate est;
  est.delta_hat = Vector::Zero(dim);
  for (Index i = 0; i < rn; ++i)
    est.delta_hat += gains[i].real() * clipped_updates[static_cast<std::size_t>(i)];

  if (noise.sigma2 > 0.0) {
    const Index m = channel.H.rows();
    for (Index j = 0; j < dim; ++j) {
      const CVector n_j = sample_cscg(m, noise.sigma2, rng);
      est.delta_hat[j] += (combiner.w.dot(n_j)).real();
    }
  }

  const EstimationErrorStats stats = estimation_error_stats(
      clipped_updates, scaling, channel, combiner, noise.sigma2, convention);
  est.misalignment = stats.misalignment;
  est.noise_power = stats.noise_power;
  return est;
}

ModelState global_update_air(const ModelState& theta,
                             const AggregateEstimate& estimate, double eta,
                             Index rn, const ModelState& center,
                             double diameter) {
  if (theta.size() != estimate.delta_hat.size())
    throw ParameterError("global_update_air: dimension mismatch");
  if (rn < 1) throw ParameterError("global_update_air: rn must be >= 1");
  const ModelState next =
      theta - (eta / static_cast<double>(rn)) * estimate.delta_hat;
  return project_to_domain(next, center, diameter);
}

EstimationErrorStats estimation_error_stats(
    const std::vector<Vector>& clipped_updates, const PowerScaling& scaling,
    const ChannelRealization& channel, const Combiner& combiner, double sigma2,
    NoiseConvention convention) {
  const Index rn = channel.H.cols();
  if (static_cast<Index>(clipped_updates.size()) != rn)
    throw ParameterError("estimation_error_stats: update count mismatch");
  const CVector gains = effective_gains(combiner, channel, scaling);

  EstimationErrorStats stats;
  for (Index i = 0; i < rn; ++i) {
    const Complex deviation = Complex(1.0, 0.0) - gains[i];
    const double rho = convention == NoiseConvention::kFull
                           ? std::norm(deviation)
                           : deviation.real() * deviation.real();
    stats.misalignment +=
        rho * clipped_updates[static_cast<std::size_t>(i)].squaredNorm();
  }
  const Index dim =
      clipped_updates.empty() ? 0 : clipped_updates.front().size();
  stats.noise_power = static_cast<double>(dim) * combiner.w.squaredNorm() *
                      sigma2 * convention_factor(convention);
  return stats;
}

}  // namespace airfl
