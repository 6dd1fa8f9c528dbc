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

#include "airfl/channel.hpp"
#include "airfl/rng.hpp"
#include "airfl/types.hpp"

namespace airfl {

// Accounting convention for riding real-valued model symbols on the complex
// channel. The receiver always takes the real part of the combined signal,
// so the physical effective noise per coordinate is |w|^2 sigma^2 / 2
// ("half"). "full" books the entire complex noise power against the real
// estimate instead, which reproduces the textbook bound expressions verbatim;
// it is the conservative choice for bound-reproduction checks.
enum class NoiseConvention { kHalf, kFull };

// Factor applied to sigma^2 wherever an effective per-coordinate noise power
// enters an analytic expression (estimation error, privacy cost).
inline double convention_factor(NoiseConvention conv) {
  return conv == NoiseConvention::kHalf ? 0.5 : 1.0;
}

// Per-device transmit scalars for one round.
struct PowerScaling {
  int round = 0;
  CVector s;
};

// Receive combining vector for one round (shared by all d coordinates).
struct Combiner {
  int round = 0;
  CVector w;
};

// Receiver-side estimate of the sum of clipped updates, with its analytic
// error decomposition: misalignment energy plus effective noise power.
struct AggregateEstimate {
  Vector delta_hat;
  double misalignment = 0.0;  // Lambda
  double noise_power = 0.0;   // d |w|^2 sigma^2 * convention factor
};

struct EstimationErrorStats {
  double misalignment = 0.0;
  double noise_power = 0.0;
};

// Channel-inversion scaling s_i = 1 / (w^H h_i). Enforces the per-device
// power constraint c^2 |s_i|^2 <= d P (worst-case clipped symbol energy);
// throws InfeasibleError naming the first offending device on violation and
// InfeasibleError("degenerate...") when some effective channel is zero.
PowerScaling channel_inversion_scaling(const Combiner& w,
                                       const ChannelRealization& channel,
                                       double clip_threshold, Index dim,
                                       double power);

// Relative slack admitted when auditing the power constraint.
inline constexpr double kPowerAuditRelTol = 1e-9;

// Simultaneous analog transmission of the clipped updates over the fading
// MAC followed by receive combining. Per coordinate j the receiver forms
// Re[w^H (sum_i h_i s_i u_ij + n_j)] with n_j ~ CN(0, sigma2 I_m).
AggregateEstimate air_aggregate(const std::vector<Vector>& clipped_updates,
                                const PowerScaling& scaling,
                                const ChannelRealization& channel,
                                const Combiner& combiner,
                                const NoiseParams& noise,
                                NoiseConvention convention, RngStream& rng);

// theta - (eta / rn) * delta_hat, then projection when the domain diameter
// is finite.
ModelState global_update_air(const ModelState& theta,
                             const AggregateEstimate& estimate, double eta,
                             Index rn, const ModelState& center,
                             double diameter);

// Analytic estimation-error decomposition for a configured (w, s):
// misalignment = sum_i rho_i |u_i|^2 with rho_i the squared deviation of the
// effective gain w^H h_i s_i from 1 (real-part deviation under kHalf, complex
// modulus under kFull), and noise_power = d |w|^2 sigma^2 * factor.
// Channel inversion drives the misalignment to zero.
EstimationErrorStats estimation_error_stats(
    const std::vector<Vector>& clipped_updates, const PowerScaling& scaling,
    const ChannelRealization& channel, const Combiner& combiner, double sigma2,
    NoiseConvention convention);

// Effective gains g_i = w^H h_i s_i for the round's active devices.
CVector effective_gains(const Combiner& combiner,
                        const ChannelRealization& channel,
                        const PowerScaling& scaling);

}  // namespace airfl
