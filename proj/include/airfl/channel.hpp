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

#include <cstdint>
#include <vector>

#include "airfl/rng.hpp"
#include "airfl/types.hpp"

namespace airfl {

// Additive receiver noise: power per complex sample, plus the seed that
// anchors the noise stream.
struct NoiseParams {
  double sigma2 = 0.0;  // Watts
  std::uint64_t seed = 0;
};

// Static device geometry, drawn once per experiment and reused every round.
struct DeviceGeometry {
  Vector distances;  // meters, one per device
  Vector path_loss;  // power gain per device
};

// One round's uplink channel: column i is the m-antenna vector of active
// device i, drawn CN(0, path_loss[i] * I).
struct ChannelRealization {
  int round = 0;
  CMatrix H;          // m x rn
  Vector path_loss;   // per active device
  Vector distances;   // per active device, meters
};

// Vector of i.i.d. CN(0, variance) entries.
CVector sample_cscg(Index dim, double variance, RngStream& rng);

// Free-space power gain (speed_of_light / (4 pi f_c r))^2.
double path_loss(double distance_m, double carrier_freq_hz);

// Distances r_i = 1000 * sqrt(U(0,1)) meters (uniform over a 1 km disc), with
// the matching path-loss gains. `rng` should be the experiment-level
// geometry stream so the layout is fixed across rounds.
DeviceGeometry sample_geometry(Index n_devices, double carrier_freq_hz,
                               const RngStream& rng);

// Block-flat Rayleigh fading realization for the given active devices.
// Draws are keyed on (experiment stream, round, device), so the same
// (seed, round) always reproduces the same matrix.
ChannelRealization sample_channel(int round, Index m_antennas,
                                  const std::vector<Index>& active,
                                  const DeviceGeometry& geometry,
                                  const RngStream& experiment_rng);

// Solves (H^H H) x = b via Cholesky with iterative refinement.
// Throws SingularMatrixError (carrying the condition estimate) if the Gram
// matrix is rank deficient, its condition estimate exceeds 1e12, or the
// relative residual cannot be brought below 1e-10.
CVector gram_solve(const CMatrix& H, const CVector& b);

inline constexpr double kGramConditionLimit = 1e12;
inline constexpr double kGramResidualTol = 1e-10;

}  // namespace airfl
