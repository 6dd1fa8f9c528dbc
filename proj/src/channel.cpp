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
#include "airfl/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

namespace airfl {

CVector sample_cscg(Index dim, double variance, RngStream& rng) {
  if (variance <= 0.0) throw ParameterError("sample_cscg: variance must be > 0");
  if (dim < 0) throw ParameterError("sample_cscg: negative dimension");
  CVector z(dim);
  for (Index i = 0; i < dim; ++i) z[i] = rng.cnormal(variance);
  return z;
}

double path_loss(double distance_m, double carrier_freq_hz) {
  if (distance_m <= 0.0) throw ParameterError("path_loss: distance must be > 0");
  if (carrier_freq_hz <= 0.0)
    throw ParameterError("path_loss: carrier frequency must be > 0");
  const double amplitude =
      kSpeedOfLight / (4.0 * std::numbers::pi * carrier_freq_hz * distance_m);
  return amplitude * amplitude;
}

DeviceGeometry sample_geometry(Index n_devices, double carrier_freq_hz,
                               const RngStream& rng) {
  if (n_devices < 1) throw ParameterError("sample_geometry: need >= 1 device");
  DeviceGeometry geo;
  geo.distances.resize(n_devices);
  geo.path_loss.resize(n_devices);
  RngStream stream = rng.child(stream::kGeometry);
  for (Index i = 0; i < n_devices; ++i) {
    geo.distances[i] = 1000.0 * std::sqrt(stream.uniform());
    geo.path_loss[i] = path_loss(geo.distances[i], carrier_freq_hz);
  }
  return geo;
}

ChannelRealization sample_channel(int round, Index m_antennas,
                                  const std::vector<Index>& active,
                                  const DeviceGeometry& geometry,
                                  const RngStream& experiment_rng) {
  if (m_antennas < 1) throw ParameterError("sample_channel: need >= 1 antenna");
  if (active.empty()) throw ParameterError("sample_channel: empty active set");
  ChannelRealization ch;
  ch.round = round;
  const auto rn = static_cast<Index>(active.size());
  ch.H.resize(m_antennas, rn);
  ch.path_loss.resize(rn);
  ch.distances.resize(rn);
  const RngStream round_stream =
      experiment_rng.child(stream::kRound, static_cast<std::uint64_t>(round));
  for (Index col = 0; col < rn; ++col) {
    const Index device = active[static_cast<std::size_t>(col)];
    if (device < 0 || device >= geometry.path_loss.size())
      throw ParameterError("sample_channel: device index out of range");
    RngStream dev_stream =
        round_stream.child(stream::kChannel, static_cast<std::uint64_t>(device));
    ch.path_loss[col] = geometry.path_loss[device];
    ch.distances[col] = geometry.distances[device];
    ch.H.col(col) = sample_cscg(m_antennas, geometry.path_loss[device], dev_stream);
  }
  return ch;
}

CVector gram_solve(const CMatrix& H, const CVector& b) {
  if (H.cols() != b.size())
    throw ParameterError("gram_solve: dimension mismatch");
  const CMatrix gram = H.adjoint() * H;
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success)
    throw SingularMatrixError("gram_solve: Gram matrix not positive definite",
                              std::numeric_limits<double>::infinity());
  const double rcond = llt.rcond();
  const double cond_estimate = rcond > 0.0
                                   ? 1.0 / rcond
                                   : std::numeric_limits<double>::infinity();
  if (cond_estimate > kGramConditionLimit)
    throw SingularMatrixError(
        "gram_solve: condition estimate " + std::to_string(cond_estimate) +
            " exceeds limit",
        cond_estimate);

  CVector x = llt.solve(b);
  const double b_norm = b.norm();
  if (b_norm == 0.0) return CVector::Zero(b.size());
  // One or two refinement steps keep the residual at the contract level even
  // for moderately conditioned systems.
  for (int step = 0; step < 2; ++step) {
    const CVector residual = b - gram * x;
    if (residual.norm() <= kGramResidualTol * b_norm) return x;
    x += llt.solve(residual);
  }
  if ((b - gram * x).norm() > kGramResidualTol * b_norm)
    throw SingularMatrixError("gram_solve: residual tolerance not reached",
                              cond_estimate);
  return x;
}

}  // namespace airfl
