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
#include <doctest.h>

#include <cmath>
#include <complex>

#include "airfl/channel.hpp"

using namespace airfl;

namespace {

std::vector<Index> iota(Index n) {
  std::vector<Index> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

TEST_CASE("cscg per-entry second moment matches the variance") {
  RngStream rng(1);
  const double variance = 1.7;
  const int draws = 100000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) acc += std::norm(rng.cnormal(variance));
  const double mean = acc / draws;
  // |z|^2 is exponential with mean sigma^2, so sd of the mean is sigma^2/sqrt(N).
  CHECK(std::abs(mean - variance) < 5.0 * variance / std::sqrt(draws));
}

TEST_CASE("cscg splits power evenly between real and imaginary parts") {
  RngStream rng(2);
  const int draws = 100000;
  double re2 = 0.0;
  double abs2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Complex z = rng.cnormal(2.0);
    re2 += z.real() * z.real();
    abs2 += std::norm(z);
  }
  CHECK(std::abs(abs2 / draws - 2.0) < 0.05);
  CHECK(std::abs(re2 / draws - 1.0) < 0.05);
}

TEST_CASE("cscg circularity: rotated draws keep their moments") {
  RngStream rng(3);
  const int draws = 50000;
  const Complex rotation = std::polar(1.0, 0.7);
  Complex mean_z = 0.0;
  Complex pseudo = 0.0;  // E[z^2] must vanish for circular symmetry
  double power = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Complex z = rotation * rng.cnormal(1.0);
    mean_z += z;
    pseudo += z * z;
    power += std::norm(z);
  }
  const double tol = 5.0 / std::sqrt(static_cast<double>(draws));
  CHECK(std::abs(mean_z) / draws < tol);
  CHECK(std::abs(pseudo) / draws < 2.0 * tol);
  CHECK(std::abs(power / draws - 1.0) < 2.0 * tol);
}

TEST_CASE("sample_cscg validates and replays deterministically") {
  RngStream rng(4);
  CHECK_THROWS_AS(sample_cscg(3, 0.0, rng), ParameterError);
  CHECK_THROWS_AS(sample_cscg(3, -1.0, rng), ParameterError);
  RngStream a(9);
  RngStream b(9);
  const CVector va = sample_cscg(16, 1.0, a);
  const CVector vb = sample_cscg(16, 1.0, b);
  CHECK((va - vb).norm() == 0.0);
}

TEST_CASE("path loss evaluates the free-space formula") {
  const double gain = path_loss(1000.0, 2.4e9);
  CHECK(gain == doctest::Approx(9.88e-11).epsilon(2e-3));
  CHECK(path_loss(2000.0, 2.4e9) == doctest::Approx(gain / 4.0).epsilon(1e-12));
  CHECK_THROWS_AS(path_loss(0.0, 2.4e9), ParameterError);
  CHECK_THROWS_AS(path_loss(10.0, -1.0), ParameterError);
}

TEST_CASE("geometry distances live on the 1 km disc and replay") {
  const RngStream rng(5);
  const DeviceGeometry geo = sample_geometry(64, 2.4e9, rng);
  for (Index i = 0; i < 64; ++i) {
    CHECK(geo.distances[i] > 0.0);
    CHECK(geo.distances[i] <= 1000.0);
    CHECK(geo.path_loss[i] ==
          doctest::Approx(path_loss(geo.distances[i], 2.4e9)));
  }
  const DeviceGeometry geo2 = sample_geometry(64, 2.4e9, rng);
  CHECK((geo.distances - geo2.distances).norm() == 0.0);
}

TEST_CASE("channel realization has the right shape and replays") {
  const RngStream rng(6);
  const DeviceGeometry geo = sample_geometry(50, 2.4e9, rng);
  const ChannelRealization ch = sample_channel(3, 100, iota(50), geo, rng);
  CHECK(ch.H.rows() == 100);
  CHECK(ch.H.cols() == 50);
  const ChannelRealization again = sample_channel(3, 100, iota(50), geo, rng);
  CHECK((ch.H - again.H).norm() == 0.0);
  const ChannelRealization other = sample_channel(4, 100, iota(50), geo, rng);
  CHECK((ch.H - other.H).norm() > 0.0);
}

TEST_CASE("unit path loss gives identity column covariance") {
  const RngStream rng(7);
  DeviceGeometry geo;
  geo.distances = Vector::Ones(3);
  geo.path_loss = Vector::Ones(3);
  const Index m = 4;
  const int draws = 10000;
  CMatrix cov = CMatrix::Zero(m, m);
  for (int t = 0; t < draws; ++t) {
    const ChannelRealization ch = sample_channel(t, m, iota(3), geo, rng);
    cov += ch.H.col(0) * ch.H.col(0).adjoint();
  }
  cov /= static_cast<double>(draws);
  const double tol = 5.0 / std::sqrt(static_cast<double>(draws));
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) {
      const Complex expected = i == j ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      CHECK(std::abs(cov(i, j) - expected) < 5.0 * tol);
    }
}

TEST_CASE("gram_solve with an identity embedding returns b") {
  const Index rn = 5;
  CMatrix H = CMatrix::Zero(9, rn);
  for (Index i = 0; i < rn; ++i) H(i, i) = 1.0;
  RngStream rng(8);
  CVector b(rn);
  for (Index i = 0; i < rn; ++i) b[i] = rng.cnormal(1.0);
  const CVector x = gram_solve(H, b);
  CHECK((x - b).norm() <= 1e-14 * b.norm());
}

TEST_CASE("gram_solve meets the residual contract on random instances") {
  RngStream rng(9);
  for (int inst = 0; inst < 100; ++inst) {
    const Index rn = 1 + static_cast<Index>(rng.below(6));
    const Index m = rn + static_cast<Index>(rng.below(10));
    CMatrix H(m, rn);
    for (Index j = 0; j < rn; ++j)
      for (Index i = 0; i < m; ++i) H(i, j) = rng.cnormal(1.0);
    CVector b(rn);
    for (Index i = 0; i < rn; ++i) b[i] = rng.cnormal(1.0);
    const CVector x = gram_solve(H, b);  // must not throw: full rank a.s.
    const CMatrix gram = H.adjoint() * H;
    CHECK((gram * x - b).norm() <= 1e-10 * b.norm());
  }
}

TEST_CASE("gram_solve rejects rank-deficient systems") {
  RngStream rng(10);
  CMatrix H(6, 3);
  for (Index i = 0; i < 6; ++i) H(i, 0) = rng.cnormal(1.0);
  H.col(1) = H.col(0);  // duplicated column
  for (Index i = 0; i < 6; ++i) H(i, 2) = rng.cnormal(1.0);
  CVector b = CVector::Ones(3);
  CHECK_THROWS_AS(gram_solve(H, b), SingularMatrixError);
  try {
    gram_solve(H, b);
  } catch (const SingularMatrixError& e) {
    CHECK(e.condition_estimate() > kGramConditionLimit);
  }
}

TEST_CASE("gram_solve handles the zero right-hand side") {
  CMatrix H = CMatrix::Identity(4, 2);
  const CVector x = gram_solve(H, CVector::Zero(2));
  CHECK(x.norm() == 0.0);
}

TEST_CASE("Hermitian transpose is a bit-exact involution") {
  RngStream rng(11);
  CMatrix M(5, 3);
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 5; ++i) M(i, j) = rng.cnormal(1.0);
  const CMatrix round_trip = M.adjoint().adjoint();
  CHECK(round_trip.rows() == M.rows());
  CHECK(round_trip.cols() == M.cols());
  for (Index j = 0; j < 3; ++j)
    for (Index i = 0; i < 5; ++i) CHECK(round_trip(i, j) == M(i, j));
}
