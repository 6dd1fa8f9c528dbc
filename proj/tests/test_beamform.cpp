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

#include "airfl/beamform.hpp"

using namespace airfl;

namespace {

ChannelRealization random_channel(Index m, Index rn, RngStream& rng) {
  ChannelRealization ch;
  ch.H.resize(m, rn);
  for (Index j = 0; j < rn; ++j)
    for (Index i = 0; i < m; ++i) ch.H(i, j) = rng.cnormal(1.0);
  ch.path_loss = Vector::Ones(rn);
  ch.distances = Vector::Ones(rn);
  return ch;
}

double objective(const AllocationSolution& alloc) {
  double sum = 0.0;
  for (double q : alloc.q) sum += q * q;
  return sum;
}

}  // namespace

TEST_CASE("scalar ZF: m = 1, h = 2, c = 1, d = 1, P = 1") {
  ChannelRealization ch;
  ch.H = CMatrix::Ones(1, 1) * Complex(2.0, 0.0);
  ch.path_loss = Vector::Ones(1);
  ch.distances = Vector::Ones(1);
  const ZfSolution zf = zf_combiner(ch, 1.0, 1, 1.0);
  CHECK(std::abs(zf.w_zf[0] - Complex(0.5, 0.0)) <= 1e-15);
  CHECK(std::abs(zf.w_zf.dot(ch.H.col(0)) - Complex(1.0, 0.0)) <= 1e-15);
  CHECK(zf.pi == doctest::Approx(0.5));
}

TEST_CASE("orthonormal columns: w = scale * H u, pi = scale * sqrt(rn)") {
  const Index m = 6;
  const Index rn = 3;
  CMatrix H = CMatrix::Zero(m, rn);
  for (Index i = 0; i < rn; ++i) H(i, i) = 1.0;  // orthonormal columns
  ChannelRealization ch;
  ch.H = H;
  ch.path_loss = Vector::Ones(rn);
  ch.distances = Vector::Ones(rn);
  const double c = 0.8;
  const Index d = 5;
  const double P = 0.4;
  const ZfSolution zf = zf_combiner(ch, c, d, P);
  const double scale = c / std::sqrt(static_cast<double>(d) * P);
  CHECK((zf.w_zf - scale * (H * CVector::Ones(rn))).norm() <= 1e-12);
  CHECK(zf.pi ==
        doctest::Approx(scale * std::sqrt(static_cast<double>(rn))));
}

TEST_CASE("random instances align to c/sqrt(dP) within 1e-10") {
  RngStream rng(1);
  const ChannelRealization ch = random_channel(8, 3, rng);
  const double c = 1.3;
  const Index d = 9;
  const double P = 0.7;
  const ZfSolution zf = zf_combiner(ch, c, d, P);
  const double target = c / std::sqrt(static_cast<double>(d) * P);
  for (Index i = 0; i < 3; ++i)
    CHECK(std::abs(zf.w_zf.dot(ch.H.col(i))) ==
          doctest::Approx(target).epsilon(1e-10));
}

TEST_CASE("custom unit-modulus phases are honored, others rejected") {
  RngStream rng(2);
  const ChannelRealization ch = random_channel(5, 2, rng);
  CVector u(2);
  u[0] = std::polar(1.0, 0.3);
  u[1] = std::polar(1.0, -1.2);
  const ZfSolution zf = zf_combiner(ch, 1.0, 4, 1.0, &u);
  const double target = 1.0 / std::sqrt(4.0);
  for (Index i = 0; i < 2; ++i)
    CHECK(std::abs(zf.w_zf.dot(ch.H.col(i))) ==
          doctest::Approx(target).epsilon(1e-10));
  CVector bad(2);
  bad << Complex(0.5, 0.0), Complex(1.0, 0.0);
  CHECK_THROWS_AS(zf_combiner(ch, 1.0, 4, 1.0, &bad), ParameterError);
}

TEST_CASE("too few antennas is a configuration error") {
  RngStream rng(3);
  const ChannelRealization ch = random_channel(2, 3, rng);
  CHECK_THROWS_AS(zf_combiner(ch, 1.0, 1, 1.0), ConfigError);
}

TEST_CASE("privacy budget scaling laws") {
  const double base = privacy_budget_A(0.5, 1e-5, 8.0, 1.0, 0.6, 0.1).A;
  CHECK(privacy_budget_A(1.0, 1e-5, 8.0, 1.0, 0.6, 0.1).A ==
        doctest::Approx(4.0 * base).epsilon(1e-12));
  CHECK(privacy_budget_A(0.5, 1e-5, 8.0, 1.0, 0.6, 0.2).A ==
        doctest::Approx(2.0 * base).epsilon(1e-12));
  CHECK_THROWS_AS(privacy_budget_A(-1.0, 1e-5, 8.0, 1.0, 0.6, 0.1),
                  ParameterError);
}

TEST_CASE("perk condition: large noise makes privacy free") {
  RngStream rng(4);
  std::vector<ZfSolution> zf;
  for (int t = 0; t < 4; ++t) {
    const ChannelRealization ch = random_channel(6, 2, rng);
    zf.push_back(zf_combiner(ch, 0.8, 10, 0.01));
  }
  PerkParams params;
  params.power = 0.01;
  params.sigma2_eff = 1e12;  // enormous noise, low SNR
  params.epsilon = 1.0;
  params.delta = 1e-5;
  params.c_delta = 8.0;
  params.sampling_rate = 1.0;
  params.dim = 10;
  params.clip_threshold = 0.8;
  const PrivacyBudget budget = privacy_budget_A(
      params.epsilon, params.delta, params.c_delta, params.sampling_rate,
      params.clip_threshold, params.sigma2_eff);
  const PerkCheck check = perk_condition(zf, budget, params);
  CHECK(check.perk);
  CHECK(check.margin > 0.0);
  CHECK(check.snr <= check.snr_threshold);
}

TEST_CASE("budget and SNR threshold forms agree on random instances") {
  RngStream rng(5);
  for (int inst = 0; inst < 100; ++inst) {
    const Index m = 2 + static_cast<Index>(rng.below(6));
    const Index rn =
        1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m)));
    const double c = 0.3 + rng.uniform();
    const Index d = 2 + static_cast<Index>(rng.below(20));
    const double P = 0.05 + rng.uniform();
    const std::size_t rounds = 1 + rng.below(5);
    std::vector<ZfSolution> zf;
    for (std::size_t t = 0; t < rounds; ++t)
      zf.push_back(
          zf_combiner(random_channel(m, rn, rng), c, d, P));
    PerkParams params;
    params.power = P;
    params.sigma2_eff = std::pow(10.0, -3.0 + 6.0 * rng.uniform());
    params.epsilon = 0.1 + 3.0 * rng.uniform();
    params.delta = 1e-5;
    params.c_delta = 8.0;
    params.sampling_rate = 1.0;
    params.dim = d;
    params.clip_threshold = c;
    const PrivacyBudget budget = privacy_budget_A(
        params.epsilon, params.delta, params.c_delta, params.sampling_rate,
        params.clip_threshold, params.sigma2_eff);
    // perk_condition itself asserts the two forms agree; reaching here means
    // they did.
    const PerkCheck check = perk_condition(zf, budget, params);
    CHECK(check.perk == (check.snr <= check.snr_threshold ||
                         std::abs(check.margin) <=
                             1e-9 * std::max(budget.A, budget.A - check.margin)));
  }
}

TEST_CASE("allocation: feasible-as-is instance returned unchanged") {
  const std::vector<double> pi{1.0, 2.0};
  const AllocationSolution alloc = solve_allocation(pi, 1.25);
  CHECK(!alloc.scaled);
  CHECK(alloc.mu_star == 0.0);
  CHECK(alloc.q == pi);
}

TEST_CASE("allocation analytic instance pi=[1,1], A=1") {
  const AllocationSolution alloc = solve_allocation({1.0, 1.0}, 1.0 - 1e-12);
  CHECK(alloc.scaled);
  CHECK(alloc.q[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(alloc.q[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(alloc.mu_star == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("allocation analytic instance pi=[1,3], A=0.5") {
  const AllocationSolution alloc = solve_allocation({1.0, 3.0}, 0.5);
  CHECK(alloc.scaled);
  CHECK(alloc.q[0] ==
        doctest::Approx(1.0 / std::sqrt(0.5 - 1.0 / 9.0)).epsilon(1e-9));
  CHECK(alloc.q[0] == doctest::Approx(1.6036).epsilon(1e-4));
  CHECK(alloc.q[1] == doctest::Approx(3.0));
}

TEST_CASE("allocation rejects bad inputs") {
  CHECK_THROWS_AS(solve_allocation({}, 1.0), ParameterError);
  CHECK_THROWS_AS(solve_allocation({1.0, -2.0}, 1.0), ParameterError);
  CHECK_THROWS_AS(solve_allocation({1.0}, 0.0), ParameterError);
}

TEST_CASE("KKT structure: budget met with equality, levels consistent") {
  RngStream rng(6);
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t rounds = 1 + rng.below(8);
    std::vector<double> pi(rounds);
    for (double& p : pi) p = 0.1 + 4.0 * rng.uniform();
    const double sum_inv = sum_inverse_squares(pi);
    const double A = sum_inv * (0.25 + 1.5 * rng.uniform());
    const AllocationSolution alloc = solve_allocation(pi, A);
    CHECK(alloc.scaled == !budget_feasible_as_is(sum_inv, A));
    if (alloc.scaled) {
      CHECK(sum_inverse_squares(alloc.q) == doctest::Approx(A).epsilon(1e-8));
      const double level = std::pow(alloc.mu_star, 0.25);
      for (std::size_t t = 0; t < rounds; ++t) {
        CHECK(alloc.q[t] >= pi[t]);
        const bool at_floor = alloc.q[t] == pi[t];
        const bool at_level =
            std::abs(alloc.q[t] - level) <= 1e-9 * std::max(1.0, level);
        CHECK((at_floor || at_level));
      }
    } else {
      CHECK(alloc.q == pi);
    }
  }
}

TEST_CASE("h(mu) is monotone nonincreasing on a grid") {
  const std::vector<double> pi{0.5, 1.0, 2.0, 4.0};
  const double A = 0.3;
  // residual is private; probe via solve_allocation optimality instead:
  // directly check sum 1/max(pi, mu^(1/4))^2 over a mu grid.
  double prev = std::numeric_limits<double>::infinity();
  for (double mu = 0.0; mu <= 300.0; mu += 1.5) {
    double h = 0.0;
    const double level = std::pow(mu, 0.25);
    for (double p : pi) {
      const double q = std::max(p, level);
      h += 1.0 / (q * q);
    }
    CHECK(h <= prev + 1e-15);
    prev = h;
  }
  const AllocationSolution alloc = solve_allocation(pi, A);
  CHECK(sum_inverse_squares(alloc.q) == doctest::Approx(A).epsilon(1e-8));
}

TEST_CASE("allocation homogeneity: (lambda pi, A / lambda^2)") {
  RngStream rng(7);
  for (int inst = 0; inst < 30; ++inst) {
    const std::size_t rounds = 1 + rng.below(6);
    std::vector<double> pi(rounds);
    for (double& p : pi) p = 0.2 + 2.0 * rng.uniform();
    const double A = sum_inverse_squares(pi) * (0.3 + rng.uniform());
    const double lambda = 0.5 + 2.0 * rng.uniform();
    std::vector<double> scaled_pi(rounds);
    for (std::size_t t = 0; t < rounds; ++t) scaled_pi[t] = lambda * pi[t];
    const AllocationSolution a = solve_allocation(pi, A);
    const AllocationSolution b =
        solve_allocation(scaled_pi, A / (lambda * lambda));
    for (std::size_t t = 0; t < rounds; ++t)
      CHECK(b.q[t] == doctest::Approx(lambda * a.q[t]).epsilon(1e-7));
  }
}

TEST_CASE("oracle matches the KKT solver") {
  // The shared analytic instance.
  const AllocationSolution kkt = solve_allocation({1.0, 1.0}, 1.0 - 1e-12);
  const AllocationSolution pgd = oracle_allocation({1.0, 1.0}, 1.0 - 1e-12);
  CHECK(objective(pgd) == doctest::Approx(objective(kkt)).epsilon(1e-5));

  // Feasible-as-is passes through.
  const AllocationSolution easy = oracle_allocation({1.0, 2.0}, 10.0);
  CHECK(!easy.scaled);
  CHECK(easy.q == std::vector<double>{1.0, 2.0});

  RngStream rng(8);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t rounds = 1 + rng.below(8);
    std::vector<double> pi(rounds);
    for (double& p : pi) p = 0.2 + 3.0 * rng.uniform();
    const double A = sum_inverse_squares(pi) * (0.3 + 1.2 * rng.uniform());
    const double fast = objective(solve_allocation(pi, A));
    const double slow = objective(oracle_allocation(pi, A));
    worst = std::max(worst, std::abs(fast - slow) / slow);
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("optimal combiners preserve direction and scale the norms") {
  RngStream rng(9);
  std::vector<ZfSolution> zf;
  std::vector<double> pi;
  for (int t = 0; t < 3; ++t) {
    zf.push_back(zf_combiner(random_channel(6, 2, rng), 0.9, 8, 0.5));
    zf.back().round = t;
    pi.push_back(zf.back().pi);
  }

  AllocationSolution unscaled;
  unscaled.q = pi;
  unscaled.scaled = false;
  const auto same = optimal_combiners(zf, unscaled);
  for (int t = 0; t < 3; ++t)
    CHECK((same[static_cast<std::size_t>(t)].w -
           zf[static_cast<std::size_t>(t)].w_zf)
              .norm() == 0.0);

  AllocationSolution doubled;
  for (double p : pi) doubled.q.push_back(2.0 * p);
  doubled.scaled = true;
  const auto scaled = optimal_combiners(zf, doubled);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(scaled[t].w.norm() == doctest::Approx(2.0 * pi[t]).epsilon(1e-12));
    // Alignment magnitudes double with the norm.
    const double mag0 = std::abs(zf[t].w_zf.dot(CVector(scaled[t].w)) /
                                 zf[t].w_zf.squaredNorm());
    CHECK(mag0 == doctest::Approx(2.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(optimal_combiners(zf, AllocationSolution{}), ParameterError);
}

TEST_CASE("threshold dichotomy equals the scaled flag (fuzz)") {
  RngStream rng(10);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t rounds = 1 + rng.below(5);
    std::vector<double> pi(rounds);
    for (double& p : pi) p = 0.2 + 2.0 * rng.uniform();
    const double A = sum_inverse_squares(pi) * (0.2 + 1.8 * rng.uniform());
    const bool feasible = budget_feasible_as_is(sum_inverse_squares(pi), A);
    const AllocationSolution alloc = solve_allocation(pi, A);
    CHECK(feasible == !alloc.scaled);
  }
}
