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
#include <map>

#include "airfl/fl.hpp"

using namespace airfl;

namespace {

LocalDataset quadratic_dataset(const std::vector<Vector>& points) {
  LocalDataset ds;
  ds.task = TaskKind::kQuadratic;
  for (const Vector& p : points) ds.samples.push_back({p, 0.0});
  return ds;
}

}  // namespace

TEST_CASE("one SGD step on the origin-centered quadratic contracts by 1-eta") {
  // All samples at zero: per-sample loss 0.5 |theta|^2.
  const Index d = 6;
  LocalDataset ds = quadratic_dataset({Vector::Zero(d)});
  RngStream rng(1);
  Vector theta0(d);
  for (Index i = 0; i < d; ++i) theta0[i] = rng.normal();
  const double eta = 0.3;
  const ModelState theta1 = local_sgd(theta0, ds, 1, eta, 1, rng);
  CHECK((theta1 - (1.0 - eta) * theta0).norm() <= 1e-14 * theta0.norm());

  // The transmitted difference then recovers theta0 exactly.
  const Vector diff = model_diff(theta0, theta1, eta);
  CHECK((diff - theta0).norm() <= 1e-12 * theta0.norm());
}

TEST_CASE("local_sgd validates its inputs") {
  LocalDataset ds = quadratic_dataset({Vector::Zero(3)});
  RngStream rng(2);
  const Vector theta = Vector::Ones(3);
  CHECK_THROWS_AS(local_sgd(theta, LocalDataset{}, 1, 0.1, 1, rng),
                  ParameterError);
  CHECK_THROWS_AS(local_sgd(theta, ds, 0, 0.1, 1, rng), ParameterError);
  CHECK_THROWS_AS(local_sgd(theta, ds, 1, -0.1, 1, rng), ParameterError);
  CHECK_THROWS_AS(local_sgd(theta, ds, 1, 0.1, 2, rng), ParameterError);
}

TEST_CASE("full-batch logistic descent is monotone for small steps") {
  const RngStream rng(3);
  const auto data = make_synthetic_task(TaskKind::kLogistic, 8, 1, 40, rng);
  const LocalDataset& ds = data.front();
  Vector theta = Vector::Zero(8);
  double loss = dataset_loss(theta, ds);
  RngStream sgd_rng(4);
  for (int q = 0; q < 20; ++q) {
    theta = local_sgd(theta, ds, 1, 0.05, 40, sgd_rng);  // batch = |data|
    const double next = dataset_loss(theta, ds);
    CHECK(next <= loss + 1e-12);
    loss = next;
  }
}

TEST_CASE("model_diff round-trips the local update bit-exactly") {
  const RngStream rng(5);
  const auto data = make_synthetic_task(TaskKind::kQuadratic, 10, 1, 12, rng);
  RngStream sgd_rng(6);
  Vector theta0(10);
  RngStream init(7);
  for (Index i = 0; i < 10; ++i) theta0[i] = init.normal();
  const double eta = 0.01;
  const ModelState thetaQ = local_sgd(theta0, data.front(), 5, eta, 4, sgd_rng);
  const Vector diff = model_diff(theta0, thetaQ, eta);
  const Vector rebuilt = theta0 - eta * diff;
  CHECK((rebuilt - thetaQ).norm() == 0.0);
  CHECK_THROWS_AS(model_diff(theta0, Vector::Zero(3), eta), ParameterError);
}

TEST_CASE("clip basics") {
  Vector x(3);
  x << 3.0, 0.0, 4.0;  // norm 5
  CHECK((clip(x, 10.0) - x).norm() == 0.0);
  const Vector half = clip(x, 2.5);
  CHECK(half.norm() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK((half - 0.5 * x).norm() <= 1e-14);
  CHECK(clip(Vector::Zero(3), 1.0).norm() == 0.0);
  CHECK_THROWS_AS(clip(x, 0.0), ParameterError);
}

TEST_CASE("clip never exceeds the threshold and is non-expansive") {
  RngStream rng(8);
  for (int rep = 0; rep < 10000; ++rep) {
    const Index d = 1 + static_cast<Index>(rng.below(16));
    Vector x(d);
    Vector y(d);
    for (Index i = 0; i < d; ++i) {
      x[i] = 3.0 * rng.normal();
      y[i] = 3.0 * rng.normal();
    }
    const double c = 0.1 + 2.0 * rng.uniform();
    CHECK(clip(x, c).norm() <= c * (1.0 + 1e-12));
    CHECK((clip(x, c) - clip(y, c)).norm() <= (x - y).norm() * (1.0 + 1e-12));
  }
}

TEST_CASE("noiseless aggregation identities") {
  const Index d = 4;
  Vector theta = Vector::Ones(d);
  std::vector<Vector> zeros(3, Vector::Zero(d));
  CHECK((aggregate_noiseless(zeros, theta, 0.1, 3) - theta).norm() == 0.0);

  Vector delta(d);
  delta << 1, 2, 3, 4;
  const ModelState single = aggregate_noiseless({delta}, theta, 0.1, 1);
  CHECK((single - (theta - 0.1 * delta)).norm() <= 1e-15);

  std::vector<Vector> same(5, delta);
  const ModelState averaged = aggregate_noiseless(same, theta, 0.1, 5);
  CHECK((averaged - single).norm() <= 1e-15);

  CHECK_THROWS_AS(aggregate_noiseless({}, theta, 0.1, 0), ParameterError);
  CHECK_THROWS_AS(aggregate_noiseless({delta}, theta, 0.1, 2), ParameterError);
}

TEST_CASE("active-device sampling") {
  RngStream rng(9);
  const auto full = sample_active_devices(7, 1.0, rng);
  CHECK(full.size() == 7);
  for (Index i = 0; i < 7; ++i) CHECK(full[static_cast<std::size_t>(i)] == i);

  CHECK_THROWS_AS(sample_active_devices(4, 0.3, rng), ConfigError);
  CHECK_THROWS_AS(sample_active_devices(4, 1.3, rng), ConfigError);

  // Every 2-subset of {0..3} should appear with frequency ~ 1/6.
  std::map<std::pair<Index, Index>, int> counts;
  const int draws = 30000;
  for (int k = 0; k < draws; ++k) {
    const auto picks = sample_active_devices(4, 0.5, rng);
    ++counts[{picks[0], picks[1]}];
  }
  CHECK(counts.size() == 6);
  double chi_sq = 0.0;
  const double expected = draws / 6.0;
  for (const auto& [subset, count] : counts)
    chi_sq += (count - expected) * (count - expected) / expected;
  CHECK(chi_sq < 20.5);  // chi-square_{5 dof} at p ~ 0.001
}

TEST_CASE("synthetic quadratic task has an analytic optimum") {
  Vector v(5);
  v << 1, -2, 0.5, 3, -1;
  std::vector<LocalDataset> data(3, quadratic_dataset({v, v, v}));
  CHECK((quadratic_optimum(data) - v).norm() <= 1e-15);
  CHECK(quadratic_f_star(data) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(global_loss(v, data) == doctest::Approx(0.0));
  CHECK(task_smoothness(data, 7.0) == 1.0);
}

TEST_CASE("generated partitions are balanced and nonempty") {
  const RngStream rng(10);
  for (TaskKind kind :
       {TaskKind::kQuadratic, TaskKind::kLogistic, TaskKind::kSmallMlp}) {
    const Index dim = kind == TaskKind::kSmallMlp ? 21 : 12;
    const auto data = make_synthetic_task(kind, dim, 6, 15, rng);
    CHECK(data.size() == 6);
    for (const LocalDataset& ds : data) CHECK(ds.samples.size() == 15);
  }
}

TEST_CASE("task gradients match finite differences") {
  const RngStream rng(11);
  for (TaskKind kind :
       {TaskKind::kQuadratic, TaskKind::kLogistic, TaskKind::kSmallMlp}) {
    const Index dim = kind == TaskKind::kSmallMlp ? 16 : 9;
    const auto data = make_synthetic_task(kind, dim, 2, 10, rng);
    RngStream point(12);
    Vector theta(dim);
    for (Index i = 0; i < dim; ++i) theta[i] = 0.3 * point.normal();
    if (kind == TaskKind::kLogistic) theta.setZero();
    const Vector grad = dataset_grad(theta, data.front());
    const double h = 1e-6;
    Vector fd(dim);
    for (Index i = 0; i < dim; ++i) {
      Vector up = theta;
      Vector down = theta;
      up[i] += h;
      down[i] -= h;
      fd[i] = (dataset_loss(up, data.front()) -
               dataset_loss(down, data.front())) /
              (2.0 * h);
    }
    CHECK((grad - fd).norm() <= 1e-5 * std::max(1.0, grad.norm()));
  }
}

TEST_CASE("vanilla FedAvg on the quadratic task converges geometrically") {
  const RngStream rng(13);
  const Index d = 8;
  const auto data = make_synthetic_task(TaskKind::kQuadratic, d, 4, 10, rng);
  const Vector optimum = quadratic_optimum(data);
  Vector theta = Vector::Zero(d);
  const double eta = 0.1;  // below 1/L = 1
  const int q_steps = 1;
  RngStream sgd(14);
  double prev = (theta - optimum).norm();
  for (int t = 0; t < 30; ++t) {
    std::vector<Vector> updates;
    for (const LocalDataset& ds : data) {
      const ModelState local =
          local_sgd(theta, ds, q_steps, eta,
                    static_cast<Index>(ds.samples.size()), sgd);
      updates.push_back(model_diff(theta, local, eta));
    }
    theta = aggregate_noiseless(updates, theta, eta,
                                static_cast<Index>(data.size()));
    const double dist = (theta - optimum).norm();
    // Full-batch steps contract the error by exactly (1 - eta).
    CHECK(dist <= (1.0 - eta) * prev + 1e-12);
    prev = dist;
  }
  CHECK(prev <= std::pow(1.0 - eta, 30) * (Vector::Zero(d) - optimum).norm() +
                    1e-9);
}

TEST_CASE("projection keeps iterates inside the diameter ball") {
  const Vector center = Vector::Zero(3);
  Vector far(3);
  far << 3, 4, 0;
  const Vector projected = project_to_domain(far, center, 2.0);
  CHECK(projected.norm() == doctest::Approx(1.0));
  CHECK((projected - far / 5.0).norm() <= 1e-15);
  const Vector same = project_to_domain(
      far, center, std::numeric_limits<double>::infinity());
  CHECK((same - far).norm() == 0.0);
}
