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

#include <limits>
#include <vector>

#include "airfl/rng.hpp"
#include "airfl/types.hpp"

namespace airfl {

enum class TaskKind { kQuadratic, kLogistic, kSmallMlp };

struct Sample {
  Vector x;
  double y = 0.0;
};

struct LocalDataset {
  Index device = 0;
  std::vector<Sample> samples;
  TaskKind task = TaskKind::kQuadratic;
};

// Constants of the loss landscape used by the privacy/convergence bounds.
// D may be +infinity, which disables domain projection and bound saturation.
struct BoundConstants {
  double L = 1.0;        // smoothness
  double G = 0.0;        // Lipschitz constant of the loss
  double sigma_l = 0.0;  // SGD variance
  double sigma_g = 0.0;  // gradient dissimilarity
  double D = std::numeric_limits<double>::infinity();  // domain diameter
  double f_star = 0.0;   // loss lower bound
};

// Per-sample loss and gradient. Tasks:
//   quadratic: l(theta; xi) = 0.5 * |theta - xi|^2   (label unused)
//   logistic:  l(theta; (x, y)) = log(1 + exp(-y x' theta)), y in {-1, +1}
//   small-mlp: squared error of a one-hidden-layer tanh network whose
//              parameters are packed into theta (trailing entries inert when
//              the requested dimension does not factor exactly)
double sample_loss(TaskKind task, const Vector& theta, const Sample& s);
Vector sample_grad(TaskKind task, const Vector& theta, const Sample& s);

double dataset_loss(const Vector& theta, const LocalDataset& data);
Vector dataset_grad(const Vector& theta, const LocalDataset& data);

// Global objective f = (1/n) sum_i f_i.
double global_loss(const Vector& theta, const std::vector<LocalDataset>& data);
Vector global_grad(const Vector& theta, const std::vector<LocalDataset>& data);

// i.i.d. synthetic federation: equal-sized (+-1) per-device partitions.
std::vector<LocalDataset> make_synthetic_task(TaskKind kind, Index dim,
                                              Index n_devices,
                                              Index samples_per_device,
                                              const RngStream& rng);

// Exact minimizer / minimum of the quadratic task (grand sample mean).
Vector quadratic_optimum(const std::vector<LocalDataset>& data);
double quadratic_f_star(const std::vector<LocalDataset>& data);

// Smoothness constant of the configured task: 1 for quadratic, the logistic
// Hessian bound max_eig(X X^H) / (4 N) per local dataset; small-mlp has no
// closed form and reports the configured fallback.
double task_smoothness(const std::vector<LocalDataset>& data, double fallback);

// Q mini-batch SGD steps from theta0; batches are drawn uniformly without
// replacement, fresh at every step.
ModelState local_sgd(const ModelState& theta0, const LocalDataset& data,
                     int steps, double eta, Index batch, RngStream& rng);

// Scaled model difference (theta0 - thetaQ) / eta.
Vector model_diff(const ModelState& theta0, const ModelState& thetaQ,
                  double eta);

// x * min(1, c / |x|); output norm never exceeds c, direction preserved.
Vector clip(const Vector& x, double c);

// Norm-ball clip factor min(1, c / |x|) as recorded in round diagnostics.
double clip_factor(const Vector& x, double c);

// theta - (eta / rn) * sum(updates); the noiseless benchmark aggregation.
ModelState aggregate_noiseless(const std::vector<Vector>& updates,
                               const ModelState& theta, double eta, Index rn);

// Uniform random subset of {0..n-1} of size r*n (validated integral).
std::vector<Index> sample_active_devices(Index n, double r, RngStream& rng);

// Euclidean projection onto the closed ball of diameter D around `center`;
// identity when D is +infinity.
ModelState project_to_domain(const ModelState& theta, const ModelState& center,
                             double diameter);

}  // namespace airfl
