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
#include "airfl/fl.hpp"

#include <cmath>
#include <cstdlib>

namespace airfl {
namespace {

// One-hidden-layer tanh network with kMlpInputDim inputs. theta packs
// [W1 (h x p), b1 (h), w2 (h), b2 (1)]; entries past the packed block are
// inert so any requested model dimension is representable.
constexpr Index kMlpInputDim = 3;

struct MlpShape {
  Index hidden = 0;
  Index used = 0;
};

MlpShape mlp_shape(Index dim) {
  MlpShape shape;
  shape.hidden = std::max<Index>(1, (dim - 1) / (kMlpInputDim + 2));
  shape.used = shape.hidden * (kMlpInputDim + 2) + 1;
  if (shape.used > dim)
    throw ParameterError("small-mlp task needs dimension >= 6");
  return shape;
}

double mlp_forward(const Vector& theta, const Vector& x, Vector* hidden_out) {
  const MlpShape shape = mlp_shape(theta.size());
  const Index h = shape.hidden;
  const Index p = kMlpInputDim;
  Vector act(h);
  for (Index j = 0; j < h; ++j) {
    double pre = theta[h * p + j];  // b1
    for (Index k = 0; k < p; ++k) pre += theta[j * p + k] * x[k];
    act[j] = std::tanh(pre);
  }
  double out = theta[h * p + 2 * h];  // b2
  for (Index j = 0; j < h; ++j) out += theta[h * p + h + j] * act[j];
  if (hidden_out != nullptr) *hidden_out = act;
  return out;
}

}  // namespace

double sample_loss(TaskKind task, const Vector& theta, const Sample& s) {
  switch (task) {
    case TaskKind::kQuadratic:
      return 0.5 * (theta - s.x).squaredNorm();
    case TaskKind::kLogistic: {
      const double margin = s.y * s.x.dot(theta);
      // log(1 + exp(-m)) evaluated stably on both tails
      return margin > 0 ? std::log1p(std::exp(-margin))
                        : -margin + std::log1p(std::exp(margin));
    }
    case TaskKind::kSmallMlp: {
      const double out = mlp_forward(theta, s.x, nullptr);
      const double err = out - s.y;
      return 0.5 * err * err;
    }
  }
  throw ParameterError("unknown task kind");
}

Vector sample_grad(TaskKind task, const Vector& theta, const Sample& s) {
  switch (task) {
    case TaskKind::kQuadratic:
      return theta - s.x;
    case TaskKind::kLogistic: {
      const double margin = s.y * s.x.dot(theta);
      const double sigmoid = 1.0 / (1.0 + std::exp(margin));
      return (-s.y * sigmoid) * s.x;
    }
    case TaskKind::kSmallMlp: {
      const MlpShape shape = mlp_shape(theta.size());
      const Index h = shape.hidden;
      const Index p = kMlpInputDim;
      Vector act;
      const double err = mlp_forward(theta, s.x, &act) - s.y;
      Vector grad = Vector::Zero(theta.size());
      grad[h * p + 2 * h] = err;  // b2
      for (Index j = 0; j < h; ++j) {
        const double w2j = theta[h * p + h + j];
        grad[h * p + h + j] = err * act[j];                   // w2
        const double back = err * w2j * (1.0 - act[j] * act[j]);
        grad[h * p + j] = back;                               // b1
        for (Index k = 0; k < p; ++k) grad[j * p + k] = back * s.x[k];
      }
      return grad;
    }
  }
  throw ParameterError("unknown task kind");
}

double dataset_loss(const Vector& theta, const LocalDataset& data) {
  if (data.samples.empty()) throw ParameterError("empty local dataset");
  double total = 0.0;
  for (const Sample& s : data.samples) total += sample_loss(data.task, theta, s);
  return total / static_cast<double>(data.samples.size());
}

Vector dataset_grad(const Vector& theta, const LocalDataset& data) {
  if (data.samples.empty()) throw ParameterError("empty local dataset");
  Vector grad = Vector::Zero(theta.size());
  for (const Sample& s : data.samples) grad += sample_grad(data.task, theta, s);
  return grad / static_cast<double>(data.samples.size());
}

double global_loss(const Vector& theta, const std::vector<LocalDataset>& data) {
  if (data.empty()) throw ParameterError("empty federation");
  double total = 0.0;
  for (const LocalDataset& d : data) total += dataset_loss(theta, d);
  return total / static_cast<double>(data.size());
}

Vector global_grad(const Vector& theta, const std::vector<LocalDataset>& data) {
  if (data.empty()) throw ParameterError("empty federation");
  Vector grad = Vector::Zero(theta.size());
  for (const LocalDataset& d : data) grad += dataset_grad(theta, d);
  return grad / static_cast<double>(data.size());
}

std::vector<LocalDataset> make_synthetic_task(TaskKind kind, Index dim,
                                              Index n_devices,
                                              Index samples_per_device,
                                              const RngStream& rng) {
  if (dim < 1) throw ParameterError("make_synthetic_task: dim must be >= 1");
  if (n_devices < 1)
    throw ParameterError("make_synthetic_task: need >= 1 device");
  if (samples_per_device < 1)
    throw ParameterError("make_synthetic_task: need >= 1 sample per device");

  RngStream task_rng = rng.child(stream::kTask);

  // Task anchors shared by every device (i.i.d. partition).
  Vector anchor;  // quadratic center / logistic separating direction
  Vector teacher;
  if (kind == TaskKind::kQuadratic || kind == TaskKind::kLogistic) {
    anchor.resize(dim);
    for (Index i = 0; i < dim; ++i) anchor[i] = task_rng.normal();
    anchor.normalize();
  } else {
    const MlpShape shape = mlp_shape(dim);
    teacher = Vector::Zero(dim);
    for (Index i = 0; i < shape.used; ++i) teacher[i] = task_rng.normal();
  }

  std::vector<LocalDataset> out(static_cast<std::size_t>(n_devices));
  for (Index dev = 0; dev < n_devices; ++dev) {
    LocalDataset& ds = out[static_cast<std::size_t>(dev)];
    ds.device = dev;
    ds.task = kind;
    RngStream dev_rng =
        task_rng.child(stream::kSampling, static_cast<std::uint64_t>(dev));
    ds.samples.reserve(static_cast<std::size_t>(samples_per_device));
    for (Index k = 0; k < samples_per_device; ++k) {
      Sample s;
      switch (kind) {
        case TaskKind::kQuadratic: {
          s.x.resize(dim);
          for (Index i = 0; i < dim; ++i)
            s.x[i] = anchor[i] + 0.1 * dev_rng.normal();
          break;
        }
        case TaskKind::kLogistic: {
          s.y = dev_rng.uniform() < 0.5 ? -1.0 : 1.0;
          s.x.resize(dim);
          for (Index i = 0; i < dim; ++i)
            s.x[i] = 1.5 * s.y * anchor[i] + dev_rng.normal();
          break;
        }
        case TaskKind::kSmallMlp: {
          s.x.resize(kMlpInputDim);
          for (Index i = 0; i < kMlpInputDim; ++i) s.x[i] = dev_rng.normal();
          s.y = mlp_forward(teacher, s.x, nullptr) + 0.05 * dev_rng.normal();
          break;
        }
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return out;
}

Vector quadratic_optimum(const std::vector<LocalDataset>& data) {
  if (data.empty()) throw ParameterError("empty federation");
  Vector mean = Vector::Zero(data.front().samples.front().x.size());
  for (const LocalDataset& d : data) {
    Vector device_mean = Vector::Zero(mean.size());
    for (const Sample& s : d.samples) device_mean += s.x;
    mean += device_mean / static_cast<double>(d.samples.size());
  }
  return mean / static_cast<double>(data.size());
}

double quadratic_f_star(const std::vector<LocalDataset>& data) {
  return global_loss(quadratic_optimum(data), data);
}

double task_smoothness(const std::vector<LocalDataset>& data, double fallback) {
  if (data.empty()) throw ParameterError("empty federation");
  switch (data.front().task) {
    case TaskKind::kQuadratic:
      return 1.0;
    case TaskKind::kLogistic: {
      double max_sq = 0.0;
      for (const LocalDataset& d : data)
        for (const Sample& s : d.samples)
          max_sq = std::max(max_sq, s.x.squaredNorm());
      return 0.25 * max_sq;
    }
    case TaskKind::kSmallMlp:
      return fallback;
  }
  throw ParameterError("unknown task kind");
}

ModelState local_sgd(const ModelState& theta0, const LocalDataset& data,
                     int steps, double eta, Index batch, RngStream& rng) {
  if (data.samples.empty()) throw ParameterError("local_sgd: empty dataset");
  if (steps < 1) throw ParameterError("local_sgd: need >= 1 step");
  if (eta <= 0.0) throw ParameterError("local_sgd: eta must be > 0");
  const auto n_samples = static_cast<Index>(data.samples.size());
  if (batch < 1 || batch > n_samples)
    throw ParameterError("local_sgd: batch size out of range");

  ModelState theta = theta0;
  for (int q = 0; q < steps; ++q) {
    const std::vector<Index> picks =
        rng.sample_without_replacement(n_samples, batch);
    Vector grad = Vector::Zero(theta.size());
    for (Index idx : picks)
      grad += sample_grad(data.task, theta,
                          data.samples[static_cast<std::size_t>(idx)]);
    theta -= (eta / static_cast<double>(batch)) * grad;
  }
  return theta;
}

Vector model_diff(const ModelState& theta0, const ModelState& thetaQ,
                  double eta) {
  if (theta0.size() != thetaQ.size())
    throw ParameterError("model_diff: dimension mismatch");
  if (eta <= 0.0) throw ParameterError("model_diff: eta must be > 0");
  return (theta0 - thetaQ) / eta;
}

Vector clip(const Vector& x, double c) {
  if (c <= 0.0) throw ParameterError("clip: threshold must be > 0");
  const double norm = x.norm();
  if (norm <= c) return x;
  return x * (c / norm);
}

double clip_factor(const Vector& x, double c) {
  if (c <= 0.0) throw ParameterError("clip_factor: threshold must be > 0");
  const double norm = x.norm();
  return norm <= c ? 1.0 : c / norm;
}

ModelState aggregate_noiseless(const std::vector<Vector>& updates,
                               const ModelState& theta, double eta, Index rn) {
  if (updates.empty()) throw ParameterError("aggregate_noiseless: no updates");
  if (static_cast<Index>(updates.size()) != rn)
    throw ParameterError("aggregate_noiseless: update count != rn");
  Vector sum = Vector::Zero(theta.size());
  for (const Vector& u : updates) {
    if (u.size() != theta.size())
      throw ParameterError("aggregate_noiseless: dimension mismatch");
    sum += u;
  }
  return theta - (eta / static_cast<double>(rn)) * sum;
}

std::vector<Index> sample_active_devices(Index n, double r, RngStream& rng) {
  if (n < 1) throw ConfigError("sample_active_devices: need >= 1 device");
  if (r <= 0.0 || r > 1.0)
    throw ConfigError("sample_active_devices: r must be in (0, 1]");
  const double exact = r * static_cast<double>(n);
  const auto rn = static_cast<Index>(std::llround(exact));
  if (std::abs(exact - static_cast<double>(rn)) > 1e-9 || rn < 1)
    throw ConfigError("sample_active_devices: r*n is not a positive integer");
  if (rn == n) {
    std::vector<Index> all(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    return all;
  }
  return rng.sample_without_replacement(n, rn);
}

ModelState project_to_domain(const ModelState& theta, const ModelState& center,
                             double diameter) {
  if (!std::isfinite(diameter)) return theta;
  if (diameter < 0.0) throw ParameterError("project_to_domain: diameter < 0");
  const double radius = diameter / 2.0;
  const Vector offset = theta - center;
  const double norm = offset.norm();
  if (norm <= radius) return theta;
  if (norm == 0.0) return center;
  return center + offset * (radius / norm);
}

}  // namespace airfl
