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
#include <limits>
#include <string>

#include "airfl/aircomp.hpp"
#include "airfl/fl.hpp"
#include "airfl/types.hpp"

namespace airfl {

enum class Scheme { kVanilla, kClip, kAirflZf, kAirflDp };

// Joint allocation optimizes all rounds against one budget A (requires the
// channel horizon up front); the online fallback gives each round an equal
// share A/T and needs no lookahead.
enum class AllocationMode { kJoint, kEqualPerRound };

// All protocol, channel, privacy and optimizer hyperparameters for one
// experiment. Loaded from a flat key=value file; CLI flags override.
struct SystemConfig {
  Index n = 10;   // devices
  Index m = 20;   // base-station antennas
  Index d = 50;   // model dimension
  int T = 50;     // communication rounds
  int Q = 5;      // local SGD steps
  double r = 1.0; // client sampling rate
  double eta = 0.005;
  double c = 0.0;          // clip threshold; 0 resolves to sqrt(0.012 d)
  double P = 0.002;        // transmit power, Watts
  double sigma2 = 1e-13;   // noise power, Watts
  double delta = 1e-5;
  double eps_tilde = 0.1;  // per-dimension DP target, eps = eps_tilde sqrt(d)
  double D = std::numeric_limits<double>::infinity();  // domain diameter
  TaskKind task = TaskKind::kQuadratic;
  Scheme scheme = Scheme::kAirflDp;
  int trials = 10;
  std::uint64_t seed = 1;
  NoiseConvention complex_noise_convention = NoiseConvention::kHalf;
  Index batch = 10;
  Index samples_per_device = 20;
  double carrier_freq = 2.4e9;  // Hz
  double smoothness_L = 0.0;    // 0 resolves from the task
  AllocationMode allocation_mode = AllocationMode::kJoint;
  double c_delta = 0.0;  // 0 resolves by fixed point / target consistency
  double alpha = 0.0;    // 0 resolves to the conversion-matched order
};

// Parses `key = value` lines (# comments, blank lines allowed) on top of the
// given base config. Unknown keys are configuration errors.
SystemConfig load_config_file(const std::string& path,
                              const SystemConfig& base = SystemConfig());

// Applies a single `key=value` override.
void apply_config_override(SystemConfig& cfg, const std::string& key,
                           const std::string& value);

// Fills derived defaults (clip threshold) and checks invariants: r*n a
// positive integer, positive rates and powers, delta in (0,1), batch within
// the local dataset, and m >= rn for the over-the-air schemes.
void resolve_and_validate(SystemConfig& cfg);

// Number of active devices per round (after validation).
Index active_count(const SystemConfig& cfg);

// Fully resolved key=value dump, suitable for reloading.
std::string dump_config(const SystemConfig& cfg);

std::string to_string(Scheme s);
std::string to_string(TaskKind t);
std::string to_string(NoiseConvention c);
std::string to_string(AllocationMode m);
Scheme scheme_from_string(const std::string& s);
TaskKind task_from_string(const std::string& s);
NoiseConvention convention_from_string(const std::string& s);
AllocationMode allocation_mode_from_string(const std::string& s);

}  // namespace airfl
