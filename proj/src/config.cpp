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
#include "airfl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace airfl {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  if (value == "inf" || value == "+inf" || value == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + value + "' for key '" + key +
                      "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: cannot parse '" + value + "' for key '" + key +
                      "'");
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kVanilla: return "vanilla";
    case Scheme::kClip: return "clip";
    case Scheme::kAirflZf: return "airfl-zf";
    case Scheme::kAirflDp: return "airfl-dp";
  }
  return "?";
}

std::string to_string(TaskKind t) {
  switch (t) {
    case TaskKind::kQuadratic: return "quadratic";
    case TaskKind::kLogistic: return "logistic";
    case TaskKind::kSmallMlp: return "small-mlp";
  }
  return "?";
}

std::string to_string(NoiseConvention c) {
  return c == NoiseConvention::kHalf ? "half" : "full";
}

std::string to_string(AllocationMode m) {
  return m == AllocationMode::kJoint ? "joint" : "equal-per-round";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "vanilla") return Scheme::kVanilla;
  if (s == "clip") return Scheme::kClip;
  if (s == "airfl-zf") return Scheme::kAirflZf;
  if (s == "airfl-dp") return Scheme::kAirflDp;
  throw ConfigError("config: unknown scheme '" + s + "'");
}

TaskKind task_from_string(const std::string& s) {
  if (s == "quadratic") return TaskKind::kQuadratic;
  if (s == "logistic") return TaskKind::kLogistic;
  if (s == "small-mlp" || s == "mlp") return TaskKind::kSmallMlp;
  throw ConfigError("config: unknown task '" + s + "'");
}

NoiseConvention convention_from_string(const std::string& s) {
  if (s == "half") return NoiseConvention::kHalf;
  if (s == "full") return NoiseConvention::kFull;
  throw ConfigError("config: unknown noise convention '" + s + "'");
}

AllocationMode allocation_mode_from_string(const std::string& s) {
  if (s == "joint") return AllocationMode::kJoint;
  if (s == "equal-per-round" || s == "equal") return AllocationMode::kEqualPerRound;
  throw ConfigError("config: unknown allocation mode '" + s + "'");
}

void apply_config_override(SystemConfig& cfg, const std::string& raw_key,
                           const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "n") cfg.n = static_cast<Index>(parse_int(key, value));
  else if (key == "m") cfg.m = static_cast<Index>(parse_int(key, value));
  else if (key == "d") cfg.d = static_cast<Index>(parse_int(key, value));
  else if (key == "T") cfg.T = static_cast<int>(parse_int(key, value));
  else if (key == "Q") cfg.Q = static_cast<int>(parse_int(key, value));
  else if (key == "r") cfg.r = parse_double(key, value);
  else if (key == "eta") cfg.eta = parse_double(key, value);
  else if (key == "c") cfg.c = parse_double(key, value);
  else if (key == "P") cfg.P = parse_double(key, value);
  else if (key == "sigma2") cfg.sigma2 = parse_double(key, value);
  else if (key == "delta") cfg.delta = parse_double(key, value);
  else if (key == "eps_tilde") cfg.eps_tilde = parse_double(key, value);
  else if (key == "D") cfg.D = parse_double(key, value);
  else if (key == "task") cfg.task = task_from_string(value);
  else if (key == "scheme") cfg.scheme = scheme_from_string(value);
  else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "complex_noise_convention")
    cfg.complex_noise_convention = convention_from_string(value);
  else if (key == "batch") cfg.batch = static_cast<Index>(parse_int(key, value));
  else if (key == "samples_per_device")
    cfg.samples_per_device = static_cast<Index>(parse_int(key, value));
  else if (key == "carrier_freq") cfg.carrier_freq = parse_double(key, value);
  else if (key == "smoothness_L") cfg.smoothness_L = parse_double(key, value);
  else if (key == "allocation_mode")
    cfg.allocation_mode = allocation_mode_from_string(value);
  else if (key == "c_delta") cfg.c_delta = parse_double(key, value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else throw ConfigError("config: unknown key '" + key + "'");
}

SystemConfig load_config_file(const std::string& path,
                              const SystemConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  SystemConfig cfg = base;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " of '" + path + "' is not key = value");
    apply_config_override(cfg, stripped.substr(0, eq), stripped.substr(eq + 1));
  }
  return cfg;
}

Index active_count(const SystemConfig& cfg) {
  const double exact = cfg.r * static_cast<double>(cfg.n);
  return static_cast<Index>(std::llround(exact));
}

void resolve_and_validate(SystemConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("config: n must be >= 1");
  if (cfg.m < 1) throw ConfigError("config: m must be >= 1");
  if (cfg.d < 1) throw ConfigError("config: d must be >= 1");
  if (cfg.T < 1) throw ConfigError("config: T must be >= 1");
  if (cfg.Q < 1) throw ConfigError("config: Q must be >= 1");
  if (cfg.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (!(cfg.r > 0.0 && cfg.r <= 1.0))
    throw ConfigError("config: r must lie in (0, 1]");
  const double exact_rn = cfg.r * static_cast<double>(cfg.n);
  const Index rn = active_count(cfg);
  if (std::abs(exact_rn - static_cast<double>(rn)) > 1e-9 || rn < 1)
    throw ConfigError("config: r*n must be a positive integer");
  if (cfg.eta <= 0.0) throw ConfigError("config: eta must be > 0");
  if (cfg.c == 0.0) cfg.c = std::sqrt(0.012 * static_cast<double>(cfg.d));
  if (cfg.c <= 0.0) throw ConfigError("config: c must be > 0");
  if (cfg.P <= 0.0) throw ConfigError("config: P must be > 0");
  // sigma2 = 0 is allowed for the noiseless benchmark equivalences; the
  // privacy ledger then reports +inf.
  if (cfg.sigma2 < 0.0) throw ConfigError("config: sigma2 must be >= 0");
  if (cfg.scheme == Scheme::kAirflDp && cfg.sigma2 == 0.0)
    throw ConfigError("config: airfl-dp needs sigma2 > 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
    throw ConfigError("config: delta must lie in (0, 1)");
  if (cfg.D <= 0.0) throw ConfigError("config: D must be > 0 (or inf)");
  if (cfg.samples_per_device < 1)
    throw ConfigError("config: samples_per_device must be >= 1");
  if (cfg.batch < 1 || cfg.batch > cfg.samples_per_device)
    throw ConfigError("config: batch must lie in [1, samples_per_device]");
  if (cfg.carrier_freq <= 0.0)
    throw ConfigError("config: carrier_freq must be > 0");
  if (cfg.smoothness_L < 0.0)
    throw ConfigError("config: smoothness_L must be >= 0");
  if (cfg.c_delta < 0.0) throw ConfigError("config: c_delta must be >= 0");
  if (cfg.alpha != 0.0 && cfg.alpha <= 1.0)
    throw ConfigError("config: alpha must be > 1 (or 0 for automatic)");
  const bool over_the_air =
      cfg.scheme == Scheme::kAirflZf || cfg.scheme == Scheme::kAirflDp;
  if (over_the_air && cfg.m < rn)
    throw ConfigError(
        "config: over-the-air schemes need m >= r*n for the zero-forcing "
        "combiner");
  if (cfg.scheme == Scheme::kAirflDp && cfg.eps_tilde <= 0.0)
    throw ConfigError("config: airfl-dp needs eps_tilde > 0");
}

std::string dump_config(const SystemConfig& cfg) {
  std::ostringstream out;
  out << "n = " << cfg.n << "\n"
      << "m = " << cfg.m << "\n"
      << "d = " << cfg.d << "\n"
      << "T = " << cfg.T << "\n"
      << "Q = " << cfg.Q << "\n"
      << "r = " << format_double(cfg.r) << "\n"
      << "eta = " << format_double(cfg.eta) << "\n"
      << "c = " << format_double(cfg.c) << "\n"
      << "P = " << format_double(cfg.P) << "\n"
      << "sigma2 = " << format_double(cfg.sigma2) << "\n"
      << "delta = " << format_double(cfg.delta) << "\n"
      << "eps_tilde = " << format_double(cfg.eps_tilde) << "\n"
      << "D = " << format_double(cfg.D) << "\n"
      << "task = " << to_string(cfg.task) << "\n"
      << "scheme = " << to_string(cfg.scheme) << "\n"
      << "trials = " << cfg.trials << "\n"
      << "seed = " << cfg.seed << "\n"
      << "complex_noise_convention = " << to_string(cfg.complex_noise_convention)
      << "\n"
      << "batch = " << cfg.batch << "\n"
      << "samples_per_device = " << cfg.samples_per_device << "\n"
      << "carrier_freq = " << format_double(cfg.carrier_freq) << "\n"
      << "smoothness_L = " << format_double(cfg.smoothness_L) << "\n"
      << "allocation_mode = " << to_string(cfg.allocation_mode) << "\n"
      << "c_delta = " << format_double(cfg.c_delta) << "\n"
      << "alpha = " << format_double(cfg.alpha) << "\n";
  return out.str();
}

}  // namespace airfl
