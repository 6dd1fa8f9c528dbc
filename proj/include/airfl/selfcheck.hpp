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

#include <string>
#include <vector>

namespace airfl {

// Result of one end-to-end verification check.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// The full verification battery: closed-form exactness, oracle
// cross-checks, Monte Carlo moment matching, trend reproduction and
// byte-level determinism. `scratch_dir` receives temporary CSV output.
std::vector<CheckResult> run_acceptance_checks(const std::string& scratch_dir);

// Prints one pass/fail line per check; returns true iff all passed.
bool report_checks(const std::vector<CheckResult>& results);

}  // namespace airfl
