// Copyright 2026 The shadowmm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Self-checks behind `shadowmm check`: quick property suites that a user can
// run against an installed build.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shadowmm {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs every suite; none throws, failures are reported in the results.
std::vector<CheckResult> run_self_checks(std::uint64_t seed);

}  // namespace shadowmm
