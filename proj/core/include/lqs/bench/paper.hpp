// Copyright 2026 The lqscale Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Internal-consistency checks for published strong-scaling tables: every row
// must satisfy overall = cores * per_core / 1000, and the total work
// time * overall rate must be the same on every row of a table.

#include <vector>

#include "lqs/bench/record.hpp"

namespace lqs::bench {

inline constexpr double kRowRateTolerance = 5e-4;   // 0.05 %
inline constexpr double kWorkTolerance = 1e-3;      // 0.1 %

struct RowCheck {
  PaperRow row;
  double derived_gflops = 0.0;   // cores * per_core / 1000
  double rate_rel_error = 0.0;
  double work_gflop = 0.0;       // total_time * overall
  double work_rel_deviation = 0.0;
  bool rate_ok = false;
  bool work_ok = false;
};

struct PaperValidation {
  std::vector<RowCheck> rows;
  double mean_work_gflop = 0.0;
  double max_work_deviation = 0.0;
  bool passed = false;

  std::vector<int> failing_rows() const;  // 0-based
};

// Throws ParseError on an empty table or rows from more than one table.
PaperValidation validate_paper(const std::vector<PaperRow>& rows);

// Throws ConsistencyViolation listing the failing rows.
void require_consistent(const PaperValidation& v);

}  // namespace lqs::bench
