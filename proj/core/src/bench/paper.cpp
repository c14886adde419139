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

#include "lqs/bench/paper.hpp"

#include <algorithm>
#include <cmath>

#include "lqs/error.hpp"

namespace lqs::bench {

std::vector<int> PaperValidation::failing_rows() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].rate_ok || !rows[i].work_ok) out.push_back(static_cast<int>(i));
  }
  return out;
}

PaperValidation validate_paper(const std::vector<PaperRow>& rows) {
  if (rows.empty()) throw Error(Errc::ParseError, "table has no rows");
  for (const PaperRow& r : rows) {
    if (r.table != rows.front().table) throw Error(Errc::ParseError, "rows from more than one table");
  }
  PaperValidation v;
  double sum = 0.0;
  for (const PaperRow& r : rows) {
    RowCheck c;
    c.row = r;
    c.derived_gflops = static_cast<double>(r.cores) * r.mflops_per_core / 1000.0;
    c.rate_rel_error = std::abs(c.derived_gflops - r.gflops_overall) / r.gflops_overall;
    c.rate_ok = c.rate_rel_error <= kRowRateTolerance;
    c.work_gflop = r.total_time_s * r.gflops_overall;
    sum += c.work_gflop;
    v.rows.push_back(c);
  }
  v.mean_work_gflop = sum / static_cast<double>(rows.size());
  for (RowCheck& c : v.rows) {
    c.work_rel_deviation = std::abs(c.work_gflop - v.mean_work_gflop) / v.mean_work_gflop;
    c.work_ok = c.work_rel_deviation <= kWorkTolerance;
    v.max_work_deviation = std::max(v.max_work_deviation, c.work_rel_deviation);
  }
  v.passed = v.failing_rows().empty();
  return v;
}

void require_consistent(const PaperValidation& v) {
  if (v.passed) return;
  std::string msg = "inconsistent rows:";
  for (int i : v.failing_rows()) msg += " " + std::to_string(i + 1);
  throw Error(Errc::ConsistencyViolation, msg);
}

}  // namespace lqs::bench
