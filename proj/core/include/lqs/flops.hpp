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

#include <cstdint>

namespace lqs {

// Flop convention, echoed in every report:
//   Wilson hopping term     1320 per output site
//   complex axpy / xpay        8 per complex element
//   complex dot                8 per complex element
//   norm2                      4 per complex element
inline constexpr std::int64_t kFlopsPerHoppingSite = 1320;
inline constexpr std::int64_t kFlopsAxpyPerComplex = 8;
inline constexpr std::int64_t kFlopsDotPerComplex = 8;
inline constexpr std::int64_t kFlopsNorm2PerComplex = 4;
inline constexpr std::int64_t kComplexPerSpinor = 12;

constexpr std::int64_t flops_per_hopping_site() noexcept { return kFlopsPerHoppingSite; }

// Monotone per-rank accumulator; totals over ranks are plain sums.
class FlopCounter {
 public:
  void add(std::int64_t flops) noexcept {
    if (flops > 0) total_ += flops;
  }
  std::int64_t total() const noexcept { return total_; }

 private:
  std::int64_t total_ = 0;
};

}  // namespace lqs
