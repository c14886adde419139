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

#include "lqs/gamma.hpp"

namespace lqs {

SpinMatrix gamma_matrix(int mu) noexcept {
  SpinMatrix g{};
  const SparseGamma& sparse = kGamma[mu];
  for (int s = 0; s < kNs; ++s) g[s][sparse.column[s]] = times(sparse.factor[s], Complex(1.0, 0.0));
  return g;
}

SpinMatrix spin_identity() noexcept {
  SpinMatrix m{};
  for (int s = 0; s < kNs; ++s) m[s][s] = 1.0;
  return m;
}

}  // namespace lqs
