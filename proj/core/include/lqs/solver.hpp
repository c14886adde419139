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

// Conjugate gradient on the normal equations of the even/odd preconditioned
// Wilson operator: solves Mhat^dag Mhat x = Mhat^dag b from x = 0, which
// gives Mhat x = b.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lqs/field.hpp"
#include "lqs/hopping.hpp"

namespace lqs {

struct CGConfig {
  double tol = 1e-8;       // relative residual target
  int max_iter = 10000;
  // The true residual is recomputed this often to watch recursive drift.
  int true_residual_every = 100;
  // Called after each iteration with the iteration number and iterate.
  std::function<void(int, const FermionField&)> on_iterate;

  void validate() const;
};

struct CGResult {
  FermionField solution;
  int iterations = 0;
  // Relative residuals |r_k| / |Mhat^dag b|; entry 0 is 1, the final entry is
  // the recomputed true residual, and the size is iterations + 1.
  std::vector<double> residual_history;
  bool converged = false;
  // Set when a true-residual check disagreed with the recursive one by more
  // than 10 * tol.
  bool drift_flagged = false;
  double max_drift = 0.0;
  // Summed over all ranks.
  std::int64_t flops = 0;
  double elapsed_s = 0.0;
};

// Collective over every rank of the operator's communicator. Throws ZeroRhs
// for b = 0 and BreakdownPAp if p^dag A p <= 0. Not converging within
// max_iter returns the last iterate with converged = false.
CGResult cg_solve(WilsonOperator& op, const FermionField& b, const CGConfig& cfg);

// |Mhat^dag b - Mhat^dag Mhat x| / |Mhat^dag b|. Throws ZeroRhs.
double true_residual(WilsonOperator& op, const FermionField& x, const FermionField& b);

}  // namespace lqs
