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

// The Wilson hopping matrix between checkerboards and the even/odd
// preconditioned operator built from it.
//
//   (D x)(y) = sum_mu [ (1 - g_mu) U_mu(y) x(y+mu) + (1 + g_mu) U_mu(y-mu)^dag x(y-mu) ]
//
// with the Wilson matrix M = 1 - kappa D and, on the even sites,
//
//   Mhat = 1 - kappa^2 D_eo D_oe.
//
// The adjoint stencil swaps the two projectors. Links that cross the global
// boundary of an antiperiodic axis pick up a factor -1. Per output site the
// terms are summed with mu ascending, forward before backward, so the result
// does not depend on the decomposition.

#include <array>
#include <cstdint>
#include <vector>

#include "lqs/comm.hpp"
#include "lqs/field.hpp"
#include "lqs/flops.hpp"

namespace lqs {

struct HoppingParams {
  double kappa = 0.15;
  // +1 periodic, -1 antiperiodic; default antiperiodic in t only.
  std::array<double, kNd> phases{1.0, 1.0, 1.0, -1.0};

  // Validating constructor; throws InvalidParams.
  static HoppingParams make(double kappa, const std::array<double, kNd>& phases);
  static HoppingParams periodic(double kappa) { return make(kappa, {1.0, 1.0, 1.0, 1.0}); }
};

enum class Adjoint : bool { No = false, Yes = true };

// One rank's Wilson operator. Holds the neighbor tables for both output
// parities, scratch fields, and the flop counter of every application.
class WilsonOperator {
 public:
  // Exchanges the gauge halo if it is stale; links are constant afterwards.
  WilsonOperator(Communicator& comm, GaugeField& gauge, const HoppingParams& params);

  // out = D x (or D^dag x); x must have a fresh halo (HaloStale otherwise),
  // out must have the opposite parity (ParityMismatch).
  void apply_hopping(const FermionField& x, FermionField& out, Adjoint adj = Adjoint::No);

  // Refreshes x's halo, then applies the hopping matrix.
  void exchange_and_hop(FermionField& x, FermionField& out, Adjoint adj = Adjoint::No);

  // out = Mhat x, out = Mhat^dag x and out = Mhat^dag Mhat x on even fields.
  void apply_preconditioned(FermionField& x, FermionField& out, Adjoint adj = Adjoint::No);
  void apply_normal(FermionField& x, FermionField& out);

  const HoppingParams& params() const noexcept { return params_; }
  Communicator& comm() noexcept { return *comm_; }
  const LayoutPtr& layout() const noexcept { return layout_; }
  FlopCounter& flops() noexcept { return flops_; }
  const FlopCounter& flops() const noexcept { return flops_; }

  // Analytic flop costs of one application on this rank.
  std::int64_t hopping_flops() const noexcept;
  std::int64_t preconditioned_flops() const noexcept;
  std::int64_t normal_flops() const noexcept;

 private:
  struct StencilEntry {
    std::int32_t fwd_src;   // index into the input's extended array
    std::int32_t fwd_link;  // site index of U_mu(y)
    std::int32_t bwd_src;
    std::int32_t bwd_link;  // site index of U_mu(y-mu), or -1-g for gauge ghost g
    double fwd_phase;
    double bwd_phase;
  };

  void build_tables();

  Communicator* comm_;
  const GaugeField* gauge_;
  HoppingParams params_;
  LayoutPtr layout_;
  // tables_[output parity][site * 4 + mu]
  std::array<std::vector<StencilEntry>, 2> tables_;
  FermionField odd_tmp_;
  FermionField even_tmp_;
  FermionField normal_tmp_;
  FlopCounter flops_;
};

struct FlopRates {
  double mflops_per_rank = 0.0;
  double gflops_overall = 0.0;
};

// mflops_per_rank = flops / (ranks * elapsed * 1e6); the overall rate is
// derived from it as ranks * per_rank / 1000. Throws ZeroElapsed.
FlopRates flop_report(std::int64_t flops, double elapsed_s, int ranks);
FlopRates flop_report(double flops, double elapsed_s, int ranks);

}  // namespace lqs
