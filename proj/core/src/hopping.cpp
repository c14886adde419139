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

#include "lqs/hopping.hpp"

#include <cmath>

#include "lqs/error.hpp"
#include "lqs/gamma.hpp"

namespace lqs {

HoppingParams HoppingParams::make(double kappa, const std::array<double, kNd>& phases) {
  if (!std::isfinite(kappa)) throw Error(Errc::InvalidParams, "kappa must be finite");
  for (double p : phases) {
    if (p != 1.0 && p != -1.0) throw Error(Errc::InvalidParams, "boundary phases must be +1 or -1");
  }
  return HoppingParams{kappa, phases};
}

namespace {

inline ColorVector add(const ColorVector& a, const ColorVector& b) noexcept {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline ColorVector times(Unit u, const ColorVector& v) noexcept {
  return {lqs::times(u, v[0]), lqs::times(u, v[1]), lqs::times(u, v[2])};
}

// acc += (1 + sigma g_mu) W psi, with W = U or U^dag, using that the
// projector has rank two: rows 2 and 3 are unit multiples of rows 0 and 1.
inline void accumulate(Spinor& acc, const ColorMatrix& u, bool use_adjoint, const Spinor& psi, int mu,
                       bool sigma_plus, double phase) noexcept {
  const SparseGamma& g = kGamma[mu];
  auto signed_factor = [&](int s) { return sigma_plus ? g.factor[s] : negate(g.factor[s]); };

  const ColorVector h0 = add(psi[0], times(signed_factor(0), psi[g.column[0]]));
  const ColorVector h1 = add(psi[1], times(signed_factor(1), psi[g.column[1]]));
  ColorVector chi0 = use_adjoint ? adjoint_matvec(u, h0) : matvec(u, h0);
  ColorVector chi1 = use_adjoint ? adjoint_matvec(u, h1) : matvec(u, h1);
  if (phase < 0.0) {
    for (int c = 0; c < kNc; ++c) {
      chi0[c] = -chi0[c];
      chi1[c] = -chi1[c];
    }
  }
  const ColorVector* chi[2] = {&chi0, &chi1};
  acc[0] = add(acc[0], chi0);
  acc[1] = add(acc[1], chi1);
  acc[2] = add(acc[2], times(signed_factor(2), *chi[g.column[2]]));
  acc[3] = add(acc[3], times(signed_factor(3), *chi[g.column[3]]));
}

}  // namespace

WilsonOperator::WilsonOperator(Communicator& comm, GaugeField& gauge, const HoppingParams& params)
    : comm_(&comm),
      gauge_(&gauge),
      params_(HoppingParams::make(params.kappa, params.phases)),
      layout_(gauge.layout_ptr()),
      odd_tmp_(layout_, Parity::Odd),
      even_tmp_(layout_, Parity::Even),
      normal_tmp_(layout_, Parity::Even) {
  if (layout_->topology().rank != comm.rank()) {
    throw Error(Errc::ShapeMismatch, "gauge field belongs to another rank");
  }
  if (!gauge.halo_fresh()) halo_exchange(comm, gauge);
  build_tables();
}

void WilsonOperator::build_tables() {
  const Subdomain& sub = layout_->subdomain();
  const Coord4& L = sub.decomp.local;
  const Coord4& G = sub.decomp.global.dims;
  const std::int64_t half = layout_->half_volume();
  const HaloPlan& gauge_plan = layout_->gauge_plan();

  for (Parity out_parity : {Parity::Even, Parity::Odd}) {
    const Parity in_parity = opposite(out_parity);
    const HaloPlan& plan = layout_->fermion_plan(in_parity);
    auto& table = tables_[static_cast<int>(out_parity)];
    table.resize(static_cast<std::size_t>(half * kNd));
    const std::int64_t offset = out_parity == Parity::Odd ? half : 0;
    for (std::int64_t i = 0; i < half; ++i) {
      const Coord4 y = index_to_site(i + offset, L);
      const Coord4 gy = sub.to_global(y);
      const auto self = static_cast<std::int32_t>(site_index(y, L));
      for (int mu = 0; mu < kNd; ++mu) {
        StencilEntry e{};
        const NeighborSite fwd = neighbor(sub.decomp, y, mu, Sign::Plus);
        e.fwd_src = static_cast<std::int32_t>(
            fwd.crosses_boundary ? half + fermion_ghost_slot(fwd.site, L, mu, Sign::Plus, plan)
                                 : checkerboard_index(fwd.site, L));
        e.fwd_link = self;
        e.fwd_phase = gy[mu] == G[mu] - 1 ? params_.phases[mu] : 1.0;

        const NeighborSite bwd = neighbor(sub.decomp, y, mu, Sign::Minus);
        if (bwd.crosses_boundary) {
          e.bwd_src = static_cast<std::int32_t>(half + fermion_ghost_slot(bwd.site, L, mu, Sign::Minus, plan));
          const std::int64_t g = gauge_plan.messages[static_cast<std::size_t>(mu)].ghost_offset +
                                 face_index(bwd.site, L, mu);
          e.bwd_link = static_cast<std::int32_t>(-1 - g);
        } else {
          e.bwd_src = static_cast<std::int32_t>(checkerboard_index(bwd.site, L));
          e.bwd_link = static_cast<std::int32_t>(site_index(bwd.site, L));
        }
        e.bwd_phase = gy[mu] == 0 ? params_.phases[mu] : 1.0;
        table[static_cast<std::size_t>(i * kNd + mu)] = e;
      }
    }
  }
}

void WilsonOperator::apply_hopping(const FermionField& x, FermionField& out, Adjoint adj) {
  if (x.layout_ptr() != layout_ || out.layout_ptr() != layout_) {
    throw Error(Errc::ShapeMismatch, "field layout differs from the operator's");
  }
  if (out.parity() != opposite(x.parity())) {
    throw Error(Errc::ParityMismatch, "hopping maps " + std::string(to_string(x.parity())) + " to " +
                                          std::string(to_string(opposite(x.parity()))) + " sites");
  }
  if (!x.halo_fresh()) {
    throw Error(Errc::HaloStale, "input halo not exchanged since the last write");
  }
  const auto& table = tables_[static_cast<int>(out.parity())];
  const auto in = x.extended();
  const auto links = gauge_->links();
  const auto ghost_links = gauge_->ghosts();
  auto result = out.mutable_local();
  const std::int64_t n = out.sites();
  // Forward term uses (1 - g) and backward (1 + g); the adjoint swaps them.
  const bool fwd_plus = adj == Adjoint::Yes;
  const int threads = layout_->threads();

#pragma omp parallel for num_threads(threads) if (threads > 1) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    Spinor acc{};
    for (int mu = 0; mu < kNd; ++mu) {
      const StencilEntry& e = table[static_cast<std::size_t>(i * kNd + mu)];
      const ColorMatrix& uf = links[static_cast<std::size_t>(e.fwd_link) * kNd + mu];
      accumulate(acc, uf, false, in[static_cast<std::size_t>(e.fwd_src)], mu, fwd_plus, e.fwd_phase);
      const ColorMatrix& ub = e.bwd_link >= 0 ? links[static_cast<std::size_t>(e.bwd_link) * kNd + mu]
                                              : ghost_links[static_cast<std::size_t>(-1 - e.bwd_link)];
      accumulate(acc, ub, true, in[static_cast<std::size_t>(e.bwd_src)], mu, !fwd_plus, e.bwd_phase);
    }
    result[static_cast<std::size_t>(i)] = acc;
  }
  flops_.add(hopping_flops());
}

void WilsonOperator::exchange_and_hop(FermionField& x, FermionField& out, Adjoint adj) {
  halo_exchange(*comm_, x);
  apply_hopping(x, out, adj);
}

void WilsonOperator::apply_preconditioned(FermionField& x, FermionField& out, Adjoint adj) {
  if (x.parity() != Parity::Even || out.parity() != Parity::Even) {
    throw Error(Errc::ParityMismatch, "the preconditioned operator acts on even fields");
  }
  exchange_and_hop(x, odd_tmp_, adj);
  exchange_and_hop(odd_tmp_, even_tmp_, adj);
  copy(x, out);
  axpy(Complex(-params_.kappa * params_.kappa, 0.0), even_tmp_, out, &flops_);
}

void WilsonOperator::apply_normal(FermionField& x, FermionField& out) {
  apply_preconditioned(x, normal_tmp_, Adjoint::No);
  apply_preconditioned(normal_tmp_, out, Adjoint::Yes);
}

std::int64_t WilsonOperator::hopping_flops() const noexcept {
  return kFlopsPerHoppingSite * layout_->half_volume();
}

std::int64_t WilsonOperator::preconditioned_flops() const noexcept {
  return 2 * hopping_flops() + kFlopsAxpyPerComplex * kComplexPerSpinor * layout_->half_volume();
}

std::int64_t WilsonOperator::normal_flops() const noexcept { return 2 * preconditioned_flops(); }

FlopRates flop_report(double flops, double elapsed_s, int ranks) {
  if (!(elapsed_s > 0.0)) throw Error(Errc::ZeroElapsed, "elapsed time must be positive");
  if (ranks <= 0) throw Error(Errc::InvalidParams, "rank count must be positive");
  FlopRates r;
  r.mflops_per_rank = flops / (static_cast<double>(ranks) * elapsed_s * 1e6);
  r.gflops_overall = static_cast<double>(ranks) * r.mflops_per_rank / 1000.0;
  return r;
}

FlopRates flop_report(std::int64_t flops, double elapsed_s, int ranks) {
  return flop_report(static_cast<double>(flops), elapsed_s, ranks);
}

}  // namespace lqs
