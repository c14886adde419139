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

// Lattice field containers owned by one rank, the vector-space operations
// the solver needs, seeded initialization and gathering.
//
// Storage follows the site ordering of geometry.hpp; a fermion field keeps
// one parity block followed by its ghost spinors, a gauge field keeps the
// four forward links of every site (site-major) plus backward-face ghosts.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lqs/algebra.hpp"
#include "lqs/comm.hpp"
#include "lqs/flops.hpp"
#include "lqs/geometry.hpp"

namespace lqs {

// Per-rank geometry shared by every field on that rank.
class FieldLayout {
 public:
  // `threads` is the in-rank data-parallel width used by site loops.
  static std::shared_ptr<const FieldLayout> make(const Decomposition& decomp, const Topology& topo,
                                                 int threads = 1);

  const Subdomain& subdomain() const noexcept { return sub_; }
  const Decomposition& decomp() const noexcept { return sub_.decomp; }
  const Topology& topology() const noexcept { return topo_; }
  const Coord4& local() const noexcept { return sub_.decomp.local; }
  std::int64_t volume() const noexcept { return lqs::volume(local()); }
  std::int64_t half_volume() const noexcept { return volume() / 2; }
  int threads() const noexcept { return threads_; }

  const HaloPlan& fermion_plan(Parity p) const noexcept { return fermion_plans_[static_cast<int>(p)]; }
  const HaloPlan& gauge_plan() const noexcept { return gauge_plan_; }

 private:
  FieldLayout() = default;

  Subdomain sub_;
  Topology topo_;
  int threads_ = 1;
  std::array<HaloPlan, 2> fermion_plans_;
  HaloPlan gauge_plan_;
};

using LayoutPtr = std::shared_ptr<const FieldLayout>;

class FermionField {
 public:
  FermionField(LayoutPtr layout, Parity parity);

  Parity parity() const noexcept { return parity_; }
  const FieldLayout& layout() const noexcept { return *layout_; }
  const LayoutPtr& layout_ptr() const noexcept { return layout_; }
  std::int64_t sites() const noexcept { return layout_->half_volume(); }

  std::span<const Spinor> local() const noexcept { return {data_.data(), static_cast<std::size_t>(sites())}; }
  // Any write access invalidates the halo.
  std::span<Spinor> mutable_local() noexcept {
    ++version_;
    return {data_.data(), static_cast<std::size_t>(sites())};
  }
  const Spinor& operator[](std::int64_t i) const noexcept { return data_[static_cast<std::size_t>(i)]; }

  // Local sites followed by ghosts, as indexed by the hopping stencil.
  std::span<const Spinor> extended() const noexcept { return data_; }
  std::span<const Spinor> ghosts() const noexcept {
    return std::span<const Spinor>(data_).subspan(static_cast<std::size_t>(sites()));
  }

  bool halo_fresh() const noexcept { return halo_version_ == version_; }
  std::uint64_t version() const noexcept { return version_; }

  // Same decomposition, rank and parity.
  bool compatible(const FermionField& other) const noexcept;

 private:
  friend void halo_exchange(Communicator& comm, FermionField& field);

  LayoutPtr layout_;
  Parity parity_;
  std::vector<Spinor> data_;
  std::uint64_t version_ = 0;
  std::uint64_t halo_version_ = ~std::uint64_t{0};
};

class GaugeField {
 public:
  explicit GaugeField(LayoutPtr layout);

  const FieldLayout& layout() const noexcept { return *layout_; }
  const LayoutPtr& layout_ptr() const noexcept { return layout_; }

  const ColorMatrix& link(std::int64_t site, int mu) const noexcept {
    return links_[static_cast<std::size_t>(site * kNd + mu)];
  }
  std::span<const ColorMatrix> links() const noexcept { return links_; }
  std::span<ColorMatrix> mutable_links() noexcept {
    halo_fresh_ = false;
    return links_;
  }

  // Backward-face links received from the -mu neighbors, in gauge plan order.
  std::span<const ColorMatrix> ghosts() const noexcept { return ghosts_; }
  bool halo_fresh() const noexcept { return halo_fresh_; }

 private:
  friend void halo_exchange(Communicator& comm, GaugeField& field);

  LayoutPtr layout_;
  std::vector<ColorMatrix> links_;
  std::vector<ColorMatrix> ghosts_;
  bool halo_fresh_ = false;
};

// Refreshes the ghost storage from the owning ranks (collective).
void halo_exchange(Communicator& comm, FermionField& field);
void halo_exchange(Communicator& comm, GaugeField& field);

// ---------------------------------------------------------------------------
// Vector-space operations. All of them throw ShapeMismatch on fields of
// different layouts or parities, and count flops into `flops` if given.

void zero(FermionField& x);
void copy(const FermionField& src, FermionField& dst);
void scale(const Complex& a, FermionField& x, FlopCounter* flops = nullptr);
// y <- a*x + y
void axpy(const Complex& a, const FermionField& x, FermionField& y, FlopCounter* flops = nullptr);
// y <- x + a*y
void xpay(const FermionField& x, const Complex& a, FermionField& y, FlopCounter* flops = nullptr);

// Global sum over ranks of conj(x_i) y_i, reduced deterministically.
Complex dot(Communicator& comm, const FermionField& x, const FermionField& y, FlopCounter* flops = nullptr);
double norm2(Communicator& comm, const FermionField& x, FlopCounter* flops = nullptr);

// ---------------------------------------------------------------------------
// Seeded initialization. Values depend only on (seed, global site), so every
// decomposition of the same lattice produces the same global field.

GaugeField unit_gauge(const LayoutPtr& layout);
GaugeField random_gauge(const LayoutPtr& layout, std::uint64_t seed);
FermionField random_fermion(const LayoutPtr& layout, Parity parity, std::uint64_t seed);

// Global field in single-rank storage order, on rank 0 only.
std::vector<Spinor> gather_field(Communicator& comm, const FermionField& field);
std::vector<ColorMatrix> gather_field(Communicator& comm, const GaugeField& field);

}  // namespace lqs
