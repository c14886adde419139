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

#include "lqs/field.hpp"

#include <array>

#include "lqs/error.hpp"

namespace lqs {

namespace {

constexpr std::uint64_t kGaugeSalt = 0x6761756765ULL;    // "gauge"
constexpr std::uint64_t kFermionSalt = 0x6665726dULL;    // "ferm"

void require_compatible(const FermionField& a, const FermionField& b, const char* op) {
  if (!a.compatible(b)) {
    throw Error(Errc::ShapeMismatch, std::string(op) + ": fields differ in decomposition, rank or parity");
  }
}

std::int64_t complex_count(const FermionField& x) { return x.sites() * kComplexPerSpinor; }

void count(FlopCounter* flops, std::int64_t n) {
  if (flops) flops->add(n);
}

}  // namespace

std::shared_ptr<const FieldLayout> FieldLayout::make(const Decomposition& decomp, const Topology& topo,
                                                     int threads) {
  if (!(topo.grid == decomp.grid)) {
    throw Error(Errc::ShapeMismatch, "topology grid differs from decomposition grid");
  }
  if (threads < 1) throw Error(Errc::InvalidParams, "in-rank width must be >= 1");
  std::shared_ptr<FieldLayout> layout(new FieldLayout());
  layout->sub_ = make_subdomain(decomp, topo.rank);
  layout->topo_ = topo;
  layout->threads_ = threads;
  for (Parity p : {Parity::Even, Parity::Odd}) {
    layout->fermion_plans_[static_cast<int>(p)] = make_fermion_halo_plan(layout->sub_, topo, p, sizeof(Spinor));
  }
  layout->gauge_plan_ = make_gauge_halo_plan(layout->sub_, topo, sizeof(ColorMatrix));
  return layout;
}

FermionField::FermionField(LayoutPtr layout, Parity parity) : layout_(std::move(layout)), parity_(parity) {
  data_.resize(static_cast<std::size_t>(layout_->half_volume() + layout_->fermion_plan(parity_).ghost_size));
}

bool FermionField::compatible(const FermionField& other) const noexcept {
  if (parity_ != other.parity_) return false;
  if (layout_ == other.layout_) return true;
  return layout_->decomp() == other.layout_->decomp() && layout_->subdomain().rank == other.layout_->subdomain().rank;
}

GaugeField::GaugeField(LayoutPtr layout) : layout_(std::move(layout)) {
  links_.resize(static_cast<std::size_t>(layout_->volume() * kNd));
  ghosts_.resize(static_cast<std::size_t>(layout_->gauge_plan().ghost_size));
}

void halo_exchange(Communicator& comm, FermionField& field) {
  const auto local = std::span<const Spinor>(field.data_).first(static_cast<std::size_t>(field.sites()));
  const auto ghost = std::span<Spinor>(field.data_).subspan(static_cast<std::size_t>(field.sites()));
  comm.halo_exchange(field.layout().fermion_plan(field.parity()), local, ghost);
  field.halo_version_ = field.version_;
}

void halo_exchange(Communicator& comm, GaugeField& field) {
  comm.halo_exchange(field.layout().gauge_plan(), std::span<const ColorMatrix>(field.links_),
                     std::span<ColorMatrix>(field.ghosts_));
  field.halo_fresh_ = true;
}

// --- vector operations -----------------------------------------------------

void zero(FermionField& x) {
  for (Spinor& s : x.mutable_local()) s = Spinor{};
}

void copy(const FermionField& src, FermionField& dst) {
  require_compatible(src, dst, "copy");
  const auto in = src.local();
  auto out = dst.mutable_local();
  std::copy(in.begin(), in.end(), out.begin());
}

void scale(const Complex& a, FermionField& x, FlopCounter* flops) {
  auto v = x.mutable_local();
  const std::int64_t n = x.sites();
  const int threads = x.layout().threads();
#pragma omp parallel for num_threads(threads) if (threads > 1) schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    for (auto& cv : v[static_cast<std::size_t>(i)])
      for (auto& z : cv) z = cmul(a, z);
  count(flops, 6 * complex_count(x));
}

void axpy(const Complex& a, const FermionField& x, FermionField& y, FlopCounter* flops) {
  require_compatible(x, y, "axpy");
  const auto in = x.local();
  auto out = y.mutable_local();
  const std::int64_t n = x.sites();
  const int threads = x.layout().threads();
#pragma omp parallel for num_threads(threads) if (threads > 1) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Spinor& xs = in[static_cast<std::size_t>(i)];
    Spinor& ys = out[static_cast<std::size_t>(i)];
    for (int s = 0; s < kNs; ++s)
      for (int c = 0; c < kNc; ++c) ys[s][c] = cmul(a, xs[s][c]) + ys[s][c];
  }
  count(flops, kFlopsAxpyPerComplex * complex_count(x));
}

void xpay(const FermionField& x, const Complex& a, FermionField& y, FlopCounter* flops) {
  require_compatible(x, y, "xpay");
  const auto in = x.local();
  auto out = y.mutable_local();
  const std::int64_t n = x.sites();
  const int threads = x.layout().threads();
#pragma omp parallel for num_threads(threads) if (threads > 1) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Spinor& xs = in[static_cast<std::size_t>(i)];
    Spinor& ys = out[static_cast<std::size_t>(i)];
    for (int s = 0; s < kNs; ++s)
      for (int c = 0; c < kNc; ++c) ys[s][c] = xs[s][c] + cmul(a, ys[s][c]);
  }
  count(flops, kFlopsAxpyPerComplex * complex_count(x));
}

namespace {

// Compensated sum: hi + lo carries about twice double precision, so the
// rounded total does not depend on how sites are split across ranks.
struct WideSum {
  double hi = 0.0;
  double lo = 0.0;

  void add(double v) noexcept {
    const double s = hi + v;
    const double bv = s - hi;
    lo += (hi - (s - bv)) + (v - bv);
    hi = s;
  }
};

// Combines per-rank (hi, lo) pairs in rank order. Every rank contributes
// its pairs in its own slots and zeros elsewhere, so the element-wise
// reduction is exact and acts as an all-gather.
template <std::size_t N>
std::array<double, N> reduce_wide(Communicator& comm, const std::array<WideSum, N>& local) {
  const auto ranks = static_cast<std::size_t>(comm.size());
  std::vector<double> slots(ranks * N * 2, 0.0);
  const auto base = static_cast<std::size_t>(comm.rank()) * N * 2;
  for (std::size_t k = 0; k < N; ++k) {
    slots[base + 2 * k] = local[k].hi;
    slots[base + 2 * k + 1] = local[k].lo;
  }
  const std::vector<double> all = comm.allreduce_det(std::span<const double>(slots));
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) {
    WideSum total;
    for (std::size_t r = 0; r < ranks; ++r) total.add(all[r * N * 2 + 2 * k]);
    double lo = total.lo;
    for (std::size_t r = 0; r < ranks; ++r) lo += all[r * N * 2 + 2 * k + 1];
    out[k] = total.hi + lo;
  }
  return out;
}

}  // namespace

Complex dot(Communicator& comm, const FermionField& x, const FermionField& y, FlopCounter* flops) {
  require_compatible(x, y, "dot");
  const auto a = x.local();
  const auto b = y.local();
  std::array<WideSum, 2> acc{};
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int s = 0; s < kNs; ++s)
      for (int c = 0; c < kNc; ++c) {
        const Complex z = cmul_conj(a[i][s][c], b[i][s][c]);
        acc[0].add(z.real());
        acc[1].add(z.imag());
      }
  count(flops, kFlopsDotPerComplex * complex_count(x));
  const auto sum = reduce_wide(comm, acc);
  return {sum[0], sum[1]};
}

double norm2(Communicator& comm, const FermionField& x, FlopCounter* flops) {
  std::array<WideSum, 1> acc{};
  for (const Spinor& sp : x.local())
    for (const ColorVector& cv : sp)
      for (const Complex& z : cv) acc[0].add(z.real() * z.real() + z.imag() * z.imag());
  count(flops, kFlopsNorm2PerComplex * complex_count(x));
  return reduce_wide(comm, acc)[0];
}

// --- initialization ----------------------------------------------------------

GaugeField unit_gauge(const LayoutPtr& layout) {
  GaugeField g(layout);
  for (ColorMatrix& m : g.mutable_links()) m = ColorMatrix::identity();
  return g;
}

GaugeField random_gauge(const LayoutPtr& layout, std::uint64_t seed) {
  GaugeField g(layout);
  const Subdomain& sub = layout->subdomain();
  const Coord4& G = sub.decomp.global.dims;
  auto links = g.mutable_links();
  for (std::int64_t i = 0; i < layout->volume(); ++i) {
    const Coord4 global = sub.to_global(index_to_site(i, layout->local()));
    const CounterRng rng(seed ^ kGaugeSalt, static_cast<std::uint64_t>(lex_index(global, G)));
    for (int mu = 0; mu < kNd; ++mu) {
      links[static_cast<std::size_t>(i * kNd + mu)] = random_su3(rng, static_cast<std::uint64_t>(6 * mu));
    }
  }
  return g;
}

FermionField random_fermion(const LayoutPtr& layout, Parity parity, std::uint64_t seed) {
  FermionField f(layout, parity);
  const Subdomain& sub = layout->subdomain();
  const Coord4& G = sub.decomp.global.dims;
  const std::int64_t offset = parity == Parity::Odd ? layout->half_volume() : 0;
  auto sites = f.mutable_local();
  for (std::int64_t i = 0; i < f.sites(); ++i) {
    const Coord4 global = sub.to_global(index_to_site(i + offset, layout->local()));
    const CounterRng rng(seed ^ kFermionSalt, static_cast<std::uint64_t>(lex_index(global, G)));
    Spinor& sp = sites[static_cast<std::size_t>(i)];
    for (int s = 0; s < kNs; ++s)
      for (int c = 0; c < kNc; ++c) {
        const auto pair = static_cast<std::uint64_t>(s * kNc + c);
        sp[s][c] = Complex(rng.normal(pair, 0), rng.normal(pair, 1));
      }
  }
  return f;
}

std::vector<Spinor> gather_field(Communicator& comm, const FermionField& field) {
  const SiteSet set = field.parity() == Parity::Even ? SiteSet::Even : SiteSet::Odd;
  return gather_sites(comm, field.layout().decomp(), field.local(), set, 1);
}

std::vector<ColorMatrix> gather_field(Communicator& comm, const GaugeField& field) {
  return gather_sites(comm, field.layout().decomp(), field.links(), SiteSet::All, kNd);
}

}  // namespace lqs
