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

#include <benchmark/benchmark.h>

#include "lqs/algebra.hpp"
#include "lqs/comm.hpp"
#include "lqs/field.hpp"
#include "lqs/hopping.hpp"
#include "lqs/rng.hpp"
#include "lqs/solver.hpp"

namespace {

using namespace lqs;

struct Lattice {
  explicit Lattice(const Coord4& dims)
      : decomp(decompose(GlobalLattice::make(dims), ProcessGrid::make({1, 1, 1, 1}))),
        comm(transport, build_topology(decomp.grid, 0)),
        layout(FieldLayout::make(decomp, comm.topology())),
        gauge(random_gauge(layout, 7)),
        op(comm, gauge, HoppingParams{}) {}

  Decomposition decomp;
  SerialTransport transport;
  Communicator comm;
  LayoutPtr layout;
  GaugeField gauge;
  WilsonOperator op;
};

Coord4 cube(std::int64_t l) {
  const int e = static_cast<int>(l);
  return {e, e, e, 2 * e};
}

void BM_Su3Matvec(benchmark::State& state) {
  const CounterRng rng(1, 0);
  std::vector<ColorMatrix> u;
  std::vector<ColorVector> v;
  for (std::uint64_t k = 0; k < 1024; ++k) {
    u.push_back(random_su3(rng, 64 * k));
    v.push_back({Complex(rng.normal(k, 0), 0.0), Complex(rng.normal(k, 1), 0.0), Complex(1.0, 1.0)});
  }
  for (auto _ : state) {
    for (std::size_t k = 0; k < u.size(); ++k) benchmark::DoNotOptimize(matvec(u[k], v[k]));
  }
  state.counters["flops"] = benchmark::Counter(66.0 * 1024, benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Su3Matvec);

void BM_Hopping(benchmark::State& state) {
  Lattice lat(cube(state.range(0)));
  FermionField x = random_fermion(lat.layout, Parity::Even, 1);
  FermionField y(lat.layout, Parity::Odd);
  halo_exchange(lat.comm, x);
  for (auto _ : state) {
    lat.op.apply_hopping(x, y);
    benchmark::ClobberMemory();
  }
  state.counters["flops"] =
      benchmark::Counter(static_cast<double>(lat.op.hopping_flops()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Hopping)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_HaloExchange(benchmark::State& state) {
  Lattice lat(cube(state.range(0)));
  FermionField x = random_fermion(lat.layout, Parity::Even, 1);
  for (auto _ : state) {
    x.mutable_local();
    halo_exchange(lat.comm, x);
  }
  state.counters["bytes"] = benchmark::Counter(
      static_cast<double>(lat.comm.stats().halo_bytes) / static_cast<double>(state.iterations()));
}
BENCHMARK(BM_HaloExchange)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_CgIteration(benchmark::State& state) {
  Lattice lat(cube(state.range(0)));
  const FermionField b = random_fermion(lat.layout, Parity::Even, 2);
  CGConfig cfg;
  cfg.max_iter = 10;
  std::int64_t iterations = 0;
  for (auto _ : state) {
    const CGResult res = cg_solve(lat.op, b, cfg);
    iterations += res.iterations;
  }
  state.counters["iters"] = benchmark::Counter(static_cast<double>(iterations), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CgIteration)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
