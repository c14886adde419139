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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lqs/error.hpp"
#include "lqs/field.hpp"
#include "lqs/field_io.hpp"
#include "oracle.hpp"

namespace lqs {
namespace {

using testing::SingleRank;

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

bool bitwise_equal(const FermionField& a, const FermionField& b) {
  return std::memcmp(a.local().data(), b.local().data(), a.local().size_bytes()) == 0;
}

TEST(VectorOps, AxpyMatchesElementwiseOracle) {
  SingleRank r({4, 4, 4, 4});
  const FermionField x = random_fermion(r.layout, Parity::Even, 1);
  FermionField y = random_fermion(r.layout, Parity::Even, 2);
  const FermionField y0 = random_fermion(r.layout, Parity::Even, 2);
  const Complex a(0.3, -1.7);
  FlopCounter fc;
  axpy(a, x, y, &fc);
  EXPECT_EQ(fc.total(), 8 * 12 * 128);
  for (std::int64_t i = 0; i < x.sites(); ++i)
    for (int s = 0; s < 4; ++s)
      for (int c = 0; c < 3; ++c) {
        const Complex xv = x[i][s][c], yv = y0[i][s][c];
        const Complex want(a.real() * xv.real() - a.imag() * xv.imag() + yv.real(),
                           a.real() * xv.imag() + a.imag() * xv.real() + yv.imag());
        EXPECT_EQ(y[i][s][c], want);
      }
}

TEST(VectorOps, TrivialCases) {
  SingleRank r({4, 4, 4, 4});
  const FermionField x = random_fermion(r.layout, Parity::Odd, 3);
  FermionField y = random_fermion(r.layout, Parity::Odd, 4);
  const FermionField y0 = random_fermion(r.layout, Parity::Odd, 4);
  axpy(0.0, x, y);
  EXPECT_TRUE(bitwise_equal(y, y0));
  zero(y);
  axpy(1.0, x, y);
  EXPECT_TRUE(bitwise_equal(y, x));
  FermionField z(r.layout, Parity::Odd);
  copy(x, z);
  EXPECT_TRUE(bitwise_equal(z, x));
  xpay(x, 0.0, y);
  EXPECT_TRUE(bitwise_equal(y, x));
}

TEST(VectorOps, ShapeMismatch) {
  SingleRank r({4, 4, 4, 4});
  SingleRank other({4, 4, 4, 6});
  const FermionField e = random_fermion(r.layout, Parity::Even, 1);
  FermionField o = random_fermion(r.layout, Parity::Odd, 1);
  FermionField big = random_fermion(other.layout, Parity::Even, 1);
  EXPECT_EQ(code_of([&] { axpy(1.0, e, o); }), Errc::ShapeMismatch);
  EXPECT_EQ(code_of([&] { copy(e, big); }), Errc::ShapeMismatch);
  EXPECT_EQ(code_of([&] { dot(r.comm, e, o); }), Errc::ShapeMismatch);
  EXPECT_EQ(code_of([&] { xpay(e, 1.0, big); }), Errc::ShapeMismatch);
}

TEST(VectorOps, DotAndNorm) {
  SingleRank r({4, 4, 4, 8});
  const FermionField x = random_fermion(r.layout, Parity::Even, 5);
  const FermionField y = random_fermion(r.layout, Parity::Even, 6);
  const Complex xx = dot(r.comm, x, x);
  EXPECT_EQ(xx.imag(), 0.0);
  EXPECT_GT(xx.real(), 0.0);
  EXPECT_NEAR(xx.real(), norm2(r.comm, x), 1e-13 * xx.real());
  const Complex xy = dot(r.comm, x, y);
  const Complex yx = dot(r.comm, y, x);
  EXPECT_LE(std::abs(xy - std::conj(yx)), 1e-13 * std::abs(xy));
  FermionField s(r.layout, Parity::Even);
  copy(x, s);
  const Complex a(1.5, -2.0);
  FlopCounter fc;
  scale(a, s, &fc);
  EXPECT_EQ(fc.total(), 6 * 12 * s.sites());
  EXPECT_NEAR(norm2(r.comm, s), std::norm(a) * norm2(r.comm, x), 1e-13 * std::norm(a) * norm2(r.comm, x));
}

TEST(VectorOps, LinearityOfAxpy) {
  SingleRank r({4, 4, 4, 4});
  const FermionField x = random_fermion(r.layout, Parity::Even, 7);
  const FermionField y = random_fermion(r.layout, Parity::Even, 8);
  const Complex a(0.7, 0.2), b(-1.1, 0.4);
  // (a + b) x + y against a x + (b x + y)
  FermionField lhs(r.layout, Parity::Even), rhs(r.layout, Parity::Even);
  copy(y, lhs);
  axpy(a + b, x, lhs);
  copy(y, rhs);
  axpy(b, x, rhs);
  axpy(a, x, rhs);
  axpy(-1.0, lhs, rhs);
  EXPECT_LE(std::sqrt(norm2(r.comm, rhs)), 1e-13 * std::sqrt(norm2(r.comm, lhs)));
}

TEST(VectorOps, MultiRankDotMatchesSingleRank) {
  const Coord4 G{8, 8, 8, 16};
  SingleRank ref(G);
  const Complex want = dot(ref.comm, random_fermion(ref.layout, Parity::Odd, 1), random_fermion(ref.layout, Parity::Odd, 2));
  for (const Coord4 grid : {Coord4{2, 1, 1, 1}, Coord4{2, 2, 1, 2}, Coord4{1, 1, 2, 8}}) {
    const auto d = decompose(GlobalLattice::make(G), ProcessGrid::make(grid));
    run_ranks(TransportKind::Concurrent, d.grid, [&](Communicator& comm) {
      const LayoutPtr l = FieldLayout::make(d, comm.topology());
      const Complex got = dot(comm, random_fermion(l, Parity::Odd, 1), random_fermion(l, Parity::Odd, 2));
      EXPECT_LE(std::abs(got - want), 1e-12 * std::abs(want));
    });
  }
}

TEST(VectorOps, WidthDoesNotChangeBits) {
  SingleRank one({8, 8, 8, 8}, 1);
  SingleRank four({8, 8, 8, 8}, 4);
  FermionField a = random_fermion(one.layout, Parity::Even, 1);
  FermionField b = random_fermion(four.layout, Parity::Even, 1);
  axpy({0.5, 0.25}, random_fermion(one.layout, Parity::Even, 2), a);
  axpy({0.5, 0.25}, random_fermion(four.layout, Parity::Even, 2), b);
  EXPECT_EQ(std::memcmp(a.local().data(), b.local().data(), a.local().size_bytes()), 0);
  EXPECT_EQ(norm2(one.comm, a), norm2(four.comm, b));
}

TEST(Init, UnitAndRandomGauge) {
  SingleRank r({4, 4, 4, 6});
  const GaugeField u = unit_gauge(r.layout);
  for (const ColorMatrix& m : u.links()) EXPECT_EQ(m.e, ColorMatrix::identity().e);
  const GaugeField g = random_gauge(r.layout, 7);
  for (const ColorMatrix& m : g.links()) {
    EXPECT_LE(unitarity_deviation(m), 1e-12);
    EXPECT_LE(determinant_deviation(m), 1e-12);
  }
  const GaugeField g2 = random_gauge(r.layout, 7);
  EXPECT_EQ(std::memcmp(g.links().data(), g2.links().data(), g.links().size_bytes()), 0);
  const GaugeField g3 = random_gauge(r.layout, 8);
  EXPECT_NE(std::memcmp(g.links().data(), g3.links().data(), g.links().size_bytes()), 0);
}

TEST(Halo, StaleAfterWrite) {
  SingleRank r({4, 4, 4, 4});
  FermionField f = random_fermion(r.layout, Parity::Even, 1);
  EXPECT_FALSE(f.halo_fresh());
  halo_exchange(r.comm, f);
  EXPECT_TRUE(f.halo_fresh());
  f.mutable_local();
  EXPECT_FALSE(f.halo_fresh());
}

class FieldFile : public ::testing::Test {
 protected:
  std::filesystem::path path = std::filesystem::temp_directory_path() /
                               ("lqf_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                ::testing::UnitTest::GetInstance()->current_test_info()->name() + ".bin");
  void TearDown() override { std::filesystem::remove(path); }
};

TEST_F(FieldFile, RoundTrip) {
  SingleRank r({4, 4, 4, 6});
  const FermionField f = random_fermion(r.layout, Parity::Odd, 3);
  write_field(path, store_fermion({4, 4, 4, 6}, Parity::Odd, f.local()));
  EXPECT_EQ(std::filesystem::file_size(path), 4 + 16 + 1 + 16u * 12 * 192);
  const StoredField back = read_field(path);
  EXPECT_EQ(back.kind, FieldKind::Odd);
  EXPECT_EQ(back.dims, (Coord4{4, 4, 4, 6}));
  const auto spinors = spinors_of(back);
  EXPECT_EQ(std::memcmp(spinors.data(), f.local().data(), f.local().size_bytes()), 0);

  const GaugeField g = random_gauge(r.layout, 3);
  write_field(path, store_gauge({4, 4, 4, 6}, g.links()));
  const auto links = links_of(read_field(path));
  EXPECT_EQ(std::memcmp(links.data(), g.links().data(), g.links().size_bytes()), 0);
}

TEST_F(FieldFile, HeaderBytes) {
  SingleRank r({4, 4, 4, 4});
  write_field(path, store_fermion({4, 4, 4, 4}, Parity::Even, random_fermion(r.layout, Parity::Even, 1).local()));
  std::ifstream is(path, std::ios::binary);
  std::array<unsigned char, 21> h{};
  is.read(reinterpret_cast<char*>(h.data()), h.size());
  EXPECT_EQ(std::string(h.begin(), h.begin() + 4), "LQF1");
  EXPECT_EQ(h[4], 4);
  EXPECT_EQ(h[5], 0);
  EXPECT_EQ(h[20], 0);
}

TEST_F(FieldFile, Errors) {
  {
    std::ofstream os(path, std::ios::binary);
    os << "LQF2garbage";
  }
  EXPECT_EQ(code_of([&] { read_field(path); }), Errc::ParseError);
  SingleRank r({4, 4, 4, 4});
  write_field(path, store_fermion({4, 4, 4, 4}, Parity::Even, random_fermion(r.layout, Parity::Even, 1).local()));
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_EQ(code_of([&] { read_field(path); }), Errc::ParseError);
  EXPECT_EQ(code_of([&] { read_field(path.string() + ".missing"); }), Errc::IoError);
}

}  // namespace
}  // namespace lqs
