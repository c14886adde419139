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

// Test-side reference implementations. Nothing here calls the library's
// stencil, gamma tables or solver; the dense Wilson matrix is assembled from
// explicit 4x4 Dirac matrices and 3x3 links, site by site.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

#include "lqs/comm.hpp"
#include "lqs/field.hpp"
#include "lqs/geometry.hpp"
#include "lqs/rng.hpp"

namespace lqs::testing {

using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

// Scalar-loop complex product, no library kernels.
inline ColorVector naive_matvec(const ColorMatrix& m, const ColorVector& v) {
  ColorVector out{};
  for (int i = 0; i < 3; ++i) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < 3; ++j) {
      re += m(i, j).real() * v[j].real() - m(i, j).imag() * v[j].imag();
      im += m(i, j).real() * v[j].imag() + m(i, j).imag() * v[j].real();
    }
    out[i] = {re, im};
  }
  return out;
}

inline ColorVector random_vector(const CounterRng& rng, std::uint64_t pair) {
  ColorVector v;
  for (int i = 0; i < 3; ++i) v[i] = {rng.normal(pair + i, 0), rng.normal(pair + i, 1)};
  return v;
}

// A single rank owning the whole lattice, talking over the serial transport.
struct SingleRank {
  explicit SingleRank(const Coord4& dims, int threads = 1)
      : decomp(decompose(GlobalLattice::make(dims), ProcessGrid::make({1, 1, 1, 1}))),
        comm(transport, build_topology(decomp.grid, 0)),
        layout(FieldLayout::make(decomp, comm.topology(), threads)) {}

  Decomposition decomp;
  SerialTransport transport;
  Communicator comm;
  LayoutPtr layout;
};

inline Eigen::Matrix4cd dirac_matrix(int mu) {
  using C = std::complex<double>;
  const C i(0.0, 1.0);
  Eigen::Matrix4cd g = Eigen::Matrix4cd::Zero();
  switch (mu) {
    case 0:
      g(0, 3) = i;
      g(1, 2) = i;
      g(2, 1) = -i;
      g(3, 0) = -i;
      break;
    case 1:
      g(0, 3) = -1.0;
      g(1, 2) = 1.0;
      g(2, 1) = 1.0;
      g(3, 0) = -1.0;
      break;
    case 2:
      g(0, 2) = i;
      g(1, 3) = -i;
      g(2, 0) = -i;
      g(3, 1) = i;
      break;
    default:
      g(0, 2) = 1.0;
      g(1, 3) = 1.0;
      g(2, 0) = 1.0;
      g(3, 1) = 1.0;
      break;
  }
  return g;
}

inline Eigen::Matrix3cd to_eigen(const ColorMatrix& u) {
  Eigen::Matrix3cd m;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m(a, b) = u(a, b);
  return m;
}

// Sites of one parity in single-rank storage order.
inline std::vector<Coord4> parity_sites(const Coord4& dims, Parity p) {
  const std::int64_t half = volume(dims) / 2;
  std::vector<Coord4> out;
  for (std::int64_t i = 0; i < half; ++i) out.push_back(index_to_site(i + (p == Parity::Odd ? half : 0), dims));
  return out;
}

// Block of the hopping matrix mapping parity `from` to parity opposite(from):
//   (D x)(y) = sum_mu (1 - g_mu) U_mu(y) x(y + mu) + (1 + g_mu) U_mu(y - mu)^+ x(y - mu)
// `links` is indexed site_index * 4 + mu; `phases` multiply hops that wrap
// the lattice boundary.
inline DenseMatrix hopping_block(const Coord4& dims, const std::vector<ColorMatrix>& links,
                                 const std::array<double, 4>& phases, Parity from) {
  const std::int64_t half = volume(dims) / 2;
  DenseMatrix d = DenseMatrix::Zero(12 * half, 12 * half);
  const Eigen::Matrix4cd one = Eigen::Matrix4cd::Identity();
  const auto rows = parity_sites(dims, opposite(from));
  auto column_of = [&](const Coord4& c) { return 12 * (site_index(c, dims) % half); };
  auto link = [&](const Coord4& c, int mu) { return to_eigen(links[site_index(c, dims) * 4 + mu]); };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Coord4 y = rows[r];
    for (int mu = 0; mu < 4; ++mu) {
      Coord4 fwd = y;
      fwd[mu] = (y[mu] + 1) % dims[mu];
      Coord4 bwd = y;
      bwd[mu] = (y[mu] - 1 + dims[mu]) % dims[mu];
      const double fphase = y[mu] == dims[mu] - 1 ? phases[mu] : 1.0;
      const double bphase = y[mu] == 0 ? phases[mu] : 1.0;
      const Eigen::Matrix4cd pm = one - dirac_matrix(mu);
      const Eigen::Matrix4cd pp = one + dirac_matrix(mu);
      const Eigen::Matrix3cd uf = link(y, mu);
      const Eigen::Matrix3cd ub = link(bwd, mu).adjoint();
      const auto cf = column_of(fwd);
      const auto cb = column_of(bwd);
      for (int s = 0; s < 4; ++s)
        for (int t = 0; t < 4; ++t)
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              d(12 * static_cast<std::int64_t>(r) + 3 * s + a, cf + 3 * t + b) += fphase * pm(s, t) * uf(a, b);
              d(12 * static_cast<std::int64_t>(r) + 3 * s + a, cb + 3 * t + b) += bphase * pp(s, t) * ub(a, b);
            }
    }
  }
  return d;
}

inline DenseVector to_dense(std::span<const Spinor> sites) {
  DenseVector v(12 * static_cast<std::int64_t>(sites.size()));
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (int s = 0; s < 4; ++s)
      for (int c = 0; c < 3; ++c) v(12 * static_cast<std::int64_t>(i) + 3 * s + c) = sites[i][s][c];
  return v;
}

inline void from_dense(const DenseVector& v, FermionField& x) {
  auto out = x.mutable_local();
  for (std::size_t i = 0; i < out.size(); ++i)
    for (int s = 0; s < 4; ++s)
      for (int c = 0; c < 3; ++c) out[i][s][c] = v(12 * static_cast<std::int64_t>(i) + 3 * s + c);
}

// max |a - b| / max |b|
inline double max_relative_error(const DenseMatrix& a, const DenseMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

// The library operator applied column by column to unit vectors.
template <class Apply>
DenseMatrix columns_of(const LayoutPtr& layout, Parity in, Parity out, Apply&& apply) {
  const std::int64_t n = 12 * layout->half_volume();
  DenseMatrix m(n, n);
  FermionField e(layout, in);
  FermionField y(layout, out);
  for (std::int64_t j = 0; j < n; ++j) {
    zero(e);
    e.mutable_local()[static_cast<std::size_t>(j / 12)][(j % 12) / 3][j % 3] = 1.0;
    apply(e, y);
    m.col(j) = to_dense(y.local());
  }
  return m;
}

}  // namespace lqs::testing
