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

// Small dense objects of the Wilson operator: complex scalars, color
// 3-vectors, 3x3 color matrices (gauge links) and 4x3 spinors.
//
// The kernels here spell out complex products in real arithmetic so the
// operation order is fixed and matches the naive reference loops bit for bit.

#include <array>
#include <complex>
#include <cstdint>

#include "lqs/rng.hpp"

namespace lqs {

using Complex = std::complex<double>;

inline constexpr int kNc = 3;
inline constexpr int kNs = 4;

using ColorVector = std::array<Complex, kNc>;

struct ColorMatrix {
  std::array<Complex, kNc * kNc> e{};

  Complex& operator()(int row, int col) noexcept { return e[row * kNc + col]; }
  const Complex& operator()(int row, int col) const noexcept { return e[row * kNc + col]; }

  static ColorMatrix identity() noexcept;
  ColorMatrix adjoint() const noexcept;
  Complex determinant() const noexcept;
};

ColorMatrix operator*(const ColorMatrix& a, const ColorMatrix& b) noexcept;

// Spin outer, color inner.
using Spinor = std::array<ColorVector, kNs>;

inline Complex cmul(const Complex& a, const Complex& b) noexcept {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// conj(a) * b
inline Complex cmul_conj(const Complex& a, const Complex& b) noexcept {
  return {a.real() * b.real() + a.imag() * b.imag(), a.real() * b.imag() - a.imag() * b.real()};
}

inline ColorVector matvec(const ColorMatrix& m, const ColorVector& v) noexcept {
  ColorVector out;
  for (int i = 0; i < kNc; ++i) {
    Complex acc = cmul(m(i, 0), v[0]);
    acc += cmul(m(i, 1), v[1]);
    acc += cmul(m(i, 2), v[2]);
    out[i] = acc;
  }
  return out;
}

// m^dagger v without forming the adjoint.
inline ColorVector adjoint_matvec(const ColorMatrix& m, const ColorVector& v) noexcept {
  ColorVector out;
  for (int i = 0; i < kNc; ++i) {
    Complex acc = cmul_conj(m(0, i), v[0]);
    acc += cmul_conj(m(1, i), v[1]);
    acc += cmul_conj(m(2, i), v[2]);
    out[i] = acc;
  }
  return out;
}

// Random SU(3) element: Gram-Schmidt on two rows of a complex Gaussian matrix,
// third row from the conjugated cross product, residual determinant phase
// divided out. Consumes normal pairs [first_pair, first_pair + 6) of `rng`.
ColorMatrix random_su3(const CounterRng& rng, std::uint64_t first_pair);

// max |(U^dagger U - 1)_ij| and |det U - 1|.
double unitarity_deviation(const ColorMatrix& u) noexcept;
double determinant_deviation(const ColorMatrix& u) noexcept;

}  // namespace lqs
