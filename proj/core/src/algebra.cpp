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

#include "lqs/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lqs {

double CounterRng::normal(std::uint64_t pair, int which) const noexcept {
  const double u1 = uniform(2 * pair);
  const double u2 = uniform(2 * pair + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return which == 0 ? radius * std::cos(angle) : radius * std::sin(angle);
}

ColorMatrix ColorMatrix::identity() noexcept {
  ColorMatrix m;
  for (int i = 0; i < kNc; ++i) m(i, i) = 1.0;
  return m;
}

ColorMatrix ColorMatrix::adjoint() const noexcept {
  ColorMatrix m;
  for (int i = 0; i < kNc; ++i)
    for (int j = 0; j < kNc; ++j) m(i, j) = std::conj((*this)(j, i));
  return m;
}

Complex ColorMatrix::determinant() const noexcept {
  const auto& m = *this;
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

ColorMatrix operator*(const ColorMatrix& a, const ColorMatrix& b) noexcept {
  ColorMatrix c;
  for (int i = 0; i < kNc; ++i)
    for (int j = 0; j < kNc; ++j) {
      Complex acc = cmul(a(i, 0), b(0, j));
      acc += cmul(a(i, 1), b(1, j));
      acc += cmul(a(i, 2), b(2, j));
      c(i, j) = acc;
    }
  return c;
}

namespace {

Complex row_dot(const ColorMatrix& m, int a, int b) {
  Complex acc = 0.0;
  for (int k = 0; k < kNc; ++k) acc += std::conj(m(a, k)) * m(b, k);
  return acc;
}

void normalize_row(ColorMatrix& m, int r) {
  double n2 = 0.0;
  for (int k = 0; k < kNc; ++k) n2 += std::norm(m(r, k));
  const double inv = 1.0 / std::sqrt(n2);
  for (int k = 0; k < kNc; ++k) m(r, k) *= inv;
}

}  // namespace

ColorMatrix random_su3(const CounterRng& rng, std::uint64_t first_pair) {
  ColorMatrix m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < kNc; ++j) {
      const std::uint64_t pair = first_pair + static_cast<std::uint64_t>(i * kNc + j);
      m(i, j) = Complex(rng.normal(pair, 0), rng.normal(pair, 1));
    }
  normalize_row(m, 0);
  const Complex overlap = row_dot(m, 0, 1);
  for (int k = 0; k < kNc; ++k) m(1, k) -= overlap * m(0, k);
  normalize_row(m, 1);

  m(2, 0) = std::conj(m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1));
  m(2, 1) = std::conj(m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2));
  m(2, 2) = std::conj(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));

  const Complex det = m.determinant();
  const Complex fix = std::polar(1.0, -std::arg(det) / 3.0);
  for (auto& z : m.e) z *= fix;
  return m;
}

double unitarity_deviation(const ColorMatrix& u) noexcept {
  const ColorMatrix p = u.adjoint() * u;
  double worst = 0.0;
  for (int i = 0; i < kNc; ++i)
    for (int j = 0; j < kNc; ++j) {
      const Complex expected = i == j ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(p(i, j) - expected));
    }
  return worst;
}

double determinant_deviation(const ColorMatrix& u) noexcept { return std::abs(u.determinant() - 1.0); }

}  // namespace lqs
