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

// Dirac matrices in the DeGrand-Rossi chiral basis:
//
//   g0 = [ 0  0  0  i ]   g1 = [ 0  0  0 -1 ]   g2 = [ 0  0  i  0 ]   g3 = [ 0 0 1 0 ]
//        [ 0  0  i  0 ]        [ 0  0  1  0 ]        [ 0  0  0 -i ]        [ 0 0 0 1 ]
//        [ 0 -i  0  0 ]        [ 0  1  0  0 ]        [-i  0  0  0 ]        [ 1 0 0 0 ]
//        [-i  0  0  0 ]        [-1  0  0  0 ]        [ 0  i  0  0 ]        [ 0 1 0 0 ]
//
// Each row has a single nonzero entry in {+1, -1, +i, -i}, so the matrices
// are stored as a permutation plus a unit phase per row.

#include <array>
#include <cstdint>

#include "lqs/algebra.hpp"

namespace lqs {

enum class Unit : std::uint8_t { PlusOne, MinusOne, PlusI, MinusI };

constexpr Complex times(Unit u, const Complex& z) noexcept {
  switch (u) {
    case Unit::PlusOne: return z;
    case Unit::MinusOne: return -z;
    case Unit::PlusI: return {-z.imag(), z.real()};
    case Unit::MinusI: return {z.imag(), -z.real()};
  }
  return z;
}

constexpr Unit negate(Unit u) noexcept {
  switch (u) {
    case Unit::PlusOne: return Unit::MinusOne;
    case Unit::MinusOne: return Unit::PlusOne;
    case Unit::PlusI: return Unit::MinusI;
    case Unit::MinusI: return Unit::PlusI;
  }
  return u;
}

// (gamma_mu v)_s = factor[s] * v_{column[s]}
struct SparseGamma {
  std::array<int, kNs> column;
  std::array<Unit, kNs> factor;
};

inline constexpr std::array<SparseGamma, 4> kGamma{{
    {{3, 2, 1, 0}, {Unit::PlusI, Unit::PlusI, Unit::MinusI, Unit::MinusI}},
    {{3, 2, 1, 0}, {Unit::MinusOne, Unit::PlusOne, Unit::PlusOne, Unit::MinusOne}},
    {{2, 3, 0, 1}, {Unit::PlusI, Unit::MinusI, Unit::MinusI, Unit::PlusI}},
    {{2, 3, 0, 1}, {Unit::PlusOne, Unit::PlusOne, Unit::PlusOne, Unit::PlusOne}},
}};

using SpinMatrix = std::array<std::array<Complex, kNs>, kNs>;

SpinMatrix gamma_matrix(int mu) noexcept;
SpinMatrix spin_identity() noexcept;

}  // namespace lqs
