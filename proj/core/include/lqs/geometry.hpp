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

// Lattice coordinates, checkerboard parity and the regular 4D domain
// decomposition. Everything here is a pure function over small values.
//
// Site ordering convention used by every field container: sites are split
// into an even block [0, V/2) followed by an odd block [V/2, V); inside each
// block sites appear in lexicographic order with x fastest, then y, z, t.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace lqs {

inline constexpr int kNd = 4;

using Coord4 = std::array<int, kNd>;

enum class Parity : std::uint8_t { Even = 0, Odd = 1 };

constexpr Parity opposite(Parity p) noexcept {
  return p == Parity::Even ? Parity::Odd : Parity::Even;
}

std::string_view to_string(Parity p) noexcept;

enum class Sign : std::uint8_t { Plus = 0, Minus = 1 };

constexpr int step(Sign s) noexcept { return s == Sign::Plus ? 1 : -1; }
constexpr Sign flip(Sign s) noexcept { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }

std::int64_t volume(const Coord4& dims) noexcept;

// Parses "96x96x96x192"; throws Error(InvalidDims) on anything else.
Coord4 parse_dims(std::string_view text);
std::string format_dims(const Coord4& dims);

struct GlobalLattice {
  Coord4 dims{};

  // Validating constructor: every extent positive and even.
  static GlobalLattice make(const Coord4& dims);
  std::int64_t volume() const noexcept { return lqs::volume(dims); }
  friend bool operator==(const GlobalLattice&, const GlobalLattice&) = default;
};

struct ProcessGrid {
  Coord4 dims{1, 1, 1, 1};

  static ProcessGrid make(const Coord4& dims);
  int size() const noexcept { return static_cast<int>(lqs::volume(dims)); }
  friend bool operator==(const ProcessGrid&, const ProcessGrid&) = default;
};

struct Decomposition {
  GlobalLattice global;
  ProcessGrid grid;
  Coord4 local{};

  int ranks() const noexcept { return grid.size(); }
  std::int64_t local_volume() const noexcept { return volume(local); }
  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

// Splits `global` evenly over `grid`. Throws NonDivisible or OddLocalExtent.
Decomposition decompose(const GlobalLattice& global, const ProcessGrid& grid);

Parity parity(const Coord4& c) noexcept;

// Plain lexicographic index, x fastest. No parity blocking.
std::int64_t lex_index(const Coord4& c, const Coord4& dims) noexcept;
Coord4 lex_coord(std::int64_t index, const Coord4& dims) noexcept;

// Parity-blocked index (see file comment). Throws OutOfRange.
std::int64_t site_index(const Coord4& c, const Coord4& dims);
Coord4 index_to_site(std::int64_t index, const Coord4& dims);

// Index within one parity block, i.e. site_index minus the block offset.
std::int64_t checkerboard_index(const Coord4& c, const Coord4& dims);

// Ranks are numbered lexicographically in grid coordinates, x fastest.
int rank_of(const Coord4& grid_coord, const ProcessGrid& grid) noexcept;
Coord4 grid_coord_of(int rank, const ProcessGrid& grid);

// One rank's view of a decomposition.
struct Subdomain {
  Decomposition decomp;
  int rank = 0;
  Coord4 grid_coord{};
  Coord4 origin{};

  Coord4 to_global(const Coord4& local_site) const noexcept;
};

Subdomain make_subdomain(const Decomposition& decomp, int rank);

struct NeighborSite {
  Coord4 site{};              // coordinate in the owner's local frame
  bool crosses_boundary = false;  // left the local box, so lives in a halo
  int rank_step = 0;          // grid step along mu to the owner; 0 if this rank owns it
};

// Nearest neighbor of local site `c` in direction (mu, sign) under `decomp`.
// Wraps on the global torus; with grid extent 1 the owner is this rank.
NeighborSite neighbor(const Decomposition& decomp, const Coord4& c, int mu, Sign sign);

// Number of sites on the face orthogonal to mu, and the lexicographic
// position of `c` within that face (mu coordinate dropped, x fastest).
std::int64_t face_volume(const Coord4& dims, int mu) noexcept;
std::int64_t face_index(const Coord4& c, const Coord4& dims, int mu) noexcept;

// Sites sent per full-lattice hopping application, both faces of every axis.
std::int64_t surface_count(const Coord4& local) noexcept;
double surface_to_volume(const Coord4& local) noexcept;

}  // namespace lqs
