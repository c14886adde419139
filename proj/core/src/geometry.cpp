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

#include "lqs/geometry.hpp"

#include <charconv>
#include <sstream>

#include "lqs/error.hpp"

namespace lqs {

std::string_view to_string(Parity p) noexcept { return p == Parity::Even ? "even" : "odd"; }

std::int64_t volume(const Coord4& dims) noexcept {
  std::int64_t v = 1;
  for (int d : dims) v *= d;
  return v;
}

Coord4 parse_dims(std::string_view text) {
  Coord4 out{};
  std::size_t pos = 0;
  for (int mu = 0; mu < kNd; ++mu) {
    const std::size_t end = mu + 1 < kNd ? text.find('x', pos) : text.size();
    if (end == std::string_view::npos) {
      throw Error(Errc::InvalidDims, "expected 4 extents separated by 'x': \"" + std::string(text) + "\"");
    }
    const auto field = text.substr(pos, end - pos);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out[mu]);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty() || out[mu] <= 0) {
      throw Error(Errc::InvalidDims, "bad extent \"" + std::string(field) + "\" in \"" + std::string(text) + "\"");
    }
    pos = end + 1;
  }
  return out;
}

std::string format_dims(const Coord4& dims) {
  std::ostringstream os;
  os << dims[0] << 'x' << dims[1] << 'x' << dims[2] << 'x' << dims[3];
  return os.str();
}

GlobalLattice GlobalLattice::make(const Coord4& dims) {
  for (int d : dims) {
    if (d <= 0) throw Error(Errc::InvalidDims, "lattice extents must be positive: " + format_dims(dims));
    if (d % 2 != 0) throw Error(Errc::OddLocalExtent, "lattice extents must be even: " + format_dims(dims));
  }
  return GlobalLattice{dims};
}

ProcessGrid ProcessGrid::make(const Coord4& dims) {
  for (int d : dims) {
    if (d <= 0) throw Error(Errc::InvalidDims, "grid extents must be positive: " + format_dims(dims));
  }
  return ProcessGrid{dims};
}

Decomposition decompose(const GlobalLattice& global, const ProcessGrid& grid) {
  Decomposition out{global, grid, {}};
  for (int mu = 0; mu < kNd; ++mu) {
    if (grid.dims[mu] <= 0 || global.dims[mu] % grid.dims[mu] != 0) {
      throw Error(Errc::NonDivisible, "grid " + format_dims(grid.dims) + " does not divide lattice " +
                                          format_dims(global.dims));
    }
    out.local[mu] = global.dims[mu] / grid.dims[mu];
  }
  for (int l : out.local) {
    if (l < 2 || l % 2 != 0) {
      throw Error(Errc::OddLocalExtent, "local lattice " + format_dims(out.local) + " has an extent that is odd or < 2");
    }
  }
  return out;
}

Parity parity(const Coord4& c) noexcept {
  return ((c[0] + c[1] + c[2] + c[3]) & 1) ? Parity::Odd : Parity::Even;
}

std::int64_t lex_index(const Coord4& c, const Coord4& dims) noexcept {
  return c[0] + std::int64_t{dims[0]} * (c[1] + std::int64_t{dims[1]} * (c[2] + std::int64_t{dims[2]} * c[3]));
}

Coord4 lex_coord(std::int64_t index, const Coord4& dims) noexcept {
  Coord4 c{};
  for (int mu = 0; mu < kNd; ++mu) {
    c[mu] = static_cast<int>(index % dims[mu]);
    index /= dims[mu];
  }
  return c;
}

namespace {

void check_in_range(const Coord4& c, const Coord4& dims) {
  for (int mu = 0; mu < kNd; ++mu) {
    if (c[mu] < 0 || c[mu] >= dims[mu]) {
      throw Error(Errc::OutOfRange, "site " + format_dims(c) + " outside " + format_dims(dims));
    }
  }
}

}  // namespace

// With an even x extent, lexicographic neighbors 2k and 2k+1 differ only in x
// and so have opposite parity; halving the lexicographic index therefore
// enumerates each parity block in lexicographic order.
std::int64_t checkerboard_index(const Coord4& c, const Coord4& dims) {
  check_in_range(c, dims);
  return lex_index(c, dims) / 2;
}

std::int64_t site_index(const Coord4& c, const Coord4& dims) {
  const std::int64_t half = volume(dims) / 2;
  return checkerboard_index(c, dims) + (parity(c) == Parity::Odd ? half : 0);
}

Coord4 index_to_site(std::int64_t index, const Coord4& dims) {
  const std::int64_t vol = volume(dims);
  if (index < 0 || index >= vol) {
    throw Error(Errc::OutOfRange, "site index " + std::to_string(index) + " outside volume " + std::to_string(vol));
  }
  const Parity p = index < vol / 2 ? Parity::Even : Parity::Odd;
  const std::int64_t cb = index - (p == Parity::Odd ? vol / 2 : 0);
  Coord4 c = lex_coord(2 * cb, dims);
  if (parity(c) != p) c[0] += 1;
  return c;
}

int rank_of(const Coord4& grid_coord, const ProcessGrid& grid) noexcept {
  return static_cast<int>(lex_index(grid_coord, grid.dims));
}

Coord4 grid_coord_of(int rank, const ProcessGrid& grid) {
  if (rank < 0 || rank >= grid.size()) {
    throw Error(Errc::RankOutOfRange,
                "rank " + std::to_string(rank) + " outside grid " + format_dims(grid.dims));
  }
  return lex_coord(rank, grid.dims);
}

Coord4 Subdomain::to_global(const Coord4& local_site) const noexcept {
  Coord4 g{};
  for (int mu = 0; mu < kNd; ++mu) g[mu] = origin[mu] + local_site[mu];
  return g;
}

Subdomain make_subdomain(const Decomposition& decomp, int rank) {
  Subdomain s;
  s.decomp = decomp;
  s.rank = rank;
  s.grid_coord = grid_coord_of(rank, decomp.grid);
  for (int mu = 0; mu < kNd; ++mu) s.origin[mu] = s.grid_coord[mu] * decomp.local[mu];
  return s;
}

NeighborSite neighbor(const Decomposition& decomp, const Coord4& c, int mu, Sign sign) {
  NeighborSite n;
  n.site = c;
  const int extent = decomp.local[mu];
  int x = c[mu] + step(sign);
  if (x < 0 || x >= extent) {
    n.crosses_boundary = true;
    x = (x + extent) % extent;
    n.rank_step = decomp.grid.dims[mu] > 1 ? step(sign) : 0;
  }
  n.site[mu] = x;
  return n;
}

std::int64_t face_volume(const Coord4& dims, int mu) noexcept { return volume(dims) / dims[mu]; }

std::int64_t face_index(const Coord4& c, const Coord4& dims, int mu) noexcept {
  std::int64_t index = 0;
  std::int64_t stride = 1;
  for (int nu = 0; nu < kNd; ++nu) {
    if (nu == mu) continue;
    index += stride * c[nu];
    stride *= dims[nu];
  }
  return index;
}

std::int64_t surface_count(const Coord4& local) noexcept {
  std::int64_t total = 0;
  for (int mu = 0; mu < kNd; ++mu) total += 2 * face_volume(local, mu);
  return total;
}

double surface_to_volume(const Coord4& local) noexcept {
  return static_cast<double>(surface_count(local)) / static_cast<double>(volume(local));
}

}  // namespace lqs
