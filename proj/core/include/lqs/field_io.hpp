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

// LQF1 field files:
//   "LQF1" | 4 x u32 dims | u8 kind (0 even, 1 odd, 2 gauge) | f64 (re, im) pairs
// All integers and doubles little-endian; values in storage order.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lqs/algebra.hpp"
#include "lqs/geometry.hpp"

namespace lqs {

enum class FieldKind : std::uint8_t { Even = 0, Odd = 1, Gauge = 2 };

struct StoredField {
  Coord4 dims{};
  FieldKind kind = FieldKind::Even;
  std::vector<Complex> values;
};

void write_field(const std::filesystem::path& path, const StoredField& field);
StoredField read_field(const std::filesystem::path& path);

StoredField store_fermion(const Coord4& dims, Parity parity, std::span<const Spinor> sites);
StoredField store_gauge(const Coord4& dims, std::span<const ColorMatrix> links);

std::vector<Spinor> spinors_of(const StoredField& field);
std::vector<ColorMatrix> links_of(const StoredField& field);

}  // namespace lqs
