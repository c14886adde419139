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

#include "lqs/field_io.hpp"

#include <array>
#include <bit>
#include <fstream>

#include "lqs/error.hpp"

namespace lqs {

namespace {

constexpr std::array<char, 4> kMagic{'L', 'Q', 'F', '1'};

template <class UInt>
void put_le(std::ostream& os, UInt v) {
  std::array<char, sizeof(UInt)> buf;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(buf.data(), buf.size());
}

template <class UInt>
UInt get_le(std::istream& is) {
  std::array<unsigned char, sizeof(UInt)> buf;
  if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw Error(Errc::ParseError, "truncated field file");
  }
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(buf[i]) << (8 * i);
  return v;
}

std::int64_t expected_values(const Coord4& dims, FieldKind kind) {
  const std::int64_t vol = volume(dims);
  switch (kind) {
    case FieldKind::Even:
    case FieldKind::Odd: return vol / 2 * kNs * kNc;
    case FieldKind::Gauge: return vol * kNd * kNc * kNc;
  }
  return 0;
}

}  // namespace

void write_field(const std::filesystem::path& path, const StoredField& field) {
  if (static_cast<std::int64_t>(field.values.size()) != expected_values(field.dims, field.kind)) {
    throw Error(Errc::ShapeMismatch, "field value count does not match its dims");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  for (int d : field.dims) put_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(field.kind));
  for (const Complex& z : field.values) {
    put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(z.real()));
    put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(z.imag()));
  }
  if (!os) throw Error(Errc::IoError, "write to " + path.string() + " failed");
}

StoredField read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::IoError, "cannot open " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(Errc::ParseError, path.string() + " is not an LQF1 file");
  }
  StoredField f;
  for (int& d : f.dims) d = static_cast<int>(get_le<std::uint32_t>(is));
  const auto kind = get_le<std::uint8_t>(is);
  if (kind > 2) throw Error(Errc::ParseError, "unknown field kind " + std::to_string(kind));
  f.kind = static_cast<FieldKind>(kind);
  const std::int64_t n = expected_values(f.dims, f.kind);
  f.values.resize(static_cast<std::size_t>(n));
  for (Complex& z : f.values) {
    const double re = std::bit_cast<double>(get_le<std::uint64_t>(is));
    const double im = std::bit_cast<double>(get_le<std::uint64_t>(is));
    z = Complex(re, im);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw Error(Errc::ParseError, "trailing bytes after field data in " + path.string());
  }
  return f;
}

StoredField store_fermion(const Coord4& dims, Parity parity, std::span<const Spinor> sites) {
  StoredField f{dims, parity == Parity::Even ? FieldKind::Even : FieldKind::Odd, {}};
  f.values.reserve(sites.size() * kNs * kNc);
  for (const Spinor& sp : sites)
    for (const ColorVector& cv : sp)
      for (const Complex& z : cv) f.values.push_back(z);
  return f;
}

StoredField store_gauge(const Coord4& dims, std::span<const ColorMatrix> links) {
  StoredField f{dims, FieldKind::Gauge, {}};
  f.values.reserve(links.size() * kNc * kNc);
  for (const ColorMatrix& m : links)
    for (const Complex& z : m.e) f.values.push_back(z);
  return f;
}

std::vector<Spinor> spinors_of(const StoredField& field) {
  if (field.kind == FieldKind::Gauge) throw Error(Errc::ShapeMismatch, "gauge file read as fermion field");
  std::vector<Spinor> out(field.values.size() / (kNs * kNc));
  std::size_t k = 0;
  for (Spinor& sp : out)
    for (ColorVector& cv : sp)
      for (Complex& z : cv) z = field.values[k++];
  return out;
}

std::vector<ColorMatrix> links_of(const StoredField& field) {
  if (field.kind != FieldKind::Gauge) throw Error(Errc::ShapeMismatch, "fermion file read as gauge field");
  std::vector<ColorMatrix> out(field.values.size() / (kNc * kNc));
  std::size_t k = 0;
  for (ColorMatrix& m : out)
    for (Complex& z : m.e) z = field.values[k++];
  return out;
}

}  // namespace lqs
