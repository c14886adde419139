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

#include "lqs/error.hpp"

namespace lqs {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::NonDivisible: return "NonDivisible";
    case Errc::OddLocalExtent: return "OddLocalExtent";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InvalidDims: return "InvalidDims";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ParityMismatch: return "ParityMismatch";
    case Errc::HaloStale: return "HaloStale";
    case Errc::BreakdownPAp: return "BreakdownPAp";
    case Errc::ZeroRhs: return "ZeroRhs";
    case Errc::ZeroElapsed: return "ZeroElapsed";
    case Errc::RankOutOfRange: return "RankOutOfRange";
    case Errc::TransportClosed: return "TransportClosed";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::CollectiveMismatch: return "CollectiveMismatch";
    case Errc::Timeout: return "Timeout";
    case Errc::SolveFailed: return "SolveFailed";
    case Errc::ParseError: return "ParseError";
    case Errc::ConsistencyViolation: return "ConsistencyViolation";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::Underdetermined: return "Underdetermined";
    case Errc::NoPositiveFit: return "NoPositiveFit";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace lqs
