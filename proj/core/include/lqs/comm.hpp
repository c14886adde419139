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

// Simulated ranks on a 4D torus.
//
// A Transport moves framed byte messages between ranks; a Communicator is
// one rank's handle on it and provides halo exchange, deterministic
// reductions, barriers and gathers on top. Two transports exist: Serial (a
// single rank talking to itself) and Concurrent (one thread per rank, ordered
// in-process queues). Both keep every (source, destination, channel) stream
// FIFO and lossless.

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lqs/error.hpp"
#include "lqs/geometry.hpp"

namespace lqs {

using Bytes = std::vector<std::byte>;

// ---------------------------------------------------------------------------
// Message framing: header {phase: u64, axis: u8, sign: u8, byte_len: u64}
// followed by byte_len payload bytes, all little-endian.

struct MessageHeader {
  std::uint64_t phase = 0;
  std::uint8_t axis = 0;
  std::uint8_t sign = 0;
  std::uint64_t byte_len = 0;

  friend bool operator==(const MessageHeader&, const MessageHeader&) = default;
};

inline constexpr std::size_t kHeaderBytes = 18;
// axis value marking collective (non-halo) traffic.
inline constexpr std::uint8_t kCollectiveAxis = 0xff;

Bytes frame_message(const MessageHeader& header, std::span<const std::byte> payload);

struct FramedView {
  MessageHeader header;
  std::span<const std::byte> payload;
};

// Throws SizeMismatch when the buffer is shorter than its header claims.
FramedView parse_frame(std::span<const std::byte> message);

// ---------------------------------------------------------------------------

// Stream selector. Halo traffic uses 2*axis + sign so the +face and -face
// sent to the same neighbor (grid extent 2) never share a queue.
enum class Channel : std::uint8_t {
  Reduce = 8,
  Barrier = 9,
  Gather = 10,
};

constexpr std::uint8_t halo_channel(int axis, Sign sign) noexcept {
  return static_cast<std::uint8_t>(2 * axis + static_cast<int>(sign));
}

enum class TransportKind { Serial, Concurrent };

TransportKind parse_transport(std::string_view name);
std::string_view to_string(TransportKind kind) noexcept;

using Seconds = std::chrono::duration<double>;

class Transport {
 public:
  virtual ~Transport() = default;

  virtual int size() const noexcept = 0;
  virtual TransportKind kind() const noexcept = 0;

  virtual void send(int src, int dst, std::uint8_t channel, Bytes message) = 0;
  // Blocks until a message on (src -> dst, channel) is available. `what`
  // names the phase for watchdog diagnostics.
  virtual Bytes recv(int dst, int src, std::uint8_t channel, std::string_view what) = 0;

  // Wakes every blocked receiver with TransportClosed.
  virtual void close(const std::string& reason) = 0;
};

class SerialTransport final : public Transport {
 public:
  SerialTransport() = default;

  int size() const noexcept override { return 1; }
  TransportKind kind() const noexcept override { return TransportKind::Serial; }
  void send(int src, int dst, std::uint8_t channel, Bytes message) override;
  Bytes recv(int dst, int src, std::uint8_t channel, std::string_view what) override;
  void close(const std::string& reason) override;

 private:
  std::map<std::uint8_t, std::deque<Bytes>> queues_;
  std::optional<std::string> closed_;
};

class ConcurrentTransport final : public Transport {
 public:
  // `watchdog`: maximum time any single receive may wait before the run is
  // aborted with Timeout. Unset means wait forever.
  explicit ConcurrentTransport(int ranks, std::optional<Seconds> watchdog = std::nullopt);

  int size() const noexcept override { return static_cast<int>(boxes_.size()); }
  TransportKind kind() const noexcept override { return TransportKind::Concurrent; }
  void send(int src, int dst, std::uint8_t channel, Bytes message) override;
  Bytes recv(int dst, int src, std::uint8_t channel, std::string_view what) override;
  void close(const std::string& reason) override;

 private:
  struct Mailbox {
    std::mutex mutex;
    std::condition_variable ready;
    std::map<std::pair<int, std::uint8_t>, std::deque<Bytes>> queues;
  };

  std::vector<std::unique_ptr<Mailbox>> boxes_;
  std::optional<Seconds> watchdog_;
  std::mutex closed_mutex_;
  std::optional<std::string> closed_;
  bool is_closed(std::string* reason);
};

// ---------------------------------------------------------------------------

struct Topology {
  ProcessGrid grid;
  int rank = 0;
  Coord4 coord{};
  // neighbors[mu][sign]
  std::array<std::array<int, 2>, kNd> neighbors{};

  int neighbor(int mu, Sign s) const noexcept { return neighbors[mu][static_cast<int>(s)]; }
};

// Throws RankOutOfRange.
Topology build_topology(const ProcessGrid& grid, int rank);

// One halo message: the face this rank packs and sends, and the ghost block
// the matching message from the other side fills.
struct HaloMessage {
  int axis = 0;
  Sign sign = Sign::Plus;  // ghost block (axis, sign) on the receiver
  int send_to = 0;
  int recv_from = 0;
  std::vector<std::int64_t> send_indices;  // into the local element array
  std::int64_t ghost_offset = 0;           // into the ghost element array
  std::int64_t count = 0;
};

struct HaloPlan {
  std::vector<HaloMessage> messages;
  std::int64_t ghost_size = 0;
  std::size_t element_bytes = 0;

  std::int64_t bytes_per_exchange() const noexcept {
    return ghost_size * static_cast<std::int64_t>(element_bytes);
  }
};

// Spinor halo of a single-parity field: eight blocks in order (0,+), (0,-),
// (1,+), ... Block (mu, +) holds the parity-p sites of the +mu neighbor's
// x_mu = 0 face, block (mu, -) those of the -mu neighbor's last face, each
// ordered by face_index. Local indices are checkerboard indices.
HaloPlan make_fermion_halo_plan(const Subdomain& sub, const Topology& topo, Parity p,
                                std::size_t element_bytes);

// Link halo: four blocks, block mu holding U_mu on the -mu neighbor's last
// face (all parities, face_index order). Local indices are site_index*4 + mu.
HaloPlan make_gauge_halo_plan(const Subdomain& sub, const Topology& topo,
                              std::size_t element_bytes);

// Position of a neighbor site inside the ghost array of a fermion plan.
std::int64_t fermion_ghost_slot(const Coord4& wrapped_site, const Coord4& local, int mu, Sign s,
                                const HaloPlan& plan);

// ---------------------------------------------------------------------------

struct CommStats {
  std::int64_t halo_exchanges = 0;
  std::int64_t halo_bytes = 0;
  std::int64_t reductions = 0;
};

class Communicator {
 public:
  Communicator(Transport& transport, Topology topology)
      : transport_(&transport), topo_(std::move(topology)) {}

  int rank() const noexcept { return topo_.rank; }
  int size() const noexcept { return topo_.grid.size(); }
  const Topology& topology() const noexcept { return topo_; }
  const CommStats& stats() const noexcept { return stats_; }
  TransportKind transport_kind() const noexcept { return transport_->kind(); }

  // Sends every face, then completes every receive. Buffered sends make
  // this equivalent to posting all receives first.
  template <class T>
  void halo_exchange(const HaloPlan& plan, std::span<const T> local, std::span<T> ghost);

  // Element-wise sum over ranks, accumulated in ascending rank order on
  // every rank: identical bits everywhere, reproducible at fixed rank count.
  template <class T>
  std::vector<T> allreduce_det(std::span<const T> local);

  template <class T>
  T allreduce_det(const T& value) {
    return allreduce_det(std::span<const T>(&value, 1)).front();
  }

  void barrier();

  // Rank 0 receives every rank's array (index = rank); others get {}.
  template <class T>
  std::vector<std::vector<T>> gather_to_root(std::span<const T> local);

 private:
  void send_framed(int dst, std::uint8_t channel, std::uint8_t axis, std::uint8_t sign,
                   std::span<const std::byte> payload);
  Bytes recv_framed(int src, std::uint8_t channel, std::uint8_t axis, std::uint8_t sign,
                    std::string_view what, std::size_t* payload_offset);

  Transport* transport_;
  Topology topo_;
  std::uint64_t phase_ = 0;
  CommStats stats_;
};

template <class T>
void Communicator::halo_exchange(const HaloPlan& plan, std::span<const T> local, std::span<T> ghost) {
  static_assert(std::is_trivially_copyable_v<T>);
  if (plan.element_bytes != sizeof(T) || static_cast<std::int64_t>(ghost.size()) < plan.ghost_size) {
    throw Error(Errc::SizeMismatch, "halo plan does not match field storage");
  }
  ++phase_;
  Bytes payload;
  for (const HaloMessage& m : plan.messages) {
    payload.resize(static_cast<std::size_t>(m.count) * sizeof(T));
    std::byte* out = payload.data();
    for (std::int64_t idx : m.send_indices) {
      std::memcpy(out, &local[static_cast<std::size_t>(idx)], sizeof(T));
      out += sizeof(T);
    }
    send_framed(m.send_to, halo_channel(m.axis, m.sign), static_cast<std::uint8_t>(m.axis),
                static_cast<std::uint8_t>(m.sign), payload);
  }
  for (const HaloMessage& m : plan.messages) {
    std::size_t offset = 0;
    const Bytes msg = recv_framed(m.recv_from, halo_channel(m.axis, m.sign), static_cast<std::uint8_t>(m.axis),
                                  static_cast<std::uint8_t>(m.sign), "halo exchange", &offset);
    const std::size_t expected = static_cast<std::size_t>(m.count) * sizeof(T);
    if (msg.size() - offset != expected) {
      throw Error(Errc::SizeMismatch, "halo message of " + std::to_string(msg.size() - offset) +
                                          " bytes, plan expects " + std::to_string(expected));
    }
    std::memcpy(&ghost[static_cast<std::size_t>(m.ghost_offset)], msg.data() + offset, expected);
    stats_.halo_bytes += static_cast<std::int64_t>(expected);
  }
  ++stats_.halo_exchanges;
}

template <class T>
std::vector<T> Communicator::allreduce_det(std::span<const T> local) {
  static_assert(std::is_trivially_copyable_v<T>);
  ++phase_;
  ++stats_.reductions;
  const auto bytes = std::as_bytes(local);
  for (int r = 0; r < size(); ++r) {
    send_framed(r, static_cast<std::uint8_t>(Channel::Reduce), kCollectiveAxis, 0, bytes);
  }
  std::vector<T> sum(local.size());
  std::vector<T> part(local.size());
  for (int r = 0; r < size(); ++r) {
    std::size_t offset = 0;
    const Bytes msg = recv_framed(r, static_cast<std::uint8_t>(Channel::Reduce), kCollectiveAxis, 0,
                                  "allreduce", &offset);
    if (msg.size() - offset != bytes.size()) {
      throw Error(Errc::CollectiveMismatch, "allreduce length differs between rank " + std::to_string(rank()) +
                                                " and rank " + std::to_string(r));
    }
    std::memcpy(part.data(), msg.data() + offset, bytes.size());
    if (r == 0) {
      sum = part;
    } else {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += part[i];
    }
  }
  return sum;
}

template <class T>
std::vector<std::vector<T>> Communicator::gather_to_root(std::span<const T> local) {
  static_assert(std::is_trivially_copyable_v<T>);
  ++phase_;
  send_framed(0, static_cast<std::uint8_t>(Channel::Gather), kCollectiveAxis, 0, std::as_bytes(local));
  std::vector<std::vector<T>> out;
  if (rank() != 0) return out;
  out.resize(static_cast<std::size_t>(size()));
  for (int r = 0; r < size(); ++r) {
    std::size_t offset = 0;
    const Bytes msg = recv_framed(r, static_cast<std::uint8_t>(Channel::Gather), kCollectiveAxis, 0,
                                  "gather", &offset);
    const std::size_t n = (msg.size() - offset) / sizeof(T);
    out[r].resize(n);
    std::memcpy(out[r].data(), msg.data() + offset, n * sizeof(T));
  }
  return out;
}

// Which sites a gathered array covers.
enum class SiteSet { Even, Odd, All };

// Reassembles per-rank site arrays (`per_site` elements per site, storage
// order of the local lattice) into the storage order of the equivalent
// single-rank field on the global lattice. Result on rank 0 only.
template <class T>
std::vector<T> gather_sites(Communicator& comm, const Decomposition& decomp, std::span<const T> local,
                            SiteSet set, std::size_t per_site) {
  const auto parts = comm.gather_to_root(local);
  if (comm.rank() != 0) return {};
  const Coord4& L = decomp.local;
  const Coord4& G = decomp.global.dims;
  const std::int64_t local_vol = volume(L);
  const std::int64_t sites = set == SiteSet::All ? local_vol : local_vol / 2;
  const std::int64_t global_sites = set == SiteSet::All ? volume(G) : volume(G) / 2;
  std::vector<T> out(static_cast<std::size_t>(global_sites) * per_site);
  for (int r = 0; r < comm.size(); ++r) {
    if (static_cast<std::int64_t>(parts[r].size()) != sites * static_cast<std::int64_t>(per_site)) {
      throw Error(Errc::CollectiveMismatch, "rank " + std::to_string(r) + " sent a field of the wrong size");
    }
    const Subdomain sub = make_subdomain(decomp, r);
    for (std::int64_t i = 0; i < sites; ++i) {
      std::int64_t site = i;
      if (set == SiteSet::Odd) site += local_vol / 2;
      const Coord4 g = sub.to_global(index_to_site(site, L));
      std::int64_t dst = site_index(g, G);
      if (set == SiteSet::Odd) dst -= volume(G) / 2;
      std::memcpy(&out[static_cast<std::size_t>(dst) * per_site], &parts[r][static_cast<std::size_t>(i) * per_site],
                  per_site * sizeof(T));
    }
  }
  return out;
}

// Runs `body` once per rank of `grid` on a fresh transport and waits for all
// ranks. Serial requires a single-rank grid. The first failure (preferring
// any error over the TransportClosed it triggers on other ranks) is
// rethrown after every worker has stopped.
void run_ranks(TransportKind kind, const ProcessGrid& grid, const std::function<void(Communicator&)>& body,
               std::optional<Seconds> watchdog = std::nullopt);

}  // namespace lqs
