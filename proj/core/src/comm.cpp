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

#include "lqs/comm.hpp"

#include <exception>
#include <thread>

namespace lqs {

namespace {

void put_u64(std::byte* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<std::byte>((v >> (8 * i)) & 0xff);
}

std::uint64_t get_u64(const std::byte* in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  return v;
}

}  // namespace

Bytes frame_message(const MessageHeader& header, std::span<const std::byte> payload) {
  Bytes out(kHeaderBytes + payload.size());
  put_u64(out.data(), header.phase);
  out[8] = static_cast<std::byte>(header.axis);
  out[9] = static_cast<std::byte>(header.sign);
  put_u64(out.data() + 10, payload.size());
  if (!payload.empty()) std::memcpy(out.data() + kHeaderBytes, payload.data(), payload.size());
  return out;
}

FramedView parse_frame(std::span<const std::byte> message) {
  if (message.size() < kHeaderBytes) {
    throw Error(Errc::SizeMismatch, "message shorter than its header");
  }
  FramedView view;
  view.header.phase = get_u64(message.data());
  view.header.axis = static_cast<std::uint8_t>(message[8]);
  view.header.sign = static_cast<std::uint8_t>(message[9]);
  view.header.byte_len = get_u64(message.data() + 10);
  if (message.size() - kHeaderBytes != view.header.byte_len) {
    throw Error(Errc::SizeMismatch, "header announces " + std::to_string(view.header.byte_len) + " bytes, frame carries " +
                                        std::to_string(message.size() - kHeaderBytes));
  }
  view.payload = message.subspan(kHeaderBytes);
  return view;
}

TransportKind parse_transport(std::string_view name) {
  if (name == "serial") return TransportKind::Serial;
  if (name == "concurrent") return TransportKind::Concurrent;
  throw Error(Errc::InvalidParams, "unknown transport \"" + std::string(name) + "\"");
}

std::string_view to_string(TransportKind kind) noexcept {
  return kind == TransportKind::Serial ? "serial" : "concurrent";
}

// --- serial ----------------------------------------------------------------

void SerialTransport::send(int src, int dst, std::uint8_t channel, Bytes message) {
  if (closed_) throw Error(Errc::TransportClosed, *closed_);
  if (src != 0 || dst != 0) throw Error(Errc::RankOutOfRange, "serial transport has a single rank");
  queues_[channel].push_back(std::move(message));
}

Bytes SerialTransport::recv(int dst, int src, std::uint8_t channel, std::string_view what) {
  if (closed_) throw Error(Errc::TransportClosed, *closed_);
  if (src != 0 || dst != 0) throw Error(Errc::RankOutOfRange, "serial transport has a single rank");
  auto& q = queues_[channel];
  if (q.empty()) {
    throw Error(Errc::CollectiveMismatch, "serial transport: nothing was sent for " + std::string(what));
  }
  Bytes msg = std::move(q.front());
  q.pop_front();
  return msg;
}

void SerialTransport::close(const std::string& reason) { closed_ = reason; }

// --- concurrent ------------------------------------------------------------

ConcurrentTransport::ConcurrentTransport(int ranks, std::optional<Seconds> watchdog) : watchdog_(watchdog) {
  if (ranks <= 0) throw Error(Errc::InvalidParams, "transport needs at least one rank");
  boxes_.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) boxes_.push_back(std::make_unique<Mailbox>());
}

bool ConcurrentTransport::is_closed(std::string* reason) {
  std::lock_guard lock(closed_mutex_);
  if (closed_ && reason) *reason = *closed_;
  return closed_.has_value();
}

void ConcurrentTransport::send(int src, int dst, std::uint8_t channel, Bytes message) {
  if (dst < 0 || dst >= size() || src < 0 || src >= size()) {
    throw Error(Errc::RankOutOfRange, "send " + std::to_string(src) + " -> " + std::to_string(dst));
  }
  std::string reason;
  if (is_closed(&reason)) throw Error(Errc::TransportClosed, reason);
  Mailbox& box = *boxes_[static_cast<std::size_t>(dst)];
  {
    std::lock_guard lock(box.mutex);
    box.queues[{src, channel}].push_back(std::move(message));
  }
  box.ready.notify_all();
}

Bytes ConcurrentTransport::recv(int dst, int src, std::uint8_t channel, std::string_view what) {
  if (dst < 0 || dst >= size() || src < 0 || src >= size()) {
    throw Error(Errc::RankOutOfRange, "recv " + std::to_string(src) + " -> " + std::to_string(dst));
  }
  Mailbox& box = *boxes_[static_cast<std::size_t>(dst)];
  std::unique_lock lock(box.mutex);
  auto& q = box.queues[{src, channel}];
  const auto start = std::chrono::steady_clock::now();
  std::string reason;
  while (q.empty()) {
    if (is_closed(&reason)) throw Error(Errc::TransportClosed, reason);
    if (watchdog_) {
      const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(*watchdog_);
      if (box.ready.wait_until(lock, deadline) == std::cv_status::timeout && q.empty()) {
        if (is_closed(&reason)) throw Error(Errc::TransportClosed, reason);
        throw Error(Errc::Timeout, "watchdog: rank " + std::to_string(dst) + " stalled in " + std::string(what) +
                                       " waiting on rank " + std::to_string(src) + " for more than " +
                                       std::to_string(watchdog_->count()) + " s");
      }
    } else {
      box.ready.wait(lock);
    }
  }
  Bytes msg = std::move(q.front());
  q.pop_front();
  return msg;
}

void ConcurrentTransport::close(const std::string& reason) {
  {
    std::lock_guard lock(closed_mutex_);
    if (!closed_) closed_ = reason;
  }
  for (auto& box : boxes_) {
    // Taking the mailbox lock orders the flag update before any waiter's
    // next predicate check.
    std::lock_guard lock(box->mutex);
    box->ready.notify_all();
  }
}

// --- topology and plans ----------------------------------------------------

Topology build_topology(const ProcessGrid& grid, int rank) {
  Topology t;
  t.grid = grid;
  t.rank = rank;
  t.coord = grid_coord_of(rank, grid);
  for (int mu = 0; mu < kNd; ++mu) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      Coord4 c = t.coord;
      c[mu] = (c[mu] + step(s) + grid.dims[mu]) % grid.dims[mu];
      t.neighbors[mu][static_cast<int>(s)] = rank_of(c, grid);
    }
  }
  return t;
}

namespace {

// Sites of the face x_mu = fixed, in face_index order.
std::vector<Coord4> face_sites(const Coord4& L, int mu, int fixed) {
  std::vector<Coord4> out;
  out.reserve(static_cast<std::size_t>(face_volume(L, mu)));
  Coord4 face_dims = L;
  face_dims[mu] = 1;
  const std::int64_t n = volume(face_dims);
  for (std::int64_t i = 0; i < n; ++i) {
    Coord4 c = lex_coord(i, face_dims);
    c[mu] = fixed;
    out.push_back(c);
  }
  return out;
}

int face_coordinate(const Coord4& L, int mu, Sign s) { return s == Sign::Plus ? 0 : L[mu] - 1; }

}  // namespace

HaloPlan make_fermion_halo_plan(const Subdomain& sub, const Topology& topo, Parity p, std::size_t element_bytes) {
  const Coord4& L = sub.decomp.local;
  HaloPlan plan;
  plan.element_bytes = element_bytes;
  for (int mu = 0; mu < kNd; ++mu) {
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      HaloMessage m;
      m.axis = mu;
      m.sign = s;
      // Our own face at the same position is what the rank on the other side
      // expects in its (mu, s) ghost block.
      m.send_to = topo.neighbor(mu, flip(s));
      m.recv_from = topo.neighbor(mu, s);
      for (const Coord4& c : face_sites(L, mu, face_coordinate(L, mu, s))) {
        if (parity(c) == p) m.send_indices.push_back(checkerboard_index(c, L));
      }
      m.count = static_cast<std::int64_t>(m.send_indices.size());
      m.ghost_offset = plan.ghost_size;
      plan.ghost_size += m.count;
      plan.messages.push_back(std::move(m));
    }
  }
  return plan;
}

HaloPlan make_gauge_halo_plan(const Subdomain& sub, const Topology& topo, std::size_t element_bytes) {
  const Coord4& L = sub.decomp.local;
  HaloPlan plan;
  plan.element_bytes = element_bytes;
  for (int mu = 0; mu < kNd; ++mu) {
    HaloMessage m;
    m.axis = mu;
    m.sign = Sign::Minus;
    m.send_to = topo.neighbor(mu, Sign::Plus);
    m.recv_from = topo.neighbor(mu, Sign::Minus);
    for (const Coord4& c : face_sites(L, mu, L[mu] - 1)) {
      m.send_indices.push_back(site_index(c, L) * kNd + mu);
    }
    m.count = static_cast<std::int64_t>(m.send_indices.size());
    m.ghost_offset = plan.ghost_size;
    plan.ghost_size += m.count;
    plan.messages.push_back(std::move(m));
  }
  return plan;
}

std::int64_t fermion_ghost_slot(const Coord4& wrapped_site, const Coord4& local, int mu, Sign s,
                                const HaloPlan& plan) {
  const HaloMessage& m = plan.messages[static_cast<std::size_t>(2 * mu + static_cast<int>(s))];
  return m.ghost_offset + face_index(wrapped_site, local, mu) / 2;
}

// --- communicator ------------------------------------------------------------

void Communicator::send_framed(int dst, std::uint8_t channel, std::uint8_t axis, std::uint8_t sign,
                               std::span<const std::byte> payload) {
  MessageHeader h;
  h.phase = phase_;
  h.axis = axis;
  h.sign = sign;
  h.byte_len = payload.size();
  transport_->send(rank(), dst, channel, frame_message(h, payload));
}

Bytes Communicator::recv_framed(int src, std::uint8_t channel, std::uint8_t axis, std::uint8_t sign,
                                std::string_view what, std::size_t* payload_offset) {
  Bytes msg = transport_->recv(rank(), src, channel, what);
  const FramedView view = parse_frame(msg);
  if (view.header.phase != phase_ || view.header.axis != axis || view.header.sign != sign) {
    throw Error(Errc::CollectiveMismatch,
                std::string(what) + ": rank " + std::to_string(rank()) + " at phase " + std::to_string(phase_) +
                    " received phase " + std::to_string(view.header.phase) + " from rank " + std::to_string(src));
  }
  *payload_offset = kHeaderBytes;
  return msg;
}

void Communicator::barrier() {
  ++phase_;
  for (int r = 0; r < size(); ++r) {
    send_framed(r, static_cast<std::uint8_t>(Channel::Barrier), kCollectiveAxis, 0, {});
  }
  for (int r = 0; r < size(); ++r) {
    std::size_t offset = 0;
    recv_framed(r, static_cast<std::uint8_t>(Channel::Barrier), kCollectiveAxis, 0, "barrier", &offset);
  }
}

void run_ranks(TransportKind kind, const ProcessGrid& grid, const std::function<void(Communicator&)>& body,
               std::optional<Seconds> watchdog) {
  const int n = grid.size();
  if (kind == TransportKind::Serial) {
    if (n != 1) {
      throw Error(Errc::InvalidParams, "serial transport needs a 1x1x1x1 grid, got " + format_dims(grid.dims));
    }
    SerialTransport transport;
    Communicator comm(transport, build_topology(grid, 0));
    body(comm);
    return;
  }

  ConcurrentTransport transport(n, watchdog);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    workers.emplace_back([&, r] {
      try {
        Communicator comm(transport, build_topology(grid, r));
        body(comm);
      } catch (...) {
        errors[static_cast<std::size_t>(r)] = std::current_exception();
        transport.close("rank " + std::to_string(r) + " aborted");
      }
    });
  }
  for (auto& w : workers) w.join();

  std::exception_ptr first;
  for (const auto& e : errors) {
    if (!e) continue;
    if (!first) first = e;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.code() != Errc::TransportClosed) std::rethrow_exception(e);
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace lqs
