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

#include "lqs/solver.hpp"

#include <chrono>
#include <cmath>

#include "lqs/error.hpp"

namespace lqs {

void CGConfig::validate() const {
  if (!(tol > 0.0 && tol < 1.0)) throw Error(Errc::InvalidParams, "CG tolerance must lie in (0, 1)");
  if (max_iter <= 0) throw Error(Errc::InvalidParams, "max_iter must be positive");
  if (true_residual_every <= 0) throw Error(Errc::InvalidParams, "true_residual_every must be positive");
}

namespace {

// res <- c - A x, returns |res|^2.
double residual_vector(WilsonOperator& op, FermionField& x, const FermionField& c, FermionField& ax,
                       FermionField& res) {
  op.apply_normal(x, ax);
  copy(c, res);
  axpy(Complex(-1.0, 0.0), ax, res, &op.flops());
  return norm2(op.comm(), res, &op.flops());
}

}  // namespace

CGResult cg_solve(WilsonOperator& op, const FermionField& b, const CGConfig& cfg) {
  cfg.validate();
  if (b.parity() != Parity::Even) throw Error(Errc::ParityMismatch, "CG right-hand side must be even");
  Communicator& comm = op.comm();
  const LayoutPtr& layout = op.layout();
  const std::int64_t flops_before = op.flops().total();
  const auto t0 = std::chrono::steady_clock::now();

  if (norm2(comm, b, &op.flops()) == 0.0) throw Error(Errc::ZeroRhs, "right-hand side is zero");

  FermionField rhs(layout, Parity::Even);
  copy(b, rhs);
  FermionField c(layout, Parity::Even);
  op.apply_preconditioned(rhs, c, Adjoint::Yes);
  const double cc = norm2(comm, c, &op.flops());
  if (cc == 0.0) throw Error(Errc::ZeroRhs, "Mhat^dag b vanishes");

  CGResult result{FermionField(layout, Parity::Even), 0, {}, false, false, 0.0, 0, 0.0};
  FermionField& x = result.solution;
  zero(x);
  FermionField r(layout, Parity::Even);
  FermionField p(layout, Parity::Even);
  FermionField ap(layout, Parity::Even);
  copy(c, r);
  copy(c, p);
  double rr = cc;
  result.residual_history.push_back(1.0);

  FermionField true_res(layout, Parity::Even);
  FermionField scratch(layout, Parity::Even);
  // True relative residual into true_res, recording its gap to `recursive`.
  auto true_relative = [&](double recursive) {
    const double tr = std::sqrt(residual_vector(op, x, c, scratch, true_res) / cc);
    const double drift = std::abs(tr - recursive);
    result.max_drift = std::max(result.max_drift, drift);
    if (drift > 10.0 * cfg.tol) result.drift_flagged = true;
    return tr;
  };

  while (result.iterations < cfg.max_iter) {
    op.apply_normal(p, ap);
    const double pap = dot(comm, p, ap, &op.flops()).real();
    if (!(pap > 0.0)) {
      throw Error(Errc::BreakdownPAp, "p^dag A p = " + std::to_string(pap) + " at iteration " +
                                          std::to_string(result.iterations));
    }
    const double alpha = rr / pap;
    axpy(Complex(alpha, 0.0), p, x, &op.flops());
    axpy(Complex(-alpha, 0.0), ap, r, &op.flops());
    const double rr_new = norm2(comm, r, &op.flops());
    ++result.iterations;
    const double rel = std::sqrt(rr_new / cc);
    result.residual_history.push_back(rel);
    if (cfg.on_iterate) cfg.on_iterate(result.iterations, x);

    if (rel <= cfg.tol) {
      const double tr = true_relative(rel);
      if (tr <= cfg.tol) {
        result.residual_history.back() = tr;
        result.converged = true;
        break;
      }
      // The recursive residual drifted below tol while the true one did not:
      // restart from the true residual.
      copy(true_res, r);
      copy(true_res, p);
      rr = tr * tr * cc;
      continue;
    }
    if (result.iterations % cfg.true_residual_every == 0) true_relative(rel);
    xpay(r, Complex(rr_new / rr, 0.0), p, &op.flops());
    rr = rr_new;
  }
  if (!result.converged) result.residual_history.back() = true_relative(result.residual_history.back());

  const auto t1 = std::chrono::steady_clock::now();
  result.elapsed_s = std::chrono::duration<double>(t1 - t0).count();
  const std::int64_t local_flops = op.flops().total() - flops_before;
  result.flops = comm.allreduce_det(local_flops);
  return result;
}

double true_residual(WilsonOperator& op, const FermionField& x, const FermionField& b) {
  const LayoutPtr& layout = op.layout();
  FermionField rhs(layout, Parity::Even);
  copy(b, rhs);
  FermionField c(layout, Parity::Even);
  op.apply_preconditioned(rhs, c, Adjoint::Yes);
  const double cc = norm2(op.comm(), c, &op.flops());
  if (cc == 0.0) throw Error(Errc::ZeroRhs, "Mhat^dag b vanishes");
  FermionField xx(layout, Parity::Even);
  copy(x, xx);
  FermionField ax(layout, Parity::Even);
  FermionField res(layout, Parity::Even);
  return std::sqrt(residual_vector(op, xx, c, ax, res) / cc);
}

}  // namespace lqs
