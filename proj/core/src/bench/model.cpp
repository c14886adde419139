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

#include "lqs/bench/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "lqs/error.hpp"
#include "lqs/flops.hpp"

namespace lqs::bench {

ModelParams ModelParams::make(double rate, double alpha, double beta) {
  if (!(std::isfinite(rate) && rate > 0.0)) throw Error(Errc::InvalidParams, "rate must be positive and finite");
  if (!(std::isfinite(alpha) && alpha >= 0.0)) throw Error(Errc::InvalidParams, "alpha must be >= 0 and finite");
  if (!(std::isfinite(beta) && beta >= 0.0)) throw Error(Errc::InvalidParams, "beta must be >= 0 and finite");
  return ModelParams{rate, alpha, beta};
}

ModelParams parse_model(std::string_view text) {
  double rate = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::InvalidParams, "expected key=value in \"" + std::string(item) + "\"");
    const auto key = item.substr(0, eq);
    const std::string value(item.substr(eq + 1));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) throw Error(Errc::InvalidParams, "bad number \"" + value + "\"");
    if (key == "r" || key == "rate") {
      rate = v;
    } else if (key == "alpha") {
      alpha = v;
    } else if (key == "beta") {
      beta = v;
    } else {
      throw Error(Errc::InvalidParams, "unknown model key \"" + std::string(key) + "\"");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return ModelParams::make(rate, alpha, beta);
}

ScalingSample sample_of(const PaperRow& row) {
  return ScalingSample{static_cast<double>(row.cores), row.local, row.total_time_s,
                       row.total_time_s * row.gflops_overall * 1e9};
}

ScalingSample sample_of(const RunRecord& record) {
  return ScalingSample{static_cast<double>(record.ranks) * record.width, record.local, record.total_time_s,
                       static_cast<double>(record.flops_total)};
}

namespace {

double halo_bytes(const Coord4& local, int bytes_per_site) {
  return static_cast<double>(surface_count(local) / 2) * bytes_per_site;
}

// Model features: T = f0 / rate + f1 * alpha + f2 * beta.
std::array<double, 3> features(double work_flops, double parallelism, const Coord4& local, int iterations,
                               int bytes_per_site) {
  return {work_flops / parallelism, 8.0 * iterations, iterations * halo_bytes(local, bytes_per_site)};
}

}  // namespace

Prediction predict(const ModelParams& model, double work_flops, double parallelism, const Coord4& local,
                   int iterations, int bytes_per_site) {
  ModelParams::make(model.rate, model.alpha, model.beta);
  if (!(parallelism > 0.0) || iterations < 0 || bytes_per_site < 0) {
    throw Error(Errc::InvalidParams, "parallelism must be positive, iterations and bytes non-negative");
  }
  const auto f = features(work_flops, parallelism, local, iterations, bytes_per_site);
  Prediction p;
  p.compute_s = f[0] / model.rate;
  p.comm_s = f[1] * model.alpha + f[2] * model.beta;
  p.time_s = p.compute_s + p.comm_s;
  return p;
}

std::vector<PredictedPoint> predict_grids(const ModelParams& model, double work_flops, const GlobalLattice& global,
                                          const std::vector<Coord4>& grids, int width, int iterations,
                                          int bytes_per_site) {
  std::vector<PredictedPoint> out;
  for (const Coord4& g : grids) {
    const Decomposition d = decompose(global, ProcessGrid::make(g));
    PredictedPoint pt;
    pt.grid = g;
    pt.local = d.local;
    pt.parallelism = static_cast<double>(d.ranks()) * width;
    pt.prediction = predict(model, work_flops, pt.parallelism, d.local, iterations, bytes_per_site);
    out.push_back(pt);
  }
  if (!out.empty()) {
    const double base = out.front().prediction.time_s * out.front().parallelism;
    for (auto& pt : out) pt.efficiency = base / (pt.prediction.time_s * pt.parallelism);
  }
  return out;
}

double cg_work_flops(std::int64_t global_volume, int iterations) {
  const std::int64_t half = global_volume / 2;
  const std::int64_t per_site = 4 * kFlopsPerHoppingSite + 5 * kFlopsAxpyPerComplex * kComplexPerSpinor +
                                kFlopsDotPerComplex * kComplexPerSpinor + kFlopsNorm2PerComplex * kComplexPerSpinor;
  return static_cast<double>(half) * static_cast<double>(per_site) * iterations;
}

namespace {

using Vec = std::vector<double>;

// Least squares restricted to the columns in `passive`, via the normal
// equations of the (column-normalized) design matrix.
Vec solve_subset(const std::vector<std::array<double, 3>>& a, const Vec& b, const std::array<bool, 3>& passive) {
  std::vector<int> cols;
  for (int j = 0; j < 3; ++j)
    if (passive[j]) cols.push_back(j);
  const std::size_t k = cols.size();
  std::vector<Vec> g(k, Vec(k + 1, 0.0));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c)
      for (const auto& row : a) g[r][c] += row[cols[r]] * row[cols[c]];
    for (std::size_t i = 0; i < a.size(); ++i) g[r][k] += a[i][cols[r]] * b[i];
  }
  for (std::size_t p = 0; p < k; ++p) {
    std::size_t piv = p;
    for (std::size_t r = p + 1; r < k; ++r)
      if (std::abs(g[r][p]) > std::abs(g[piv][p])) piv = r;
    std::swap(g[p], g[piv]);
    for (std::size_t r = p + 1; r < k; ++r) {
      const double f = g[r][p] / g[p][p];
      for (std::size_t c = p; c <= k; ++c) g[r][c] -= f * g[p][c];
    }
  }
  Vec sol(k);
  for (std::size_t p = k; p-- > 0;) {
    double acc = g[p][k];
    for (std::size_t c = p + 1; c < k; ++c) acc -= g[p][c] * sol[c];
    sol[p] = acc / g[p][p];
  }
  Vec x(3, 0.0);
  for (std::size_t r = 0; r < k; ++r) x[cols[r]] = sol[r];
  return x;
}

Vec gradient(const std::vector<std::array<double, 3>>& a, const Vec& b, const Vec& x) {
  Vec w(3, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double resid = b[i];
    for (int j = 0; j < 3; ++j) resid -= a[i][j] * x[j];
    for (int j = 0; j < 3; ++j) w[j] += a[i][j] * resid;
  }
  return w;
}

// Lawson-Hanson active-set NNLS for three unknowns.
Vec nnls(const std::vector<std::array<double, 3>>& a, const Vec& b) {
  Vec x(3, 0.0);
  std::array<bool, 3> passive{false, false, false};
  Vec w = gradient(a, b, x);
  const double tol = 1e-10 * std::max(1.0, *std::max_element(w.begin(), w.end(), [](double u, double v) {
    return std::abs(u) < std::abs(v);
  }));
  for (int outer = 0; outer < 30; ++outer) {
    int best = -1;
    for (int j = 0; j < 3; ++j)
      if (!passive[j] && w[j] > tol && (best < 0 || w[j] > w[best])) best = j;
    if (best < 0) break;
    passive[best] = true;
    while (true) {
      Vec s = solve_subset(a, b, passive);
      bool feasible = true;
      for (int j = 0; j < 3; ++j)
        if (passive[j] && s[j] <= 0.0) feasible = false;
      if (feasible) {
        x = s;
        break;
      }
      double step = 1.0;
      for (int j = 0; j < 3; ++j)
        if (passive[j] && s[j] <= 0.0) step = std::min(step, x[j] / (x[j] - s[j]));
      for (int j = 0; j < 3; ++j) {
        x[j] += step * (s[j] - x[j]);
        if (passive[j] && x[j] <= 1e-300) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
    w = gradient(a, b, x);
  }
  return x;
}

}  // namespace

FitResult fit_model(const std::vector<ScalingSample>& rows, int iterations, int bytes_per_site) {
  if (rows.size() < 3) throw Error(Errc::Underdetermined, "need at least 3 rows, got " + std::to_string(rows.size()));
  if (iterations <= 0) throw Error(Errc::InvalidParams, "iterations must be positive");

  // Rows weighted by 1/T_meas, columns normalized to unit length.
  std::vector<std::array<double, 3>> a;
  Vec b;
  for (const ScalingSample& s : rows) {
    if (!(s.time_s > 0.0)) throw Error(Errc::InvalidParams, "measured times must be positive");
    auto f = features(s.work_flops, s.parallelism, s.local, iterations, bytes_per_site);
    for (double& v : f) v /= s.time_s;
    a.push_back(f);
    b.push_back(1.0);
  }
  std::array<double, 3> scale{};
  for (int j = 0; j < 3; ++j) {
    double n2 = 0.0;
    for (const auto& row : a) n2 += row[j] * row[j];
    scale[j] = std::sqrt(n2);
    if (scale[j] == 0.0) throw Error(Errc::Underdetermined, "a model term is identically zero");
    for (auto& row : a) row[j] /= scale[j];
  }
  // Gram determinant of unit columns: 0 when the rows cannot separate the terms.
  double gram[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      gram[i][j] = 0.0;
      for (const auto& row : a) gram[i][j] += row[i] * row[j];
    }
  const double det = gram[0][0] * (gram[1][1] * gram[2][2] - gram[1][2] * gram[2][1]) -
                     gram[0][1] * (gram[1][0] * gram[2][2] - gram[1][2] * gram[2][0]) +
                     gram[0][2] * (gram[1][0] * gram[2][1] - gram[1][1] * gram[2][0]);
  if (det < 1e-14) throw Error(Errc::Underdetermined, "rows do not separate compute, latency and bandwidth terms");

  const Vec z = nnls(a, b);
  const double inv_rate = z[0] / scale[0];
  if (!(inv_rate > 0.0)) throw Error(Errc::NoPositiveFit, "fit yields no finite compute rate");

  FitResult out;
  out.params = ModelParams{1.0 / inv_rate, z[1] / scale[1], z[2] / scale[2]};
  for (const ScalingSample& s : rows) {
    const double t = predict(out.params, s.work_flops, s.parallelism, s.local, iterations, bytes_per_site).time_s;
    out.rel_residuals.push_back((t - s.time_s) / s.time_s);
  }
  return out;
}

}  // namespace lqs::bench
