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

#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "lqs/bench/model.hpp"
#include "lqs/bench/paper.hpp"
#include "lqs/bench/record.hpp"
#include "lqs/bench/runner.hpp"
#include "lqs/error.hpp"

namespace lqs::bench {
namespace {

const std::string kDataDir = LQS_DATA_DIR;

Errc code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

TEST(Record, RateIdentities) {
  const RunRecord r = make_record(4, 2, {4, 4, 8, 16}, 31, 0.123, 987654321);
  EXPECT_EQ(r.gflops_overall, 4 * r.mflops_per_rank / 1000.0);
  EXPECT_NEAR(r.gflops_overall, 987654321 / (0.123 * 1e9), 1e-12 * r.gflops_overall);
  EXPECT_NO_THROW(check_record(r, GlobalLattice::make({8, 8, 8, 16})));
  RunRecord bad = r;
  bad.gflops_overall *= 1.0 + 1e-6;
  EXPECT_EQ(code_of([&] { check_record(bad); }), Errc::ConsistencyViolation);
  EXPECT_EQ(code_of([&] { check_record(r, GlobalLattice::make({8, 8, 8, 8})); }), Errc::ConsistencyViolation);
  EXPECT_EQ(code_of([] { make_record(1, 1, {4, 4, 4, 4}, 1, 0.0, 10); }), Errc::ZeroElapsed);
}

TEST(Record, CsvRoundTrip) {
  std::vector<RunRecord> rows{make_record(1, 1, {8, 8, 8, 16}, 40, 0.3141592653589793, 123456789012),
                              make_record(8, 4, {4, 4, 4, 8}, 40, 1.0 / 3.0, 123456789012)};
  std::stringstream ss;
  write_runs_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')),
            "ranks,width,lx,ly,lz,lt,iterations,total_time_s,flops_total,mflops_per_rank,gflops_overall");
  EXPECT_EQ(parse_runs_csv(ss), rows);
  std::stringstream bad("ranks,width\n1,2\n");
  EXPECT_EQ(code_of([&] { parse_runs_csv(bad); }), Errc::ParseError);
  std::stringstream short_row(std::string(kRunCsvHeader) + "\n1,1,8,8,8,16,40,0.1,100\n");
  EXPECT_EQ(code_of([&] { parse_runs_csv(short_row); }), Errc::ParseError);
}

TEST(ReferenceTable, BundledTablesParse) {
  const auto t1 = read_paper_csv(kDataDir + "/table1.csv");
  const auto t2 = read_paper_csv(kDataDir + "/table2.csv");
  ASSERT_EQ(t1.size(), 5u);
  ASSERT_EQ(t2.size(), 4u);
  EXPECT_EQ(t1[3].cores, 8192);
  EXPECT_EQ(t1[3].mflops_per_core, 1109.46);
  EXPECT_EQ(t1[3].gflops_overall, 9088.72);
  EXPECT_EQ(t1[0].local, (Coord4{96, 12, 12, 12}));
  EXPECT_EQ(t2[3].cores, 131072);
  EXPECT_EQ(t2[3].ranks, 16384);
  EXPECT_EQ(t2[3].width, 8);
  EXPECT_EQ(t2[3].total_time_s, 10.45);
  EXPECT_EQ(t2[0].local, (Coord4{16, 16, 8, 12}));
}

TEST(ReferenceTable, TablesAreConsistent) {
  const auto v1 = validate_paper(read_paper_csv(kDataDir + "/table1.csv"));
  EXPECT_TRUE(v1.passed);
  EXPECT_NEAR(v1.mean_work_gflop, 1.510e7, 0.001e7);
  EXPECT_NEAR(v1.rows[3].derived_gflops, 9088.7, 0.05);
  EXPECT_NEAR(v1.rows[0].work_gflop, 8096.74 * 1865.15, 1e-6);
  const auto v2 = validate_paper(read_paper_csv(kDataDir + "/table2.csv"));
  EXPECT_TRUE(v2.passed);
  EXPECT_NEAR(v2.mean_work_gflop, 2.256e5, 0.001e5);
  EXPECT_NEAR(v2.rows[3].work_gflop, 10.45 * 21591.83, 1e-6);
  EXPECT_NO_THROW(require_consistent(v1));
}

TEST(ReferenceTable, DetectsCorruptedRows) {
  auto rows = read_paper_csv(kDataDir + "/table1.csv");
  rows[2].mflops_per_core *= 1.01;
  const auto v = validate_paper(rows);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.failing_rows(), std::vector<int>{2});
  EXPECT_FALSE(v.rows[2].rate_ok);
  EXPECT_TRUE(v.rows[2].work_ok);
  // A shifted time moves the mean too, so it can flag every row.
  auto slow = read_paper_csv(kDataDir + "/table1.csv");
  slow[4].total_time_s *= 1.05;
  const auto vs = validate_paper(slow);
  EXPECT_FALSE(vs.rows[4].work_ok);
  EXPECT_TRUE(vs.rows[4].rate_ok);
  try {
    require_consistent(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ConsistencyViolation);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
  std::stringstream bad(std::string(kPaperCsvHeader) + "\n1,1024,512,1,96x12x12x12,1,1,1\n");
  EXPECT_EQ(code_of([&] { parse_paper_csv(bad); }), Errc::ParseError);
}

TEST(Scaling, DerivedColumnsFromPaperTimes) {
  const auto s1 = derive_scaling({{1024, 8096.74}, {16384, 1298.62}});
  EXPECT_NEAR(s1[1].speedup, 6.235, 5e-4);
  EXPECT_NEAR(s1[1].efficiency, 0.390, 5e-4);
  const auto s2 = derive_scaling({{8192, 29.62}, {131072, 10.45}});
  EXPECT_NEAR(s2[1].speedup, 2.834, 5e-4);
  EXPECT_NEAR(s2[1].efficiency, 0.177, 5e-4);
  const auto one = derive_scaling({{4, 2.0}});
  EXPECT_EQ(one[0].speedup, 1.0);
  EXPECT_EQ(one[0].efficiency, 1.0);
}

TEST(Report, Formats) {
  std::vector<SweepRow> rows(3);
  rows[0].grid = {1, 1, 1, 1};
  rows[0].record = make_record(1, 1, {8, 8, 8, 16}, 40, 2.0, 4000000000);
  rows[1].grid = {5, 1, 1, 1};
  rows[1].error = "NonDivisible: nope";
  rows[2].grid = {2, 1, 1, 1};
  rows[2].record = make_record(2, 1, {4, 8, 8, 16}, 40, 1.25, 4000000000);
  ReportContext ctx{{8, 8, 8, 16}, 0.15, 1e-8, 7, "concurrent"};

  std::stringstream csv;
  render_report(csv, rows, ctx, ReportFormat::Csv);
  EXPECT_EQ(parse_runs_csv(csv).size(), 2u);

  std::stringstream md;
  render_report(md, rows, ctx, ReportFormat::Markdown);
  const std::string m = md.str();
  EXPECT_NE(m.find("| # Ranks | Width | Local Lattice | Total Time [s] | Mean Perf. per Rank [Mflop/s] | "
                   "Overall Perf. [Gflop/s] |"),
            std::string::npos);
  EXPECT_NE(m.find("1320"), std::string::npos);
  EXPECT_NE(m.find("8 x 8 x 8 x 16"), std::string::npos);
  EXPECT_NE(m.find("1.600"), std::string::npos);
  EXPECT_NE(m.find("80.0%"), std::string::npos);
  EXPECT_NE(m.find("NonDivisible"), std::string::npos);

  std::stringstream js;
  render_report(js, rows, ctx, ReportFormat::Json);
  const auto j = nlohmann::json::parse(js.str());
  ASSERT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["runs"][2]["ranks"], 2);
  EXPECT_DOUBLE_EQ(j["runs"][2]["speedup"].get<double>(), 1.6);
  EXPECT_TRUE(j["runs"][1].contains("error"));
  EXPECT_EQ(code_of([] { parse_format("xml"); }), Errc::InvalidParams);
}

TEST(Model, ParseAndValidate) {
  const ModelParams m = parse_model("r=1e9,alpha=2e-6,beta=1e-9");
  EXPECT_EQ(m.rate, 1e9);
  EXPECT_EQ(m.alpha, 2e-6);
  EXPECT_EQ(m.beta, 1e-9);
  EXPECT_EQ(code_of([] { parse_model("r=1e9,alpha=2e-6"); }), Errc::InvalidParams);
  EXPECT_EQ(code_of([] { parse_model("r=0,alpha=0,beta=0"); }), Errc::InvalidParams);
  EXPECT_EQ(code_of([] { parse_model("r=1,alpha=-1,beta=0"); }), Errc::InvalidParams);
  EXPECT_EQ(code_of([] { parse_model("r=1,alpha=1,gamma=0"); }), Errc::InvalidParams);
}

TEST(Model, NoCommunicationScalesLinearly) {
  const ModelParams m = ModelParams::make(1e9, 0.0, 0.0);
  const GlobalLattice g = GlobalLattice::make({64, 64, 64, 96});
  const auto pts = predict_grids(m, 1e15, g, {{4, 4, 8, 8}, {4, 4, 8, 16}, {4, 8, 16, 16}, {8, 8, 16, 16}}, 8, 500);
  for (const auto& pt : pts) {
    EXPECT_EQ(pt.prediction.comm_s, 0.0);
    EXPECT_DOUBLE_EQ(pt.prediction.time_s * pt.parallelism, pts[0].prediction.time_s * pts[0].parallelism);
    EXPECT_DOUBLE_EQ(pt.efficiency, 1.0);
  }
  EXPECT_EQ(code_of([&] { predict_grids(m, 1e15, g, {{5, 1, 1, 1}}, 1, 10); }), Errc::NonDivisible);
}

TEST(Model, SmallerDomainsRaiseCommunicationShare) {
  const ModelParams m = ModelParams::make(1e9, 1e-6, 1e-9);
  Coord4 l{32, 32, 32, 32};
  const double w = 1e14;
  double p = 16;
  double prev = predict(m, w, p, l, 100).comm_share();
  for (int k = 0; k < 3; ++k) {
    for (int& e : l) e /= 2;
    p *= 16;
    const double share = predict(m, w, p, l, 100).comm_share();
    EXPECT_GT(share, prev);
    prev = share;
  }
}

TEST(Model, WorkPerIteration) {
  EXPECT_EQ(cg_work_flops(256, 1), 128.0 * 5904);
  EXPECT_EQ(cg_work_flops(8 * 8 * 8 * 16, 10), 10.0 * 4096 * 5904);
}

std::vector<ScalingSample> synthetic(const ModelParams& m, int iters) {
  std::vector<ScalingSample> rows;
  const double w = 2e14;
  const GlobalLattice g = GlobalLattice::make({64, 64, 64, 96});
  for (const Coord4 grid : {Coord4{4, 4, 8, 8}, Coord4{4, 4, 8, 16}, Coord4{4, 8, 16, 16}, Coord4{8, 8, 16, 16},
                            Coord4{2, 4, 4, 8}}) {
    const auto d = decompose(g, ProcessGrid::make(grid));
    const double p = 8.0 * d.ranks();
    rows.push_back({p, d.local, predict(m, w, p, d.local, iters).time_s, w});
  }
  return rows;
}

TEST(Model, FitRoundTrip) {
  for (const ModelParams truth : {ModelParams::make(1e9, 1e-4, 2e-9), ModelParams::make(4e8, 5e-6, 1e-10),
                                  ModelParams::make(2e9, 3e-5, 5e-9)}) {
    const FitResult fit = fit_model(synthetic(truth, 1000), 1000);
    EXPECT_NEAR(fit.params.rate / truth.rate, 1.0, 0.01);
    EXPECT_NEAR(fit.params.alpha / truth.alpha, 1.0, 0.01);
    EXPECT_NEAR(fit.params.beta / truth.beta, 1.0, 0.01);
    for (double r : fit.rel_residuals) EXPECT_LE(std::abs(r), 1e-9);
  }
}

TEST(Model, FitPinsAbsentTermsAtZero) {
  const FitResult fit = fit_model(synthetic(ModelParams::make(1e9, 0.0, 0.0), 200), 200);
  EXPECT_NEAR(fit.params.rate / 1e9, 1.0, 1e-9);
  EXPECT_EQ(fit.params.alpha, 0.0);
  EXPECT_EQ(fit.params.beta, 0.0);
}

TEST(Model, FitErrors) {
  auto rows = synthetic(ModelParams::make(1e9, 1e-5, 1e-9), 100);
  rows.resize(2);
  EXPECT_EQ(code_of([&] { fit_model(rows, 100); }), Errc::Underdetermined);
  // Same row three times cannot separate the terms.
  auto same = synthetic(ModelParams::make(1e9, 1e-5, 1e-9), 100);
  same = {same[0], same[0], same[0]};
  EXPECT_EQ(code_of([&] { fit_model(same, 100); }), Errc::Underdetermined);
}

TEST(Model, PaperSamples) {
  const auto t2 = read_paper_csv(kDataDir + "/table2.csv");
  const ScalingSample s = sample_of(t2[0]);
  EXPECT_EQ(s.parallelism, 8192.0);
  EXPECT_NEAR(s.work_flops, 29.62 * 7619.30e9, 1.0);
  const RunRecord r = make_record(4, 2, {4, 4, 4, 4}, 10, 1.0, 1000);
  EXPECT_EQ(sample_of(r).parallelism, 8.0);
  EXPECT_EQ(sample_of(r).work_flops, 1000.0);
}

TEST(Runner, SingleRankRecord) {
  RunConfig cfg;
  cfg.transport = TransportKind::Serial;
  const RunRecord r = run_benchmark(cfg);
  EXPECT_EQ(r.ranks, 1);
  EXPECT_EQ(r.local, (Coord4{8, 8, 8, 16}));
  EXPECT_GT(r.iterations, 0);
  EXPECT_EQ(r.gflops_overall, r.mflops_per_rank / 1000.0);
  EXPECT_NEAR(r.gflops_overall, static_cast<double>(r.flops_total) / (r.total_time_s * 1e9), 1e-12 * r.gflops_overall);
}

TEST(Runner, StrongScalingDeterminism) {
  SweepConfig sweep;
  sweep.grids = {{1, 1, 1, 1}, {2, 1, 1, 1}, {2, 2, 1, 1}, {2, 2, 2, 1}, {5, 1, 1, 1}};
  const auto rows = scaling_sweep(sweep);
  ASSERT_EQ(rows.size(), 5u);
  for (int i = 0; i < 4; ++i) {
    ASSERT_TRUE(rows[i].record) << rows[i].error;
    EXPECT_EQ(rows[i].record->ranks, 1 << i);
    EXPECT_EQ(rows[i].record->iterations, rows[0].record->iterations);
    EXPECT_EQ(rows[i].record->flops_total, rows[0].record->flops_total);
  }
  EXPECT_FALSE(rows[4].record);
  EXPECT_EQ(rows[4].error_code, Errc::NonDivisible);
}

TEST(Runner, Errors) {
  RunConfig cfg;
  cfg.grid = {5, 1, 1, 1};
  EXPECT_EQ(code_of([&] { run_benchmark(cfg); }), Errc::NonDivisible);
  cfg.grid = {1, 1, 1, 1};
  cfg.max_iter = 2;
  EXPECT_EQ(code_of([&] { run_benchmark(cfg); }), Errc::SolveFailed);
  cfg.max_iter = 10000;
  cfg.tol = 1e-14;
  cfg.timeout_s = 1e-4;
  cfg.global = GlobalLattice::make({8, 8, 8, 16});
  cfg.grid = {2, 1, 1, 1};
  EXPECT_EQ(code_of([&] { run_benchmark(cfg); }), Errc::Timeout);
}

}  // namespace
}  // namespace lqs::bench
