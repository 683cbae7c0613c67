// Copyright 2026 The vmalloc Authors
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

#include <sstream>

#include <gtest/gtest.h>

#include "support/test_support.hpp"
#include "vmalloc/experiment.hpp"

namespace vmalloc {

void PrintTo(const RunRecord& r, std::ostream* os) {
  emit_report(std::vector<RunRecord>{r}, OutputFormat::kJson, *os);
}

namespace {

ExperimentConfig small_grid() {
  ExperimentConfig c;
  c.solvers = {SolverKind::kBfd, SolverKind::kGapa};
  GaConfig g;
  g.generations = 20;
  c.ga_grid = {g};
  g.crossover_prob = 0.75;
  c.ga_grid.push_back(g);
  c.seeds = {1, 2, 3};
  return c;
}

std::string csv_of(const ExperimentOutcome& out) {
  std::ostringstream s;
  emit_report(out.records, OutputFormat::kCsv, s);
  return s.str();
}

TEST(ParseNamesTest, CaseInsensitive) {
  EXPECT_EQ(parse_solver("GAPA"), SolverKind::kGapa);
  EXPECT_EQ(parse_solver("bfd"), SolverKind::kBfd);
  EXPECT_EQ(parse_fitness("Snapshot"), FitnessMode::kSnapshotPower);
  EXPECT_EQ(parse_format("JSON"), OutputFormat::kJson);
  EXPECT_THROW(parse_solver("anneal"), ConfigError);
  EXPECT_THROW(parse_format("xml"), ConfigError);
}

TEST(ExperimentConfigTest, Validation) {
  ExperimentConfig c;
  EXPECT_THROW(c.validate(), ConfigError);
  c.solvers = {SolverKind::kGapa};
  c.ga_grid = {GaConfig{}};
  EXPECT_THROW(c.validate(), ConfigError);  // no seeds
  c.seeds = {1};
  EXPECT_NO_THROW(c.validate());
  c.ga_grid.clear();
  EXPECT_THROW(c.validate(), ConfigError);
  c.solvers = {SolverKind::kBfd};
  EXPECT_NO_THROW(c.validate());
}

TEST(ExperimentConfigTest, ComparisonGrid) {
  const ExperimentConfig c = ExperimentConfig::comparison_grid();
  ASSERT_EQ(c.ga_grid.size(), 6u);
  EXPECT_EQ(c.seeds.size(), 20u);
  EXPECT_EQ(c.ga_grid[0].generations, 500u);
  EXPECT_EQ(c.ga_grid[5].generations, 1000u);
  EXPECT_EQ(c.ga_grid[4].crossover_prob, 0.5);
  for (const auto& g : c.ga_grid) {
    EXPECT_EQ(g.population_size, 10u);
    EXPECT_EQ(g.mutation_prob, 0.01);
  }
}

TEST(ExperimentConfigTest, FromJson) {
  const auto c = ExperimentConfig::from_json(R"({
    "solvers": ["bfd", "gapa"], "seeds": [4, 5],
    "ga": {"generations": [10, 20], "crossover": 0.3, "population": 6,
           "selection": "fitness", "repair": "first_fit", "fitness": "snapshot"},
    "idle_powered": true, "format": "json", "vm_mips": 1000, "jobs": 2})");
  EXPECT_EQ(c.solvers.size(), 2u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
  ASSERT_EQ(c.ga_grid.size(), 2u);
  EXPECT_EQ(c.ga_grid[1].generations, 20u);
  EXPECT_EQ(c.ga_grid[1].crossover_prob, 0.3);
  EXPECT_EQ(c.ga_grid[0].population_size, 6u);
  EXPECT_EQ(c.ga_grid[0].selection, SelectionWeights::kFitness);
  EXPECT_EQ(c.ga_grid[0].repair, RepairPlacement::kFirstFit);
  EXPECT_EQ(c.ga_grid[0].fitness_mode, FitnessMode::kSnapshotPower);
  EXPECT_TRUE(c.power.idle_hosts_powered);
  EXPECT_EQ(c.output_format, OutputFormat::kJson);
  ASSERT_TRUE(c.vm_template.has_value());
  EXPECT_EQ(c.vm_template->mips_per_pe, 1000.0);
  EXPECT_EQ(c.jobs, 2u);
  EXPECT_THROW(ExperimentConfig::from_json("{"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"solvers": ["x"]})"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"seeds": "many"})"), ConfigError);
}

TEST(LoadInstanceTest, Defaults) {
  ExperimentConfig c;
  const ProblemInstance inst = load_instance(c);
  EXPECT_EQ(inst.vm_count(), 211u);
  EXPECT_EQ(inst.host_count(), 100u);
  EXPECT_EQ(inst.vm(0).mips_per_pe, 2200.0);
  c.workload_path = "/nonexistent/timetable.csv";
  EXPECT_THROW(load_instance(c), IoError);
}

TEST(RunExperimentTest, BfdOnly) {
  ExperimentConfig c;
  c.solvers = {SolverKind::kBfd};
  const auto out = run_experiment(c, testing::lab_day());
  ASSERT_EQ(out.records.size(), 1u);
  const RunRecord& r = out.records[0];
  EXPECT_EQ(r.solver, "BFD");
  EXPECT_EQ(r.ratio_vs_bfd, 1.0);
  EXPECT_NEAR(r.total_kwh, 13.4337375, 5e-7 + 1e-12);
  EXPECT_EQ(r.hosts_used, 29u);
  EXPECT_EQ(r.per_host_kwh.size(), 29u);
  EXPECT_EQ(r.per_host_kwh[0], std::make_pair(std::string("0"), 0.5085));
  EXPECT_EQ(r.wall_seconds, 0.0);
  EXPECT_FALSE(out.any_failed());
  const std::string csv = csv_of(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(RunExperimentTest, ExactOverBudgetLeavesOthersAlone) {
  ExperimentConfig c;
  c.solvers = {SolverKind::kExact, SolverKind::kBfd};
  const auto out = run_experiment(c, testing::lab_day());
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(out.records[0].status, "BUDGET_EXCEEDED");
  EXPECT_FALSE(out.records[0].error.empty());
  EXPECT_FALSE(out.placements[0].has_value());
  EXPECT_TRUE(out.records[1].ok());
  EXPECT_TRUE(out.any_failed());
}

TEST(RunExperimentTest, GridShapeAndSummaries) {
  const auto out = run_experiment(small_grid(), testing::lab_day());
  // BFD + 2 grid points x (3 runs + mean + min).
  ASSERT_EQ(out.records.size(), 11u);
  EXPECT_EQ(out.records[0].solver, "BFD");
  const double bfd = out.records[0].total_kwh;
  for (std::size_t p = 0; p < 2; ++p) {
    const std::size_t base = 1 + p * 5;
    double sum = 0.0, best = 1e300;
    for (std::size_t s = 0; s < 3; ++s) {
      const RunRecord& r = out.records[base + s];
      EXPECT_EQ(r.kind, "run");
      EXPECT_EQ(r.seed, s + 1);
      EXPECT_EQ(r.best_fitness.size(), 20u);
      ASSERT_TRUE(r.ratio_vs_bfd.has_value());
      EXPECT_NEAR(*r.ratio_vs_bfd, bfd / r.total_kwh, 1e-5);
      sum += r.total_kwh;
      best = std::min(best, r.total_kwh);
    }
    EXPECT_EQ(out.records[base + 3].kind, "mean");
    EXPECT_NEAR(out.records[base + 3].total_kwh, sum / 3, 2e-6);
    EXPECT_EQ(out.records[base + 4].kind, "min");
    EXPECT_EQ(out.records[base + 4].total_kwh, best);
  }
  EXPECT_EQ(out.records[6].ga->crossover_prob, 0.75);
}

TEST(RunExperimentTest, BfdRecordIndependentOfGrid) {
  ExperimentConfig alone;
  alone.solvers = {SolverKind::kBfd};
  const auto a = run_experiment(alone, testing::lab_day());
  const auto b = run_experiment(small_grid(), testing::lab_day());
  EXPECT_EQ(a.records[0], b.records[0]);
}

TEST(RunExperimentTest, CsvDeterministicAcrossJobs) {
  ExperimentConfig c = small_grid();
  const std::string one = csv_of(run_experiment(c, testing::lab_day()));
  c.jobs = 4;
  EXPECT_EQ(csv_of(run_experiment(c, testing::lab_day())), one);
  EXPECT_EQ(csv_of(run_experiment(c, testing::lab_day())), one);
}

TEST(RunExperimentTest, DumpedPlacementsReproduceEnergy) {
  const ProblemInstance inst = testing::lab_day();
  const auto out = run_experiment(small_grid(), inst);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < out.records.size(); ++k) {
    if (!out.placements[k]) continue;
    std::stringstream file;
    write_placement(file, *out.placements[k], inst);
    const Placement back = read_placement(file, inst);
    EXPECT_EQ(back, *out.placements[k]);
    EXPECT_NEAR(integrate_energy(back, inst).total_kwh, out.records[k].total_kwh, 5e-7 + 1e-12);
    ++checked;
  }
  EXPECT_EQ(checked, 7u);
}

RunRecord awkward_record() {
  RunRecord r;
  r.solver = "GAPA";
  GaConfig g;
  g.crossover_prob = 0.1 + 0.2;
  g.seed = 7;
  r.ga = g;
  r.seed = 7;
  r.total_kwh = 1.234567;
  r.ratio_vs_bfd = 1.1;
  r.hosts_used = 3;
  r.wall_seconds = 0.25;
  r.per_host_kwh = {{"a", 0.5}, {"b", 0.734567}};
  r.best_fitness = {1e-7, 1.0 / 3.0, 2.5e-7};
  r.status = "UNREPAIRABLE";
  r.error = "quote \" comma , and\nnewline";
  return r;
}

TEST(ReportTest, CsvRoundTrip) {
  RunRecord bfd;
  bfd.solver = "BFD";
  bfd.total_kwh = 13.433738;
  bfd.ratio_vs_bfd = 1.0;
  const std::vector<RunRecord> records = {bfd, awkward_record()};
  std::stringstream s;
  emit_report(records, OutputFormat::kCsv, s);
  EXPECT_EQ(read_report(s, OutputFormat::kCsv), records);
}

TEST(ReportTest, JsonRoundTrip) {
  const std::vector<RunRecord> records = {awkward_record()};
  std::stringstream s;
  emit_report(records, OutputFormat::kJson, s);
  EXPECT_EQ(read_report(s, OutputFormat::kJson), records);
}

TEST(ReportTest, ExperimentRoundTrip) {
  const auto out = run_experiment(small_grid(), testing::lab_day());
  for (OutputFormat f : {OutputFormat::kCsv, OutputFormat::kJson}) {
    std::stringstream s;
    emit_report(out.records, f, s);
    EXPECT_EQ(read_report(s, f), out.records);
  }
}

TEST(ReportTest, SixDecimalColumns) {
  RunRecord r;
  r.solver = "BFD";
  r.total_kwh = 2.5;
  std::ostringstream s;
  emit_report(std::vector<RunRecord>{r}, OutputFormat::kCsv, s);
  EXPECT_NE(s.str().find(",2.500000,,0,0.000000,"), std::string::npos) << s.str();
}

TEST(ReportTest, MalformedCsv) {
  std::istringstream bad_header("solver,kind\n");
  EXPECT_THROW(read_report(bad_header, OutputFormat::kCsv), ParseError);
  std::ostringstream good;
  emit_report(std::vector<RunRecord>{awkward_record()}, OutputFormat::kCsv, good);
  std::string text = good.str();
  text.replace(text.find("1.234567"), 8, "lots");
  std::istringstream bad_number(text);
  EXPECT_THROW(read_report(bad_number, OutputFormat::kCsv), ParseError);
}

TEST(RunRecordTest, Labels) {
  RunRecord r;
  r.solver = "BFD";
  EXPECT_EQ(r.label(), "BFD");
  r = awkward_record();
  EXPECT_EQ(r.label(), "GAPA_P10_G500_C30_S7");
  r.kind = "mean";
  r.seed.reset();
  EXPECT_EQ(r.label(), "GAPA_P10_G500_C30_mean");
}

TEST(PlacementFileTest, Errors) {
  const ProblemInstance inst({testing::make_vm("a", 1, 100, 0, 5), testing::make_vm("b", 1, 100, 0, 5)},
                             {testing::ibm("h0"), testing::ibm("h1")});
  auto parse = [&](const std::string& text) {
    std::istringstream in(text);
    return read_placement(in, inst);
  };
  EXPECT_EQ(parse("vm_id,host_id\na,h1\nb,h0\n").host_of, (std::vector<HostIndex>{1, 0}));
  EXPECT_EQ(parse("b,h0\na,h0\n").host_of, (std::vector<HostIndex>{0, 0}));
  EXPECT_THROW(parse("a,h1\n"), ParseError);
  EXPECT_THROW(parse("a,h1\na,h0\nb,h0\n"), ParseError);
  EXPECT_THROW(parse("a,h9\nb,h0\n"), ParseError);
  EXPECT_THROW(parse("a;h1\nb,h0\n"), ParseError);
}

}  // namespace
}  // namespace vmalloc
