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

// vmalloc: command-line front end for the allocation engine.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "vmalloc/error.hpp"
#include "vmalloc/experiment.hpp"
#include "vmalloc/power.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vmalloc;

enum ExitCode : int { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4 };

struct Flags {
  std::string config_path;
  std::string workload;
  std::string fleet;
  std::vector<std::string> solvers;
  std::vector<std::size_t> generations;
  std::vector<double> crossover;
  std::size_t population = 10;
  double mutation = 0.01;
  double host_mutation = 0.01;
  std::size_t elite = 1;
  std::string selection = "rank";
  std::string repair = "least_energy";
  std::vector<std::uint64_t> seeds;
  std::string fitness = "energy";
  std::string idle_powered = "off";
  std::string out;
  std::string format = "csv";
  bool dump_placements = false;
  bool timing = false;
  std::size_t jobs = 1;
  std::size_t ga_threads = 1;
  Seconds slot_length = 2700;
  double vm_mips = 0.0;
  std::uint32_t vm_pe = 1;
  std::uint64_t exact_budget = 10'000'000;
  bool exact_symmetry = false;
};

void add_instance_options(CLI::App& app, Flags& f) {
  app.add_option("--workload", f.workload, "Timetable CSV (default: built-in lab day)");
  app.add_option("--fleet", f.fleet, "Fleet JSON (default: 50 IBM x3250 + 50 Dell R620)");
  app.add_option("--idle-powered", f.idle_powered, "Keep empty hosts at idle power")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--slot-length", f.slot_length, "Seconds per timetable slot")
      ->check(CLI::PositiveNumber);
  app.add_option("--vm-mips", f.vm_mips, "MIPS per VM PE (default: smallest host core)");
  app.add_option("--vm-pe", f.vm_pe, "PEs per VM")->check(CLI::PositiveNumber);
}

void add_solver_options(CLI::App& app, Flags& f, bool repeatable) {
  auto* solver = app.add_option("--solver", f.solvers, "bfd, gapa or exact")
                     ->check(CLI::IsMember({"bfd", "gapa", "exact"}, CLI::ignore_case));
  auto* gens = app.add_option("--generations", f.generations, "GA generations");
  auto* cx = app.add_option("--crossover", f.crossover, "GA crossover probability");
  auto* seed = app.add_option("--seed", f.seeds, "GA seed");
  if (!repeatable) {
    for (auto* o : {solver, gens, cx, seed}) o->expected(1);
  }
  app.add_option("--population", f.population, "GA population size");
  app.add_option("--mutation", f.mutation, "Per-gene mutation probability");
  app.add_option("--host-mutation", f.host_mutation, "Per-host merge mutation probability");
  app.add_option("--elite", f.elite, "Individuals carried over unchanged");
  app.add_option("--selection", f.selection, "Roulette weights")
      ->check(CLI::IsMember({"rank", "fitness"}));
  app.add_option("--repair", f.repair, "Where repair re-places evicted VMs")
      ->check(CLI::IsMember({"least_energy", "first_fit"}));
  app.add_option("--fitness", f.fitness, "energy or snapshot")
      ->check(CLI::IsMember({"energy", "snapshot"}));
  app.add_option("--ga-threads", f.ga_threads, "Fitness evaluation threads per GA run");
  app.add_option("--exact-budget", f.exact_budget, "Search budget for the exact solver");
  app.add_flag("--exact-symmetry", f.exact_symmetry, "Prune symmetric assignments");
  app.add_option("--out", f.out, "Report path (default: stdout)");
  app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--dump-placements", f.dump_placements, "Write <out>.placements/<run>.csv");
  app.add_flag("--timing", f.timing, "Record wall time (breaks byte determinism)");
}

// CLI flags override the config file only when given explicitly.
ExperimentConfig build_config(const CLI::App& app, const Flags& f, bool experiment) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    c = ExperimentConfig::from_json(read_file(f.config_path));
  } else if (experiment) {
    c = ExperimentConfig::comparison_grid();
  }
  auto given = [&](const char* name) {
    const CLI::Option* o = app.get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };

  if (given("--workload")) c.workload_path = f.workload;
  if (given("--fleet")) c.fleet_path = f.fleet;
  if (given("--idle-powered")) c.power.idle_hosts_powered = f.idle_powered == "on";
  if (given("--slot-length")) c.slots.slot_length = f.slot_length;
  if (given("--vm-mips") || given("--vm-pe")) {
    if (!(f.vm_mips > 0.0)) throw ConfigError("--vm-pe requires --vm-mips");
    c.vm_template = VmTemplate{f.vm_pe, f.vm_mips};
  }
  if (given("--solver")) {
    c.solvers.clear();
    for (const auto& s : f.solvers) c.solvers.push_back(parse_solver(s));
  }
  if (c.solvers.empty()) c.solvers = {SolverKind::kBfd, SolverKind::kGapa};
  if (given("--seed")) c.seeds = f.seeds;
  if (c.seeds.empty()) {
    for (std::uint64_t s = 1; s <= (experiment ? 20u : 1u); ++s) c.seeds.push_back(s);
  }

  const bool grid_flag = given("--generations") || given("--crossover") ||
                         given("--population") || given("--mutation") ||
                         given("--host-mutation") || given("--elite") || given("--selection") ||
                         given("--repair") || given("--fitness") || given("--ga-threads");
  if (c.ga_grid.empty() || grid_flag) {
    GaConfig base = c.ga_grid.empty() ? GaConfig{} : c.ga_grid.front();
    if (given("--population")) base.population_size = f.population;
    if (given("--mutation")) base.mutation_prob = f.mutation;
    if (given("--host-mutation")) base.host_mutation_prob = f.host_mutation;
    if (given("--elite")) base.elite_count = f.elite;
    if (given("--selection"))
      base.selection = f.selection == "rank" ? SelectionWeights::kRank : SelectionWeights::kFitness;
    if (given("--repair"))
      base.repair = f.repair == "first_fit" ? RepairPlacement::kFirstFit : RepairPlacement::kLeastEnergy;
    if (given("--fitness")) base.fitness_mode = parse_fitness(f.fitness);
    if (given("--ga-threads")) base.threads = f.ga_threads;

    std::vector<std::size_t> gens = f.generations;
    std::vector<double> cxs = f.crossover;
    if (gens.empty()) {
      for (const auto& g : c.ga_grid) {
        if (std::find(gens.begin(), gens.end(), g.generations) == gens.end()) gens.push_back(g.generations);
      }
      if (gens.empty()) gens.push_back(base.generations);
    }
    if (cxs.empty()) {
      for (const auto& g : c.ga_grid) {
        if (std::find(cxs.begin(), cxs.end(), g.crossover_prob) == cxs.end()) cxs.push_back(g.crossover_prob);
      }
      if (cxs.empty()) cxs.push_back(base.crossover_prob);
    }
    c.ga_grid.clear();
    for (std::size_t g : gens) {
      for (double x : cxs) {
        GaConfig point = base;
        point.generations = g;
        point.crossover_prob = x;
        c.ga_grid.push_back(point);
      }
    }
  }
  if (given("--exact-budget")) c.exact.budget = f.exact_budget;
  if (given("--exact-symmetry")) c.exact.symmetry_reduction = true;
  if (given("--out")) c.output_path = f.out;
  if (given("--format")) c.output_format = parse_format(f.format);
  if (given("--dump-placements")) c.dump_placements = true;
  if (given("--timing")) c.record_timing = true;
  if (given("--jobs")) c.jobs = f.jobs;
  if (c.dump_placements && c.output_path.empty())
    throw ConfigError("--dump-placements requires --out");
  c.validate();
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path);
}

int report(const ExperimentConfig& config, const ProblemInstance& instance,
           const ExperimentOutcome& outcome, bool runs_only) {
  std::vector<RunRecord> records;
  for (std::size_t i = 0; i < outcome.records.size(); ++i) {
    const RunRecord& r = outcome.records[i];
    if (runs_only && r.kind != "run") continue;
    records.push_back(r);
    if (!config.dump_placements || !outcome.placements[i]) continue;
    const fs::path dir = config.output_path + ".placements";
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string());
    std::ostringstream text;
    write_placement(text, *outcome.placements[i], instance);
    write_text((dir / (r.label() + ".csv")).string(), text.str());
  }
  std::ostringstream text;
  emit_report(records, config.output_format, text);
  write_text(config.output_path, text.str());

  int code = kOk;
  for (const RunRecord& r : records) {
    if (r.ok()) continue;
    std::cerr << "vmalloc: " << r.label() << ": " << r.status;
    if (!r.error.empty()) std::cerr << " (" << r.error << ")";
    std::cerr << '\n';
    code = kSolver;
  }
  return code;
}

int run(int argc, char** argv) {
  CLI::App app{"Energy-aware static VM allocation"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "Run one solver on one instance");
  add_instance_options(*solve, f);
  add_solver_options(*solve, f, false);

  auto* experiment = app.add_subcommand("experiment", "Run a solver grid over seeds");
  experiment->add_option("--config", f.config_path, "JSON experiment file");
  add_instance_options(*experiment, f);
  add_solver_options(*experiment, f, true);
  experiment->add_option("--jobs", f.jobs, "GA runs executed concurrently")
      ->check(CLI::PositiveNumber);

  std::string fleet_out;
  auto* gen = app.add_subcommand("gen-workload", "Write the built-in timetable");
  gen->add_option("--out", f.out, "Timetable path (default: stdout)");
  gen->add_option("--fleet-out", fleet_out, "Also write the default fleet JSON");

  std::string placement_path;
  auto* validate = app.add_subcommand("validate", "Feasibility-check a placement file");
  add_instance_options(*validate, f);
  validate->add_option("--placement", placement_path, "vm_id,host_id CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  if (gen->parsed()) {
    write_text(f.out, std::string(lab_timetable_csv()));
    if (!fleet_out.empty()) write_text(fleet_out, fleet_to_json(FleetSpec::default_datacenter()));
    return kOk;
  }

  if (validate->parsed()) {
    const ExperimentConfig config = build_config(*validate, f, false);
    const ProblemInstance instance = load_instance(config);
    std::istringstream in(read_file(placement_path));
    const Placement placement = read_placement(in, instance);
    const auto violations = check_feasibility(placement, instance);
    for (const Violation& v : violations) {
      std::cerr << "host " << v.host_id << " [" << v.time << ", " << v.end << "): "
                << to_string(v.kind) << " demand " << v.demand << " > " << v.capacity << '\n';
    }
    if (!violations.empty()) return kSolver;
    const EnergyReport energy = integrate_energy(placement, instance);
    std::printf("feasible, %zu hosts used, %.6f kWh\n", energy.hosts_used, energy.total_kwh);
    return kOk;
  }

  const bool is_solve = solve->parsed();
  const CLI::App& sub = is_solve ? *solve : *experiment;
  ExperimentConfig config = build_config(sub, f, !is_solve);
  if (is_solve && config.solvers.size() != 1) throw ConfigError("solve takes exactly one --solver");
  const ProblemInstance instance = load_instance(config);
  const ExperimentOutcome outcome = run_experiment(config, instance);
  return report(config, instance, outcome, is_solve);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "vmalloc: " << e.what() << '\n';
    return kIo;
  } catch (const SolverError& e) {
    std::cerr << "vmalloc: " << e.what() << '\n';
    return kSolver;
  } catch (const InfeasiblePlacement& e) {
    std::cerr << "vmalloc: " << e.what() << '\n';
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "vmalloc: " << e.what() << '\n';
    return kConfig;
  }
}
