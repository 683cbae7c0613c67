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

#include "vmalloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace vmalloc {

const char* to_string(SolverKind kind) noexcept {
  switch (kind) {
    case SolverKind::kBfd: return "BFD";
    case SolverKind::kGapa: return "GAPA";
    case SolverKind::kExact: return "EXACT";
  }
  return "?";
}

const char* to_string(FitnessMode mode) noexcept {
  return mode == FitnessMode::kEnergy ? "energy" : "snapshot";
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Same digits the report prints, so re-reading a report is lossless.
double quantize(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

SolverKind parse_solver(std::string_view name) {
  const std::string n = lower(name);
  if (n == "bfd") return SolverKind::kBfd;
  if (n == "gapa") return SolverKind::kGapa;
  if (n == "exact") return SolverKind::kExact;
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

FitnessMode parse_fitness(std::string_view name) {
  const std::string n = lower(name);
  if (n == "energy") return FitnessMode::kEnergy;
  if (n == "snapshot") return FitnessMode::kSnapshotPower;
  throw ConfigError("unknown fitness mode '" + std::string(name) + "'");
}

OutputFormat parse_format(std::string_view name) {
  const std::string n = lower(name);
  if (n == "csv") return OutputFormat::kCsv;
  if (n == "json") return OutputFormat::kJson;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (solvers.empty()) throw ConfigError("at least one solver is required");
  const bool gapa = std::find(solvers.begin(), solvers.end(), SolverKind::kGapa) != solvers.end();
  if (gapa && ga_grid.empty()) throw ConfigError("GAPA needs at least one GA configuration");
  if (gapa && seeds.empty()) throw ConfigError("GAPA needs at least one seed");
  for (const GaConfig& g : ga_grid) g.validate();
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (slots.slot_length <= 0) throw ConfigError("slot_length must be positive");
  if (vm_template && (vm_template->pe_count < 1 || !(vm_template->mips_per_pe > 0.0)))
    throw ConfigError("VM template needs positive pe and mips");
}

ExperimentConfig ExperimentConfig::comparison_grid() {
  ExperimentConfig config;
  config.solvers = {SolverKind::kBfd, SolverKind::kGapa};
  for (std::size_t gens : {500u, 1000u}) {
    for (double cx : {0.25, 0.5, 0.75}) {
      GaConfig g;
      g.generations = gens;
      g.crossover_prob = cx;
      config.ga_grid.push_back(g);
    }
  }
  for (std::uint64_t s = 1; s <= 20; ++s) config.seeds.push_back(s);
  return config;
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
    auto as_list = [](const nlohmann::json& j) {
      return j.is_array() ? j : nlohmann::json::array({j});
    };
    if (doc.contains("workload")) c.workload_path = doc["workload"].get<std::string>();
    if (doc.contains("fleet")) c.fleet_path = doc["fleet"].get<std::string>();
    if (doc.contains("solvers")) {
      for (const auto& s : as_list(doc["solvers"])) c.solvers.push_back(parse_solver(s.get<std::string>()));
    }
    if (doc.contains("seeds")) {
      for (const auto& s : as_list(doc["seeds"])) c.seeds.push_back(s.get<std::uint64_t>());
    }
    if (doc.contains("ga")) {
      const auto& ga = doc["ga"];
      GaConfig base;
      if (ga.contains("population")) base.population_size = ga["population"].get<std::size_t>();
      if (ga.contains("mutation")) base.mutation_prob = ga["mutation"].get<double>();
      if (ga.contains("host_mutation")) base.host_mutation_prob = ga["host_mutation"].get<double>();
      if (ga.contains("elite")) base.elite_count = ga["elite"].get<std::size_t>();
      if (ga.contains("fitness")) base.fitness_mode = parse_fitness(ga["fitness"].get<std::string>());
      if (ga.contains("selection")) {
        const std::string s = lower(ga["selection"].get<std::string>());
        if (s == "rank") base.selection = SelectionWeights::kRank;
        else if (s == "fitness") base.selection = SelectionWeights::kFitness;
        else throw ConfigError("unknown selection '" + s + "'");
      }
      if (ga.contains("repair")) {
        const std::string s = lower(ga["repair"].get<std::string>());
        if (s == "least_energy") base.repair = RepairPlacement::kLeastEnergy;
        else if (s == "first_fit") base.repair = RepairPlacement::kFirstFit;
        else throw ConfigError("unknown repair placement '" + s + "'");
      }
      if (ga.contains("threads")) base.threads = ga["threads"].get<std::size_t>();
      const auto gens = ga.contains("generations") ? as_list(ga["generations"])
                                                   : nlohmann::json::array({base.generations});
      const auto cxs = ga.contains("crossover") ? as_list(ga["crossover"])
                                                : nlohmann::json::array({base.crossover_prob});
      for (const auto& g : gens) {
        for (const auto& x : cxs) {
          GaConfig point = base;
          point.generations = g.get<std::size_t>();
          point.crossover_prob = x.get<double>();
          c.ga_grid.push_back(point);
        }
      }
    }
    if (doc.contains("idle_powered")) c.power.idle_hosts_powered = doc["idle_powered"].get<bool>();
    if (doc.contains("output")) c.output_path = doc["output"].get<std::string>();
    if (doc.contains("format")) c.output_format = parse_format(doc["format"].get<std::string>());
    if (doc.contains("slot_length")) c.slots.slot_length = doc["slot_length"].get<Seconds>();
    if (doc.contains("day_origin")) c.slots.day_origin = doc["day_origin"].get<Seconds>();
    if (doc.contains("slots_per_day")) c.slots.slots_per_day = doc["slots_per_day"].get<std::size_t>();
    if (doc.contains("vm_mips") || doc.contains("vm_pe")) {
      VmTemplate t;
      t.mips_per_pe = doc.value("vm_mips", 0.0);
      t.pe_count = doc.value("vm_pe", 1u);
      c.vm_template = t;
    }
    if (doc.contains("exact_budget")) c.exact.budget = doc["exact_budget"].get<std::uint64_t>();
    if (doc.contains("exact_symmetry")) c.exact.symmetry_reduction = doc["exact_symmetry"].get<bool>();
    if (doc.contains("timing")) c.record_timing = doc["timing"].get<bool>();
    if (doc.contains("dump_placements")) c.dump_placements = doc["dump_placements"].get<bool>();
    if (doc.contains("jobs")) c.jobs = doc["jobs"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
  return c;
}

bool operator==(const RunRecord& a, const RunRecord& b) {
  return a.solver == b.solver && a.kind == b.kind && a.ga == b.ga && a.seed == b.seed &&
         a.status == b.status && a.error == b.error && a.total_kwh == b.total_kwh &&
         a.ratio_vs_bfd == b.ratio_vs_bfd && a.hosts_used == b.hosts_used &&
         a.wall_seconds == b.wall_seconds && a.per_host_kwh == b.per_host_kwh &&
         a.best_fitness == b.best_fitness;
}

std::string RunRecord::label() const {
  std::string out = solver;
  if (ga) {
    out += "_P" + std::to_string(ga->population_size) + "_G" +
           std::to_string(ga->generations) + "_C" +
           std::to_string(static_cast<long>(std::lround(ga->crossover_prob * 100)));
  }
  if (seed) out += "_S" + std::to_string(*seed);
  if (kind != "run") out += "_" + kind;
  return out;
}

bool ExperimentOutcome::any_failed() const {
  return std::any_of(records.begin(), records.end(),
                     [](const RunRecord& r) { return !r.ok(); });
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemInstance load_instance(const ExperimentConfig& config) {
  std::vector<TimetableRow> rows = config.workload_path.empty()
                                       ? parse_timetable(lab_timetable_csv())
                                       : parse_timetable(read_file(config.workload_path));
  std::vector<HostSpec> hosts;
  if (config.fleet_path.empty()) {
    hosts = build_fleet(FleetSpec::default_datacenter());
  } else {
    const FleetFile fleet = parse_fleet_json(read_file(config.fleet_path));
    hosts = build_fleet(fleet.spec, fleet.models);
  }
  const VmTemplate tmpl = config.vm_template.value_or(VmTemplate{1, min_core_mips(hosts)});
  return ProblemInstance(expand(rows, config.slots, tmpl), std::move(hosts), config.power);
}

namespace {

struct RunResult {
  std::optional<SolveResult> solved;
  std::string status = "ok";
  std::string error;
};

template <class Fn>
RunResult attempt(Fn&& fn) {
  RunResult r;
  try {
    r.solved = fn();
  } catch (const SolverError& e) {
    r.status = to_string(e.code());
    r.error = e.what();
  }
  return r;
}

RunRecord make_record(const RunResult& run, SolverKind kind, const ProblemInstance& instance,
                      const ExperimentConfig& config, std::optional<double> bfd_kwh) {
  RunRecord rec;
  rec.solver = to_string(kind);
  rec.status = run.status;
  rec.error = run.error;
  if (!run.solved) return rec;
  const SolveResult& s = *run.solved;
  rec.total_kwh = quantize(s.energy.total_kwh);
  if (bfd_kwh && s.energy.total_kwh > 0.0) rec.ratio_vs_bfd = quantize(*bfd_kwh / s.energy.total_kwh);
  rec.hosts_used = s.energy.hosts_used;
  if (config.record_timing) rec.wall_seconds = quantize(s.stats.wall_seconds);
  for (HostIndex j = 0; j < instance.host_count(); ++j) {
    if (s.energy.per_host_joules[j] > 0.0)
      rec.per_host_kwh.emplace_back(instance.host(j).id, quantize(s.energy.host_kwh(j)));
  }
  rec.best_fitness = s.stats.best_fitness;
  return rec;
}

GaConfig normalized(GaConfig g, std::uint64_t seed) {
  g.seed = seed;
  g.threads = 1;
  return g;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config, const ProblemInstance& instance) {
  config.validate();
  ExperimentOutcome out;
  auto push = [&](RunRecord rec, const RunResult& run) {
    out.records.push_back(std::move(rec));
    out.placements.push_back(run.solved ? std::optional<Placement>(run.solved->placement)
                                        : std::nullopt);
  };

  const bool want_bfd =
      std::find(config.solvers.begin(), config.solvers.end(), SolverKind::kBfd) !=
      config.solvers.end();
  std::optional<RunResult> bfd;
  std::optional<double> bfd_kwh;
  if (want_bfd) {
    bfd = attempt([&] { return bfd_schedule(instance); });
    if (bfd->solved) bfd_kwh = bfd->solved->energy.total_kwh;
  }

  for (SolverKind kind : config.solvers) {
    switch (kind) {
      case SolverKind::kBfd:
        push(make_record(*bfd, kind, instance, config, bfd_kwh), *bfd);
        break;

      case SolverKind::kExact: {
        const auto run = attempt([&] { return exact_schedule(instance, config.exact); });
        push(make_record(run, kind, instance, config, bfd_kwh), run);
        break;
      }

      case SolverKind::kGapa: {
        const std::size_t n_seeds = config.seeds.size();
        std::vector<RunResult> runs(config.ga_grid.size() * n_seeds);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto worker = [&] {
          for (std::size_t t; (t = next.fetch_add(1)) < runs.size();) {
            try {
              const GaConfig g = normalized(config.ga_grid[t / n_seeds], config.seeds[t % n_seeds]);
              runs[t] = attempt([&] { return gapa_schedule(instance, g); });
            } catch (...) {
              std::lock_guard lock(failure_mutex);
              if (!failure) failure = std::current_exception();
            }
          }
        };
        {
          std::vector<std::jthread> pool;
          for (std::size_t w = 1; w < std::min(config.jobs, runs.size()); ++w) pool.emplace_back(worker);
          worker();
        }
        if (failure) std::rethrow_exception(failure);

        for (std::size_t p = 0; p < config.ga_grid.size(); ++p) {
          std::vector<const RunRecord*> ok;
          const std::size_t first = out.records.size();
          for (std::size_t s = 0; s < n_seeds; ++s) {
            const RunResult& run = runs[p * n_seeds + s];
            RunRecord rec = make_record(run, kind, instance, config, bfd_kwh);
            rec.ga = normalized(config.ga_grid[p], config.seeds[s]);
            rec.seed = config.seeds[s];
            push(std::move(rec), run);
          }
          std::vector<double> kwh;
          std::optional<std::size_t> best;
          for (std::size_t k = first; k < out.records.size(); ++k) {
            const RunResult& run = runs[p * n_seeds + (k - first)];
            if (!out.records[k].ok()) continue;
            kwh.push_back(run.solved->energy.total_kwh);
            if (!best || kwh.back() < runs[p * n_seeds + (*best - first)].solved->energy.total_kwh)
              best = k;
          }

          RunRecord mean;
          mean.solver = to_string(kind);
          mean.kind = "mean";
          mean.ga = normalized(config.ga_grid[p], 0);
          RunRecord min = mean;
          min.kind = "min";
          if (kwh.empty()) {
            mean.status = min.status = "NO_SUCCESSFUL_RUN";
          } else {
            double sum = 0.0;
            for (double k : kwh) sum += k;
            const double avg = sum / static_cast<double>(kwh.size());
            mean.total_kwh = quantize(avg);
            if (bfd_kwh) mean.ratio_vs_bfd = quantize(*bfd_kwh / avg);
            const RunRecord& b = out.records[*best];
            min.total_kwh = b.total_kwh;
            min.ratio_vs_bfd = b.ratio_vs_bfd;
            min.hosts_used = b.hosts_used;
            min.seed = b.seed;
            min.ga = b.ga;
            min.per_host_kwh = b.per_host_kwh;
          }
          const RunResult none;
          push(std::move(mean), none);
          push(std::move(min), none);
        }
        break;
      }
    }
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  config.validate();
  return run_experiment(config, load_instance(config));
}

}  // namespace vmalloc
