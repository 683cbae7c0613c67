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

#ifndef VMALLOC_EXPERIMENT_HPP
#define VMALLOC_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmalloc/model.hpp"
#include "vmalloc/schedulers.hpp"
#include "vmalloc/workload.hpp"

namespace vmalloc {

enum class SolverKind { kBfd, kGapa, kExact };
enum class OutputFormat { kCsv, kJson };

const char* to_string(SolverKind kind) noexcept;
const char* to_string(FitnessMode mode) noexcept;

/// Case-insensitive; throws ConfigError on unknown names.
SolverKind parse_solver(std::string_view name);
FitnessMode parse_fitness(std::string_view name);
OutputFormat parse_format(std::string_view name);

struct ExperimentConfig {
  std::string workload_path;  // empty: built-in lab timetable
  std::string fleet_path;     // empty: FleetSpec::default_datacenter()
  std::vector<SolverKind> solvers;
  std::vector<GaConfig> ga_grid;  // seed fields are ignored; see seeds
  std::vector<std::uint64_t> seeds;
  PowerOptions power;
  std::string output_path;  // empty: stdout
  OutputFormat output_format = OutputFormat::kCsv;

  SlotConfig slots;
  /// Unset: one PE sized to the smallest core in the fleet.
  std::optional<VmTemplate> vm_template;
  ExactOptions exact;
  bool record_timing = false;
  bool dump_placements = false;
  /// Independent GAPA runs executed concurrently.
  std::size_t jobs = 1;

  /// Throws ConfigError.
  void validate() const;

  /// Comparison grid: generations {500, 1000} x crossover {0.25, 0.5,
  /// 0.75}, population 10, mutation 0.01, seeds 1..20, BFD and GAPA.
  static ExperimentConfig comparison_grid();

  /// Reads the JSON experiment file. Unspecified keys keep their defaults.
  static ExperimentConfig from_json(std::string_view text);
};

/// One row of a report. kind is "run" for a single solver execution, or
/// "mean"/"min" for the per-grid-point summary over seeds.
struct RunRecord {
  std::string solver;
  std::string kind = "run";
  std::optional<GaConfig> ga;
  std::optional<std::uint64_t> seed;
  std::string status = "ok";  // "ok" or a SolverErrc name
  std::string error;
  double total_kwh = 0.0;
  std::optional<double> ratio_vs_bfd;
  std::size_t hosts_used = 0;
  double wall_seconds = 0.0;
  /// Hosts with non-zero energy, in host order.
  std::vector<std::pair<std::string, double>> per_host_kwh;
  std::vector<double> best_fitness;

  bool ok() const noexcept { return status == "ok"; }
  /// File-name friendly label, e.g. "GAPA_P10_G500_C25_S3".
  std::string label() const;

  friend bool operator==(const RunRecord& a, const RunRecord& b);
};

struct ExperimentOutcome {
  std::vector<RunRecord> records;
  /// Aligned with records; empty for summaries and failed runs.
  std::vector<std::optional<Placement>> placements;

  bool any_failed() const;
};

/// Builds the problem instance the config describes (workload, fleet, VM
/// template, power options). Throws ConfigError, ParseError or IoError.
ProblemInstance load_instance(const ExperimentConfig& config);

/// Runs BFD once, GAPA per grid point and seed, EXACT once, in the order
/// the solvers are listed. Solver failures become records with a non-ok
/// status; they do not stop the other runs.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const ProblemInstance& instance);
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// CSV with a fixed column order or a JSON array. kWh, ratio and wall time
/// are written with 6 decimals, trajectories in shortest round-trip form.
void emit_report(std::span<const RunRecord> records, OutputFormat format,
                 std::ostream& out);
std::vector<RunRecord> read_report(std::istream& in, OutputFormat format);

/// "vm_id,host_id" per line, in VM order.
void write_placement(std::ostream& out, const Placement& placement,
                     const ProblemInstance& instance);
/// Throws ParseError for malformed lines, unknown ids, or VMs listed twice
/// or not at all.
Placement read_placement(std::istream& in, const ProblemInstance& instance);

/// Unreadable or unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path);

}  // namespace vmalloc

#endif  // VMALLOC_EXPERIMENT_HPP
