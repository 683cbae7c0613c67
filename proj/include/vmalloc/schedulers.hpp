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

#ifndef VMALLOC_SCHEDULERS_HPP
#define VMALLOC_SCHEDULERS_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vmalloc/model.hpp"
#include "vmalloc/power.hpp"

namespace vmalloc {

/// Generator behind every stochastic operator. Recorded by name in
/// SolverStats so runs can be reproduced.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";

struct SolverStats {
  std::size_t generations_run = 0;
  /// Best fitness of each generation (GAPA only).
  std::vector<double> best_fitness;
  std::size_t evaluations = 0;
  double wall_seconds = 0.0;
  std::string rng;
};

struct SolveResult {
  std::string solver;
  Placement placement;
  EnergyReport energy;
  SolverStats stats;
};

// ---------------------------------------------------------------------------
// Best-fit decreasing baseline

/// Earliest-start-first, then least incremental energy.
///
/// VMs are taken by ascending start time (ties: larger total MIPS first, then
/// lower index). Each goes to the host, among those with room over the VM's
/// whole interval, whose energy over that interval grows the least given the
/// VMs placed so far; switching an empty host on counts toward the increase.
/// Ties go to the lowest host index. Throws SolverError(kNoFeasibleHost)
/// naming the first VM that fits nowhere.
SolveResult bfd_schedule(const ProblemInstance& instance);

// ---------------------------------------------------------------------------
// Genetic algorithm

enum class FitnessMode {
  kEnergy,         ///< 1 / total joules over the horizon
  kSnapshotPower,  ///< 1 / datacenter watts at the peak-utilization instant
};

/// Weights handed to the roulette wheel when picking parents.
enum class SelectionWeights {
  kFitness,  ///< raw fitness values
  kRank,     ///< population_size for the fittest down to 1 for the weakest
};

/// Where repair puts an evicted VM.
enum class RepairPlacement {
  kLeastEnergy,  ///< host whose energy over the VM's interval grows least
  kFirstFit,     ///< lowest-indexed host with room
};

struct GaConfig {
  std::size_t population_size = 10;
  std::size_t generations = 500;
  double crossover_prob = 0.5;
  double mutation_prob = 0.01;       // per gene (VM node)
  double host_mutation_prob = 0.01;  // per host node, see mutate_hosts
  std::size_t elite_count = 1;
  SelectionWeights selection = SelectionWeights::kRank;
  RepairPlacement repair = RepairPlacement::kLeastEnergy;
  std::uint64_t seed = 0;
  FitnessMode fitness_mode = FitnessMode::kEnergy;
  /// Worker threads for fitness evaluation. Results do not depend on it.
  std::size_t threads = 1;

  /// Throws ConfigError on out-of-range fields.
  void validate() const;

  friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

/// Flattened allocation: genes[i] is the host index of VM i.
struct Chromosome {
  std::vector<HostIndex> genes;

  std::size_t size() const noexcept { return genes.size(); }
  Placement to_placement() const { return Placement{genes}; }
  static Chromosome from_placement(const Placement& p) { return {p.host_of}; }

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Three-level tree form of a chromosome. The implicit root's children are
/// the hosts (one node per host index, possibly leafless); each host's
/// children are the VMs it carries, in ascending index order.
struct AllocationTree {
  std::vector<std::vector<VmIndex>> hosts;

  friend bool operator==(const AllocationTree&, const AllocationTree&) = default;
};

AllocationTree to_tree(const Chromosome& c, std::size_t host_count);

/// Throws ContractViolation unless every VM in [0, vm_count) hangs under
/// exactly one host.
Chromosome from_tree(const AllocationTree& tree, std::size_t vm_count);

/// Higher is better. Throws ContractViolation for an infeasible chromosome.
double fitness(const Chromosome& c, const ProblemInstance& instance,
               FitnessMode mode = FitnessMode::kEnergy);

/// Roulette-wheel selection: two independent fitness-proportional draws,
/// returned as population indices. Throws ContractViolation for an empty
/// population or a non-positive fitness.
std::pair<std::size_t, std::size_t> select_parents(std::span<const double> fitnesses,
                                                   Rng& rng);

/// Single-point crossover: with probability `prob` the tails after a uniform
/// cut in [1, n-1] are swapped, otherwise the children copy the parents.
/// Throws ContractViolation on a length mismatch.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            double prob, Rng& rng);

/// Deterministic core of crossover: genes [cut, n) are exchanged.
std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a,
                                               const Chromosome& b, std::size_t cut);

/// Each gene is independently redrawn, with probability `prob`, uniformly
/// from [0, host_count).
Chromosome mutate(Chromosome c, double prob, std::size_t host_count, Rng& rng);

/// Host-node mutation on the tree form. Hosts are visited in index order;
/// each used host is picked with probability `prob` and its whole subtree
/// is moved onto a uniformly random other host that is in use. A draw is
/// consumed for every host so that the random stream does not depend on
/// the chromosome.
Chromosome mutate_hosts(Chromosome c, double prob, std::size_t host_count, Rng& rng);

/// Restores capacity feasibility.
///
/// While a violation remains, the VM with the highest index among those
/// causing the earliest one is evicted and moved to a host with room for it
/// over its whole interval, chosen by `placement` (ties to the lowest
/// index). When no host has room it is dropped on a uniformly random host
/// and the loop continues. Feasible input is returned unchanged without
/// touching the generator. Throws SolverError(kUnrepairable) when total
/// demand exceeds fleet capacity at some instant, or when the retry bound
/// is exhausted.
Chromosome repair(Chromosome c, const ProblemInstance& instance, Rng& rng,
                  RepairPlacement placement = RepairPlacement::kLeastEnergy);

/// Genetic search seeded from config.seed.
///
/// Generation 1 is a population of uniformly random, repaired chromosomes.
/// Each later generation keeps the elite_count fittest individuals and fills
/// the rest by selection, crossover, gene mutation, host mutation and
/// repair. The best
/// individual of the final generation is returned (with elitism it is the
/// best ever seen). Deterministic given (instance, config).
SolveResult gapa_schedule(const ProblemInstance& instance, const GaConfig& config);

// ---------------------------------------------------------------------------
// Exhaustive oracle

struct ExactOptions {
  /// Upper bound on host_count^vm_count, or on search nodes visited when
  /// symmetry_reduction is on.
  std::uint64_t budget = 10'000'000;
  /// Skip assignments equivalent under swapping identical VMs or identical
  /// hosts. The optimum returned is the same either way.
  bool symmetry_reduction = false;
};

/// Minimum-energy feasible placement by enumeration; ties resolve to the
/// lexicographically smallest gene vector. Throws SolverError with
/// kBudgetExceeded or kNoFeasibleAssignment.
SolveResult exact_schedule(const ProblemInstance& instance,
                           const ExactOptions& options = {});

}  // namespace vmalloc

#endif  // VMALLOC_SCHEDULERS_HPP
