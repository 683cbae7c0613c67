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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "vmalloc/schedulers.hpp"

namespace vmalloc {

void GaConfig::validate() const {
  if (population_size < 1) throw ConfigError("population_size must be >= 1");
  if (generations < 1) throw ConfigError("generations must be >= 1");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
    throw ConfigError("crossover_prob must lie in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw ConfigError("mutation_prob must lie in [0, 1]");
  if (!(host_mutation_prob >= 0.0 && host_mutation_prob <= 1.0))
    throw ConfigError("host_mutation_prob must lie in [0, 1]");
  if (elite_count >= population_size)
    throw ConfigError("elite_count must be smaller than population_size");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

AllocationTree to_tree(const Chromosome& c, std::size_t host_count) {
  AllocationTree tree;
  tree.hosts.resize(host_count);
  for (VmIndex i = 0; i < c.size(); ++i) {
    if (c.genes[i] >= host_count) {
      throw ContractViolation("gene " + std::to_string(i) + " references host " +
                              std::to_string(c.genes[i]));
    }
    tree.hosts[c.genes[i]].push_back(i);
  }
  return tree;
}

Chromosome from_tree(const AllocationTree& tree, std::size_t vm_count) {
  constexpr HostIndex kUnset = static_cast<HostIndex>(-1);
  Chromosome c{std::vector<HostIndex>(vm_count, kUnset)};
  for (HostIndex h = 0; h < tree.hosts.size(); ++h) {
    for (VmIndex vm : tree.hosts[h]) {
      if (vm >= vm_count) throw ContractViolation("tree leaf references unknown VM");
      if (c.genes[vm] != kUnset) throw ContractViolation("VM appears twice in tree");
      c.genes[vm] = h;
    }
  }
  if (std::find(c.genes.begin(), c.genes.end(), kUnset) != c.genes.end()) {
    throw ContractViolation("tree does not place every VM");
  }
  return c;
}

namespace {

double unchecked_fitness(const Chromosome& c, const ProblemInstance& instance,
                         FitnessMode mode) {
  const Placement p = c.to_placement();
  const double cost = mode == FitnessMode::kEnergy ? total_energy_joules(p, instance)
                                                   : peak_snapshot_power(p, instance);
  return 1.0 / cost;
}

}  // namespace

double fitness(const Chromosome& c, const ProblemInstance& instance, FitnessMode mode) {
  const Placement p = c.to_placement();
  if (!is_feasible(p, instance)) {
    throw ContractViolation("fitness of an infeasible chromosome; repair first");
  }
  return unchecked_fitness(c, instance, mode);
}

std::pair<std::size_t, std::size_t> select_parents(std::span<const double> fitnesses,
                                                   Rng& rng) {
  if (fitnesses.empty()) throw ContractViolation("empty population");
  double total = 0.0;
  for (double f : fitnesses) {
    if (!(f > 0.0)) throw ContractViolation("fitness values must be positive");
    total += f;
  }
  std::uniform_real_distribution<double> spin(0.0, total);
  auto draw = [&] {
    const double r = spin(rng);
    double acc = 0.0;
    for (std::size_t k = 0; k < fitnesses.size(); ++k) {
      acc += fitnesses[k];
      if (r < acc) return k;
    }
    return fitnesses.size() - 1;
  };
  const std::size_t first = draw();
  return {first, draw()};
}

std::pair<Chromosome, Chromosome> crossover_at(const Chromosome& a,
                                               const Chromosome& b, std::size_t cut) {
  if (a.size() != b.size()) throw ContractViolation("crossover of unequal lengths");
  if (cut > a.size()) throw ContractViolation("crossover cut out of range");
  Chromosome x = a;
  Chromosome y = b;
  std::swap_ranges(x.genes.begin() + static_cast<std::ptrdiff_t>(cut), x.genes.end(),
                   y.genes.begin() + static_cast<std::ptrdiff_t>(cut));
  return {std::move(x), std::move(y)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b,
                                            double prob, Rng& rng) {
  if (a.size() != b.size()) throw ContractViolation("crossover of unequal lengths");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) >= prob || a.size() < 2) return {a, b};
  std::uniform_int_distribution<std::size_t> cut(1, a.size() - 1);
  return crossover_at(a, b, cut(rng));
}

Chromosome mutate(Chromosome c, double prob, std::size_t host_count, Rng& rng) {
  if (host_count < 1) throw ContractViolation("mutate needs at least one host");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<HostIndex> host(0, host_count - 1);
  for (HostIndex& g : c.genes) {
    if (coin(rng) < prob) g = host(rng);
  }
  return c;
}

Chromosome mutate_hosts(Chromosome c, double prob, std::size_t host_count, Rng& rng) {
  if (host_count < 1) throw ContractViolation("mutate needs at least one host");
  std::vector<std::size_t> load(host_count, 0);
  for (HostIndex g : c.genes) {
    if (g >= host_count) throw ContractViolation("gene references unknown host");
    ++load[g];
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<HostIndex> others;
  for (HostIndex h = 0; h < host_count; ++h) {
    if (coin(rng) >= prob || load[h] == 0) continue;
    others.clear();
    for (HostIndex k = 0; k < host_count; ++k) {
      if (k != h && load[k] > 0) others.push_back(k);
    }
    if (others.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
    const HostIndex target = others[pick(rng)];
    for (HostIndex& g : c.genes) {
      if (g == h) g = target;
    }
    load[target] += load[h];
    load[h] = 0;
  }
  return c;
}

namespace {

// Evaluates fitness for population[from..] in parallel. No random draws
// happen here, so the thread count cannot change the outcome.
void evaluate(const std::vector<Chromosome>& population, std::vector<double>& fit,
              std::size_t from, const ProblemInstance& instance,
              const GaConfig& config) {
  const std::size_t n = population.size() - from;
  const std::size_t workers = std::min(config.threads, n);
  if (workers <= 1) {
    for (std::size_t k = from; k < population.size(); ++k)
      fit[k] = unchecked_fitness(population[k], instance, config.fitness_mode);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = from + w; k < population.size(); k += workers)
        fit[k] = unchecked_fitness(population[k], instance, config.fitness_mode);
    });
  }
}

std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fit) {
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
  return order;
}

std::vector<double> selection_weights(const std::vector<double>& fit,
                                      const std::vector<std::size_t>& ranked,
                                      SelectionWeights mode) {
  if (mode == SelectionWeights::kFitness) return fit;
  std::vector<double> w(fit.size());
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    w[ranked[r]] = static_cast<double>(ranked.size() - r);
  }
  return w;
}

}  // namespace

SolveResult gapa_schedule(const ProblemInstance& instance, const GaConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();

  SolveResult result;
  result.solver = "GAPA";
  result.stats.rng = std::string(kRngName);
  if (instance.vm_count() == 0) {
    result.energy = integrate_energy(result.placement, instance);
    return result;
  }
  if (instance.host_count() == 0) {
    throw SolverError(SolverErrc::kUnrepairable, "no hosts to place VMs on");
  }

  Rng rng(config.seed);
  const std::size_t pop_size = config.population_size;
  const std::size_t hosts = instance.host_count();

  std::vector<Chromosome> population;
  population.reserve(pop_size);
  std::uniform_int_distribution<HostIndex> any_host(0, hosts - 1);
  for (std::size_t k = 0; k < pop_size; ++k) {
    Chromosome c{std::vector<HostIndex>(instance.vm_count())};
    for (HostIndex& g : c.genes) g = any_host(rng);
    population.push_back(repair(std::move(c), instance, rng, config.repair));
  }

  std::vector<double> fit(pop_size, 0.0);
  std::size_t evaluated_from = 0;
  for (std::size_t gen = 1;; ++gen) {
    evaluate(population, fit, evaluated_from, instance, config);
    result.stats.evaluations += pop_size - evaluated_from;
    const auto ranked = rank_by_fitness(fit);
    result.stats.best_fitness.push_back(fit[ranked.front()]);
    result.stats.generations_run = gen;
    if (gen == config.generations) {
      result.placement = population[ranked.front()].to_placement();
      break;
    }

    std::vector<Chromosome> next;
    std::vector<double> next_fit;
    next.reserve(pop_size);
    for (std::size_t e = 0; e < config.elite_count; ++e) {
      next.push_back(population[ranked[e]]);
      next_fit.push_back(fit[ranked[e]]);
    }
    evaluated_from = next.size();
    const auto weights = selection_weights(fit, ranked, config.selection);
    auto breed = [&](Chromosome child) {
      child = mutate(std::move(child), config.mutation_prob, hosts, rng);
      child = mutate_hosts(std::move(child), config.host_mutation_prob, hosts, rng);
      return repair(std::move(child), instance, rng, config.repair);
    };
    while (next.size() < pop_size) {
      const auto [pa, pb] = select_parents(weights, rng);
      auto [c1, c2] = crossover(population[pa], population[pb], config.crossover_prob, rng);
      next.push_back(breed(std::move(c1)));
      if (next.size() < pop_size) next.push_back(breed(std::move(c2)));
    }
    population = std::move(next);
    next_fit.resize(pop_size, 0.0);
    fit = std::move(next_fit);
  }

  result.energy = integrate_energy(result.placement, instance);
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace vmalloc
