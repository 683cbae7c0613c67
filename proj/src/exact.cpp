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

#include <chrono>
#include <limits>
#include <optional>

#include "timeline.hpp"
#include "vmalloc/schedulers.hpp"

namespace vmalloc {

namespace {

bool same_demand(const VmRequest& a, const VmRequest& b) {
  return a.pe_count == b.pe_count && a.mips_per_pe == b.mips_per_pe &&
         a.start_time == b.start_time && a.duration == b.duration;
}

bool same_host(const HostSpec& a, const HostSpec& b) {
  return a.pe_count == b.pe_count && a.mips_per_pe == b.mips_per_pe &&
         a.power_model == b.power_model;
}

// Depth-first enumeration in lexicographic gene order. Capacity pruning only
// cuts subtrees whose every leaf is infeasible.
class Enumerator {
 public:
  Enumerator(const ProblemInstance& instance, const ExactOptions& options)
      : instance_(instance),
        options_(options),
        genes_(instance.vm_count(), 0),
        placed_(instance.host_count()),
        prev_twin_vm_(instance.vm_count()),
        prev_twin_host_(instance.host_count()) {
    if (!options_.symmetry_reduction) return;
    // Link each VM / host to the nearest earlier identical one.
    for (VmIndex i = 0; i < instance.vm_count(); ++i) {
      for (VmIndex k = i; k-- > 0;) {
        if (same_demand(instance.vm(i), instance.vm(k))) {
          prev_twin_vm_[i] = k;
          break;
        }
      }
    }
    for (HostIndex h = 0; h < instance.host_count(); ++h) {
      for (HostIndex k = h; k-- > 0;) {
        if (same_host(instance.host(h), instance.host(k))) {
          prev_twin_host_[h] = k;
          break;
        }
      }
    }
  }

  void run() { descend(0); }

  const std::optional<Placement>& best() const { return best_; }
  std::size_t leaves() const { return leaves_; }

 private:
  void descend(VmIndex i) {
    if (options_.symmetry_reduction && ++nodes_ > options_.budget) {
      throw SolverError(SolverErrc::kBudgetExceeded,
                        "search visited more than " + std::to_string(options_.budget) +
                            " nodes");
    }
    if (i == instance_.vm_count()) {
      visit_leaf();
      return;
    }
    HostIndex first = 0;
    if (prev_twin_vm_[i]) first = genes_[*prev_twin_vm_[i]];
    for (HostIndex h = first; h < instance_.host_count(); ++h) {
      if (options_.symmetry_reduction && placed_[h].empty() && prev_twin_host_[h] &&
          placed_[*prev_twin_host_[h]].empty()) {
        continue;
      }
      if (!detail::fits_on_host(instance_, h, placed_[h], i)) continue;
      genes_[i] = h;
      placed_[h].push_back(i);
      descend(i + 1);
      placed_[h].pop_back();
    }
  }

  void visit_leaf() {
    ++leaves_;
    const Placement p{genes_};
    const double e = total_energy_joules(p, instance_);
    // Relative slack keeps symmetric placements, whose sums differ only in
    // rounding, from displacing the lexicographically earlier one.
    if (!best_ || e < best_energy_ - 1e-12 * best_energy_) {
      best_ = p;
      best_energy_ = e;
    }
  }

  const ProblemInstance& instance_;
  const ExactOptions& options_;
  std::vector<HostIndex> genes_;
  std::vector<std::vector<VmIndex>> placed_;
  std::vector<std::optional<VmIndex>> prev_twin_vm_;
  std::vector<std::optional<HostIndex>> prev_twin_host_;
  std::optional<Placement> best_;
  double best_energy_ = std::numeric_limits<double>::infinity();
  std::uint64_t nodes_ = 0;
  std::size_t leaves_ = 0;
};

}  // namespace

SolveResult exact_schedule(const ProblemInstance& instance, const ExactOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (!options.symmetry_reduction) {
    std::uint64_t space = 1;
    for (std::size_t i = 0; i < instance.vm_count(); ++i) {
      if (instance.host_count() != 0 &&
          space > options.budget / instance.host_count()) {
        throw SolverError(SolverErrc::kBudgetExceeded,
                          std::to_string(instance.host_count()) + "^" +
                              std::to_string(instance.vm_count()) +
                              " assignments exceed budget of " +
                              std::to_string(options.budget));
      }
      space *= instance.host_count();
    }
  }

  Enumerator search(instance, options);
  search.run();
  if (!search.best()) {
    throw SolverError(SolverErrc::kNoFeasibleAssignment,
                      "no assignment satisfies host capacities");
  }

  SolveResult result;
  result.solver = "EXACT";
  result.placement = *search.best();
  result.energy = integrate_energy(result.placement, instance);
  result.stats.evaluations = search.leaves();
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace vmalloc
