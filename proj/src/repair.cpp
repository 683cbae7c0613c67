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
#include <numeric>
#include <optional>

#include "timeline.hpp"
#include "vmalloc/schedulers.hpp"

namespace vmalloc {

namespace {

// Total demand across the whole fleet at every event must fit total fleet
// capacity, and each VM must fit some host on its own.
void require_repairable(const ProblemInstance& instance) {
  std::uint64_t fleet_pe = 0;
  double fleet_mips = 0.0;
  std::uint32_t max_pe = 0;
  double max_mips = 0.0;
  for (const HostSpec& h : instance.hosts()) {
    fleet_pe += h.pe_count;
    fleet_mips += h.total_mips();
    max_pe = std::max(max_pe, h.pe_count);
    max_mips = std::max(max_mips, h.total_mips());
  }
  for (const VmRequest& vm : instance.vms()) {
    if (vm.pe_count > max_pe || vm.total_mips() > max_mips * (1.0 + kCapacityRelTol)) {
      throw SolverError(SolverErrc::kUnrepairable, "VM " + vm.id + " exceeds every host");
    }
  }
  std::vector<VmIndex> all(instance.vm_count());
  std::iota(all.begin(), all.end(), VmIndex{0});
  detail::for_each_step(
      instance.vms(), all, 0, instance.horizon(),
      [&](Seconds begin, Seconds, const Demand& d) {
        if (d.pe > fleet_pe || d.mips > fleet_mips * (1.0 + kCapacityRelTol)) {
          throw SolverError(SolverErrc::kUnrepairable,
                            "demand at t=" + std::to_string(begin) +
                                " exceeds total fleet capacity");
        }
      });
}

// Both return host_count() when no host has room.
HostIndex first_fit(const ProblemInstance& instance,
                    std::vector<std::vector<VmIndex>>& groups, VmIndex vm) {
  for (HostIndex h = 0; h < instance.host_count(); ++h) {
    if (detail::fits_on_host(instance, h, groups[h], vm)) return h;
  }
  return instance.host_count();
}

HostIndex least_energy(const ProblemInstance& instance,
                       std::vector<std::vector<VmIndex>>& groups, VmIndex vm) {
  const VmRequest& req = instance.vm(vm);
  HostIndex best = instance.host_count();
  double best_delta = 0.0;
  for (HostIndex h = 0; h < instance.host_count(); ++h) {
    if (!detail::fits_on_host(instance, h, groups[h], vm)) continue;
    const double before =
        host_energy_joules(instance, h, groups[h], req.start_time, req.end_time());
    groups[h].push_back(vm);
    const double after =
        host_energy_joules(instance, h, groups[h], req.start_time, req.end_time());
    groups[h].pop_back();
    if (best == instance.host_count() || after - before < best_delta) {
      best = h;
      best_delta = after - before;
    }
  }
  return best;
}

}  // namespace

Chromosome repair(Chromosome c, const ProblemInstance& instance, Rng& rng,
                  RepairPlacement placement_policy) {
  Placement placement = c.to_placement();
  auto violations = check_feasibility(placement, instance);
  if (violations.empty()) return c;

  require_repairable(instance);

  const std::size_t max_moves = 8 * instance.vm_count() + 64;
  std::uniform_int_distribution<HostIndex> any_host(0, instance.host_count() - 1);
  // A VM dropped on a random host displaces someone else next, otherwise it
  // would just be evicted again.
  std::optional<VmIndex> dropped;
  for (std::size_t moves = 0; !violations.empty(); ++moves) {
    if (moves == max_moves) {
      throw SolverError(SolverErrc::kUnrepairable,
                        "no feasible placement found after " +
                            std::to_string(max_moves) + " moves");
    }
    const Violation& first = violations.front();
    auto on_host = active_vms(placement, instance, first.host, first.time);
    if (dropped && on_host.size() > 1) std::erase(on_host, *dropped);
    const VmIndex evicted = on_host.back();

    auto groups = vms_by_host(placement, instance.host_count());
    auto& old_group = groups[first.host];
    old_group.erase(std::find(old_group.begin(), old_group.end(), evicted));

    HostIndex target = placement_policy == RepairPlacement::kFirstFit
                           ? first_fit(instance, groups, evicted)
                           : least_energy(instance, groups, evicted);
    dropped.reset();
    if (target == instance.host_count()) {
      target = any_host(rng);
      dropped = evicted;
    }
    placement.host_of[evicted] = target;
    violations = check_feasibility(placement, instance);
  }
  return Chromosome::from_placement(placement);
}

}  // namespace vmalloc
