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
#include <numeric>
#include <optional>

#include "timeline.hpp"
#include "vmalloc/schedulers.hpp"

namespace vmalloc {

SolveResult bfd_schedule(const ProblemInstance& instance) {
  const auto started = std::chrono::steady_clock::now();
  const auto vms = instance.vms();

  std::vector<VmIndex> order(instance.vm_count());
  std::iota(order.begin(), order.end(), VmIndex{0});
  std::sort(order.begin(), order.end(), [&](VmIndex a, VmIndex b) {
    if (vms[a].start_time != vms[b].start_time)
      return vms[a].start_time < vms[b].start_time;
    if (vms[a].total_mips() != vms[b].total_mips())
      return vms[a].total_mips() > vms[b].total_mips();
    return a < b;
  });

  std::vector<std::vector<VmIndex>> placed(instance.host_count());
  Placement placement{std::vector<HostIndex>(instance.vm_count(), 0)};
  std::size_t evaluations = 0;

  for (VmIndex i : order) {
    const VmRequest& vm = vms[i];
    std::optional<HostIndex> best;
    double best_delta = 0.0;
    for (HostIndex h = 0; h < instance.host_count(); ++h) {
      if (!detail::fits_on_host(instance, h, placed[h], i)) continue;
      const double before =
          host_energy_joules(instance, h, placed[h], vm.start_time, vm.end_time());
      placed[h].push_back(i);
      const double after =
          host_energy_joules(instance, h, placed[h], vm.start_time, vm.end_time());
      placed[h].pop_back();
      ++evaluations;
      const double delta = after - before;
      if (!best || delta < best_delta) {
        best = h;
        best_delta = delta;
      }
    }
    if (!best) {
      throw SolverError(SolverErrc::kNoFeasibleHost, "VM " + vm.id + " fits on no host");
    }
    placed[*best].push_back(i);
    placement.host_of[i] = *best;
  }

  SolveResult result;
  result.solver = "BFD";
  result.placement = std::move(placement);
  result.energy = integrate_energy(result.placement, instance);
  result.stats.evaluations = evaluations;
  result.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

}  // namespace vmalloc
