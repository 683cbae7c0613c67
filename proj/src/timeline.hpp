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

#ifndef VMALLOC_SRC_TIMELINE_HPP
#define VMALLOC_SRC_TIMELINE_HPP

#include <algorithm>
#include <span>
#include <vector>

#include "vmalloc/model.hpp"
#include "vmalloc/power.hpp"

namespace vmalloc::detail {

/// Demand of the subset VMs active at t. Sums in index order so the result
/// does not depend on how events interleave.
inline Demand demand_at(std::span<const VmRequest> vms,
                        std::span<const VmIndex> subset, Seconds t) {
  Demand d;
  for (VmIndex i : subset) {
    const VmRequest& vm = vms[i];
    if (vm.active_at(t)) {
      d.pe += vm.pe_count;
      d.mips += vm.total_mips();
    }
  }
  return d;
}

/// Calls fn(begin, end, demand) for consecutive constant-demand steps that
/// tile [from, to). Step boundaries are the subset's start/end events.
template <class Fn>
void for_each_step(std::span<const VmRequest> vms,
                   std::span<const VmIndex> subset, Seconds from, Seconds to,
                   Fn&& fn) {
  if (from >= to) return;
  std::vector<Seconds> cuts;
  cuts.reserve(2 * subset.size() + 2);
  cuts.push_back(from);
  cuts.push_back(to);
  for (VmIndex i : subset) {
    const VmRequest& vm = vms[i];
    if (vm.start_time > from && vm.start_time < to) cuts.push_back(vm.start_time);
    if (vm.end_time() > from && vm.end_time() < to) cuts.push_back(vm.end_time());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    fn(cuts[k], cuts[k + 1], demand_at(vms, subset, cuts[k]));
  }
}

/// True when `candidate` can join the host's `placed` VMs without any
/// capacity overflow during the candidate's interval.
inline bool fits_on_host(const ProblemInstance& instance, HostIndex host,
                         std::span<const VmIndex> placed, VmIndex candidate) {
  const HostSpec& spec = instance.host(host);
  const VmRequest& vm = instance.vm(candidate);
  bool ok = true;
  for_each_step(instance.vms(), placed, vm.start_time, vm.end_time(),
                [&](Seconds, Seconds, Demand d) {
                  d.pe += vm.pe_count;
                  d.mips += vm.total_mips();
                  ok = ok && d.fits(spec);
                });
  return ok;
}

}  // namespace vmalloc::detail

#endif  // VMALLOC_SRC_TIMELINE_HPP
