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

#include "vmalloc/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "timeline.hpp"

namespace vmalloc {

const char* to_string(SolverErrc code) noexcept {
  switch (code) {
    case SolverErrc::kNoFeasibleHost: return "NO_FEASIBLE_HOST";
    case SolverErrc::kUnrepairable: return "UNREPAIRABLE";
    case SolverErrc::kBudgetExceeded: return "BUDGET_EXCEEDED";
    case SolverErrc::kNoFeasibleAssignment: return "NO_FEASIBLE_ASSIGNMENT";
  }
  return "UNKNOWN";
}

const char* to_string(ViolationKind kind) noexcept {
  return kind == ViolationKind::kPeOverflow ? "PE_OVERFLOW" : "MIPS_OVERFLOW";
}

namespace {

void validate(const VmRequest& vm) {
  if (vm.pe_count < 1) throw ConfigError("VM " + vm.id + ": pe_count must be >= 1");
  if (!(vm.mips_per_pe > 0.0) || !std::isfinite(vm.mips_per_pe))
    throw ConfigError("VM " + vm.id + ": mips_per_pe must be positive");
  if (vm.start_time < 0) throw ConfigError("VM " + vm.id + ": negative start_time");
  if (vm.duration <= 0) throw ConfigError("VM " + vm.id + ": duration must be positive");
}

void validate(const HostSpec& host) {
  if (host.pe_count < 1) throw ConfigError("host " + host.id + ": pe_count must be >= 1");
  if (!(host.mips_per_pe > 0.0) || !std::isfinite(host.mips_per_pe))
    throw ConfigError("host " + host.id + ": mips_per_pe must be positive");
}

}  // namespace

ProblemInstance::ProblemInstance(std::vector<VmRequest> vms,
                                 std::vector<HostSpec> hosts,
                                 PowerOptions power)
    : vms_(std::move(vms)), hosts_(std::move(hosts)), power_(power) {
  std::unordered_set<std::string_view> seen;
  for (const VmRequest& vm : vms_) {
    validate(vm);
    if (!seen.insert(vm.id).second) throw ConfigError("duplicate VM id " + vm.id);
    horizon_ = std::max(horizon_, vm.end_time());
  }
  seen.clear();
  for (const HostSpec& host : hosts_) {
    validate(host);
    if (!seen.insert(host.id).second) throw ConfigError("duplicate host id " + host.id);
  }
}

HostIndex ProblemInstance::host_index(std::string_view id) const {
  auto it = std::find_if(hosts_.begin(), hosts_.end(),
                         [&](const HostSpec& h) { return h.id == id; });
  if (it == hosts_.end()) throw LookupError("unknown host id " + std::string(id));
  return static_cast<HostIndex>(it - hosts_.begin());
}

VmIndex ProblemInstance::vm_index(std::string_view id) const {
  auto it = std::find_if(vms_.begin(), vms_.end(),
                         [&](const VmRequest& v) { return v.id == id; });
  if (it == vms_.end()) throw LookupError("unknown VM id " + std::string(id));
  return static_cast<VmIndex>(it - vms_.begin());
}

ProblemInstance ProblemInstance::with_power(PowerOptions power) const {
  ProblemInstance copy = *this;
  copy.power_ = power;
  return copy;
}

void require_total(const Placement& placement, const ProblemInstance& instance) {
  if (placement.size() != instance.vm_count()) {
    throw ContractViolation("placement covers " + std::to_string(placement.size()) +
                            " VMs, instance has " +
                            std::to_string(instance.vm_count()));
  }
  for (VmIndex i = 0; i < placement.size(); ++i) {
    if (placement[i] >= instance.host_count()) {
      throw ContractViolation("VM " + instance.vm(i).id + " assigned to host index " +
                              std::to_string(placement[i]) + " out of range");
    }
  }
}

InfeasiblePlacement::InfeasiblePlacement(std::vector<Violation> violations)
    : Error("infeasible placement: " + std::to_string(violations.size()) +
            " capacity violation(s)" +
            (violations.empty()
                 ? std::string()
                 : ", first on host " + violations.front().host_id + " at t=" +
                       std::to_string(violations.front().time) + " (" +
                       to_string(violations.front().kind) + ")")),
      violations_(std::move(violations)) {}

std::vector<std::vector<VmIndex>> vms_by_host(const Placement& placement,
                                              std::size_t host_count) {
  std::vector<std::vector<VmIndex>> groups(host_count);
  for (VmIndex i = 0; i < placement.size(); ++i) groups.at(placement[i]).push_back(i);
  return groups;
}

std::vector<VmIndex> active_vms(const Placement& placement,
                                const ProblemInstance& instance, HostIndex host,
                                Seconds t) {
  if (host >= instance.host_count())
    throw LookupError("unknown host index " + std::to_string(host));
  require_total(placement, instance);
  std::vector<VmIndex> out;
  for (VmIndex i = 0; i < placement.size(); ++i) {
    if (placement[i] == host && instance.vm(i).active_at(t)) out.push_back(i);
  }
  return out;
}

std::vector<VmIndex> active_vms(const Placement& placement,
                                const ProblemInstance& instance,
                                std::string_view host_id, Seconds t) {
  return active_vms(placement, instance, instance.host_index(host_id), t);
}

std::vector<Violation> check_feasibility(const Placement& placement,
                                         const ProblemInstance& instance) {
  require_total(placement, instance);
  std::vector<Violation> out;
  const auto groups = vms_by_host(placement, instance.host_count());
  for (HostIndex j = 0; j < groups.size(); ++j) {
    const HostSpec& host = instance.host(j);
    const double mips_cap = host.total_mips();
    detail::for_each_step(
        instance.vms(), groups[j], 0, instance.horizon(),
        [&](Seconds begin, Seconds end, const Demand& d) {
          if (d.pe > host.pe_count) {
            out.push_back({j, host.id, begin, end, ViolationKind::kPeOverflow,
                           static_cast<double>(d.pe),
                           static_cast<double>(host.pe_count)});
          }
          if (d.mips > mips_cap * (1.0 + kCapacityRelTol)) {
            out.push_back({j, host.id, begin, end, ViolationKind::kMipsOverflow,
                           d.mips, mips_cap});
          }
        });
  }
  std::stable_sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.host < b.host;
  });
  return out;
}

bool is_feasible(const Placement& placement, const ProblemInstance& instance) {
  return check_feasibility(placement, instance).empty();
}

}  // namespace vmalloc
