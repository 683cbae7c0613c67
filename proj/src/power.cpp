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

#include "vmalloc/power.hpp"

#include <cmath>

#include "timeline.hpp"

namespace vmalloc {

Demand Demand::of(std::span<const VmRequest> vms) noexcept {
  Demand d;
  for (const VmRequest& vm : vms) {
    d.pe += vm.pe_count;
    d.mips += vm.total_mips();
  }
  return d;
}

bool Demand::fits(const HostSpec& host) const noexcept {
  return pe <= host.pe_count && mips <= host.total_mips() * (1.0 + kCapacityRelTol);
}

double utilization(const HostSpec& host, const Demand& demand) {
  if (!demand.fits(host)) {
    throw ContractViolation("active set exceeds capacity of host " + host.id);
  }
  return std::min(1.0, demand.mips / host.total_mips());
}

double utilization(const HostSpec& host, std::span<const VmRequest> active) {
  return utilization(host, Demand::of(active));
}

double interpolate_power(const PowerModel& model, double u) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError("utilization " + std::to_string(u) + " outside [0, 1]");
  }
  const auto& s = model.samples();
  const double pos = u * 10.0;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-12) return s[static_cast<std::size_t>(nearest)];
  const auto k = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return s[k] + (s[k + 1] - s[k]) * frac;
}

double host_power(const HostSpec& host, const Demand& demand, bool powered_on) {
  if (demand.empty()) return powered_on ? host.power_model.idle_watts() : 0.0;
  if (!powered_on) {
    throw ContractViolation("host " + host.id + " is off but has active VMs");
  }
  return interpolate_power(host.power_model, utilization(host, demand));
}

double host_power(const HostSpec& host, std::span<const VmRequest> active,
                  bool powered_on) {
  return host_power(host, Demand::of(active), powered_on);
}

namespace {

// Off-when-empty unless the instance keeps idle hosts powered.
double step_watts(const ProblemInstance& instance, const HostSpec& host,
                  const Demand& d) {
  return host_power(host, d, instance.power().idle_hosts_powered || !d.empty());
}

}  // namespace

double host_energy_joules(const ProblemInstance& instance, HostIndex host,
                          std::span<const VmIndex> vms, Seconds from, Seconds to) {
  const HostSpec& spec = instance.host(host);
  double joules = 0.0;
  detail::for_each_step(instance.vms(), vms, from, to,
                        [&](Seconds begin, Seconds end, const Demand& d) {
                          joules += step_watts(instance, spec, d) *
                                    static_cast<double>(end - begin);
                        });
  return joules;
}

double total_energy_joules(const Placement& placement,
                           const ProblemInstance& instance) {
  const auto groups = vms_by_host(placement, instance.host_count());
  double total = 0.0;
  for (HostIndex j = 0; j < groups.size(); ++j) {
    if (groups[j].empty() && !instance.power().idle_hosts_powered) continue;
    total += host_energy_joules(instance, j, groups[j], 0, instance.horizon());
  }
  return total;
}

EnergyReport integrate_energy(const Placement& placement,
                              const ProblemInstance& instance) {
  auto violations = check_feasibility(placement, instance);
  if (!violations.empty()) throw InfeasiblePlacement(std::move(violations));

  EnergyReport report;
  report.per_host_joules.assign(instance.host_count(), 0.0);
  const auto groups = vms_by_host(placement, instance.host_count());
  for (HostIndex j = 0; j < groups.size(); ++j) {
    const HostSpec& host = instance.host(j);
    if (!groups[j].empty()) ++report.hosts_used;
    double joules = 0.0;
    detail::for_each_step(
        instance.vms(), groups[j], 0, instance.horizon(),
        [&](Seconds begin, Seconds end, const Demand& d) {
          const double u = d.empty() ? 0.0 : utilization(host, d);
          const double w = step_watts(instance, host, d);
          joules += w * static_cast<double>(end - begin);
          if (!report.segments.empty()) {
            PowerSegment& last = report.segments.back();
            if (last.host == j && last.end == begin && last.watts == w &&
                last.utilization == u) {
              last.end = end;
              return;
            }
          }
          report.segments.push_back({begin, end, j, u, w});
        });
    report.per_host_joules[j] = joules;
    report.total_joules += joules;
  }
  report.total_kwh = report.total_joules / kJoulesPerKwh;
  return report;
}

double peak_snapshot_power(const Placement& placement,
                           const ProblemInstance& instance) {
  require_total(placement, instance);
  if (instance.vm_count() == 0) {
    double idle = 0.0;
    if (instance.power().idle_hosts_powered) {
      for (const HostSpec& h : instance.hosts()) idle += h.power_model.idle_watts();
    }
    return idle;
  }
  std::vector<VmIndex> all(instance.vm_count());
  for (VmIndex i = 0; i < all.size(); ++i) all[i] = i;

  double fleet_mips = 0.0;
  for (const HostSpec& h : instance.hosts()) fleet_mips += h.total_mips();

  Seconds peak_t = 0;
  double peak_u = -1.0;
  detail::for_each_step(instance.vms(), all, 0, instance.horizon(),
                        [&](Seconds begin, Seconds, const Demand& d) {
                          const double u = d.mips / fleet_mips;
                          if (u > peak_u) {
                            peak_u = u;
                            peak_t = begin;
                          }
                        });

  const auto groups = vms_by_host(placement, instance.host_count());
  double watts = 0.0;
  for (HostIndex j = 0; j < groups.size(); ++j) {
    const Demand d = detail::demand_at(instance.vms(), groups[j], peak_t);
    watts += step_watts(instance, instance.host(j), d);
  }
  return watts;
}

}  // namespace vmalloc
