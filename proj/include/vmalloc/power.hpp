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

#ifndef VMALLOC_POWER_HPP
#define VMALLOC_POWER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "vmalloc/model.hpp"
#include "vmalloc/power_model.hpp"

namespace vmalloc {

inline constexpr double kJoulesPerKwh = 3.6e6;

/// Aggregate resource demand of a set of co-located VMs.
struct Demand {
  std::uint64_t pe = 0;
  double mips = 0.0;

  static Demand of(std::span<const VmRequest> vms) noexcept;
  bool empty() const noexcept { return pe == 0; }
  bool fits(const HostSpec& host) const noexcept;
};

/// Fraction of the host's total MIPS consumed by `demand`, in [0, 1].
/// Throws ContractViolation when the demand exceeds PE or MIPS capacity.
double utilization(const HostSpec& host, const Demand& demand);
double utilization(const HostSpec& host, std::span<const VmRequest> active);

/// Piecewise-linear interpolation through the 11 samples. Sample points
/// return the sample verbatim. Throws DomainError for u outside [0, 1].
double interpolate_power(const PowerModel& model, double u);

/// Draw of one host. An empty host that is not powered on draws 0 W.
/// Throws ContractViolation for a non-empty host that is not powered on, or
/// for an infeasible active set.
double host_power(const HostSpec& host, const Demand& demand, bool powered_on);
double host_power(const HostSpec& host, std::span<const VmRequest> active,
                  bool powered_on);

/// Constant-power stretch [begin, end) of one host.
struct PowerSegment {
  Seconds begin = 0;
  Seconds end = 0;
  HostIndex host = 0;
  double utilization = 0.0;
  double watts = 0.0;

  friend bool operator==(const PowerSegment&, const PowerSegment&) = default;
};

struct EnergyReport {
  std::vector<double> per_host_joules;  // indexed by host
  double total_joules = 0.0;
  double total_kwh = 0.0;
  /// Per-host timeline; for every host the segments tile [0, horizon).
  std::vector<PowerSegment> segments;

  /// Hosts that run at least one VM at some instant.
  std::size_t hosts_used = 0;

  double host_kwh(HostIndex host) const {
    return per_host_joules.at(host) / kJoulesPerKwh;
  }
};

/// Exact energy of a feasible placement over [0, horizon): per host, the sum
/// over constant-utilization segments of watts x seconds. Throws
/// InfeasiblePlacement (carrying the violations) for infeasible input.
EnergyReport integrate_energy(const Placement& placement,
                              const ProblemInstance& instance);

/// Same total as integrate_energy without building the report. The
/// placement must be feasible; this is the solvers' inner loop and does not
/// re-check.
double total_energy_joules(const Placement& placement,
                           const ProblemInstance& instance);

/// Energy of one host carrying `vms` over [from, to).
double host_energy_joules(const ProblemInstance& instance, HostIndex host,
                          std::span<const VmIndex> vms, Seconds from,
                          Seconds to);

/// Sum of host draws at the instant of peak datacenter utilization (total
/// MIPS in use over total fleet MIPS). Earliest such instant wins ties.
double peak_snapshot_power(const Placement& placement,
                           const ProblemInstance& instance);

}  // namespace vmalloc

#endif  // VMALLOC_POWER_HPP
