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

#ifndef VMALLOC_MODEL_HPP
#define VMALLOC_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmalloc/error.hpp"
#include "vmalloc/power_model.hpp"

namespace vmalloc {

using Seconds = std::int64_t;
using VmIndex = std::size_t;
using HostIndex = std::size_t;

/// Relative slack applied to MIPS capacity comparisons so that sums of
/// per-VM demands which equal the capacity up to rounding still fit.
inline constexpr double kCapacityRelTol = 1e-9;

/// A timed, non-preemptible demand for processing elements.
///
/// The VM occupies exactly one host over the half-open interval
/// [start_time, start_time + duration).
struct VmRequest {
  std::string id;
  std::uint32_t pe_count = 1;
  double mips_per_pe = 0.0;
  Seconds start_time = 0;
  Seconds duration = 1;

  double total_mips() const noexcept { return pe_count * mips_per_pe; }
  Seconds end_time() const noexcept { return start_time + duration; }
  bool active_at(Seconds t) const noexcept {
    return start_time <= t && t < end_time();
  }

  friend bool operator==(const VmRequest&, const VmRequest&) = default;
};

struct HostSpec {
  std::string id;
  std::uint32_t pe_count = 1;
  double mips_per_pe = 0.0;
  PowerModel power_model;

  double total_mips() const noexcept { return pe_count * mips_per_pe; }

  friend bool operator==(const HostSpec&, const HostSpec&) = default;
};

struct PowerOptions {
  /// When false (the default) a host with no active VM draws 0 W.
  /// When true every host draws at least its idle power over the horizon.
  bool idle_hosts_powered = false;

  friend bool operator==(const PowerOptions&, const PowerOptions&) = default;
};

/// VMs, hosts and the power accounting policy of one allocation problem.
///
/// Immutable after construction. VM and host ids must be unique.
class ProblemInstance {
 public:
  /// Throws ConfigError if any VM or host breaks its invariants or if ids
  /// collide.
  ProblemInstance(std::vector<VmRequest> vms, std::vector<HostSpec> hosts,
                  PowerOptions power = {});

  std::span<const VmRequest> vms() const noexcept { return vms_; }
  std::span<const HostSpec> hosts() const noexcept { return hosts_; }
  const VmRequest& vm(VmIndex i) const { return vms_.at(i); }
  const HostSpec& host(HostIndex j) const { return hosts_.at(j); }
  std::size_t vm_count() const noexcept { return vms_.size(); }
  std::size_t host_count() const noexcept { return hosts_.size(); }
  const PowerOptions& power() const noexcept { return power_; }

  /// Latest VM finish time; 0 for an instance without VMs.
  Seconds horizon() const noexcept { return horizon_; }

  /// Throws LookupError for unknown ids.
  HostIndex host_index(std::string_view id) const;
  VmIndex vm_index(std::string_view id) const;

  ProblemInstance with_power(PowerOptions power) const;

 private:
  std::vector<VmRequest> vms_;
  std::vector<HostSpec> hosts_;
  PowerOptions power_;
  Seconds horizon_ = 0;
};

/// Total VM -> host assignment; host_of[i] is the host of VM i.
struct Placement {
  std::vector<HostIndex> host_of;

  std::size_t size() const noexcept { return host_of.size(); }
  HostIndex operator[](VmIndex i) const { return host_of[i]; }

  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Throws ContractViolation unless the placement covers every VM of the
/// instance with a valid host index.
void require_total(const Placement& placement, const ProblemInstance& instance);

enum class ViolationKind { kPeOverflow, kMipsOverflow };

const char* to_string(ViolationKind kind) noexcept;

/// Capacity overflow on one host over [time, end).
struct Violation {
  HostIndex host = 0;
  std::string host_id;
  Seconds time = 0;
  Seconds end = 0;
  ViolationKind kind = ViolationKind::kPeOverflow;
  double demand = 0.0;
  double capacity = 0.0;

  friend bool operator==(const Violation&, const Violation&) = default;
};

class InfeasiblePlacement : public Error {
 public:
  explicit InfeasiblePlacement(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<Violation> violations_;
};

/// VMs assigned to `host` whose interval contains t, in index order.
/// Throws LookupError for an out-of-range host.
std::vector<VmIndex> active_vms(const Placement& placement,
                                const ProblemInstance& instance,
                                HostIndex host, Seconds t);
std::vector<VmIndex> active_vms(const Placement& placement,
                                const ProblemInstance& instance,
                                std::string_view host_id, Seconds t);

/// Every capacity overflow, ordered by time then host index. Utilization is
/// constant between consecutive VM start/end events on a host, so only those
/// boundaries are inspected. Empty result means feasible.
std::vector<Violation> check_feasibility(const Placement& placement,
                                         const ProblemInstance& instance);

bool is_feasible(const Placement& placement, const ProblemInstance& instance);

/// VMs of each host, in VM index order.
std::vector<std::vector<VmIndex>> vms_by_host(const Placement& placement,
                                              std::size_t host_count);

}  // namespace vmalloc

#endif  // VMALLOC_MODEL_HPP
