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

#include <random>

#include <gtest/gtest.h>

#include "support/test_support.hpp"
#include "vmalloc/power.hpp"

namespace vmalloc {
namespace {

using testing::dell;
using testing::ibm;
using testing::make_vm;

TEST(UtilizationTest, Examples) {
  EXPECT_EQ(utilization(ibm("a"), std::span<const VmRequest>{}), 0.0);

  std::vector<VmRequest> four;
  for (int i = 0; i < 4; ++i) four.push_back(make_vm("v" + std::to_string(i), 1, 2200, 0, 10));
  EXPECT_EQ(utilization(ibm("a"), four), 1.0);

  std::vector<VmRequest> eight;
  for (int i = 0; i < 8; ++i) eight.push_back(make_vm("v" + std::to_string(i), 1, 2933, 0, 10));
  EXPECT_NEAR(utilization(dell("d"), eight), 8 * 2933.0 / (16 * 2200.0), 1e-15);
  EXPECT_NEAR(utilization(dell("d"), eight), 0.6666, 1e-4);
}

TEST(UtilizationTest, OverCapacityIsContractViolation) {
  std::vector<VmRequest> five;
  for (int i = 0; i < 5; ++i) five.push_back(make_vm("v" + std::to_string(i), 1, 100, 0, 10));
  EXPECT_THROW(utilization(ibm("a"), five), ContractViolation);
  // Capacity is aggregate: one fast VM fits while total MIPS allow it.
  const std::vector<VmRequest> fast = {make_vm("v", 1, 2933, 0, 10)};
  EXPECT_NEAR(utilization(ibm("a"), fast), 2933 / 8800.0, 1e-15);
  const std::vector<VmRequest> heavy = {make_vm("v", 2, 4500, 0, 10)};
  EXPECT_THROW(utilization(ibm("a"), heavy), ContractViolation);
}

TEST(HostPowerTest, Examples) {
  EXPECT_EQ(host_power(ibm("a"), Demand{}, false), 0.0);
  EXPECT_EQ(host_power(ibm("a"), Demand{}, true), 41.6);
  EXPECT_EQ(host_power(dell("d"), Demand{16, 16 * 2200.0}, true), 263.0);
  EXPECT_THROW(host_power(ibm("a"), Demand{1, 100.0}, false), ContractViolation);
}

TEST(HostPowerTest, PartialLoad) {
  const std::vector<VmRequest> one = {make_vm("v", 1, 1100, 0, 10)};
  // Half a core of four: u = 0.125.
  EXPECT_NEAR(host_power(ibm("a"), one, true), 46.7 + (52.3 - 46.7) * 0.25, 1e-12);
}

TEST(IntegrateEnergyTest, SixteenVmsOnFourIbm) {
  const ProblemInstance inst = testing::worked_example();
  Placement p;
  for (int i = 0; i < 16; ++i) p.host_of.push_back(i / 4);
  const EnergyReport r = integrate_energy(p, inst);
  EXPECT_NEAR(r.total_joules, 3'661'200.0, 1e-6);
  EXPECT_NEAR(r.total_kwh, 1.017, 1e-12);
  EXPECT_EQ(r.hosts_used, 4u);
  EXPECT_EQ(r.per_host_joules[4], 0.0);
  for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.per_host_joules[j], 113.0 * 8100, 1e-6);
}

TEST(IntegrateEnergyTest, SixteenVmsOnDell) {
  const ProblemInstance inst = testing::worked_example();
  const Placement p{std::vector<HostIndex>(16, 4)};
  const EnergyReport r = integrate_energy(p, inst);
  EXPECT_NEAR(r.total_joules, 2'130'300.0, 1e-6);
  EXPECT_NEAR(r.total_kwh, 0.59175, 1e-12);
  EXPECT_EQ(r.hosts_used, 1u);
}

TEST(IntegrateEnergyTest, FasterVmsOverflowTheDell) {
  std::vector<VmRequest> vms;
  for (int i = 0; i < 16; ++i) vms.push_back(make_vm("v" + std::to_string(i), 1, 2933, 0, 8100));
  const ProblemInstance inst(vms, {dell("d")});
  const Placement p{std::vector<HostIndex>(16, 0)};
  try {
    integrate_energy(p, inst);
    FAIL() << "expected InfeasiblePlacement";
  } catch (const InfeasiblePlacement& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_EQ(e.violations()[0].kind, ViolationKind::kMipsOverflow);
    EXPECT_NEAR(e.violations()[0].demand, 16 * 2933.0, 1e-9);
  }
}

TEST(IntegrateEnergyTest, EmptyInstance) {
  const ProblemInstance inst({}, {ibm("a")});
  const EnergyReport r = integrate_energy(Placement{}, inst);
  EXPECT_EQ(r.total_joules, 0.0);
  EXPECT_EQ(r.hosts_used, 0u);
}

TEST(IntegrateEnergyTest, SegmentsTileHorizonPerHost) {
  const ProblemInstance inst({make_vm("a", 1, 2200, 100, 50), make_vm("b", 2, 1100, 120, 100),
                              make_vm("c", 1, 2200, 400, 10)},
                             {ibm("0"), ibm("1")});
  const Placement p{{0, 0, 1}};
  const EnergyReport r = integrate_energy(p, inst);
  for (HostIndex j = 0; j < 2; ++j) {
    Seconds cursor = 0;
    double joules = 0.0;
    for (const PowerSegment& s : r.segments) {
      if (s.host != j) continue;
      EXPECT_EQ(s.begin, cursor);
      EXPECT_LT(s.begin, s.end);
      joules += s.watts * static_cast<double>(s.end - s.begin);
      cursor = s.end;
    }
    EXPECT_EQ(cursor, inst.horizon());
    EXPECT_NEAR(joules, r.per_host_joules[j], 1e-9);
  }
  // Host 0: [100,120) u=.25, [120,150) u=.5, [150,220) u=.25.
  EXPECT_NEAR(r.per_host_joules[0], 20 * 55.1 + 30 * 73.0 + 70 * 55.1, 1e-9);
  EXPECT_NEAR(r.total_kwh * kJoulesPerKwh, r.total_joules, 1e-9);
}

TEST(IntegrateEnergyTest, IdlePoweredChargesWholeHorizon) {
  const ProblemInstance inst({make_vm("a", 1, 2200, 0, 100)}, {ibm("0"), dell("1")},
                             PowerOptions{true});
  const EnergyReport r = integrate_energy(Placement{{0}}, inst);
  EXPECT_NEAR(r.per_host_joules[1], 56.1 * 100, 1e-9);
  EXPECT_NEAR(r.per_host_joules[0], 55.1 * 100, 1e-9);
  EXPECT_EQ(r.hosts_used, 1u);
}

TEST(IntegrateEnergyTest, FastPathAgrees) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const auto c = testing::random_feasible(rng);
    EXPECT_DOUBLE_EQ(total_energy_joules(c.placement, c.instance),
                     integrate_energy(c.placement, c.instance).total_joules);
  }
}

TEST(EnergyPropertyTest, AdditivityOverDisjointWindows) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 30; ++k) {
    testing::RandomShape shape;
    shape.max_start = 500;
    shape.max_duration = 400;
    const auto first = testing::random_feasible(rng, shape);
    // Same VMs shifted past the end of the first batch.
    std::vector<VmRequest> both(first.instance.vms().begin(), first.instance.vms().end());
    const Seconds shift = first.instance.horizon() + 17;
    for (const VmRequest& v : first.instance.vms()) {
      VmRequest w = v;
      w.id += "'";
      w.start_time += shift;
      both.push_back(w);
    }
    std::vector<HostSpec> hosts(first.instance.hosts().begin(), first.instance.hosts().end());
    const ProblemInstance joined(both, hosts);
    Placement p = first.placement;
    p.host_of.insert(p.host_of.end(), first.placement.host_of.begin(), first.placement.host_of.end());
    EXPECT_NEAR(integrate_energy(p, joined).total_joules,
                2 * integrate_energy(first.placement, first.instance).total_joules,
                1e-9 * integrate_energy(p, joined).total_joules + 1e-9);
  }
}

TEST(EnergyPropertyTest, AddingAVmNeverLowersHostEnergy) {
  std::mt19937_64 rng(9);
  testing::RandomShape shape;
  shape.random_curves = false;  // built-ins are increasing
  for (int k = 0; k < 40; ++k) {
    const auto c = testing::random_feasible(rng, shape);
    if (c.instance.vm_count() < 2) continue;
    const EnergyReport full = integrate_energy(c.placement, c.instance);
    std::vector<VmRequest> vms(c.instance.vms().begin(), c.instance.vms().end() - 1);
    std::vector<HostSpec> hosts(c.instance.hosts().begin(), c.instance.hosts().end());
    Placement fewer = c.placement;
    fewer.host_of.pop_back();
    const EnergyReport less = integrate_energy(fewer, ProblemInstance(vms, hosts));
    for (HostIndex j = 0; j < c.instance.host_count(); ++j)
      EXPECT_GE(full.per_host_joules[j] + 1e-6, less.per_host_joules[j]);
  }
}

TEST(SnapshotPowerTest, PeakInstant) {
  const ProblemInstance inst({make_vm("a", 1, 2200, 0, 100), make_vm("b", 1, 2200, 50, 100),
                              make_vm("c", 1, 2200, 120, 10)},
                             {ibm("0"), ibm("1")});
  // Peak total MIPS is 2 cores over [50, 100) and again at [120, 130);
  // the earliest instant is t = 50 with both VMs on host 0 (u = 0.5).
  EXPECT_NEAR(peak_snapshot_power(Placement{{0, 0, 1}}, inst), 73.0, 1e-12);
  EXPECT_NEAR(peak_snapshot_power(Placement{{0, 1, 1}}, inst), 2 * 55.1, 1e-12);
}

}  // namespace
}  // namespace vmalloc
