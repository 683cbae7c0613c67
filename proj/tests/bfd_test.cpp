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
#include "vmalloc/schedulers.hpp"

namespace vmalloc {
namespace {

using testing::ibm;
using testing::make_vm;

TEST(BfdTest, SixteenVmsFillFourIbm) {
  const SolveResult r = bfd_schedule(testing::worked_example());
  for (VmIndex i = 0; i < 16; ++i) EXPECT_EQ(r.placement.host_of[i], i / 4) << i;
  EXPECT_EQ(r.energy.hosts_used, 4u);
  EXPECT_NEAR(r.energy.total_joules, 4 * 113.0 * 8100, 1e-6);
  EXPECT_EQ(r.solver, "BFD");
}

TEST(BfdTest, TieGoesToLowestHost) {
  const ProblemInstance inst({make_vm("v", 1, 2200, 0, 10)}, {ibm("a"), ibm("b")});
  EXPECT_EQ(bfd_schedule(inst).placement.host_of, std::vector<HostIndex>{0});
}

TEST(BfdTest, PrefersCheaperIncrement) {
  // A lone core costs 55.1 W on an IBM but 70.6 W on a Dell.
  const ProblemInstance inst({make_vm("v", 1, 2200, 0, 10)}, {testing::dell("d"), ibm("i")});
  EXPECT_EQ(bfd_schedule(inst).placement.host_of, std::vector<HostIndex>{1});
}

TEST(BfdTest, OrderingByStartThenSize) {
  // The 4-PE VM starts with the small one; it is placed first and takes the
  // IBM, pushing the small VM to the second host.
  const ProblemInstance inst({make_vm("small", 1, 2200, 0, 10), make_vm("big", 4, 2200, 0, 10)},
                             {ibm("0"), ibm("1")});
  EXPECT_EQ(bfd_schedule(inst).placement.host_of, (std::vector<HostIndex>{1, 0}));
}

TEST(BfdTest, NoFeasibleHostNamesTheVm) {
  const ProblemInstance inst({make_vm("ok", 1, 2200, 0, 10), make_vm("huge", 8, 2200, 0, 10)},
                             {ibm("0")});
  try {
    bfd_schedule(inst);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), SolverErrc::kNoFeasibleHost);
    EXPECT_NE(std::string(e.what()).find("huge"), std::string::npos);
  }
}

TEST(BfdTest, LabDayClosedForm) {
  // Slots 1-3: 116 VMs on 29 full IBMs. Slots 4-6: 95 VMs on 23 full IBMs
  // plus one at 3/4 load (89.5 + 10.1 / 2 W).
  const double joules = 8100.0 * (52 * 113.0 + 94.55);
  const SolveResult r = bfd_schedule(testing::lab_day());
  EXPECT_NEAR(r.energy.total_joules, joules, joules * 1e-12);
  EXPECT_NEAR(r.energy.total_kwh, 13.4337375, 1e-9);
  EXPECT_EQ(r.energy.hosts_used, 29u);
}

TEST(BfdTest, RandomInstancesFeasibleAndDeterministic) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 40; ++k) {
    const auto c = testing::random_feasible(rng);
    SolveResult a, b;
    try {
      a = bfd_schedule(c.instance);
    } catch (const SolverError& e) {
      EXPECT_EQ(e.code(), SolverErrc::kNoFeasibleHost);
      continue;
    }
    b = bfd_schedule(c.instance);
    EXPECT_EQ(a.placement, b.placement);
    EXPECT_TRUE(testing::sampled_feasible(a.placement, c.instance));
    EXPECT_DOUBLE_EQ(a.energy.total_joules, integrate_energy(a.placement, c.instance).total_joules);
  }
}

}  // namespace
}  // namespace vmalloc
