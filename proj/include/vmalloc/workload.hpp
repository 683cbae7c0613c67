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

#ifndef VMALLOC_WORKLOAD_HPP
#define VMALLOC_WORKLOAD_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vmalloc/model.hpp"
#include "vmalloc/power_model.hpp"

namespace vmalloc {

/// One lab session of a timetable: `students` identical VMs over the slots
/// marked in `slot_mask`.
///
/// The mask marks occupied slots with their 1-based slot number modulo 10
/// ('1'..'9', '0' for slot 10) and free slots with '-'. Occupied slots form
/// one contiguous run, e.g. "---456----------".
struct TimetableRow {
  int day = 0;
  std::string subject;
  std::string class_id;
  std::string group_id;
  std::uint32_t students = 0;
  std::string slot_mask;
  Seconds duration = 0;

  /// 1-based index of the first occupied slot.
  std::size_t first_slot() const;
  std::size_t run_length() const;

  friend bool operator==(const TimetableRow&, const TimetableRow&) = default;
};

struct SlotConfig {
  Seconds slot_length = 2700;
  Seconds day_origin = 0;
  std::size_t slots_per_day = 15;
};

/// Resource shape given to every VM emitted by expand().
struct VmTemplate {
  std::uint32_t pe_count = 1;
  double mips_per_pe = 2200.0;
};

inline constexpr std::string_view kTimetableHeader =
    "day,subject,class_id,group_id,students,slot_mask,duration_s";

/// Reads a comma- or tab-separated timetable with one header line. Blank
/// lines are skipped. Throws ParseError(line, reason) for the first
/// malformed line.
std::vector<TimetableRow> parse_timetable(std::istream& in);
std::vector<TimetableRow> parse_timetable(std::string_view text);

void write_timetable(std::ostream& out, std::span<const TimetableRow> rows);

/// One VM per student. VM ids are "<class>.<group>.<ordinal>" with a
/// three-digit ordinal; start = day_origin + (first_slot - 1) * slot_length.
/// Throws ConfigError when a run extends past slots_per_day or when two rows
/// share a class/group pair.
std::vector<VmRequest> expand(std::span<const TimetableRow> rows,
                              const SlotConfig& slots, const VmTemplate& vm);

/// Rows whose duration differs from run_length * slot_length.
std::vector<std::string> duration_warnings(std::span<const TimetableRow> rows,
                                           const SlotConfig& slots);

/// The seven-row one-day lab timetable (211 students), in CSV.
std::string_view lab_timetable_csv();

struct FleetEntry {
  std::string model;
  std::size_t count = 0;
  std::uint32_t pe_count = 1;
  double mips_per_pe = 0.0;
};

struct FleetSpec {
  std::vector<FleetEntry> entries;

  std::size_t host_count() const;

  /// 50 IBM x3250 followed by 50 Dell R620.
  static FleetSpec default_datacenter();
  /// 4 IBM x3250 followed by one Dell R620.
  static FleetSpec worked_example();
};

/// Fleet plus any custom power models declared alongside it.
struct FleetFile {
  FleetSpec spec;
  PowerModelRegistry models;
};

/// {"power_models": [...optional...], "entries": [{"model", "count", "pe",
/// "mips"}, ...]}. Throws ConfigError on malformed input.
FleetFile parse_fleet_json(std::string_view text);
std::string fleet_to_json(const FleetSpec& spec);

/// Hosts numbered 0..N-1 in entry order; host ids are the decimal index.
/// Throws ConfigError for unknown models or an empty fleet.
std::vector<HostSpec> build_fleet(const FleetSpec& spec,
                                  const PowerModelRegistry& models = {});

/// Smallest per-core MIPS in the fleet; the default VM size, so that one VM
/// fits a core of any host class.
double min_core_mips(std::span<const HostSpec> hosts);

}  // namespace vmalloc

#endif  // VMALLOC_WORKLOAD_HPP
