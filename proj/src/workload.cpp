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

#include "vmalloc/workload.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "vmalloc/error.hpp"

namespace vmalloc {

namespace {

constexpr std::string_view kLabTimetable =
    "day,subject,class_id,group_id,students,slot_mask,duration_s\n"
    "6,506007,CT10QUEE,QT01,5,---456----------,8100\n"
    "6,501129,CT11QUEE,QT01,5,123-------------,8100\n"
    "6,501133,DUTHINH6,DT04,35,123-------------,8100\n"
    "6,501133,DUTHINH5,DT01,45,---456----------,8100\n"
    "6,501133,DUTHINH5,DT02,45,---456----------,8100\n"
    "6,501133,DUTHINH6,DT05,35,123-------------,8100\n"
    "6,501133,DUTHINH6,DT06,41,123-------------,8100\n";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

template <class Int>
Int parse_int(std::string_view field, std::size_t line, const char* column) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError(line, std::string(column) + ": expected an integer, got '" +
                               std::string(field) + "'");
  }
  return value;
}

struct MaskRun {
  std::size_t first = 0;  // 0-based
  std::size_t length = 0;
};

// Empty optional-like result is signalled by length 0.
MaskRun scan_mask(std::string_view mask) {
  MaskRun run;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] == '-') continue;
    if (run.length == 0) run.first = k;
    ++run.length;
  }
  return run;
}

void validate_mask(std::string_view mask, std::size_t line) {
  if (mask.empty()) throw ParseError(line, "slot_mask is empty");
  const MaskRun run = scan_mask(mask);
  if (run.length == 0) throw ParseError(line, "slot_mask marks no slot");
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const char c = mask[k];
    if (c == '-') {
      if (k > run.first && k < run.first + run.length)
        throw ParseError(line, "slot_mask '" + std::string(mask) + "' is not contiguous");
      continue;
    }
    if (c < '0' || c > '9')
      throw ParseError(line, std::string("slot_mask has invalid character '") + c + "'");
    if (k >= run.first + run.length)
      throw ParseError(line, "slot_mask '" + std::string(mask) + "' is not contiguous");
    if (c - '0' != static_cast<int>((k + 1) % 10))
      throw ParseError(line, "slot_mask digit '" + std::string(1, c) +
                                 "' does not match slot " + std::to_string(k + 1));
  }
}

}  // namespace

std::size_t TimetableRow::first_slot() const { return scan_mask(slot_mask).first + 1; }

std::size_t TimetableRow::run_length() const { return scan_mask(slot_mask).length; }

std::vector<TimetableRow> parse_timetable(std::istream& in) {
  std::vector<TimetableRow> rows;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  char delim = ',';
  std::size_t mask_length = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    if (!have_header) {
      delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
      const auto cols = split(line, delim);
      const auto expected = split(kTimetableHeader, ',');
      if (cols.size() != expected.size() ||
          !std::equal(cols.begin(), cols.end(), expected.begin(), [](auto a, auto b) {
            return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
              return std::tolower(static_cast<unsigned char>(x)) == y;
            });
          })) {
        throw ParseError(line_no, "expected header '" + std::string(kTimetableHeader) + "'");
      }
      have_header = true;
      continue;
    }

    const auto f = split(line, delim);
    if (f.size() != 7) {
      throw ParseError(line_no, "expected 7 fields, got " + std::to_string(f.size()));
    }
    TimetableRow row;
    row.day = parse_int<int>(f[0], line_no, "day");
    row.subject = f[1];
    row.class_id = f[2];
    row.group_id = f[3];
    row.students = parse_int<std::uint32_t>(f[4], line_no, "students");
    row.slot_mask = f[5];
    row.duration = parse_int<Seconds>(f[6], line_no, "duration_s");

    if (row.day < 0) throw ParseError(line_no, "day must be non-negative");
    if (row.class_id.empty() || row.group_id.empty())
      throw ParseError(line_no, "class_id and group_id are required");
    if (row.students == 0) throw ParseError(line_no, "students must be positive");
    if (row.duration <= 0) throw ParseError(line_no, "duration_s must be positive");
    validate_mask(row.slot_mask, line_no);
    if (mask_length == 0) mask_length = row.slot_mask.size();
    if (row.slot_mask.size() != mask_length) {
      throw ParseError(line_no, "slot_mask length " + std::to_string(row.slot_mask.size()) +
                                    " differs from earlier rows (" +
                                    std::to_string(mask_length) + ")");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TimetableRow> parse_timetable(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_timetable(in);
}

void write_timetable(std::ostream& out, std::span<const TimetableRow> rows) {
  out << kTimetableHeader << '\n';
  for (const TimetableRow& r : rows) {
    out << r.day << ',' << r.subject << ',' << r.class_id << ',' << r.group_id << ','
        << r.students << ',' << r.slot_mask << ',' << r.duration << '\n';
  }
}

std::vector<VmRequest> expand(std::span<const TimetableRow> rows, const SlotConfig& slots,
                              const VmTemplate& vm) {
  if (slots.slot_length <= 0) throw ConfigError("slot_length must be positive");
  if (slots.day_origin < 0) throw ConfigError("day_origin must be non-negative");
  std::vector<VmRequest> out;
  std::set<std::pair<std::string, std::string>> groups;
  for (const TimetableRow& row : rows) {
    const std::size_t first = row.first_slot();
    if (first + row.run_length() - 1 > slots.slots_per_day) {
      throw ConfigError("session " + row.class_id + "/" + row.group_id +
                        " runs past slot " + std::to_string(slots.slots_per_day));
    }
    if (!groups.emplace(row.class_id, row.group_id).second) {
      throw ConfigError("class/group " + row.class_id + "/" + row.group_id +
                        " appears twice");
    }
    const Seconds start =
        slots.day_origin + static_cast<Seconds>(first - 1) * slots.slot_length;
    for (std::uint32_t k = 0; k < row.students; ++k) {
      char ordinal[16];
      std::snprintf(ordinal, sizeof ordinal, "%03u", k);
      out.push_back(VmRequest{row.class_id + "." + row.group_id + "." + ordinal,
                              vm.pe_count, vm.mips_per_pe, start, row.duration});
    }
  }
  return out;
}

std::vector<std::string> duration_warnings(std::span<const TimetableRow> rows,
                                           const SlotConfig& slots) {
  std::vector<std::string> out;
  for (const TimetableRow& row : rows) {
    const Seconds expected = static_cast<Seconds>(row.run_length()) * slots.slot_length;
    if (row.duration != expected) {
      out.push_back(row.class_id + "/" + row.group_id + ": duration " +
                    std::to_string(row.duration) + " s but " +
                    std::to_string(row.run_length()) + " slot(s) of " +
                    std::to_string(slots.slot_length) + " s = " +
                    std::to_string(expected) + " s");
    }
  }
  return out;
}

std::string_view lab_timetable_csv() { return kLabTimetable; }

}  // namespace vmalloc
