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

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vmalloc/experiment.hpp"

namespace vmalloc {
namespace {

constexpr const char* kColumns[] = {
    "solver",     "kind",          "seed",      "generations",  "population",
    "crossover",  "mutation",      "host_mutation", "elite",    "selection",
    "repair",     "fitness",       "status",    "total_kwh",    "ratio_vs_bfd",
    "hosts_used", "wall_seconds",  "per_host_kwh", "best_fitness", "error"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::string shortest(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

const char* selection_name(SelectionWeights s) {
  return s == SelectionWeights::kRank ? "rank" : "fitness";
}
const char* repair_name(RepairPlacement r) {
  return r == RepairPlacement::kLeastEnergy ? "least_energy" : "first_fit";
}
SelectionWeights parse_selection(std::string_view s) {
  if (s == "rank") return SelectionWeights::kRank;
  if (s == "fitness") return SelectionWeights::kFitness;
  throw ConfigError("unknown selection '" + std::string(s) + "'");
}
RepairPlacement parse_repair(std::string_view s) {
  if (s == "least_energy") return RepairPlacement::kLeastEnergy;
  if (s == "first_fit") return RepairPlacement::kFirstFit;
  throw ConfigError("unknown repair placement '" + std::string(s) + "'");
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_row(const RunRecord& r) {
  std::vector<std::string> f;
  f.push_back(r.solver);
  f.push_back(r.kind);
  f.push_back(r.seed ? std::to_string(*r.seed) : "");
  if (r.ga) {
    f.push_back(std::to_string(r.ga->generations));
    f.push_back(std::to_string(r.ga->population_size));
    f.push_back(shortest(r.ga->crossover_prob));
    f.push_back(shortest(r.ga->mutation_prob));
    f.push_back(shortest(r.ga->host_mutation_prob));
    f.push_back(std::to_string(r.ga->elite_count));
    f.push_back(selection_name(r.ga->selection));
    f.push_back(repair_name(r.ga->repair));
    f.push_back(to_string(r.ga->fitness_mode));
  } else {
    f.insert(f.end(), 9, "");
  }
  f.push_back(r.status);
  f.push_back(fixed6(r.total_kwh));
  f.push_back(r.ratio_vs_bfd ? fixed6(*r.ratio_vs_bfd) : "");
  f.push_back(std::to_string(r.hosts_used));
  f.push_back(fixed6(r.wall_seconds));
  std::string hosts;
  for (const auto& [id, kwh] : r.per_host_kwh) {
    if (!hosts.empty()) hosts += ';';
    hosts += id + ":" + fixed6(kwh);
  }
  f.push_back(hosts);
  std::string traj;
  for (double v : r.best_fitness) {
    if (!traj.empty()) traj += ';';
    traj += shortest(v);
  }
  f.push_back(traj);
  f.push_back(r.error);
  return f;
}

// Splits one logical CSV record; quoted fields may span lines.
bool next_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  std::string text;
  if (!std::getline(in, text)) return false;
  ++line;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0;; ++i) {
    if (i == text.size()) {
      if (!quoted) break;
      std::string more;
      if (!std::getline(in, more)) throw ParseError(line, "unterminated quoted field");
      ++line;
      cur += '\n';
      text = more;
      i = static_cast<std::size_t>(-1);
      continue;
    }
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return true;
}

template <class T>
T parse_number(const std::string& s, std::size_t line, const char* what) {
  T value{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), value);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
  return value;
}

std::vector<double> split_doubles(const std::string& s, std::size_t line) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t semi = s.find(';', pos);
    out.push_back(parse_number<double>(s.substr(pos, semi - pos), line, "value"));
    if (semi == std::string::npos) break;
    pos = semi + 1;
  }
  return out;
}

RunRecord record_from_fields(const std::vector<std::string>& f, std::size_t line) {
  if (f.size() != kColumnCount)
    throw ParseError(line, "expected " + std::to_string(kColumnCount) + " fields, got " +
                               std::to_string(f.size()));
  RunRecord r;
  r.solver = f[0];
  r.kind = f[1];
  if (!f[2].empty()) r.seed = parse_number<std::uint64_t>(f[2], line, "seed");
  if (!f[3].empty()) {
    GaConfig g;
    g.generations = parse_number<std::size_t>(f[3], line, "generations");
    g.population_size = parse_number<std::size_t>(f[4], line, "population");
    g.crossover_prob = parse_number<double>(f[5], line, "crossover");
    g.mutation_prob = parse_number<double>(f[6], line, "mutation");
    g.host_mutation_prob = parse_number<double>(f[7], line, "host_mutation");
    g.elite_count = parse_number<std::size_t>(f[8], line, "elite");
    g.selection = parse_selection(f[9]);
    g.repair = parse_repair(f[10]);
    g.fitness_mode = parse_fitness(f[11]);
    g.seed = r.seed.value_or(0);
    r.ga = g;
  }
  r.status = f[12];
  r.total_kwh = parse_number<double>(f[13], line, "total_kwh");
  if (!f[14].empty()) r.ratio_vs_bfd = parse_number<double>(f[14], line, "ratio_vs_bfd");
  r.hosts_used = parse_number<std::size_t>(f[15], line, "hosts_used");
  r.wall_seconds = parse_number<double>(f[16], line, "wall_seconds");
  if (!f[17].empty()) {
    std::size_t pos = 0;
    while (true) {
      const std::size_t semi = f[17].find(';', pos);
      const std::string item = f[17].substr(pos, semi - pos);
      const std::size_t colon = item.rfind(':');
      if (colon == std::string::npos) throw ParseError(line, "bad per-host entry '" + item + "'");
      r.per_host_kwh.emplace_back(item.substr(0, colon),
                                  parse_number<double>(item.substr(colon + 1), line, "kWh"));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
  }
  r.best_fitness = split_doubles(f[18], line);
  r.error = f[19];
  return r;
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["solver"] = r.solver;
  j["kind"] = r.kind;
  j["seed"] = r.seed ? nlohmann::ordered_json(*r.seed) : nlohmann::ordered_json(nullptr);
  if (r.ga) {
    j["ga"] = {{"generations", r.ga->generations},
               {"population", r.ga->population_size},
               {"crossover", r.ga->crossover_prob},
               {"mutation", r.ga->mutation_prob},
               {"host_mutation", r.ga->host_mutation_prob},
               {"elite", r.ga->elite_count},
               {"selection", selection_name(r.ga->selection)},
               {"repair", repair_name(r.ga->repair)},
               {"fitness", to_string(r.ga->fitness_mode)}};
  } else {
    j["ga"] = nullptr;
  }
  j["status"] = r.status;
  j["total_kwh"] = r.total_kwh;
  j["ratio_vs_bfd"] =
      r.ratio_vs_bfd ? nlohmann::ordered_json(*r.ratio_vs_bfd) : nlohmann::ordered_json(nullptr);
  j["hosts_used"] = r.hosts_used;
  j["wall_seconds"] = r.wall_seconds;
  auto hosts = nlohmann::ordered_json::object();
  for (const auto& [id, kwh] : r.per_host_kwh) hosts[id] = kwh;
  j["per_host_kwh"] = hosts;
  j["best_fitness"] = r.best_fitness;
  j["error"] = r.error;
  return j;
}

RunRecord from_json(const nlohmann::ordered_json& j) {
  RunRecord r;
  r.solver = j.at("solver").get<std::string>();
  r.kind = j.at("kind").get<std::string>();
  if (!j.at("seed").is_null()) r.seed = j["seed"].get<std::uint64_t>();
  if (const auto& ga = j.at("ga"); !ga.is_null()) {
    GaConfig g;
    g.generations = ga.at("generations").get<std::size_t>();
    g.population_size = ga.at("population").get<std::size_t>();
    g.crossover_prob = ga.at("crossover").get<double>();
    g.mutation_prob = ga.at("mutation").get<double>();
    g.host_mutation_prob = ga.at("host_mutation").get<double>();
    g.elite_count = ga.at("elite").get<std::size_t>();
    g.selection = parse_selection(ga.at("selection").get<std::string>());
    g.repair = parse_repair(ga.at("repair").get<std::string>());
    g.fitness_mode = parse_fitness(ga.at("fitness").get<std::string>());
    g.seed = r.seed.value_or(0);
    r.ga = g;
  }
  r.status = j.at("status").get<std::string>();
  r.total_kwh = j.at("total_kwh").get<double>();
  if (!j.at("ratio_vs_bfd").is_null()) r.ratio_vs_bfd = j["ratio_vs_bfd"].get<double>();
  r.hosts_used = j.at("hosts_used").get<std::size_t>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  for (const auto& [id, kwh] : j.at("per_host_kwh").items())
    r.per_host_kwh.emplace_back(id, kwh.get<double>());
  r.best_fitness = j.at("best_fitness").get<std::vector<double>>();
  r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace

void emit_report(std::span<const RunRecord> records, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::kJson) {
    auto arr = nlohmann::ordered_json::array();
    for (const RunRecord& r : records) arr.push_back(to_json(r));
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < kColumnCount; ++i) out << (i ? "," : "") << kColumns[i];
  out << '\n';
  for (const RunRecord& r : records) {
    const auto fields = csv_row(r);
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << quote(fields[i]);
    out << '\n';
  }
}

std::vector<RunRecord> read_report(std::istream& in, OutputFormat format) {
  std::vector<RunRecord> out;
  if (format == OutputFormat::kJson) {
    try {
      const auto doc = nlohmann::ordered_json::parse(in);
      if (!doc.is_array()) throw ParseError(1, "report must be a JSON array");
      for (const auto& j : doc) out.push_back(from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(1, e.what());
    }
    return out;
  }
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!next_record(in, fields, line)) throw ParseError(1, "empty report");
  if (fields.size() != kColumnCount || !std::equal(fields.begin(), fields.end(), kColumns))
    throw ParseError(1, "unexpected report header");
  while (next_record(in, fields, line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    out.push_back(record_from_fields(fields, line));
  }
  return out;
}

void write_placement(std::ostream& out, const Placement& placement,
                     const ProblemInstance& instance) {
  require_total(placement, instance);
  out << "vm_id,host_id\n";
  for (VmIndex i = 0; i < instance.vm_count(); ++i)
    out << instance.vm(i).id << ',' << instance.host(placement.host_of[i]).id << '\n';
}

Placement read_placement(std::istream& in, const ProblemInstance& instance) {
  constexpr HostIndex kUnset = static_cast<HostIndex>(-1);
  Placement p;
  p.host_of.assign(instance.vm_count(), kUnset);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) continue;
    if (line == 1 && text == "vm_id,host_id") continue;
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
      throw ParseError(line, "expected 'vm_id,host_id'");
    VmIndex vm;
    HostIndex host;
    try {
      vm = instance.vm_index(text.substr(0, comma));
      host = instance.host_index(text.substr(comma + 1));
    } catch (const LookupError& e) {
      throw ParseError(line, e.what());
    }
    if (p.host_of[vm] != kUnset) throw ParseError(line, "VM listed twice");
    p.host_of[vm] = host;
  }
  for (VmIndex i = 0; i < instance.vm_count(); ++i) {
    if (p.host_of[i] == kUnset) throw ParseError(line, "VM " + instance.vm(i).id + " not placed");
  }
  return p;
}

}  // namespace vmalloc
