/*
 * Copyright (C) 2026 The pvx Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvx/observer/desiderata.hpp"
#include "pvx/policy/engine.hpp"

namespace pvx {

struct StepResult {
  std::size_t index = 0;
  std::string op;
  std::optional<std::string> label;
  std::string outcome;
  std::optional<std::string> expected;
  bool matched = true;
  std::string detail;
  std::uint64_t height = 0;  // reference height after the step
  friend bool operator==(const StepResult&, const StepResult&) = default;
};

struct ConsensusSummary {
  std::size_t n = 0, f = 0;
  std::uint64_t seed = 0;
  std::uint64_t max_view = 0;
  std::uint64_t commits = 0;  // block executions summed over replicas
  std::uint64_t sent = 0, delivered = 0, dropped = 0;
  std::map<std::string, std::uint64_t> messages;  // sent, by type
  std::uint64_t virtual_time_us = 0;
  bool consistent = true;
  friend bool operator==(const ConsensusSummary&, const ConsensusSummary&) = default;
};

struct AuditSummary {
  std::uint64_t blocks = 0;
  std::uint64_t failures = 0;
  std::string first_failure;
  friend bool operator==(const AuditSummary&, const AuditSummary&) = default;
};

struct TaxSummary {
  std::string entity;
  std::uint64_t total = 0;
  std::uint64_t items = 0;
  std::uint64_t expected = 0;  // receipts the runner saw committed
  friend bool operator==(const TaxSummary&, const TaxSummary&) = default;
};

struct AttackRecord {
  std::size_t step = 0;
  std::string source;
  LinkAttackStats stats;
  friend bool operator==(const AttackRecord&, const AttackRecord&) = default;
};

struct RunResult {
  std::string name;
  Mode mode = Mode::Supported;
  std::uint64_t seed = 0;
  std::string final_digest;
  std::uint64_t height = 0;
  std::vector<StepResult> steps;
  ConsensusSummary consensus;
  AuditSummary audit;
  std::vector<TaxSummary> taxes;
  std::vector<AttackRecord> attacks;
  std::map<std::string, double> institution_share;
  std::map<std::string, std::uint64_t> balances;
  std::map<std::string, std::uint64_t> stores;
  DesiderataMatrix desiderata;
  std::vector<std::string> mismatches;
  bool safety_violation = false;

  /// 0 all expectations met, 1 mismatch, 3 safety violation.
  int exit_code() const {
    if (safety_violation) return 3;
    return mismatches.empty() ? 0 : 1;
  }
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

enum class ReportFormat : std::uint8_t { Text, Structured };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "text") return ReportFormat::Text;
  if (s == "structured") return ReportFormat::Structured;
  throw std::invalid_argument("unknown report format '" + std::string(s) + "'");
}

inline void to_json(nlohmann::json& j, const StepResult& s) {
  j = {{"index", s.index}, {"op", s.op}, {"outcome", s.outcome}, {"matched", s.matched}, {"detail", s.detail},
       {"height", s.height}};
  if (s.label) j["label"] = *s.label;
  if (s.expected) j["expected"] = *s.expected;
}

inline void from_json(const nlohmann::json& j, StepResult& s) {
  j.at("index").get_to(s.index);
  j.at("op").get_to(s.op);
  j.at("outcome").get_to(s.outcome);
  j.at("matched").get_to(s.matched);
  j.at("detail").get_to(s.detail);
  j.at("height").get_to(s.height);
  s.label = j.contains("label") ? std::optional(j.at("label").get<std::string>()) : std::nullopt;
  s.expected = j.contains("expected") ? std::optional(j.at("expected").get<std::string>()) : std::nullopt;
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConsensusSummary, n, f, seed, max_view, commits, sent, delivered, dropped, messages,
                                   virtual_time_us, consistent)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AuditSummary, blocks, failures, first_failure)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TaxSummary, entity, total, items, expected)

inline void to_json(nlohmann::json& j, const AttackRecord& a) {
  j = {{"step", a.step},
       {"source", a.source},
       {"heuristic", to_string(a.stats.heuristic)},
       {"trials", a.stats.trials},
       {"correct", a.stats.correct},
       {"accuracy", a.stats.accuracy},
       {"baseline", a.stats.baseline},
       {"z", a.stats.z}};
}

inline void from_json(const nlohmann::json& j, AttackRecord& a) {
  j.at("step").get_to(a.step);
  j.at("source").get_to(a.source);
  a.stats.heuristic = parse_heuristic(j.at("heuristic").get<std::string>());
  j.at("trials").get_to(a.stats.trials);
  j.at("correct").get_to(a.stats.correct);
  j.at("accuracy").get_to(a.stats.accuracy);
  j.at("baseline").get_to(a.stats.baseline);
  j.at("z").get_to(a.stats.z);
}

inline void to_json(nlohmann::json& j, const DesiderataMatrix& m) {
  j = {{"mode", to_string(m.mode)}, {"rows", nlohmann::json::array()}};
  for (const auto& r : m.rows)
    j["rows"].push_back({{"row", to_string(r.row)},
                         {"verdict", to_string(r.verdict)},
                         {"provenance", to_string(r.provenance)},
                         {"evidence", r.evidence}});
}

inline void from_json(const nlohmann::json& j, DesiderataMatrix& m) {
  m.mode = parse_mode(j.at("mode").get<std::string>());
  m.rows.clear();
  for (const auto& r : j.at("rows")) {
    DesiderataRow row;
    row.row = parse_desideratum(r.at("row").get<std::string>());
    row.verdict = parse_support(r.at("verdict").get<std::string>());
    const auto prov = r.at("provenance").get<std::string>();
    if (prov == to_string(Provenance::Static)) row.provenance = Provenance::Static;
    else if (prov == to_string(Provenance::Measured)) row.provenance = Provenance::Measured;
    else throw std::invalid_argument("unknown provenance '" + prov + "'");
    r.at("evidence").get_to(row.evidence);
    m.rows.push_back(std::move(row));
  }
}

inline void to_json(nlohmann::json& j, const RunResult& r) {
  j = {{"name", r.name},
       {"mode", to_string(r.mode)},
       {"seed", r.seed},
       {"final_digest", r.final_digest},
       {"height", r.height},
       {"steps", r.steps},
       {"consensus", r.consensus},
       {"audit", r.audit},
       {"taxes", r.taxes},
       {"attacks", r.attacks},
       {"institution_share", r.institution_share},
       {"balances", r.balances},
       {"stores", r.stores},
       {"desiderata", r.desiderata},
       {"mismatches", r.mismatches},
       {"safety_violation", r.safety_violation},
       {"exit_code", r.exit_code()}};
}

inline void from_json(const nlohmann::json& j, RunResult& r) {
  j.at("name").get_to(r.name);
  r.mode = parse_mode(j.at("mode").get<std::string>());
  j.at("seed").get_to(r.seed);
  j.at("final_digest").get_to(r.final_digest);
  j.at("height").get_to(r.height);
  j.at("steps").get_to(r.steps);
  j.at("consensus").get_to(r.consensus);
  j.at("audit").get_to(r.audit);
  j.at("taxes").get_to(r.taxes);
  j.at("attacks").get_to(r.attacks);
  j.at("institution_share").get_to(r.institution_share);
  j.at("balances").get_to(r.balances);
  j.at("stores").get_to(r.stores);
  j.at("desiderata").get_to(r.desiderata);
  j.at("mismatches").get_to(r.mismatches);
  j.at("safety_violation").get_to(r.safety_violation);
}

inline std::string emit_report(const RunResult& r, ReportFormat format) {
  if (format == ReportFormat::Structured) return nlohmann::json(r).dump(2) + "\n";

  std::ostringstream os;
  os << "scenario " << r.name << " (" << to_string(r.mode) << ", seed " << r.seed << ")\n";
  os << "final ledger digest " << r.final_digest << " at height " << r.height << "\n";
  os << "consensus n=" << r.consensus.n << " f=" << r.consensus.f << " max view " << r.consensus.max_view
     << ", messages sent " << r.consensus.sent << " dropped " << r.consensus.dropped
     << (r.consensus.consistent ? ", logs consistent" : ", LOGS DIVERGED") << "\n";
  os << "conservation audited after " << r.audit.blocks << " blocks, " << r.audit.failures << " failures\n\nsteps\n";
  for (const auto& s : r.steps) {
    os << "  " << s.index << ' ' << s.op;
    if (s.label) os << " [" << *s.label << "]";
    os << " -> " << s.outcome;
    if (s.expected) os << (s.matched ? "  ok" : "  MISMATCH, expected " + *s.expected);
    if (!s.detail.empty()) os << "  (" << s.detail << ")";
    os << "\n";
  }
  if (!r.taxes.empty()) {
    os << "\ntax reports\n";
    for (const auto& t : r.taxes)
      os << "  " << t.entity << ": " << t.items << " items, total " << t.total << " (receipts seen " << t.expected << ")\n";
  }
  if (!r.attacks.empty()) {
    os << "\nlink attacks\n";
    for (const auto& a : r.attacks) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "  step %zu %s %s: %llu trials, accuracy %.4f, baseline %.4f, z %.2f\n", a.step,
                    a.source.c_str(), std::string(to_string(a.stats.heuristic)).c_str(),
                    static_cast<unsigned long long>(a.stats.trials), a.stats.accuracy, a.stats.baseline, a.stats.z);
      os << buf;
    }
  }
  if (!r.institution_share.empty()) {
    os << "\nobserved-transaction share per institution\n";
    for (const auto& [inst, share] : r.institution_share) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "  %s %.3f\n", inst.c_str(), share);
      os << buf;
    }
  }
  os << "\n";
  print_desiderata(os, r.desiderata);
  os << "\n";
  if (r.mismatches.empty()) {
    os << "all expectations met\n";
  } else {
    for (const auto& m : r.mismatches) os << "mismatch: " << m << "\n";
  }
  return os.str();
}

/// Inverse of emit_report(..., Structured).
inline RunResult parse_report(std::string_view text) {
  return nlohmann::json::parse(text.begin(), text.end()).get<RunResult>();
}

}  // namespace pvx
