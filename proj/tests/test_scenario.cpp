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
#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "pvx/scenario.hpp"

using namespace pvx;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::filesystem::path> corpus() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(PVX_SCENARIO_DIR))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Smallest useful document; tests splice in the parts they exercise.
std::string minimal(const std::string& consensus = R"({"n": 4, "f": 1})",
                    const std::string& steps = R"([{"op": "pay", "kind": "TransparentTransfer", "from": "alice",
                                                  "to": "bob", "amount": 5, "expect": "accept"}])",
                    const std::string& mode = "mediated") {
  return R"({"name": "t", "mode": ")" + mode + R"(", "decoys": 12, "ring_size": 5, "consensus": )" + consensus + R"(,
    "entities": [
      {"id": "bank", "kind": "RegulatedInstitution"},
      {"id": "alice", "kind": "Individual", "accounts": [{"id": "alice-acct", "at": "bank"}]},
      {"id": "bob", "kind": "Individual", "accounts": [{"id": "bob-acct", "at": "bank"}]}
    ],
    "genesis": [{"account": "alice-acct", "amount": 50}, {"store": "alice", "amount": 40}],
    "steps": )" + steps + "}";
}

ScenarioError parse_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e;
  }
  ADD_FAILURE() << "document parsed";
  return ScenarioError("", "");
}

}  // namespace

TEST(ScenarioDocument, MinimalParses) {
  auto sc = parse_scenario(minimal());
  EXPECT_EQ(sc.mode, Mode::Mediated);
  EXPECT_EQ(sc.consensus.n, 4u);
  ASSERT_EQ(sc.steps.size(), 1u);
  EXPECT_EQ(sc.steps[0].op, StepOp::Pay);
  EXPECT_EQ(sc.steps[0].pointer, "/steps/0");
  EXPECT_EQ(sc.genesis.size(), 2u);
}

TEST(ScenarioDocument, QuorumBelowThreeFPlusOne) {
  auto e = parse_error(minimal(R"({"n": 3, "f": 1})"));
  EXPECT_EQ(e.where, "/consensus/n");
  EXPECT_NE(std::string(e.what()).find("3f+1"), std::string::npos) << e.what();
}

TEST(ScenarioDocument, TooManyFaultyNodes) {
  auto e = parse_error(minimal(R"({"n": 4, "f": 1, "faults": {"0": ["crash@10"], "1": ["crash@20"]}})"));
  EXPECT_EQ(e.where, "/consensus/faults");
}

TEST(ScenarioDocument, BadFaultScript) {
  auto e = parse_error(minimal(R"({"n": 4, "f": 1, "faults": {"2": ["explode@3"]}})"));
  EXPECT_NE(std::string(e.what()).find("explode"), std::string::npos) << e.what();
}

TEST(ScenarioDocument, UnknownTxKindNamesTheField) {
  auto e = parse_error(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "Teleport", "from": "alice",
                                                         "to": "bob", "amount": 1}])"));
  EXPECT_EQ(e.where, "/steps/0/kind");
}

TEST(ScenarioDocument, UnknownFieldIsRejected) {
  auto e = parse_error(minimal(R"({"n": 4, "f": 1, "quorum": 3})"));
  EXPECT_EQ(e.where, "/consensus/quorum");
}

TEST(ScenarioDocument, SyntaxErrorGivesLineAndColumn) {
  std::string text = minimal();
  text.insert(text.find("\"steps\""), "}");
  auto e = parse_error(text);
  EXPECT_EQ(e.where.rfind("line ", 0), 0u) << e.where;
  EXPECT_NE(e.where.find("column"), std::string::npos) << e.where;
}

TEST(ScenarioDocument, DanglingReferences) {
  EXPECT_EQ(parse_error(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "TransparentTransfer",
                                   "from": "alice", "to": "zed", "amount": 1}])"))
                .where,
            "/steps/0/to");
  EXPECT_EQ(parse_error(minimal(R"({"n": 4, "f": 1})", R"([{"op": "replay", "of": "nothing"}])")).where,
            "/steps/0/of");
  EXPECT_EQ(parse_error(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "TransparentTransfer",
                                   "from": "alice", "to": "bob", "amount": 1, "node": 9}])"))
                .where,
            "/steps/0/node");
}

TEST(ScenarioRun, MediatedStoreToStoreIsDenied) {
  auto sc = parse_scenario(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "ShieldedTransfer",
                                     "from": "alice", "to": "bob", "amount": 5}])"));
  auto r = run_scenario(sc);
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.steps[0].outcome, "deny(MediationRequired)");

  auto sup = parse_scenario(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "ShieldedTransfer",
                                      "from": "alice", "to": "bob", "amount": 5}])",
                                    "supported"));
  EXPECT_EQ(run_scenario(sup).steps[0].outcome, "accept");
}

TEST(ScenarioRun, ExpectationMismatchSetsExitCode) {
  auto sc = parse_scenario(minimal(R"({"n": 4, "f": 1})", R"([{"op": "pay", "kind": "TransparentTransfer",
                                     "from": "alice", "to": "bob", "amount": 500, "expect": "accept"}])"));
  auto r = run_scenario(sc);
  // The client's builder refuses the overdraft before any validator sees it.
  EXPECT_EQ(r.steps[0].outcome, "error(InsufficientFunds)");
  EXPECT_FALSE(r.steps[0].matched);
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(ScenarioRun, SameSeedSameReport) {
  auto sc = parse_scenario(slurp(std::filesystem::path(PVX_SCENARIO_DIR) / "mediated-exchange.json"));
  auto a = run_scenario(sc), b = run_scenario(sc);
  EXPECT_EQ(a.final_digest, b.final_digest);
  EXPECT_EQ(emit_report(a, ReportFormat::Structured), emit_report(b, ReportFormat::Structured));
  // Another seed changes the message schedule but not the ledger outcome.
  auto c = run_scenario(sc, RunOptions{.seed = 99});
  EXPECT_EQ(c.exit_code(), 0);
  EXPECT_NE(c.consensus.sent, a.consensus.sent);
}

TEST(ScenarioReport, StructuredRoundTrip) {
  auto r = run_scenario(parse_scenario(slurp(std::filesystem::path(PVX_SCENARIO_DIR) / "mediated-private.json")));
  auto back = parse_report(emit_report(r, ReportFormat::Structured));
  EXPECT_EQ(back, r);
}

TEST(ScenarioReport, TextListsEveryDesideratum) {
  auto r = run_scenario(parse_scenario(minimal()));
  auto text = emit_report(r, ReportFormat::Text);
  for (auto d : kAllDesiderata) EXPECT_NE(text.find(std::string(to_string(d))), std::string::npos) << to_string(d);
  EXPECT_NE(text.find(r.final_digest), std::string::npos);
}

TEST(ScenarioCorpus, EveryScenarioMeetsItsExpectations) {
  auto files = corpus();
  ASSERT_GE(files.size(), 10u);
  for (const auto& f : files) {
    auto r = run_scenario(parse_scenario(slurp(f)));
    EXPECT_EQ(r.exit_code(), 0) << f.filename() << ": " << (r.mismatches.empty() ? "" : r.mismatches.front());
    EXPECT_EQ(r.audit.failures, 0u) << f.filename();
    EXPECT_TRUE(r.consensus.consistent) << f.filename();
  }
}

TEST(Cli, ExitCodes) {
#ifndef PVX_CLI
  GTEST_SKIP() << "command-line tool not built";
#else
  auto run = [](const std::string& args) {
    int rc = std::system((std::string(PVX_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  const auto dir = std::filesystem::temp_directory_path() / "pvx-cli-test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "bad.json") << minimal(R"({"n": 3, "f": 1})");
  std::ofstream(dir / "mismatch.json") << minimal(R"({"n": 4, "f": 1})",
                                                  R"x([{"op": "pay", "kind": "TransparentTransfer", "from": "alice",
                                                      "to": "bob", "amount": 5, "expect": "deny(Blacklisted)"}])x");
  EXPECT_EQ(run("run " + std::string(PVX_SCENARIO_DIR) + "/retail-banking.json"), 0);
  EXPECT_EQ(run("run " + (dir / "mismatch.json").string()), 1);
  EXPECT_EQ(run("run " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run("run " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run("run --format yaml " + std::string(PVX_SCENARIO_DIR) + "/retail-banking.json"), 2);
  std::filesystem::remove_all(dir);
#endif
}
