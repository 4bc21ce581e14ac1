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
// pvx command-line tool: run scenarios, print the policy matrix, calibrate
// link attacks.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pvx/observer/link_attack.hpp"
#include "pvx/policy/matrix.hpp"
#include "pvx/scenario.hpp"

namespace {

constexpr int kExitParse = 2;

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& format,
            const std::string& report_path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "pvx: cannot read " << path << "\n";
    return kExitParse;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  pvx::RunResult result;
  try {
    pvx::Scenario sc = pvx::parse_scenario(buf.str());
    pvx::RunOptions opt;
    opt.seed = seed;
    result = pvx::run_scenario(sc, opt);
  } catch (const pvx::ScenarioError& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return kExitParse;
  }
  const std::string doc = pvx::emit_report(result, pvx::parse_report_format(format));
  if (report_path.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(report_path, std::ios::binary);
    if (!out) {
      std::cerr << "pvx: cannot write " << report_path << "\n";
      return kExitParse;
    }
    out << doc;
    std::cout << result.name << ": exit " << result.exit_code() << ", digest " << result.final_digest << "\n";
  }
  return result.exit_code();
}

int cmd_attack(const std::string& sampler_name, std::size_t ring, std::uint64_t trials, std::uint64_t seed) {
  auto sampler = pvx::make_sampler(sampler_name);
  auto sim = pvx::simulate_spends(*sampler, ring, trials, seed);
  std::printf("sampler %s, ring size %zu, %llu spends\n", sampler_name.c_str(), ring,
              static_cast<unsigned long long>(trials));
  std::printf("%-16s %10s %10s %10s\n", "heuristic", "accuracy", "baseline", "z");
  for (auto h : pvx::kAllHeuristics) {
    auto st = pvx::run_link_attack(sim.spends, h, sim.truth, seed);
    std::printf("%-16s %10.4f %10.4f %10.2f\n", std::string(pvx::to_string(h)).c_str(), st.accuracy, st.baseline, st.z);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pvx: simulator of institutionally supported and mediated hybrid payment systems"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file");
  std::string path, format = "text", report;
  std::optional<std::uint64_t> seed;
  run->add_option("scenario", path, "Scenario document")->required();
  run->add_option("--seed", seed, "Override consensus.seed");
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "structured"}));
  run->add_option("--report", report, "Write the report here instead of stdout");

  auto* matrix = app.add_subcommand("matrix", "Print the full policy allow/deny matrix");
  std::string mode;
  matrix->add_option("--mode", mode, "Deployment mode")->required()->check(CLI::IsMember({"supported", "mediated"}));

  auto* attack = app.add_subcommand("attack", "Measure link heuristics against simulated spends");
  std::string sampler = "uniform";
  std::size_t ring = 11;
  std::uint64_t trials = 10'000, attack_seed = 1;
  attack->add_option("--sampler", sampler, "Decoy sampler")->check(CLI::IsMember({"uniform", "age-biased"}));
  attack->add_option("--ring-size", ring, "Ring size")->check(CLI::PositiveNumber);
  attack->add_option("--trials", trials, "Number of spends")->check(CLI::PositiveNumber);
  attack->add_option("--seed", attack_seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  if (*run) return cmd_run(path, seed, format, report);
  if (*matrix) {
    pvx::print_matrix(std::cout, pvx::parse_mode(mode));
    return 0;
  }
  return cmd_attack(sampler, ring, trials, attack_seed);
}
