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

#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pvx {

/// Scripted misbehaviour for one node. Vocabulary:
///   crash@T          stop at virtual time T (microseconds)
///   mute@T1..T2      send nothing during [T1, T2)
///   equivocate@H     as primary for height H, send different blocks to
///                    different replicas
struct NodeFaults {
  std::optional<std::uint64_t> crash_at;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> mute;
  std::optional<std::uint64_t> equivocate_height;

  bool any() const { return crash_at || !mute.empty() || equivocate_height; }
  bool crashed(std::uint64_t now) const { return crash_at && now >= *crash_at; }
  bool muted(std::uint64_t now) const {
    for (auto [a, b] : mute)
      if (now >= a && now < b) return true;
    return false;
  }
};

class FaultScriptError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {
inline std::uint64_t parse_u64(std::string_view s, std::string_view script) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw FaultScriptError("bad number in fault script '" + std::string(script) + "'");
  return v;
}
}  // namespace detail

inline void apply_fault_script(NodeFaults& faults, std::string_view script) {
  auto at = script.find('@');
  if (at == std::string_view::npos) throw FaultScriptError("fault script '" + std::string(script) + "' lacks '@'");
  std::string_view verb = script.substr(0, at), arg = script.substr(at + 1);
  if (verb == "crash") {
    faults.crash_at = detail::parse_u64(arg, script);
  } else if (verb == "mute") {
    auto dots = arg.find("..");
    if (dots == std::string_view::npos) throw FaultScriptError("mute needs T1..T2 in '" + std::string(script) + "'");
    auto a = detail::parse_u64(arg.substr(0, dots), script), b = detail::parse_u64(arg.substr(dots + 2), script);
    if (b <= a) throw FaultScriptError("empty mute window in '" + std::string(script) + "'");
    faults.mute.emplace_back(a, b);
  } else if (verb == "equivocate") {
    faults.equivocate_height = detail::parse_u64(arg, script);
    if (*faults.equivocate_height == 0) throw FaultScriptError("heights start at 1");
  } else {
    throw FaultScriptError("unknown fault '" + std::string(verb) + "'");
  }
}

}  // namespace pvx
