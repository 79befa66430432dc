/*
 * Copyright (c) 2026, The cfsmkit Authors
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

#ifndef CFSM_TESTS_NMP_CHECKS_HPP_
#define CFSM_TESTS_NMP_CHECKS_HPP_

#include <algorithm>
#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cfsm/model.hpp"
#include "cfsm/reachability.hpp"

namespace cfsm::testing {

// Names of machines added, removed or changed between two systems.
inline std::set<std::string> touched_machines(const System& a, const System& b) {
  std::set<std::string> out;
  for (const auto& m : a.machines()) {
    auto i = b.find_machine(m.name);
    if (i < 0 || !(b.machine(static_cast<std::size_t>(i)) == m)) out.insert(m.name);
  }
  for (const auto& m : b.machines())
    if (a.find_machine(m.name) < 0) out.insert(m.name);
  return out;
}

// Largest value of (SA receipts of resp) - (Env sends of req) over all paths,
// clamped to [-requests, 1] so the product graph stays finite.
inline int max_resp_surplus(const ReachabilityGraph& g, int requests) {
  const auto& sys = g.system();
  auto sa = static_cast<std::size_t>(sys.find_machine("SA"));
  auto env = static_cast<std::size_t>(sys.find_machine("Env"));
  std::vector<std::vector<std::size_t>> out(g.state_count());
  for (std::size_t e = 0; e < g.edges().size(); ++e) out[g.edges()[e].from].push_back(e);
  const int width = requests + 2;
  std::vector<bool> seen(g.state_count() * static_cast<std::size_t>(width), false);
  std::deque<std::pair<std::size_t, int>> queue{{0, 0}};
  seen[static_cast<std::size_t>(requests)] = true;
  int best = 0;
  while (!queue.empty()) {
    auto [s, d] = queue.front();
    queue.pop_front();
    best = std::max(best, d);
    for (auto e : out[s]) {
      const auto& edge = g.edges()[e];
      const auto& t = sys.machine(edge.step.action.machine).transitions[edge.step.action.transition];
      int nd = d;
      if (edge.step.action.machine == sa && t.action.kind == ActionKind::kRecv &&
          t.action.message.rfind("resp", 0) == 0)
        ++nd;
      if (edge.step.action.machine == env && t.action.kind == ActionKind::kSend) --nd;
      nd = std::clamp(nd, -requests, 1);
      auto key = edge.to * static_cast<std::size_t>(width) + static_cast<std::size_t>(nd + requests);
      if (!seen[key]) {
        seen[key] = true;
        queue.push_back({edge.to, nd});
      }
    }
  }
  return best;
}

}  // namespace cfsm::testing

#endif  // CFSM_TESTS_NMP_CHECKS_HPP_
