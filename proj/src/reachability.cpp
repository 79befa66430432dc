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

#include "cfsm/reachability.hpp"

#include <string>

namespace cfsm {

std::optional<std::size_t> ReachabilityGraph::parent_edge(std::size_t i) const {
  if (i == 0) return std::nullopt;
  return parent_[i];
}

std::optional<std::size_t> ReachabilityGraph::find(const GlobalState& g) const {
  auto [first, last] = by_hash_.equal_range(GlobalStateHash{}(g));
  for (auto it = first; it != last; ++it) {
    if (states_[it->second] == g) return it->second;
  }
  return std::nullopt;
}

ReachabilityGraph explore(const System& system, const SemanticsOptions& opts,
                          const ExploreLimits& limits) {
  ReachabilityGraph graph;
  graph.system_ = system;
  graph.options_ = opts;
  const std::size_t max_states = limits.max_states == 0 ? 1 : limits.max_states;

  auto add = [&](GlobalState g, std::size_t depth, std::size_t parent) {
    graph.by_hash_.emplace(GlobalStateHash{}(g), graph.states_.size());
    graph.classes_.push_back(classify_state(system, g, opts));
    graph.states_.push_back(std::move(g));
    graph.depth_.push_back(depth);
    graph.parent_.push_back(parent);
  };
  add(initial_state(system), 0, 0);

  // States are appended in BFS order, so walking them by index is the queue.
  for (std::size_t i = 0; i < graph.states_.size(); ++i) {
    if (graph.states_[i].overflow()) continue;
    const auto enabled = enabled_transitions(system, graph.states_[i], opts);
    if (limits.max_depth && graph.depth_[i] >= *limits.max_depth) {
      if (!enabled.empty()) graph.truncated_ = true;
      continue;
    }
    // Copy: `add` may reallocate states_.
    const GlobalState source = graph.states_[i];
    for (const auto& ref : enabled) {
      for (auto& succ : apply_transition(system, source, ref, opts)) {
        auto target = graph.find(succ.state);
        if (!target) {
          if (graph.states_.size() >= max_states) {
            graph.truncated_ = true;
            continue;
          }
          target = graph.states_.size();
          add(std::move(succ.state), graph.depth_[i] + 1, graph.edges_.size());
        }
        graph.edges_.push_back({i, *target, {ref, succ.label}});
      }
    }
  }
  return graph;
}

std::vector<std::size_t> shortest_path(const ReachabilityGraph& graph,
                                       std::size_t target) {
  if (target >= graph.state_count()) {
    throw TargetOutOfRange("state " + std::to_string(target) +
                           " is not in the graph");
  }
  std::vector<std::size_t> path;
  for (auto at = target; at != 0;) {
    const auto edge = *graph.parent_edge(at);
    path.push_back(edge);
    at = graph.edges()[edge].from;
  }
  return {path.rbegin(), path.rend()};
}

std::vector<Step> steps_of(const ReachabilityGraph& graph,
                           const std::vector<std::size_t>& path) {
  std::vector<Step> out;
  out.reserve(path.size());
  for (auto e : path) out.push_back(graph.edges().at(e).step);
  return out;
}

}  // namespace cfsm
