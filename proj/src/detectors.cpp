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

#include <algorithm>
#include <deque>
#include <string>

#include "cfsm/reachability.hpp"

namespace cfsm {

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::kDeadlock:
      return "deadlock";
    case DiagnosticKind::kUnspecifiedReception:
      return "unspecified_reception";
    case DiagnosticKind::kLivelock:
      return "livelock";
    case DiagnosticKind::kOverflow:
      return "overflow";
    case DiagnosticKind::kUnreachableState:
      return "unreachable_state";
    case DiagnosticKind::kUnreachableTransition:
      return "unreachable_transition";
    case DiagnosticKind::kNoTermination:
      return "no_termination";
  }
  return "?";
}

namespace {

constexpr std::string_view kTruncatedNote =
    "advisory: exploration was truncated; ";

std::vector<Diagnostic> states_of_class(const ReachabilityGraph& graph,
                                        StateClass cls, DiagnosticKind kind) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < graph.state_count(); ++i) {
    if (graph.state_class(i) != cls) continue;
    Diagnostic d;
    d.kind = kind;
    d.state = i;
    d.path = shortest_path(graph, i);
    d.detail = to_string(graph.system(), graph.state(i));
    out.push_back(std::move(d));
  }
  return out;
}

// Iterative Tarjan; components come out in reverse topological order.
std::vector<std::vector<std::size_t>> strongly_connected(
    const ReachabilityGraph& graph,
    const std::vector<std::vector<std::size_t>>& out_edges) {
  const auto n = graph.state_count();
  constexpr auto kUnvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;
  std::size_t counter = 0;

  struct Frame {
    std::size_t node;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> frames{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& frame = frames.back();
      const auto v = frame.node;
      if (frame.next < out_edges[v].size()) {
        const auto w = graph.edges()[out_edges[v][frame.next++]].to;
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<std::size_t> component;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      frames.pop_back();
      if (!frames.empty()) {
        auto& parent = frames.back().node;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }
  return components;
}

// Shortest loop from `entry` back to itself using edges inside the component.
std::vector<std::size_t> witness_loop(
    const ReachabilityGraph& graph,
    const std::vector<std::vector<std::size_t>>& out_edges,
    const std::vector<std::size_t>& component_of, std::size_t entry) {
  const auto comp = component_of[entry];
  std::vector<std::size_t> via(graph.state_count(), static_cast<std::size_t>(-1));
  std::deque<std::size_t> queue{entry};
  std::vector<bool> seen(graph.state_count(), false);
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto e : out_edges[v]) {
      const auto w = graph.edges()[e].to;
      if (component_of[w] != comp) continue;
      if (w == entry) {
        std::vector<std::size_t> loop{e};
        for (auto at = v; at != entry; at = graph.edges()[via[at]].from) {
          loop.push_back(via[at]);
        }
        return {loop.rbegin(), loop.rend()};
      }
      if (!seen[w]) {
        seen[w] = true;
        via[w] = e;
        queue.push_back(w);
      }
    }
  }
  return {};
}

}  // namespace

std::vector<Diagnostic> find_deadlocks(const ReachabilityGraph& graph) {
  return states_of_class(graph, StateClass::kDeadlock, DiagnosticKind::kDeadlock);
}

std::vector<Diagnostic> find_unspecified_receptions(
    const ReachabilityGraph& graph) {
  auto out = states_of_class(graph, StateClass::kUnspecifiedReception,
                             DiagnosticKind::kUnspecifiedReception);
  const auto& system = graph.system();
  for (auto& d : out) {
    const auto& g = graph.state(*d.state);
    const auto c = static_cast<std::size_t>(unreceivable_head(system, g));
    const auto m = system.receiver(c);
    d.detail = "channel " + system.channel(c).name + ": head message " +
               system.message_name(g.queue(c).front()) +
               " not receivable by " + system.machine(m).name + " in state " +
               system.state_name(m, g.local(m)) + " at " + d.detail;
  }
  return out;
}

std::vector<Diagnostic> find_overflows(const ReachabilityGraph& graph) {
  return states_of_class(graph, StateClass::kOverflow, DiagnosticKind::kOverflow);
}

std::vector<bool> reaches_termination(const ReachabilityGraph& graph) {
  const auto n = graph.state_count();
  std::vector<std::vector<std::size_t>> in_edges(n);
  for (const auto& e : graph.edges()) in_edges[e.to].push_back(e.from);
  std::vector<bool> reach(n, false);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.state_class(i) == StateClass::kProperTermination) {
      reach[i] = true;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto u : in_edges[v]) {
      if (!reach[u]) {
        reach[u] = true;
        queue.push_back(u);
      }
    }
  }
  return reach;
}

std::vector<Diagnostic> find_livelocks(const ReachabilityGraph& graph) {
  const auto n = graph.state_count();
  const auto& system = graph.system();
  std::vector<std::vector<std::size_t>> out_edges(n);
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    out_edges[graph.edges()[e].from].push_back(e);
  }
  auto components = strongly_connected(graph, out_edges);
  std::vector<std::size_t> component_of(n);
  for (std::size_t c = 0; c < components.size(); ++c) {
    for (auto v : components[c]) component_of[v] = c;
  }
  const auto terminates = reaches_termination(graph);

  std::vector<Diagnostic> out;
  for (const auto& component : components) {
    const auto entry = component.front();
    if (terminates[entry]) continue;
    bool has_edge = false;
    bool has_progress = false;
    for (auto v : component) {
      for (auto e : out_edges[v]) {
        const auto& edge = graph.edges()[e];
        if (component_of[edge.to] != component_of[v]) continue;
        has_edge = true;
        const auto& action = edge.step.action;
        has_progress |= system.transition(action.machine, action.transition).progress;
      }
    }
    if (!has_edge || has_progress) continue;

    Diagnostic d;
    d.kind = DiagnosticKind::kLivelock;
    d.state = entry;
    d.cycle = component;
    d.path = shortest_path(graph, entry);
    const auto loop = witness_loop(graph, out_edges, component_of, entry);
    d.path.insert(d.path.end(), loop.begin(), loop.end());
    d.detail = std::to_string(component.size()) +
               " state(s) cycle without progress, no termination reachable; "
               "entered at " +
               to_string(system, graph.state(entry));
    if (graph.truncated()) d.detail.insert(0, kTruncatedNote);
    out.push_back(std::move(d));
  }
  std::sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return *a.state < *b.state;
  });
  return out;
}

std::vector<Diagnostic> coverage(const ReachabilityGraph& graph,
                                 const System& system) {
  const auto machines = system.machines().size();
  std::vector<std::vector<bool>> state_seen(machines);
  std::vector<std::vector<bool>> transition_seen(machines);
  for (std::size_t m = 0; m < machines; ++m) {
    state_seen[m].assign(system.machine(m).states.size(), false);
    transition_seen[m].assign(system.transitions(m).size(), false);
  }
  bool terminates = false;
  for (std::size_t i = 0; i < graph.state_count(); ++i) {
    const auto& g = graph.state(i);
    for (std::size_t m = 0; m < machines; ++m) state_seen[m][g.local(m)] = true;
    terminates |= graph.state_class(i) == StateClass::kProperTermination;
  }
  for (const auto& e : graph.edges()) {
    transition_seen[e.step.action.machine][e.step.action.transition] = true;
  }

  const std::string note = graph.truncated() ? std::string(kTruncatedNote) : "";
  std::vector<Diagnostic> out;
  for (std::size_t m = 0; m < machines; ++m) {
    for (std::size_t s = 0; s < state_seen[m].size(); ++s) {
      if (state_seen[m][s]) continue;
      out.push_back({DiagnosticKind::kUnreachableState, std::nullopt, {}, {},
                     note + system.machine(m).name + "." + system.state_name(m, s)});
    }
  }
  for (std::size_t m = 0; m < machines; ++m) {
    const auto& machine = system.machine(m);
    for (std::size_t t = 0; t < transition_seen[m].size(); ++t) {
      if (transition_seen[m][t]) continue;
      const auto& tr = machine.transitions[t];
      out.push_back({DiagnosticKind::kUnreachableTransition, std::nullopt, {}, {},
                     note + machine.name + "." + tr.from + ": " + describe(tr.action) +
                         " -> " + tr.to});
    }
  }
  if (!terminates) {
    out.push_back({DiagnosticKind::kNoTermination, std::nullopt, {}, {},
                   note + "no reachable state is a proper termination"});
  }
  return out;
}

std::vector<Diagnostic> run_detectors(const ReachabilityGraph& graph) {
  std::vector<Diagnostic> all;
  auto append = [&all](std::vector<Diagnostic> more) {
    for (auto& d : more) all.push_back(std::move(d));
  };
  append(find_deadlocks(graph));
  append(find_unspecified_receptions(graph));
  append(find_overflows(graph));
  append(find_livelocks(graph));
  append(coverage(graph, graph.system()));
  return all;
}

}  // namespace cfsm
