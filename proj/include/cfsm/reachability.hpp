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

#ifndef CFSM_REACHABILITY_HPP_
#define CFSM_REACHABILITY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cfsm/model.hpp"
#include "cfsm/semantics.hpp"

namespace cfsm {

struct ExploreLimits {
  std::size_t max_states = 1'000'000;
  std::optional<std::size_t> max_depth;
};

/// One fired action: which machine, which (canonical) transition, which outcome.
struct Step {
  TransitionRef action;
  EventLabel label = EventLabel::kSend;

  bool operator==(const Step&) const = default;
};

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  Step step;
};

/**
 * Deduplicated reachable state space, built breadth-first. State 0 is the
 * initial state and states are numbered in discovery order, so each state's
 * parent edge lies on a shortest path from the root. Edges are stored in
 * generation order, which is the canonical edge order.
 */
class ReachabilityGraph {
 public:
  const System& system() const { return system_; }
  const SemanticsOptions& options() const { return options_; }

  std::size_t state_count() const { return states_.size(); }
  const GlobalState& state(std::size_t i) const { return states_[i]; }
  StateClass state_class(std::size_t i) const { return classes_[i]; }
  std::size_t depth(std::size_t i) const { return depth_[i]; }
  std::optional<std::size_t> parent_edge(std::size_t i) const;

  const std::vector<Edge>& edges() const { return edges_; }
  bool truncated() const { return truncated_; }

  std::optional<std::size_t> find(const GlobalState& g) const;

 private:
  friend ReachabilityGraph explore(const System&, const SemanticsOptions&,
                                   const ExploreLimits&);

  System system_;
  SemanticsOptions options_;
  std::vector<GlobalState> states_;
  std::vector<StateClass> classes_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> parent_;
  std::vector<Edge> edges_;
  std::unordered_multimap<std::size_t, std::size_t> by_hash_;
  bool truncated_ = false;
};

ReachabilityGraph explore(const System& system,
                          const SemanticsOptions& opts = {},
                          const ExploreLimits& limits = {});

enum class DiagnosticKind {
  kDeadlock,
  kUnspecifiedReception,
  kLivelock,
  kOverflow,
  kUnreachableState,
  kUnreachableTransition,
  kNoTermination,
};

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::kDeadlock;
  /// The offending state; for livelocks, the state where the cycle is entered.
  std::optional<std::size_t> state;
  /// Livelocks only: every state of the offending component, ascending.
  std::vector<std::size_t> cycle;
  /// Edge indices replaying from state 0. Livelocks append one witness loop.
  std::vector<std::size_t> path;
  std::string detail;
};

class TargetOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Shortest edge path from state 0 to `target`.
std::vector<std::size_t> shortest_path(const ReachabilityGraph& graph,
                                       std::size_t target);

std::vector<Step> steps_of(const ReachabilityGraph& graph,
                           const std::vector<std::size_t>& path);

std::vector<Diagnostic> find_deadlocks(const ReachabilityGraph& graph);
std::vector<Diagnostic> find_unspecified_receptions(
    const ReachabilityGraph& graph);
std::vector<Diagnostic> find_overflows(const ReachabilityGraph& graph);
std::vector<Diagnostic> find_livelocks(const ReachabilityGraph& graph);
std::vector<Diagnostic> coverage(const ReachabilityGraph& graph,
                                 const System& system);

/// Every detector, in the order above.
std::vector<Diagnostic> run_detectors(const ReachabilityGraph& graph);

/// For each state: can some ProperTermination state be reached from it?
std::vector<bool> reaches_termination(const ReachabilityGraph& graph);

/// `machine:event` text used for edge labels, e.g. `A:send ping`.
std::string edge_label(const System& system, const Step& step);

std::string export_dot(const ReachabilityGraph& graph);

/// The diagnostics document: kind, state, path, detail per entry, plus
/// truncated/states/edges totals.
std::string export_json(const ReachabilityGraph& graph,
                        const std::vector<Diagnostic>& diagnostics);

}  // namespace cfsm

#endif  // CFSM_REACHABILITY_HPP_
