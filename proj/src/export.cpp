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

#include <string>

#include "cfsm/reachability.hpp"
#include "json.hpp"

namespace cfsm {

namespace {

std::string quoted(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string_view node_style(StateClass cls) {
  switch (cls) {
    case StateClass::kProperTermination:
      return " shape=doublecircle";
    case StateClass::kDeadlock:
      return " style=filled fillcolor=red";
    case StateClass::kUnspecifiedReception:
      return " style=filled fillcolor=orange";
    case StateClass::kOverflow:
      return " style=filled fillcolor=yellow";
    case StateClass::kRunning:
      break;
  }
  return "";
}

}  // namespace

std::string edge_label(const System& system, const Step& step) {
  const auto& tr = system.transition(step.action.machine, step.action.transition);
  std::string out = system.machine(step.action.machine).name + ":";
  out += to_string(step.label);
  if (tr.kind == ActionKind::kSend || tr.kind == ActionKind::kRecv) {
    out += " " + system.message_name(tr.message);
  }
  return out;
}

std::string export_dot(const ReachabilityGraph& graph) {
  const auto& system = graph.system();
  std::string out = "digraph " + quoted(system.name()) + " {\n";
  out += "  node [shape=ellipse];\n";
  for (std::size_t i = 0; i < graph.state_count(); ++i) {
    out += "  s" + std::to_string(i) + " [label=" +
           quoted(to_string(system, graph.state(i))) +
           std::string(node_style(graph.state_class(i))) + "];\n";
  }
  for (const auto& e : graph.edges()) {
    out += "  s" + std::to_string(e.from) + " -> s" + std::to_string(e.to) +
           " [label=" + quoted(edge_label(system, e.step)) + "];\n";
  }
  out += "}\n";
  return out;
}

std::string export_json(const ReachabilityGraph& graph,
                        const std::vector<Diagnostic>& diagnostics) {
  using nlohmann::ordered_json;
  const auto& system = graph.system();
  ordered_json list = ordered_json::array();
  for (const auto& d : diagnostics) {
    ordered_json entry;
    entry["kind"] = to_string(d.kind);
    entry["state"] = d.state ? ordered_json(to_string(system, graph.state(*d.state)))
                             : ordered_json(nullptr);
    ordered_json path = ordered_json::array();
    for (auto e : d.path) {
      const auto& step = graph.edges().at(e).step;
      const auto& machine = system.machine(step.action.machine);
      path.push_back({{"machine", machine.name},
                      {"action", describe(machine.transitions[step.action.transition].action)},
                      {"label", to_string(step.label)}});
    }
    entry["path"] = std::move(path);
    entry["detail"] = d.detail;
    list.push_back(std::move(entry));
  }
  ordered_json doc;
  doc["diagnostics"] = std::move(list);
  doc["truncated"] = graph.truncated();
  doc["states"] = graph.state_count();
  doc["edges"] = graph.edges().size();
  return doc.dump(2) + "\n";
}

}  // namespace cfsm
