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

#include "cfsm/msc.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace cfsm::msc {

void MscTrace::add(EventKind kind, std::string machine,
                   std::optional<std::string> message,
                   std::optional<std::string> channel) {
  events.push_back(
      {events.size(), kind, std::move(machine), std::move(message), std::move(channel)});
}

MscTrace empty_trace(const System& system) {
  MscTrace trace;
  trace.system_name = system.name();
  for (const auto& m : system.machines()) trace.lifelines.push_back(m.name);
  for (const auto& c : system.channels()) {
    trace.channels.push_back({c.name, c.sender, c.receiver});
  }
  return trace;
}

MscTrace trace_from_path(const System& system, const std::vector<Step>& path,
                         const SemanticsOptions& opts) {
  MscTrace trace = empty_trace(system);
  GlobalState g = initial_state(system);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& step = path[k];
    if (!is_enabled(system, g, step.action, opts)) {
      throw InvalidPath(k, "path step " + std::to_string(k) + " is not enabled");
    }
    auto successors = apply_transition(system, g, step.action, opts);
    bool found = false;
    for (auto& succ : successors) {
      if (succ.label == step.label) {
        g = std::move(succ.state);
        found = true;
        break;
      }
    }
    if (!found) {
      throw InvalidPath(k, "path step " + std::to_string(k) + " has no " +
                               std::string(to_string(step.label)) + " outcome");
    }

    const auto& machine = system.machine(step.action.machine).name;
    const auto& tr = system.transition(step.action.machine, step.action.transition);
    switch (step.label) {
      case EventLabel::kSend:
      case EventLabel::kRecv:
      case EventLabel::kLose:
      case EventLabel::kOverflow: {
        const auto& message = system.message_name(tr.message);
        const auto& channel = system.channel(tr.channel).name;
        const auto kind = step.label == EventLabel::kRecv ? EventKind::kRecv : EventKind::kSend;
        trace.add(kind, machine, message, channel);
        // A full channel under OverflowMode::kError drops the message too.
        if (step.label == EventLabel::kLose || step.label == EventLabel::kOverflow) {
          trace.add(EventKind::kLose, machine, message, channel);
        }
        break;
      }
      case EventLabel::kTimeout:
        trace.add(EventKind::kTimeout, machine);
        break;
      case EventLabel::kTau:
        trace.add(EventKind::kTau, machine);
        break;
    }
  }
  return trace;
}

std::string render_event_log(const MscTrace& trace) {
  std::string out = "msc " + trace.system_name + "\n";
  for (const auto& e : trace.events) {
    out += std::to_string(e.step) + ": ";
    switch (e.kind) {
      case EventKind::kSend:
        out += "send " + *e.message + " " + e.machine + " -> " + *e.channel;
        break;
      case EventKind::kRecv:
        out += "recv " + *e.message + " " + *e.channel + " -> " + e.machine;
        break;
      case EventKind::kLose:
        out += "lose " + *e.message + " " + *e.channel;
        break;
      case EventKind::kTimeout:
        out += "timeout " + e.machine;
        break;
      case EventKind::kTau:
        out += "tau " + e.machine;
        break;
    }
    out += "\n";
  }
  out += "endmsc\n";
  return out;
}

std::string render_sequence_diagram(const MscTrace& trace) {
  std::map<std::string, std::string> receiver_of;
  for (const auto& c : trace.channels) receiver_of[c.name] = c.receiver;

  struct Pending {
    std::size_t step;
    std::string sender;
    std::string message;
    std::string channel;
  };
  std::map<std::string, std::deque<Pending>> in_flight;

  std::string out = "@startuml\n";
  for (const auto& l : trace.lifelines) out += "participant " + l + "\n";
  for (const auto& e : trace.events) {
    switch (e.kind) {
      case EventKind::kSend:
        in_flight[*e.channel].push_back({e.step, e.machine, *e.message, *e.channel});
        break;
      case EventKind::kRecv: {
        auto& queue = in_flight[*e.channel];
        std::string sender = "[";
        if (!queue.empty()) {
          sender = queue.front().sender;
          queue.pop_front();
        }
        out += sender + " -> " + e.machine + " : " + *e.message + "\n";
        break;
      }
      case EventKind::kLose: {
        // The lost copy is the latest matching send on that channel.
        auto& queue = in_flight[*e.channel];
        for (auto it = queue.rbegin(); it != queue.rend(); ++it) {
          if (it->message == *e.message) {
            queue.erase(std::next(it).base());
            break;
          }
        }
        out += e.machine + " ->x : " + *e.message + " (lost)\n";
        break;
      }
      case EventKind::kTimeout:
        out += "note over " + e.machine + " : timeout\n";
        break;
      case EventKind::kTau:
        out += "note over " + e.machine + " : tau\n";
        break;
    }
  }
  std::vector<Pending> remaining;
  for (auto& [channel, queue] : in_flight) {
    remaining.insert(remaining.end(), queue.begin(), queue.end());
  }
  std::sort(remaining.begin(), remaining.end(),
            [](const Pending& a, const Pending& b) { return a.step < b.step; });
  for (const auto& p : remaining) {
    auto it = receiver_of.find(p.channel);
    const std::string target = it == receiver_of.end() ? "]" : it->second;
    out += p.sender + " -> " + target + " : " + p.message + " (in transit)\n";
  }
  out += "@enduml\n";
  return out;
}

}  // namespace cfsm::msc
