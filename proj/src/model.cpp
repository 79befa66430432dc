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

#include "cfsm/model.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <utility>

namespace cfsm {

namespace {

using Field = ModelErrorSite::Field;

[[noreturn]] void fail(ModelErrorKind kind, std::string element, Field field,
                       int machine = -1, int channel = -1, int index = -1) {
  throw ModelError(kind, std::move(element),
                   ModelErrorSite{field, machine, channel, index});
}

void require_identifier(const std::string& name, Field field, int machine = -1,
                        int channel = -1, int index = -1) {
  if (!is_identifier(name)) {
    fail(ModelErrorKind::kInvalidName, name, field, machine, channel, index);
  }
}

constexpr std::size_t kMaxIds = std::numeric_limits<std::uint16_t>::max();

}  // namespace

std::string_view to_string(ModelErrorKind kind) {
  switch (kind) {
    case ModelErrorKind::kUnknownState:
      return "UnknownState";
    case ModelErrorKind::kUnknownChannel:
      return "UnknownChannel";
    case ModelErrorKind::kUnknownMachine:
      return "UnknownMachine";
    case ModelErrorKind::kDuplicateName:
      return "DuplicateName";
    case ModelErrorKind::kDuplicateTransition:
      return "DuplicateTransition";
    case ModelErrorKind::kChannelEndpointMismatch:
      return "ChannelEndpointMismatch";
    case ModelErrorKind::kZeroCapacity:
      return "ZeroCapacity";
    case ModelErrorKind::kInvalidName:
      return "InvalidName";
  }
  return "?";
}

ModelError::ModelError(ModelErrorKind kind, std::string element,
                       ModelErrorSite site)
    : std::runtime_error(std::string(to_string(kind)) + "(\"" + element +
                         "\")"),
      kind_(kind),
      element_(std::move(element)),
      site_(site) {}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) {
    return alpha(c) || (c >= '0' && c <= '9');
  });
}

std::string describe(const Action& action) {
  switch (action.kind) {
    case ActionKind::kSend:
      return "send " + action.message + " to " + action.channel;
    case ActionKind::kRecv:
      return "recv " + action.message + " from " + action.channel;
    case ActionKind::kTimeout:
      return "timeout";
    case ActionKind::kTau:
      return "tau";
  }
  return "?";
}

std::ptrdiff_t System::find_machine(std::string_view name) const {
  for (std::size_t i = 0; i < machines_.size(); ++i) {
    if (machines_[i].name == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t System::find_channel(std::string_view name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].name == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t System::find_state(std::size_t m, std::string_view name) const {
  const auto& states = machines_[m].states;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i] == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

std::ptrdiff_t System::find_message(std::string_view name) const {
  for (std::size_t i = 0; i < messages_.size(); ++i) {
    if (messages_[i] == name) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

System build_system(std::vector<Machine> machines,
                    std::vector<Channel> channels, std::string name) {
  require_identifier(name, Field::kSystemName);

  // Machines and channels share one namespace.
  std::map<std::string, std::size_t> machine_index;
  std::set<std::string> taken;
  for (std::size_t m = 0; m < machines.size(); ++m) {
    const auto& machine = machines[m];
    require_identifier(machine.name, Field::kMachineName, static_cast<int>(m));
    if (!taken.insert(machine.name).second) {
      fail(ModelErrorKind::kDuplicateName, machine.name, Field::kMachineName,
           static_cast<int>(m));
    }
    machine_index[machine.name] = m;
  }

  std::map<std::string, std::size_t> channel_index;
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& channel = channels[c];
    const int ci = static_cast<int>(c);
    require_identifier(channel.name, Field::kChannelName, -1, ci);
    if (!taken.insert(channel.name).second) {
      fail(ModelErrorKind::kDuplicateName, channel.name, Field::kChannelName,
           -1, ci);
    }
    auto sender = machine_index.find(channel.sender);
    if (sender == machine_index.end()) {
      fail(ModelErrorKind::kUnknownMachine, channel.sender,
           Field::kChannelSender, -1, ci);
    }
    auto receiver = machine_index.find(channel.receiver);
    if (receiver == machine_index.end()) {
      fail(ModelErrorKind::kUnknownMachine, channel.receiver,
           Field::kChannelReceiver, -1, ci);
    }
    if (channel.capacity == 0) {
      fail(ModelErrorKind::kZeroCapacity, channel.name, Field::kChannelCapacity,
           -1, ci);
    }
    channel_index[channel.name] = c;
    ends.emplace_back(sender->second, receiver->second);
  }

  System system;
  system.compiled_.resize(machines.size());
  std::map<std::string, std::size_t> message_ids;

  for (std::size_t m = 0; m < machines.size(); ++m) {
    auto& machine = machines[m];
    auto& compiled = system.compiled_[m];
    const int mi = static_cast<int>(m);

    if (machine.states.size() > kMaxIds) {
      fail(ModelErrorKind::kInvalidName, machine.name, Field::kMachineName, mi);
    }
    std::map<std::string, std::size_t> state_index;
    for (std::size_t s = 0; s < machine.states.size(); ++s) {
      const int si = static_cast<int>(s);
      require_identifier(machine.states[s], Field::kState, mi, -1, si);
      if (!state_index.emplace(machine.states[s], s).second) {
        fail(ModelErrorKind::kDuplicateName, machine.states[s], Field::kState,
             mi, -1, si);
      }
    }
    auto lookup_state = [&](const std::string& state, Field field, int index) {
      auto it = state_index.find(state);
      if (it == state_index.end()) {
        fail(ModelErrorKind::kUnknownState, state, field, mi, -1, index);
      }
      return it->second;
    };

    compiled.initial = lookup_state(machine.initial, Field::kInitial, -1);

    compiled.terminal.assign(machine.states.size(), false);
    for (std::size_t i = 0; i < machine.terminals.size(); ++i) {
      const int ti = static_cast<int>(i);
      auto s = lookup_state(machine.terminals[i], Field::kTerminal, ti);
      if (compiled.terminal[s]) {
        fail(ModelErrorKind::kDuplicateName, machine.terminals[i],
             Field::kTerminal, mi, -1, ti);
      }
      compiled.terminal[s] = true;
    }
    // Terminals are a set; keep them in state declaration order.
    machine.terminals.clear();
    for (std::size_t s = 0; s < machine.states.size(); ++s) {
      if (compiled.terminal[s]) machine.terminals.push_back(machine.states[s]);
    }

    std::vector<std::size_t> sources;
    for (std::size_t t = 0; t < machine.transitions.size(); ++t) {
      const auto& tr = machine.transitions[t];
      const int ti = static_cast<int>(t);
      sources.push_back(lookup_state(tr.from, Field::kTransitionFrom, ti));
      lookup_state(tr.to, Field::kTransitionTo, ti);
      const auto& action = tr.action;
      if (action.kind == ActionKind::kSend ||
          action.kind == ActionKind::kRecv) {
        require_identifier(action.message, Field::kTransitionMessage, mi, -1,
                           ti);
        auto ch = channel_index.find(action.channel);
        if (ch == channel_index.end()) {
          fail(ModelErrorKind::kUnknownChannel, action.channel,
               Field::kTransitionChannel, mi, -1, ti);
        }
        const auto& [snd, rcv] = ends[ch->second];
        const bool ok = action.kind == ActionKind::kSend ? snd == m : rcv == m;
        if (!ok) {
          fail(ModelErrorKind::kChannelEndpointMismatch, action.channel,
               Field::kTransitionChannel, mi, -1, ti);
        }
      } else if (!action.message.empty() || !action.channel.empty()) {
        fail(ModelErrorKind::kInvalidName, describe(action),
             Field::kTransition, mi, -1, ti);
      }
      for (std::size_t u = 0; u < t; ++u) {
        const auto& other = machine.transitions[u];
        if (other.from == tr.from && other.action == tr.action) {
          fail(ModelErrorKind::kDuplicateTransition,
               tr.from + ": " + describe(tr.action), Field::kTransition, mi,
               -1, ti);
        }
      }
    }

    // Canonical order: grouped by source state, stable within a state.
    std::vector<std::size_t> order(machine.transitions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return sources[a] < sources[b];
                     });
    std::vector<Transition> sorted;
    sorted.reserve(order.size());
    for (auto i : order) sorted.push_back(std::move(machine.transitions[i]));
    machine.transitions = std::move(sorted);

    compiled.first_out.assign(machine.states.size() + 1, 0);
    for (const auto& tr : machine.transitions) {
      System::CompiledTransition ct;
      ct.from = static_cast<std::uint16_t>(state_index[tr.from]);
      ct.to = static_cast<std::uint16_t>(state_index[tr.to]);
      ct.kind = tr.action.kind;
      ct.progress = tr.progress;
      if (ct.kind == ActionKind::kSend || ct.kind == ActionKind::kRecv) {
        auto [it, fresh] =
            message_ids.emplace(tr.action.message, system.messages_.size());
        if (fresh) {
          if (system.messages_.size() >= kMaxIds) {
            fail(ModelErrorKind::kInvalidName, tr.action.message,
                 Field::kMachineName, mi);
          }
          system.messages_.push_back(tr.action.message);
        }
        ct.message = static_cast<std::uint16_t>(it->second);
        ct.channel = static_cast<std::uint16_t>(channel_index[tr.action.channel]);
      }
      compiled.first_out[ct.from + 1]++;
      compiled.transitions.push_back(ct);
    }
    for (std::size_t s = 0; s < machine.states.size(); ++s) {
      compiled.first_out[s + 1] += compiled.first_out[s];
    }
  }

  for (std::size_t c = 0; c < channels.size(); ++c) {
    system.compiled_[ends[c].second].inputs.push_back(c);
  }

  system.name_ = std::move(name);
  system.machines_ = std::move(machines);
  system.channels_ = std::move(channels);
  system.channel_ends_ = std::move(ends);
  return system;
}

}  // namespace cfsm
