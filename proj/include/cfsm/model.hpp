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

#ifndef CFSM_MODEL_HPP_
#define CFSM_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cfsm {

enum class ActionKind : std::uint8_t { kSend, kRecv, kTimeout, kTau };

/**
 * What a transition does. Send and Recv carry a message name and the channel
 * it travels on; Timeout and Tau carry neither.
 */
struct Action {
  ActionKind kind = ActionKind::kTau;
  std::string message;
  std::string channel;

  static Action Send(std::string message, std::string channel) {
    return {ActionKind::kSend, std::move(message), std::move(channel)};
  }
  static Action Recv(std::string message, std::string channel) {
    return {ActionKind::kRecv, std::move(message), std::move(channel)};
  }
  static Action Timeout() { return {ActionKind::kTimeout, {}, {}}; }
  static Action Tau() { return {ActionKind::kTau, {}, {}}; }

  bool operator==(const Action&) const = default;
};

struct Transition {
  std::string from;
  Action action;
  std::string to;
  // Marks a "good" event for liveness: cycles containing one are not livelocks.
  bool progress = false;

  bool operator==(const Transition&) const = default;
};

struct Machine {
  std::string name;
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> terminals;
  std::vector<Transition> transitions;

  bool operator==(const Machine&) const = default;
};

/// Directed bounded FIFO queue. Self-channels (sender == receiver) are allowed.
struct Channel {
  std::string name;
  std::string sender;
  std::string receiver;
  std::uint32_t capacity = 1;
  bool lossy = false;

  bool operator==(const Channel&) const = default;
};

enum class ModelErrorKind {
  kUnknownState,
  kUnknownChannel,
  kUnknownMachine,
  kDuplicateName,
  kDuplicateTransition,
  kChannelEndpointMismatch,
  kZeroCapacity,
  kInvalidName,
};

std::string_view to_string(ModelErrorKind kind);

/**
 * Pinpoints the input element a ModelError is about. Indices refer to the
 * order of the lists handed to build_system (before any canonicalization),
 * so a parser can map them back onto source spans.
 */
struct ModelErrorSite {
  enum class Field {
    kSystemName,
    kChannelName,
    kChannelSender,
    kChannelReceiver,
    kChannelCapacity,
    kMachineName,
    kState,
    kInitial,
    kTerminal,
    kTransitionFrom,
    kTransitionTo,
    kTransitionChannel,
    kTransitionMessage,
    kTransition,
  };
  Field field = Field::kSystemName;
  int machine = -1;
  int channel = -1;
  int index = -1;
};

class ModelError : public std::runtime_error {
 public:
  ModelError(ModelErrorKind kind, std::string element, ModelErrorSite site);

  ModelErrorKind kind() const { return kind_; }
  const std::string& element() const { return element_; }
  const ModelErrorSite& site() const { return site_; }

 private:
  ModelErrorKind kind_;
  std::string element_;
  ModelErrorSite site_;
};

bool is_identifier(std::string_view text);

/**
 * A validated system of communicating machines.
 *
 * Instances only come out of build_system(), so every invariant (resolved
 * references, unique names, no duplicate rules) holds. Each machine's
 * transitions are stably grouped by source state in state declaration
 * order; that order is the canonical transition order used everywhere else.
 */
class System {
 public:
  struct CompiledTransition {
    std::uint16_t from = 0;
    std::uint16_t to = 0;
    ActionKind kind = ActionKind::kTau;
    std::uint16_t message = 0;
    std::uint16_t channel = 0;
    bool progress = false;
  };

  System() = default;

  const std::string& name() const { return name_; }
  std::span<const Machine> machines() const { return machines_; }
  std::span<const Channel> channels() const { return channels_; }
  const Machine& machine(std::size_t m) const { return machines_[m]; }
  const Channel& channel(std::size_t c) const { return channels_[c]; }

  /// Message alphabet in order of first mention.
  const std::vector<std::string>& messages() const { return messages_; }

  std::span<const CompiledTransition> transitions(std::size_t m) const {
    return compiled_[m].transitions;
  }
  const CompiledTransition& transition(std::size_t m, std::size_t t) const {
    return compiled_[m].transitions[t];
  }
  /// Canonical transition indices leaving state `s` of machine `m`.
  std::pair<std::size_t, std::size_t> outgoing(std::size_t m,
                                               std::size_t s) const {
    const auto& first = compiled_[m].first_out;
    return {first[s], first[s + 1]};
  }
  bool is_terminal(std::size_t m, std::size_t s) const {
    return compiled_[m].terminal[s];
  }
  std::size_t initial(std::size_t m) const { return compiled_[m].initial; }
  std::size_t sender(std::size_t c) const { return channel_ends_[c].first; }
  std::size_t receiver(std::size_t c) const { return channel_ends_[c].second; }
  /// Channels whose receiver is machine `m`, ascending.
  std::span<const std::size_t> inputs(std::size_t m) const {
    return compiled_[m].inputs;
  }

  const std::string& state_name(std::size_t m, std::size_t s) const {
    return machines_[m].states[s];
  }
  const std::string& message_name(std::size_t id) const {
    return messages_[id];
  }

  std::ptrdiff_t find_machine(std::string_view name) const;
  std::ptrdiff_t find_channel(std::string_view name) const;
  std::ptrdiff_t find_state(std::size_t m, std::string_view name) const;
  std::ptrdiff_t find_message(std::string_view name) const;

  /// Structural equality over the declared definitions.
  bool operator==(const System& other) const {
    return name_ == other.name_ && machines_ == other.machines_ &&
           channels_ == other.channels_;
  }

 private:
  struct CompiledMachine {
    std::size_t initial = 0;
    std::vector<bool> terminal;
    std::vector<std::size_t> first_out;
    std::vector<CompiledTransition> transitions;
    std::vector<std::size_t> inputs;
  };

  friend System build_system(std::vector<Machine>, std::vector<Channel>,
                             std::string);

  std::string name_;
  std::vector<Machine> machines_;
  std::vector<Channel> channels_;
  std::vector<std::string> messages_;
  std::vector<CompiledMachine> compiled_;
  std::vector<std::pair<std::size_t, std::size_t>> channel_ends_;
};

/// Validates and assembles a system. Throws ModelError naming the offender.
System build_system(std::vector<Machine> machines,
                    std::vector<Channel> channels, std::string name);

std::string describe(const Action& action);

}  // namespace cfsm

#endif  // CFSM_MODEL_HPP_
