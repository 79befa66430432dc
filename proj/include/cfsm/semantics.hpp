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

#ifndef CFSM_SEMANTICS_HPP_
#define CFSM_SEMANTICS_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cfsm/model.hpp"

namespace cfsm {

enum class TimeoutMode : std::uint8_t { kLazy, kEager };
enum class OverflowMode : std::uint8_t { kBlock, kError };

struct SemanticsOptions {
  // Lazy: a timeout fires only while every input queue of its machine is empty.
  TimeoutMode timeout_mode = TimeoutMode::kLazy;
  // Block: a send into a full queue is disabled. Error: it is enabled and
  // leads to an Overflow-marked state.
  OverflowMode overflow_mode = OverflowMode::kBlock;

  bool operator==(const SemanticsOptions&) const = default;
};

enum class StateClass : std::uint8_t {
  kRunning,
  kProperTermination,
  kDeadlock,
  kUnspecifiedReception,
  kOverflow,
};

enum class EventLabel : std::uint8_t {
  kSend,
  kRecv,
  kLose,
  kTimeout,
  kTau,
  kOverflow,
};

std::string_view to_string(StateClass cls);
std::string_view to_string(EventLabel label);

/**
 * One point of the global state space: every machine's local state plus the
 * contents of every channel, in declaration order.
 *
 * Stored flat as [local_0 .. local_{n-1}, len_0, msgs_0.., len_1, msgs_1..].
 * The layout is a bijection with the canonical text form, so equality on the
 * packed data coincides with equality of canonical strings.
 */
class GlobalState {
 public:
  GlobalState() = default;
  GlobalState(std::span<const std::uint16_t> locals,
              const std::vector<std::vector<std::uint16_t>>& queues,
              bool overflow = false);

  std::size_t machine_count() const { return machines_; }
  std::size_t channel_count() const { return channels_; }
  std::uint16_t local(std::size_t m) const { return data_[m]; }
  std::span<const std::uint16_t> queue(std::size_t c) const;
  bool overflow() const { return overflow_; }

  void set_local(std::size_t m, std::uint16_t s) { data_[m] = s; }
  void push(std::size_t c, std::uint16_t message);
  std::uint16_t pop(std::size_t c);
  void mark_overflow() { overflow_ = true; }

  std::span<const std::uint16_t> packed() const { return data_; }

  bool operator==(const GlobalState&) const = default;
  std::strong_ordering operator<=>(const GlobalState&) const = default;

 private:
  std::size_t queue_offset(std::size_t c) const;

  std::uint16_t machines_ = 0;
  std::uint16_t channels_ = 0;
  bool overflow_ = false;
  std::vector<std::uint16_t> data_;
};

struct GlobalStateHash {
  std::size_t operator()(const GlobalState& g) const noexcept;
};

/// `(loc0,loc1|ch0:[m,..]|ch1:[])`, suffixed with `!overflow` when marked.
std::string to_string(const System& system, const GlobalState& g);

struct TransitionRef {
  std::size_t machine = 0;
  std::size_t transition = 0;

  auto operator<=>(const TransitionRef&) const = default;
};

struct Successor {
  GlobalState state;
  EventLabel label = EventLabel::kSend;

  bool operator==(const Successor&) const = default;
};

class TransitionNotEnabled : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

GlobalState initial_state(const System& system);

/// Enabled (machine, transition) pairs, ascending.
std::vector<TransitionRef> enabled_transitions(const System& system,
                                               const GlobalState& g,
                                               const SemanticsOptions& opts = {});

bool is_enabled(const System& system, const GlobalState& g, TransitionRef ref,
                const SemanticsOptions& opts = {});

/**
 * Successors of firing `ref` at `g`. A send on a lossy channel with room has
 * two outcomes: delivered (label kSend) then vanished (label kLose), in that
 * order. Every other action has exactly one.
 */
std::vector<Successor> apply_transition(const System& system,
                                        const GlobalState& g,
                                        TransitionRef ref,
                                        const SemanticsOptions& opts = {});

StateClass classify_state(const System& system, const GlobalState& g,
                          const SemanticsOptions& opts = {});

/// Channel index whose head message the receiver cannot take in its current
/// local state, or -1.
std::ptrdiff_t unreceivable_head(const System& system, const GlobalState& g);

}  // namespace cfsm

#endif  // CFSM_SEMANTICS_HPP_
