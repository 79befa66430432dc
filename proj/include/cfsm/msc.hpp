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

#ifndef CFSM_MSC_HPP_
#define CFSM_MSC_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsm/model.hpp"
#include "cfsm/reachability.hpp"
#include "cfsm/semantics.hpp"

namespace cfsm::msc {

enum class EventKind { kSend, kRecv, kLose, kTimeout, kTau };

/**
 * One event on one lifeline. Send, Recv and Lose carry message and channel;
 * Timeout and Tau carry neither. For Lose, `machine` is the channel's sender.
 */
struct MscEvent {
  std::size_t step = 0;
  EventKind kind = EventKind::kTau;
  std::string machine;
  std::optional<std::string> message;
  std::optional<std::string> channel;

  bool operator==(const MscEvent&) const = default;
};

struct MscChannel {
  std::string name;
  std::string sender;
  std::string receiver;

  bool operator==(const MscChannel&) const = default;
};

struct MscTrace {
  std::string system_name;
  std::vector<std::string> lifelines;
  // Channel endpoints, so undelivered messages can still be drawn.
  std::vector<MscChannel> channels;
  std::vector<MscEvent> events;

  /// Appends an event with the next step number.
  void add(EventKind kind, std::string machine,
           std::optional<std::string> message = std::nullopt,
           std::optional<std::string> channel = std::nullopt);

  bool operator==(const MscTrace&) const = default;
};

class InvalidPath : public std::invalid_argument {
 public:
  InvalidPath(std::size_t step, const std::string& what)
      : std::invalid_argument(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Empty trace with lifelines and channel table taken from the system.
MscTrace empty_trace(const System& system);

/**
 * Replays `path` from the initial state. A lost message shows as its send
 * immediately followed by the loss, so the chart still names the sender.
 */
MscTrace trace_from_path(const System& system, const std::vector<Step>& path,
                         const SemanticsOptions& opts = {});

/// `msc <name>`, one `<step>: ...` line per event, `endmsc`.
std::string render_event_log(const MscTrace& trace);

/// PlantUML-style sequence diagram; sends pair with receives FIFO per channel.
std::string render_sequence_diagram(const MscTrace& trace);

}  // namespace cfsm::msc

#endif  // CFSM_MSC_HPP_
