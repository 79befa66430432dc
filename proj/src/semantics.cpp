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

#include "cfsm/semantics.hpp"

#include <string_view>

namespace cfsm {

std::string_view to_string(StateClass cls) {
  switch (cls) {
    case StateClass::kRunning:
      return "running";
    case StateClass::kProperTermination:
      return "termination";
    case StateClass::kDeadlock:
      return "deadlock";
    case StateClass::kUnspecifiedReception:
      return "unspecified_reception";
    case StateClass::kOverflow:
      return "overflow";
  }
  return "?";
}

std::string_view to_string(EventLabel label) {
  switch (label) {
    case EventLabel::kSend:
      return "send";
    case EventLabel::kRecv:
      return "recv";
    case EventLabel::kLose:
      return "lose";
    case EventLabel::kTimeout:
      return "timeout";
    case EventLabel::kTau:
      return "tau";
    case EventLabel::kOverflow:
      return "overflow";
  }
  return "?";
}

GlobalState::GlobalState(std::span<const std::uint16_t> locals,
                         const std::vector<std::vector<std::uint16_t>>& queues,
                         bool overflow)
    : machines_(static_cast<std::uint16_t>(locals.size())),
      channels_(static_cast<std::uint16_t>(queues.size())),
      overflow_(overflow) {
  data_.assign(locals.begin(), locals.end());
  for (const auto& q : queues) {
    data_.push_back(static_cast<std::uint16_t>(q.size()));
    data_.insert(data_.end(), q.begin(), q.end());
  }
}

std::size_t GlobalState::queue_offset(std::size_t c) const {
  std::size_t offset = machines_;
  for (std::size_t i = 0; i < c; ++i) offset += 1 + data_[offset];
  return offset;
}

std::span<const std::uint16_t> GlobalState::queue(std::size_t c) const {
  const auto offset = queue_offset(c);
  return std::span<const std::uint16_t>(data_).subspan(offset + 1,
                                                       data_[offset]);
}

void GlobalState::push(std::size_t c, std::uint16_t message) {
  const auto offset = queue_offset(c);
  const auto end = offset + 1 + data_[offset];
  data_.insert(data_.begin() + static_cast<std::ptrdiff_t>(end), message);
  ++data_[offset];
}

std::uint16_t GlobalState::pop(std::size_t c) {
  const auto offset = queue_offset(c);
  if (data_[offset] == 0) throw std::logic_error("pop from empty queue");
  const auto head = data_[offset + 1];
  data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(offset + 1));
  --data_[offset];
  return head;
}

std::size_t GlobalStateHash::operator()(const GlobalState& g) const noexcept {
  // FNV-1a over the packed words.
  std::uint64_t h = 1469598103934665603ULL;
  for (auto word : g.packed()) {
    h ^= word;
    h *= 1099511628211ULL;
  }
  h ^= g.overflow() ? 0x9e3779b97f4a7c15ULL : 0;
  return static_cast<std::size_t>(h);
}

std::string to_string(const System& system, const GlobalState& g) {
  std::string out = "(";
  for (std::size_t m = 0; m < g.machine_count(); ++m) {
    if (m > 0) out += ',';
    out += system.state_name(m, g.local(m));
  }
  for (std::size_t c = 0; c < g.channel_count(); ++c) {
    out += '|';
    out += system.channel(c).name;
    out += ":[";
    bool first = true;
    for (auto msg : g.queue(c)) {
      if (!first) out += ',';
      first = false;
      out += system.message_name(msg);
    }
    out += ']';
  }
  out += ')';
  if (g.overflow()) out += "!overflow";
  return out;
}

GlobalState initial_state(const System& system) {
  std::vector<std::uint16_t> locals;
  for (std::size_t m = 0; m < system.machines().size(); ++m) {
    locals.push_back(static_cast<std::uint16_t>(system.initial(m)));
  }
  std::vector<std::vector<std::uint16_t>> queues(system.channels().size());
  return GlobalState(locals, queues);
}

namespace {

bool inputs_empty(const System& system, const GlobalState& g, std::size_t m) {
  for (auto c : system.inputs(m)) {
    if (!g.queue(c).empty()) return false;
  }
  return true;
}

bool enabled_at(const System& system, const GlobalState& g, std::size_t m,
                const System::CompiledTransition& tr,
                const SemanticsOptions& opts) {
  if (tr.from != g.local(m)) return false;
  switch (tr.kind) {
    case ActionKind::kSend: {
      const auto& channel = system.channel(tr.channel);
      return g.queue(tr.channel).size() < channel.capacity || channel.lossy ||
             opts.overflow_mode == OverflowMode::kError;
    }
    case ActionKind::kRecv: {
      auto q = g.queue(tr.channel);
      return !q.empty() && q.front() == tr.message;
    }
    case ActionKind::kTau:
      return true;
    case ActionKind::kTimeout:
      return opts.timeout_mode == TimeoutMode::kEager ||
             inputs_empty(system, g, m);
  }
  return false;
}

}  // namespace

bool is_enabled(const System& system, const GlobalState& g, TransitionRef ref,
                const SemanticsOptions& opts) {
  if (g.overflow() || ref.machine >= system.machines().size() ||
      ref.transition >= system.transitions(ref.machine).size()) {
    return false;
  }
  return enabled_at(system, g, ref.machine,
                    system.transition(ref.machine, ref.transition), opts);
}

std::vector<TransitionRef> enabled_transitions(const System& system,
                                               const GlobalState& g,
                                               const SemanticsOptions& opts) {
  std::vector<TransitionRef> out;
  if (g.overflow()) return out;
  for (std::size_t m = 0; m < system.machines().size(); ++m) {
    auto [first, last] = system.outgoing(m, g.local(m));
    for (auto t = first; t < last; ++t) {
      if (enabled_at(system, g, m, system.transition(m, t), opts)) {
        out.push_back({m, t});
      }
    }
  }
  return out;
}

std::vector<Successor> apply_transition(const System& system,
                                        const GlobalState& g,
                                        TransitionRef ref,
                                        const SemanticsOptions& opts) {
  if (!is_enabled(system, g, ref, opts)) {
    throw TransitionNotEnabled("transition " + std::to_string(ref.transition) +
                               " of machine " + std::to_string(ref.machine) +
                               " is not enabled");
  }
  const auto& tr = system.transition(ref.machine, ref.transition);
  GlobalState next = g;
  next.set_local(ref.machine, tr.to);

  std::vector<Successor> out;
  switch (tr.kind) {
    case ActionKind::kRecv:
      next.pop(tr.channel);
      out.push_back({std::move(next), EventLabel::kRecv});
      break;
    case ActionKind::kTau:
      out.push_back({std::move(next), EventLabel::kTau});
      break;
    case ActionKind::kTimeout:
      out.push_back({std::move(next), EventLabel::kTimeout});
      break;
    case ActionKind::kSend: {
      const auto& channel = system.channel(tr.channel);
      const bool room = g.queue(tr.channel).size() < channel.capacity;
      if (!room && !channel.lossy) {
        // Only reachable in OverflowMode::kError.
        next.mark_overflow();
        out.push_back({std::move(next), EventLabel::kOverflow});
        break;
      }
      GlobalState lost = next;
      if (room) {
        next.push(tr.channel, tr.message);
        out.push_back({std::move(next), EventLabel::kSend});
      }
      // A full lossy channel can still swallow the message.
      if (channel.lossy) out.push_back({std::move(lost), EventLabel::kLose});
      break;
    }
  }
  return out;
}

std::ptrdiff_t unreceivable_head(const System& system, const GlobalState& g) {
  for (std::size_t c = 0; c < g.channel_count(); ++c) {
    auto q = g.queue(c);
    if (q.empty()) continue;
    const auto m = system.receiver(c);
    auto [first, last] = system.outgoing(m, g.local(m));
    bool receivable = false;
    for (auto t = first; t < last && !receivable; ++t) {
      const auto& tr = system.transition(m, t);
      receivable = tr.kind == ActionKind::kRecv && tr.channel == c &&
                   tr.message == q.front();
    }
    if (!receivable) return static_cast<std::ptrdiff_t>(c);
  }
  return -1;
}

StateClass classify_state(const System& system, const GlobalState& g,
                          const SemanticsOptions& opts) {
  if (g.overflow()) return StateClass::kOverflow;
  bool terminated = true;
  for (std::size_t m = 0; m < g.machine_count() && terminated; ++m) {
    terminated = system.is_terminal(m, g.local(m));
  }
  for (std::size_t c = 0; c < g.channel_count() && terminated; ++c) {
    terminated = g.queue(c).empty();
  }
  if (terminated) return StateClass::kProperTermination;
  if (!enabled_transitions(system, g, opts).empty()) return StateClass::kRunning;
  if (unreceivable_head(system, g) >= 0) {
    return StateClass::kUnspecifiedReception;
  }
  return StateClass::kDeadlock;
}

}  // namespace cfsm
