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

#include "cfsm/sim.hpp"

#include <charconv>
#include <cmath>
#include <deque>
#include <queue>
#include <random>

namespace cfsm::sim {

namespace {

enum class EventType { kDelivery, kTimer, kWake };

struct Event {
  double time = 0;
  std::uint64_t seq = 0;
  EventType type = EventType::kWake;
  std::size_t target = 0;  // channel for deliveries, machine otherwise
  std::uint16_t message = 0;
  std::uint64_t epoch = 0;

  bool operator>(const Event& other) const {
    return time != other.time ? time > other.time : seq > other.seq;
  }
};

class Simulator {
 public:
  Simulator(const System& system, const SimConfig& cfg)
      : system_(system),
        cfg_(cfg),
        rng_(cfg.seed),
        trace_(msc::empty_trace(system)) {
    const auto machines = system.machines().size();
    const auto channels = system.channels().size();
    local_.resize(machines);
    epoch_.assign(machines, 0);
    streak_.assign(machines, 0);
    next_send_.assign(machines, 0.0);
    wake_pending_.assign(machines, false);
    source_.assign(machines, true);
    queues_.resize(channels);
    in_flight_.assign(channels, 0);
    last_arrival_.assign(channels, 0.0);
    delay_.assign(channels, cfg.delay);
    for (std::size_t c = 0; c < channels; ++c) {
      auto it = cfg.channel_delay.find(system.channel(c).name);
      if (it != cfg.channel_delay.end()) delay_[c] = it->second;
    }
    for (std::size_t m = 0; m < machines; ++m) {
      for (const auto& tr : system.transitions(m)) {
        if (tr.kind == ActionKind::kRecv) source_[m] = false;
      }
    }
  }

  SimResult run() {
    for (std::size_t m = 0; m < local_.size(); ++m) {
      local_[m] = system_.initial(m);
      arm_timer(m);
    }
    for (;;) {
      while (step_once()) {
        if (++steps_ > cfg_.max_steps) return finish(false);
      }
      if (terminated()) return finish(false);
      if (events_.empty()) {
        if (discard_unspecified()) continue;
        return finish(true);
      }
      const Event event = events_.top();
      events_.pop();
      if (event.time > cfg_.max_time) {
        now_ = cfg_.max_time;
        return finish(false);
      }
      now_ = event.time;
      handle(event);
      if (++steps_ > cfg_.max_steps) return finish(false);
    }
  }

 private:
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  void schedule(double time, EventType type, std::size_t target,
                std::uint16_t message = 0, std::uint64_t epoch = 0) {
    events_.push({time, seq_++, type, target, message, epoch});
  }

  bool has_timeout(std::size_t m) const {
    auto [first, last] = system_.outgoing(m, local_[m]);
    for (auto t = first; t < last; ++t) {
      if (system_.transition(m, t).kind == ActionKind::kTimeout) return true;
    }
    return false;
  }

  void arm_timer(std::size_t m) {
    if (has_timeout(m)) {
      schedule(now_ + cfg_.timeout_after, EventType::kTimer, m, 0, epoch_[m]);
    }
  }

  void move(std::size_t m, const System::CompiledTransition& tr) {
    if (tr.progress) {
      ++metrics_.completed_requests;
      completions_.push_back(now_);
    }
    if (tr.to == local_[m]) return;  // self-loops keep the running timer
    local_[m] = tr.to;
    ++epoch_[m];
    arm_timer(m);
  }

  const std::string& name(std::size_t m) const { return system_.machine(m).name; }

  // Fires the first enabled zero-time transition, if any.
  bool step_once() {
    for (std::size_t m = 0; m < local_.size(); ++m) {
      auto [first, last] = system_.outgoing(m, local_[m]);
      for (auto t = first; t < last; ++t) {
        const auto& tr = system_.transition(m, t);
        switch (tr.kind) {
          case ActionKind::kRecv: {
            auto& q = queues_[tr.channel];
            if (q.empty() || q.front() != tr.message) break;
            q.pop_front();
            streak_[m] = 0;
            trace_.add(msc::EventKind::kRecv, name(m), system_.message_name(tr.message),
                       system_.channel(tr.channel).name);
            move(m, tr);
            return true;
          }
          case ActionKind::kSend:
            if (try_send(m, tr)) return true;
            break;
          case ActionKind::kTau:
            trace_.add(msc::EventKind::kTau, name(m));
            move(m, tr);
            return true;
          case ActionKind::kTimeout:
            break;
        }
      }
    }
    return false;
  }

  bool try_send(std::size_t m, const System::CompiledTransition& tr) {
    if (source_[m] && cfg_.send_interval > 0 && now_ < next_send_[m]) {
      if (!wake_pending_[m]) {
        wake_pending_[m] = true;
        schedule(next_send_[m], EventType::kWake, m);
      }
      return false;
    }
    const auto c = tr.channel;
    const auto& channel = system_.channel(c);
    const bool full = queues_[c].size() + in_flight_[c] >= channel.capacity;
    if (full && cfg_.overflow == OverflowMode::kBlock) return false;

    const auto& message = system_.message_name(tr.message);
    ++metrics_.sent;
    if (source_[m]) {
      starts_.push_back(now_);
      next_send_[m] = now_ + cfg_.send_interval;
    }
    trace_.add(msc::EventKind::kSend, name(m), message, channel.name);
    bool lost = full;
    if (!full && channel.lossy) lost = uniform() < cfg_.loss_prob;
    if (lost) {
      ++metrics_.lost;
      trace_.add(msc::EventKind::kLose, name(m), message, channel.name);
    } else {
      double transit = delay_[c];
      if (cfg_.jitter > 0) transit += uniform() * cfg_.jitter;
      const double arrival = std::max(now_ + transit, last_arrival_[c]);
      last_arrival_[c] = arrival;
      ++in_flight_[c];
      schedule(arrival, EventType::kDelivery, c, tr.message);
    }
    move(m, tr);
    return true;
  }

  // Only called when nothing else can happen: a head message the receiver's
  // current state has no receive for is consumed and counted.
  bool discard_unspecified() {
    for (std::size_t c = 0; c < queues_.size(); ++c) {
      if (queues_[c].empty()) continue;
      const auto m = system_.receiver(c);
      auto [first, last] = system_.outgoing(m, local_[m]);
      bool receivable = false;
      for (auto t = first; t < last; ++t) {
        const auto& tr = system_.transition(m, t);
        receivable |= tr.kind == ActionKind::kRecv && tr.channel == c &&
                      tr.message == queues_[c].front();
      }
      if (!receivable) {
        queues_[c].pop_front();
        ++metrics_.unspecified_events;
        return true;
      }
    }
    return false;
  }

  void handle(const Event& event) {
    switch (event.type) {
      case EventType::kDelivery:
        --in_flight_[event.target];
        ++metrics_.delivered;
        queues_[event.target].push_back(event.message);
        break;
      case EventType::kWake:
        wake_pending_[event.target] = false;
        break;
      case EventType::kTimer: {
        const auto m = event.target;
        if (event.epoch != epoch_[m]) break;  // left the state meanwhile
        if (streak_[m] >= cfg_.max_retransmits) {
          ++metrics_.failed_requests;
          break;
        }
        auto [first, last] = system_.outgoing(m, local_[m]);
        for (auto t = first; t < last; ++t) {
          const auto& tr = system_.transition(m, t);
          if (tr.kind != ActionKind::kTimeout) continue;
          ++streak_[m];
          ++metrics_.retransmissions;
          trace_.add(msc::EventKind::kTimeout, name(m));
          if (tr.to == local_[m]) {
            arm_timer(m);
          }
          move(m, tr);
          break;
        }
        break;
      }
    }
  }

  bool terminated() const {
    for (std::size_t m = 0; m < local_.size(); ++m) {
      if (!system_.is_terminal(m, local_[m])) return false;
    }
    for (std::size_t c = 0; c < queues_.size(); ++c) {
      if (!queues_[c].empty() || in_flight_[c] > 0) return false;
    }
    return true;
  }

  SimResult finish(bool quiescent) {
    metrics_.deadlocked = quiescent && !terminated();
    metrics_.sim_time = now_;
    for (auto n : in_flight_) metrics_.in_transit += n;
    const auto pairs = std::min(starts_.size(), completions_.size());
    if (pairs > 0) {
      double total = 0;
      for (std::size_t i = 0; i < pairs; ++i) total += completions_[i] - starts_[i];
      metrics_.mean_response_delay = total / static_cast<double>(pairs);
    }
    return {metrics_, std::move(trace_)};
  }

  const System& system_;
  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  msc::MscTrace trace_;
  SimMetrics metrics_;

  double now_ = 0;
  std::uint64_t seq_ = 0;
  std::size_t steps_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;

  std::vector<std::size_t> local_;
  std::vector<std::uint64_t> epoch_;
  std::vector<int> streak_;  // consecutive timer expiries without a receive
  std::vector<double> next_send_;
  std::vector<bool> wake_pending_;
  std::vector<bool> source_;
  std::vector<std::deque<std::uint16_t>> queues_;
  std::vector<std::size_t> in_flight_;
  std::vector<double> last_arrival_;
  std::vector<double> delay_;
  std::vector<double> starts_;
  std::vector<double> completions_;
};

}  // namespace

void validate(const SimConfig& cfg, const System& system) {
  auto fail = [](const std::string& what) { throw InvalidConfig(what); };
  if (!(cfg.loss_prob >= 0.0 && cfg.loss_prob <= 1.0)) {
    fail("loss probability must be in [0, 1]");
  }
  if (!(cfg.delay >= 0.0)) fail("delay must be >= 0");
  if (!(cfg.jitter >= 0.0)) fail("jitter must be >= 0");
  if (!(cfg.timeout_after > 0.0)) fail("timeout must be > 0");
  if (!(cfg.max_time > 0.0)) fail("max time must be > 0");
  if (!(cfg.send_interval >= 0.0) || std::isinf(cfg.send_interval)) {
    fail("send interval must be finite and >= 0");
  }
  if (cfg.max_retransmits < 0) fail("max retransmits must be >= 0");
  if (cfg.requests < 1) fail("requests must be >= 1");
  for (const auto& [channel, delay] : cfg.channel_delay) {
    if (system.find_channel(channel) < 0) fail("delay given for unknown channel " + channel);
    if (!(delay >= 0.0)) fail("delay of " + channel + " must be >= 0");
  }
}

SimResult run_simulation(const System& system, const SimConfig& cfg) {
  validate(cfg, system);
  return Simulator(system, cfg).run();
}

MeanMetrics mean_of(const std::vector<SimMetrics>& runs) {
  MeanMetrics mean;
  if (runs.empty()) return mean;
  for (const auto& r : runs) {
    mean.sent += static_cast<double>(r.sent);
    mean.delivered += static_cast<double>(r.delivered);
    mean.lost += static_cast<double>(r.lost);
    mean.retransmissions += static_cast<double>(r.retransmissions);
    mean.completed += static_cast<double>(r.completed_requests);
    mean.failed += static_cast<double>(r.failed_requests);
    mean.mean_delay += r.mean_response_delay;
    mean.unspecified += static_cast<double>(r.unspecified_events);
    mean.deadlocked_frac += r.deadlocked ? 1.0 : 0.0;
    mean.sim_time += r.sim_time;
  }
  const auto n = static_cast<double>(runs.size());
  for (double* field : {&mean.sent, &mean.delivered, &mean.lost, &mean.retransmissions,
                        &mean.completed, &mean.failed, &mean.mean_delay, &mean.unspecified,
                        &mean.deadlocked_frac, &mean.sim_time}) {
    *field /= n;
  }
  return mean;
}

std::vector<SweepRow> sweep(const SystemFactory& factory, SweepParameter parameter,
                            const std::vector<double>& values, const SimConfig& base,
                            int runs_per_value) {
  if (values.empty()) throw InvalidConfig("sweep needs at least one value");
  if (runs_per_value < 1) throw InvalidConfig("runs per value must be >= 1");
  std::vector<SweepRow> table;
  for (const double value : values) {
    SimConfig cfg = base;
    switch (parameter) {
      case SweepParameter::kLossProb:
        cfg.loss_prob = value;
        break;
      case SweepParameter::kSendRate:
        if (!(value > 0.0)) throw SweepError(value, 0, "send rate must be > 0");
        cfg.send_interval = 1.0 / value;
        break;
      case SweepParameter::kNodeCount:
        break;
    }
    std::vector<SimMetrics> runs;
    try {
      const System system = factory(value, cfg);
      for (int run = 0; run < runs_per_value; ++run) {
        cfg.seed = base.seed + static_cast<std::uint64_t>(run);
        try {
          runs.push_back(run_simulation(system, cfg).metrics);
        } catch (const std::exception& e) {
          throw SweepError(value, run,
                           "value " + format_number(value) + ", run " + std::to_string(run) +
                               ": " + e.what());
        }
      }
    } catch (const SweepError&) {
      throw;
    } catch (const std::exception& e) {
      throw SweepError(value, 0, "value " + format_number(value) + ": " + e.what());
    }
    table.push_back({value, mean_of(runs)});
  }
  return table;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string export_csv(const std::vector<SweepRow>& table) {
  std::string out =
      "param,sent,delivered,lost,retransmissions,completed,failed,mean_delay,"
      "unspecified,deadlocked_frac,sim_time\n";
  for (const auto& row : table) {
    const auto& m = row.mean;
    for (double v : {row.value, m.sent, m.delivered, m.lost, m.retransmissions, m.completed,
                     m.failed, m.mean_delay, m.unspecified, m.deadlocked_frac}) {
      out += format_number(v);
      out += ',';
    }
    out += format_number(m.sim_time);
    out += '\n';
  }
  return out;
}

}  // namespace cfsm::sim
