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

#ifndef CFSM_SIM_HPP_
#define CFSM_SIM_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsm/model.hpp"
#include "cfsm/msc.hpp"
#include "cfsm/semantics.hpp"

namespace cfsm::sim {

/**
 * Knobs for one simulation run. Times are abstract ticks.
 *
 * Randomness comes from std::mt19937_64 seeded with `seed`; each uniform
 * draw is (next() >> 11) * 2^-53. Draws happen in event order: one loss draw
 * per send on a lossy channel, then one jitter draw if `jitter` > 0 and the
 * message survived.
 */
struct SimConfig {
  std::uint64_t seed = 1;
  double loss_prob = 0.0;  // per message, lossy channels only
  double delay = 1.0;      // transit time for every channel...
  std::map<std::string, double> channel_delay;  // ...unless overridden here
  double jitter = 0.0;     // extra uniform [0, jitter) transit time; FIFO kept
  double timeout_after = 50.0;
  int max_retransmits = 3;
  double max_time = 1e6;
  // Monitoring rounds issued by the environment. Consumed by model
  // factories (sweeps, CLI); a run simulates whatever system it is given.
  int requests = 1;
  // Minimum spacing between sends of source machines (machines without any
  // receive). 0 = back to back.
  double send_interval = 0.0;
  // kBlock: a sender waits while queued + in-flight messages fill the
  // channel. kError: the message is dropped and counted as lost.
  OverflowMode overflow = OverflowMode::kBlock;
  std::size_t max_steps = 10'000'000;
};

struct SimMetrics {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;
  std::uint64_t retransmissions = 0;     // timer expiries acted upon
  std::uint64_t completed_requests = 0;  // progress transitions taken
  std::uint64_t failed_requests = 0;     // expiries past the retransmit budget
  double mean_response_delay = 0.0;
  std::uint64_t unspecified_events = 0;  // stuck heads discarded at quiescence
  bool deadlocked = false;               // quiescent before termination
  double sim_time = 0.0;
  std::uint64_t in_transit = 0;          // sent, neither delivered nor lost

  bool operator==(const SimMetrics&) const = default;
};

struct SimResult {
  SimMetrics metrics;
  msc::MscTrace trace;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate(const SimConfig& cfg, const System& system);

/**
 * Discrete-event run. Sends, receives and internal steps take no time;
 * messages travel for the channel delay and timers expire `timeout_after`
 * after entering a state with a timeout. At each instant the first enabled
 * transition in declaration order fires, repeatedly, before time advances.
 * Messages wait in their queue until received. Once nothing else can happen,
 * a head message the receiver's current state cannot take is discarded and
 * counted as unspecified, and the run goes on. The run ends at proper
 * termination, when nothing is left to happen, or at `max_time`.
 */
SimResult run_simulation(const System& system, const SimConfig& cfg);

enum class SweepParameter { kNodeCount, kLossProb, kSendRate };

struct MeanMetrics {
  double sent = 0;
  double delivered = 0;
  double lost = 0;
  double retransmissions = 0;
  double completed = 0;
  double failed = 0;
  double mean_delay = 0;
  double unspecified = 0;
  double deadlocked_frac = 0;
  double sim_time = 0;

  /// (lost + failed) / sent, 0 when nothing was sent.
  double error_rate() const { return sent > 0 ? (lost + failed) / sent : 0.0; }
};

struct SweepRow {
  double value = 0;
  MeanMetrics mean;
};

/// Builds the system for one sweep value; called once per value.
using SystemFactory = std::function<System(double value, const SimConfig& cfg)>;

class SweepError : public std::runtime_error {
 public:
  SweepError(double value, int run, const std::string& what)
      : std::runtime_error(what), value_(value), run_(run) {}
  double value() const { return value_; }
  int run() const { return run_; }

 private:
  double value_;
  int run_;
};

MeanMetrics mean_of(const std::vector<SimMetrics>& runs);

/**
 * For each value: `runs_per_value` runs with seeds base.seed + run index,
 * averaged field-wise. LossProb sets loss_prob, SendRate sets
 * send_interval = 1 / value, NodeCount is left to the factory.
 */
std::vector<SweepRow> sweep(const SystemFactory& factory,
                            SweepParameter parameter,
                            const std::vector<double>& values,
                            const SimConfig& base, int runs_per_value);

std::string export_csv(const std::vector<SweepRow>& table);

/// Locale-independent shortest round-trip decimal.
std::string format_number(double value);

}  // namespace cfsm::sim

#endif  // CFSM_SIM_HPP_
