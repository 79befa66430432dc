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

#ifndef CFSM_MODELS_HPP_
#define CFSM_MODELS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cfsm/model.hpp"

namespace cfsm::models {

/**
 * Node Monitoring Protocol: a Static Agent (SA) asks a Mobile Agent (MA) to
 * poll every node's status and report back. An environment machine (Env)
 * issues the monitoring requests so the system is closed.
 *
 * These machines are a reconstruction from the protocol's prose description;
 * the original behaviour was only given as diagrams.
 */
enum class NmpVariant { kCorrect, kDeadlockFault, kUnspecifiedFault, kLivelockFault };

constexpr std::size_t kNmpCapacity = 4;
constexpr int kMaxNodes = 32;

System nmp_correct();
System nmp_variant(NmpVariant variant);

/// nmp_correct generalized to `nodes` nodes polled in order. `lossy` makes
/// every SA<->MA and MA<->node channel lossy. `requests` > 1 unrolls that many
/// monitoring rounds. Throws std::out_of_range for nodes outside [1, 32] or
/// requests < 1.
System nmp_scaled(int nodes, bool lossy, int requests = 1);

struct PingPongOptions {
  bool lossy = false;          // c1 (A -> B) loses messages
  bool timeout = false;        // A retransmits ping on timeout
  bool progress_send = false;  // A's send of ping is a progress transition
  bool progress_recv = false;  // B's receipt of ping is a progress transition
  bool terminal = false;       // s0/t0 are terminal
};

/// Two machines bouncing ping/pong over capacity-1 channels c1 and c2.
System ping_pong(const PingPongOptions& options = {});

/// Env pushes `messages` data messages to Sink over one channel.
System stream(std::size_t messages, bool lossy = true);

struct ModelParams {
  int nodes = 2;
  bool lossy = false;
  int requests = 1;
};

/// Names accepted by bundled().
std::vector<std::string> bundled_names();

/// Looks a bundled model up by name; throws std::invalid_argument if unknown.
/// `params` only affects nmp_scaled (all fields) and stream (requests = message
/// count, lossy).
System bundled(std::string_view name, const ModelParams& params = {});

}  // namespace cfsm::models

#endif  // CFSM_MODELS_HPP_
