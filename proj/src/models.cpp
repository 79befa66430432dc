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

#include "cfsm/models.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace cfsm::models {

namespace {

class MachineBuilder {
 public:
  explicit MachineBuilder(std::string name) { machine_.name = std::move(name); }

  MachineBuilder& state(const std::string& name) {
    machine_.states.push_back(name);
    if (machine_.states.size() == 1) machine_.initial = name;
    return *this;
  }
  MachineBuilder& terminal(const std::string& name) {
    machine_.terminals.push_back(name);
    return *this;
  }
  MachineBuilder& on(const std::string& from, Action action, const std::string& to,
                     bool progress = false) {
    machine_.transitions.push_back({from, std::move(action), to, progress});
    return *this;
  }
  Machine done() { return std::move(machine_); }

 private:
  Machine machine_;
};

std::string node_name(int i) { return "N" + std::to_string(i); }
std::string to_node(int i) { return "ma_n" + std::to_string(i); }
std::string from_node(int i) { return "n" + std::to_string(i) + "_ma"; }
std::string inforequest(int i) { return "inforequest" + std::to_string(i); }
std::string inforesponse(int i) { return "inforesponse" + std::to_string(i); }

struct Nmp {
  std::vector<Machine> machines;
  std::vector<Channel> channels;
};

Nmp build_nmp(int nodes, bool lossy, int requests) {
  const auto round = [requests](const std::string& base, int r) {
    return requests == 1 ? base : base + "_r" + std::to_string(r);
  };
  // State entered after finishing round r.
  const auto next_round = [&](const std::string& idle, int r) {
    return r < requests ? round(idle, r + 1) : std::string("Done");
  };

  Nmp nmp;
  nmp.channels.push_back({"env_sa", "Env", "SA", kNmpCapacity, false});
  nmp.channels.push_back({"sa_ma", "SA", "MA", kNmpCapacity, lossy});
  nmp.channels.push_back({"ma_sa", "MA", "SA", kNmpCapacity, lossy});
  for (int i = 1; i <= nodes; ++i) {
    nmp.channels.push_back({to_node(i), "MA", node_name(i), kNmpCapacity, lossy});
    nmp.channels.push_back({from_node(i), node_name(i), "MA", kNmpCapacity, lossy});
  }

  // Env: one monitoring request per round, then stops.
  MachineBuilder env("Env");
  env.state("Start");
  for (int r = 1; r < requests; ++r) env.state("Sent" + std::to_string(r));
  env.state("Sent").terminal("Sent");
  for (int r = 1; r <= requests; ++r) {
    const auto from = r == 1 ? std::string("Start") : "Sent" + std::to_string(r - 1);
    const auto to = r == requests ? std::string("Sent") : "Sent" + std::to_string(r);
    env.on(from, Action::Send("req", "env_sa"), to);
  }
  nmp.machines.push_back(env.done());

  // SA: idle until the environment asks, dispatch Mreq to the MA and arm the
  // timer; a timeout goes back to dispatch (retransmission), the MA's resp
  // completes the round.
  MachineBuilder sa("SA");
  for (int r = 1; r <= requests; ++r) {
    sa.state(round("Idle", r)).state(round("Dispatch", r)).state(round("Wait", r));
  }
  sa.state("Done").terminal("Done");
  for (int r = 1; r <= requests; ++r) {
    sa.on(round("Idle", r), Action::Recv("req", "env_sa"), round("Dispatch", r));
    sa.on(round("Dispatch", r), Action::Send("Mreq", "sa_ma"), round("Wait", r));
    sa.on(round("Wait", r), Action::Recv("resp", "ma_sa"), next_round("Idle", r), true);
    sa.on(round("Wait", r), Action::Timeout(), round("Dispatch", r));
  }
  nmp.machines.push_back(sa.done());

  // MA: on Mreq, visit the nodes one after another (inforequest_i out,
  // inforesponse_i back, retransmitting on timeout), then report resp to SA.
  // Duplicate Mreqs caused by SA retransmissions are swallowed while busy and
  // after finishing, so SA never sees two responses to one request.
  MachineBuilder ma("MA");
  for (int r = 1; r <= requests; ++r) {
    ma.state(round("Idle", r));
    for (int i = 1; i <= nodes; ++i) {
      ma.state(round("Poll_" + node_name(i), r)).state(round("Wait_" + node_name(i), r));
    }
    ma.state(round("Reply", r));
  }
  ma.state("Done").terminal("Done");
  for (int r = 1; r <= requests; ++r) {
    ma.on(round("Idle", r), Action::Recv("Mreq", "sa_ma"), round("Poll_N1", r));
    for (int i = 1; i <= nodes; ++i) {
      const auto poll = round("Poll_" + node_name(i), r);
      const auto wait = round("Wait_" + node_name(i), r);
      const auto after = i < nodes ? round("Poll_" + node_name(i + 1), r) : round("Reply", r);
      ma.on(poll, Action::Send(inforequest(i), to_node(i)), wait);
      ma.on(wait, Action::Recv(inforesponse(i), from_node(i)), after);
      ma.on(wait, Action::Recv("Mreq", "sa_ma"), wait);
      ma.on(wait, Action::Timeout(), poll);
    }
    ma.on(round("Reply", r), Action::Send("resp", "ma_sa"), next_round("Idle", r));
  }
  ma.on("Done", Action::Recv("Mreq", "sa_ma"), "Done");
  nmp.machines.push_back(ma.done());

  // Node i: answer the MA's status query once; later duplicates are dropped.
  // The node's acknowledgement is folded into inforesponse_i (the protocol's
  // description is ambiguous about which side acknowledges).
  for (int i = 1; i <= nodes; ++i) {
    MachineBuilder node(node_name(i));
    for (int r = 1; r <= requests; ++r) {
      node.state(round("Idle", r)).state(round("Respond", r));
    }
    node.state("Done").terminal("Done");
    for (int r = 1; r <= requests; ++r) {
      node.on(round("Idle", r), Action::Recv(inforequest(i), to_node(i)), round("Respond", r));
      node.on(round("Respond", r), Action::Send(inforesponse(i), from_node(i)),
              next_round("Idle", r));
    }
    node.on("Done", Action::Recv(inforequest(i), to_node(i)), "Done");
    nmp.machines.push_back(node.done());
  }
  return nmp;
}

Machine& machine_named(Nmp& nmp, const std::string& name) {
  for (auto& m : nmp.machines) {
    if (m.name == name) return m;
  }
  throw std::logic_error("no machine " + name);
}

Transition& transition_from(Machine& m, const std::string& from, ActionKind kind) {
  for (auto& t : m.transitions) {
    if (t.from == from && t.action.kind == kind) return t;
  }
  throw std::logic_error("no transition from " + from);
}

}  // namespace

System nmp_correct() { return nmp_scaled(2, false); }

System nmp_scaled(int nodes, bool lossy, int requests) {
  if (nodes < 1 || nodes > kMaxNodes) {
    throw std::out_of_range("node count must be in [1, 32], got " + std::to_string(nodes));
  }
  if (requests < 1) throw std::out_of_range("requests must be at least 1");
  auto nmp = build_nmp(nodes, lossy, requests);
  return build_system(std::move(nmp.machines), std::move(nmp.channels), "nmp");
}

System nmp_variant(NmpVariant variant) {
  auto nmp = build_nmp(2, false, 1);
  std::string name = "nmp";
  switch (variant) {
    case NmpVariant::kCorrect:
      break;
    case NmpVariant::kDeadlockFault: {
      // The MA's host may fail before it ever answers; a failed MA keeps
      // consuming requests silently. SA retransmits once and then waits
      // without a timer, so both sides end up waiting for each other.
      name = "nmp_deadlock";
      auto& sa = machine_named(nmp, "SA");
      sa.states.insert(sa.states.end() - 1, {"Retry", "Rewait"});
      transition_from(sa, "Wait", ActionKind::kTimeout).to = "Retry";
      sa.transitions.push_back({"Retry", Action::Send("Mreq", "sa_ma"), "Rewait", false});
      sa.transitions.push_back({"Rewait", Action::Recv("resp", "ma_sa"), "Done", true});
      auto& ma = machine_named(nmp, "MA");
      ma.states.push_back("Crashed");
      ma.transitions.push_back({"Idle", Action::Tau(), "Crashed", false});
      ma.transitions.push_back({"Crashed", Action::Recv("Mreq", "sa_ma"), "Crashed", false});
      break;
    }
    case NmpVariant::kUnspecifiedFault: {
      // SA's timer is a generic one: on expiry it resends Mreq but then
      // falls back to Idle, where the MA's eventual resp cannot be consumed.
      name = "nmp_unspecified";
      auto& sa = machine_named(nmp, "SA");
      sa.states.insert(sa.states.end() - 1, "Resend");
      transition_from(sa, "Wait", ActionKind::kTimeout).to = "Resend";
      sa.transitions.push_back({"Resend", Action::Send("Mreq", "sa_ma"), "Idle", false});
      break;
    }
    case NmpVariant::kLivelockFault: {
      // Depending on the collected data the MA may start forwarding the
      // response to itself forever instead of reporting it.
      name = "nmp_livelock";
      nmp.channels.push_back({"ma_self", "MA", "MA", kNmpCapacity, false});
      auto& ma = machine_named(nmp, "MA");
      ma.states.push_back("Forward");
      ma.states.push_back("Loop");
      ma.transitions.push_back({"Reply", Action::Tau(), "Forward", false});
      ma.transitions.push_back({"Forward", Action::Send("resp", "ma_self"), "Loop", false});
      ma.transitions.push_back({"Loop", Action::Recv("resp", "ma_self"), "Forward", false});
      break;
    }
  }
  return build_system(std::move(nmp.machines), std::move(nmp.channels), name);
}

System ping_pong(const PingPongOptions& options) {
  MachineBuilder a("A");
  a.state("s0").state("s1");
  a.on("s0", Action::Send("ping", "c1"), "s1", options.progress_send);
  a.on("s1", Action::Recv("pong", "c2"), "s0");
  if (options.timeout) a.on("s1", Action::Timeout(), "s0");
  MachineBuilder b("B");
  b.state("t0").state("t1");
  b.on("t0", Action::Recv("ping", "c1"), "t1", options.progress_recv);
  b.on("t1", Action::Send("pong", "c2"), "t0");
  if (options.terminal) {
    a.terminal("s0");
    b.terminal("t0");
  }
  std::vector<Channel> channels{{"c1", "A", "B", 1, options.lossy}, {"c2", "B", "A", 1, false}};
  return build_system({a.done(), b.done()}, std::move(channels),
                      options.lossy ? "pingpong_lossy" : "pingpong");
}

System stream(std::size_t messages, bool lossy) {
  MachineBuilder env("Env");
  for (std::size_t i = 0; i <= messages; ++i) env.state("s" + std::to_string(i));
  env.terminal("s" + std::to_string(messages));
  for (std::size_t i = 0; i < messages; ++i) {
    env.on("s" + std::to_string(i), Action::Send("data", "link"), "s" + std::to_string(i + 1));
  }
  MachineBuilder sink("Sink");
  sink.state("Ready").terminal("Ready");
  sink.on("Ready", Action::Recv("data", "link"), "Ready", true);
  return build_system({env.done(), sink.done()}, {{"link", "Env", "Sink", kNmpCapacity, lossy}},
                      "stream");
}

std::vector<std::string> bundled_names() {
  return {"nmp_correct", "nmp_deadlock", "nmp_unspecified", "nmp_livelock",
          "nmp_scaled",  "pingpong",     "pingpong_lossy",  "stream"};
}

System bundled(std::string_view name, const ModelParams& params) {
  if (name == "nmp_correct") return nmp_correct();
  if (name == "nmp_deadlock") return nmp_variant(NmpVariant::kDeadlockFault);
  if (name == "nmp_unspecified") return nmp_variant(NmpVariant::kUnspecifiedFault);
  if (name == "nmp_livelock") return nmp_variant(NmpVariant::kLivelockFault);
  if (name == "nmp_scaled") return nmp_scaled(params.nodes, params.lossy, params.requests);
  if (name == "pingpong") return ping_pong({.progress_send = true});
  if (name == "pingpong_lossy") return ping_pong({.lossy = true, .progress_send = true});
  if (name == "stream") {
    return stream(static_cast<std::size_t>(std::max(params.requests, 0)), params.lossy);
  }
  throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

}  // namespace cfsm::models
