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

#include <string>
#include <vector>

#include "cfsm/model.hpp"
#include "cfsm/models.hpp"
#include "doctest.h"

using namespace cfsm;

namespace {

std::vector<Machine> pingpong_machines() {
  Machine a{"A", {"s0", "s1"}, "s0", {}, {}};
  a.transitions = {{"s0", Action::Send("ping", "c1"), "s1", false},
                   {"s1", Action::Recv("pong", "c2"), "s0", false}};
  Machine b{"B", {"t0", "t1"}, "t0", {}, {}};
  b.transitions = {{"t0", Action::Recv("ping", "c1"), "t1", false},
                   {"t1", Action::Send("pong", "c2"), "t0", false}};
  return {a, b};
}

std::vector<Channel> pingpong_channels() {
  return {{"c1", "A", "B", 1, false}, {"c2", "B", "A", 1, false}};
}

ModelError build_error(std::vector<Machine> machines, std::vector<Channel> channels) {
  try {
    build_system(std::move(machines), std::move(channels), "x");
  } catch (const ModelError& e) {
    return e;
  }
  FAIL("expected a ModelError");
  return {ModelErrorKind::kInvalidName, "", {}};
}

}  // namespace

TEST_CASE("build_system accepts ping-pong") {
  auto sys = build_system(pingpong_machines(), pingpong_channels(), "pingpong");
  CHECK(sys.machines().size() == 2);
  CHECK(sys.channels().size() == 2);
  CHECK(sys.messages() == std::vector<std::string>{"ping", "pong"});
  CHECK(sys.sender(0) == 0);
  CHECK(sys.receiver(0) == 1);
  CHECK(sys == models::ping_pong());
}

TEST_CASE("build_system accepts the empty system") {
  auto sys = build_system({}, {}, "empty");
  CHECK(sys.machines().empty());
  CHECK(sys.channels().empty());
}

TEST_CASE("build_system rejects malformed input") {
  SUBCASE("unknown channel") {
    auto ms = pingpong_machines();
    ms[0].transitions[0].action.channel = "c9";
    auto e = build_error(ms, pingpong_channels());
    CHECK(e.kind() == ModelErrorKind::kUnknownChannel);
    CHECK(e.element() == "c9");
    CHECK(std::string(e.what()) == "UnknownChannel(\"c9\")");
  }
  SUBCASE("unknown state") {
    auto ms = pingpong_machines();
    ms[1].transitions[1].to = "t7";
    auto e = build_error(ms, pingpong_channels());
    CHECK(e.kind() == ModelErrorKind::kUnknownState);
    CHECK(e.element() == "t7");
  }
  SUBCASE("unknown initial") {
    auto ms = pingpong_machines();
    ms[0].initial = "nowhere";
    CHECK(build_error(ms, pingpong_channels()).kind() == ModelErrorKind::kUnknownState);
  }
  SUBCASE("terminal not a state") {
    auto ms = pingpong_machines();
    ms[0].terminals = {"s5"};
    CHECK(build_error(ms, pingpong_channels()).kind() == ModelErrorKind::kUnknownState);
  }
  SUBCASE("duplicate machine") {
    auto ms = pingpong_machines();
    ms[1].name = "A";
    auto e = build_error(ms, pingpong_channels());
    CHECK(e.kind() == ModelErrorKind::kDuplicateName);
    CHECK(e.element() == "A");
  }
  SUBCASE("channel named like a machine") {
    auto cs = pingpong_channels();
    cs[1].name = "B";
    CHECK(build_error(pingpong_machines(), cs).kind() == ModelErrorKind::kDuplicateName);
  }
  SUBCASE("duplicate state") {
    auto ms = pingpong_machines();
    ms[0].states.push_back("s0");
    CHECK(build_error(ms, pingpong_channels()).kind() == ModelErrorKind::kDuplicateName);
  }
  SUBCASE("duplicate transition") {
    auto ms = pingpong_machines();
    ms[0].transitions.push_back({"s0", Action::Send("ping", "c1"), "s0", false});
    auto e = build_error(ms, pingpong_channels());
    CHECK(e.kind() == ModelErrorKind::kDuplicateTransition);
  }
  SUBCASE("different actions from one state are fine") {
    auto ms = pingpong_machines();
    ms[0].transitions.push_back({"s0", Action::Tau(), "s0", false});
    ms[0].transitions.push_back({"s0", Action::Send("pong", "c1"), "s0", false});
    CHECK_NOTHROW(build_system(ms, pingpong_channels(), "x"));
  }
  SUBCASE("send on a channel the machine does not own") {
    auto ms = pingpong_machines();
    ms[0].transitions[0].action.channel = "c2";
    auto e = build_error(ms, pingpong_channels());
    CHECK(e.kind() == ModelErrorKind::kChannelEndpointMismatch);
  }
  SUBCASE("recv from a channel addressed elsewhere") {
    auto ms = pingpong_machines();
    ms[1].transitions[0].action.channel = "c2";
    CHECK(build_error(ms, pingpong_channels()).kind() ==
          ModelErrorKind::kChannelEndpointMismatch);
  }
  SUBCASE("zero capacity") {
    auto cs = pingpong_channels();
    cs[0].capacity = 0;
    auto e = build_error(pingpong_machines(), cs);
    CHECK(e.kind() == ModelErrorKind::kZeroCapacity);
    CHECK(e.element() == "c1");
  }
  SUBCASE("channel endpoint is not a machine") {
    auto cs = pingpong_channels();
    cs[0].receiver = "Z";
    CHECK(build_error(pingpong_machines(), cs).kind() == ModelErrorKind::kUnknownMachine);
  }
  SUBCASE("bad identifier") {
    auto ms = pingpong_machines();
    ms[0].states[1] = "1bad";
    CHECK(build_error(ms, pingpong_channels()).kind() == ModelErrorKind::kInvalidName);
  }
}

TEST_CASE("self-channels are allowed") {
  Machine m{"M", {"a"}, "a", {}, {}};
  m.transitions = {{"a", Action::Send("x", "loop"), "a", false},
                   {"a", Action::Recv("x", "loop"), "a", false}};
  CHECK_NOTHROW(build_system({m}, {{"loop", "M", "M", 1, false}}, "self"));
}

TEST_CASE("transitions are grouped by source state") {
  Machine m{"M", {"a", "b"}, "a", {"b", "a"}, {}};
  m.transitions = {{"b", Action::Tau(), "a", false},
                   {"a", Action::Timeout(), "b", false},
                   {"a", Action::Tau(), "b", true}};
  auto sys = build_system({m}, {}, "order");
  const auto& t = sys.machine(0).transitions;
  REQUIRE(t.size() == 3);
  CHECK(t[0].action.kind == ActionKind::kTimeout);
  CHECK(t[1].action.kind == ActionKind::kTau);
  CHECK(t[2].from == "b");
  CHECK(sys.machine(0).terminals == std::vector<std::string>{"a", "b"});
  CHECK(sys.outgoing(0, 0) == std::pair<std::size_t, std::size_t>{0, 2});
  CHECK(sys.outgoing(0, 1) == std::pair<std::size_t, std::size_t>{2, 3});
}

TEST_CASE("describe actions") {
  CHECK(describe(Action::Send("m", "c")) == "send m to c");
  CHECK(describe(Action::Recv("m", "c")) == "recv m from c");
  CHECK(describe(Action::Timeout()) == "timeout");
  CHECK(describe(Action::Tau()) == "tau");
}
