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

#include <random>
#include <vector>

#include "cfsm/models.hpp"
#include "cfsm/semantics.hpp"
#include "doctest.h"
#include "random_system.hpp"

using namespace cfsm;

namespace {

GlobalState make_state(const System& sys, std::vector<std::uint16_t> locals,
                       std::vector<std::vector<std::string>> queues) {
  std::vector<std::vector<std::uint16_t>> ids;
  for (const auto& q : queues) {
    ids.emplace_back();
    for (const auto& m : q) ids.back().push_back(static_cast<std::uint16_t>(sys.find_message(m)));
  }
  return GlobalState(locals, ids);
}

std::size_t total_queued(const GlobalState& g) {
  std::size_t n = 0;
  for (std::size_t c = 0; c < g.channel_count(); ++c) n += g.queue(c).size();
  return n;
}

}  // namespace

TEST_CASE("initial state") {
  auto sys = models::ping_pong();
  CHECK(to_string(sys, initial_state(sys)) == "(s0,t0|c1:[]|c2:[])");
  auto empty = build_system({}, {}, "empty");
  CHECK(to_string(empty, initial_state(empty)) == "()");
  CHECK(classify_state(empty, initial_state(empty)) == StateClass::kProperTermination);
}

TEST_CASE("ping-pong enabled transitions and successors") {
  auto sys = models::ping_pong();
  auto g0 = initial_state(sys);
  auto en = enabled_transitions(sys, g0);
  REQUIRE(en.size() == 1);
  CHECK(en[0] == TransitionRef{0, 0});

  auto next = apply_transition(sys, g0, en[0]);
  REQUIRE(next.size() == 1);
  CHECK(next[0].label == EventLabel::kSend);
  CHECK(to_string(sys, next[0].state) == "(s1,t0|c1:[ping]|c2:[])");

  auto en1 = enabled_transitions(sys, next[0].state);
  REQUIRE(en1.size() == 1);
  CHECK(en1[0] == TransitionRef{1, 0});
  auto after = apply_transition(sys, next[0].state, en1[0]);
  REQUIRE(after.size() == 1);
  CHECK(after[0].label == EventLabel::kRecv);
  CHECK(to_string(sys, after[0].state) == "(s1,t1|c1:[]|c2:[])");

  CHECK_THROWS_AS(apply_transition(sys, g0, TransitionRef{1, 0}), TransitionNotEnabled);
}

TEST_CASE("lossy send branches") {
  auto sys = models::ping_pong({.lossy = true});
  auto out = apply_transition(sys, initial_state(sys), {0, 0});
  REQUIRE(out.size() == 2);
  CHECK(out[0].label == EventLabel::kSend);
  CHECK(to_string(sys, out[0].state) == "(s1,t0|c1:[ping]|c2:[])");
  CHECK(out[1].label == EventLabel::kLose);
  CHECK(to_string(sys, out[1].state) == "(s1,t0|c1:[]|c2:[])");
  CHECK(classify_state(sys, out[1].state) == StateClass::kDeadlock);
}

TEST_CASE("timeout modes") {
  Machine sa{"SA", {"Wait", "Done", "Idle"}, "Wait", {"Done"}, {}};
  sa.transitions = {{"Wait", Action::Recv("resp", "back"), "Done", true},
                    {"Wait", Action::Timeout(), "Idle", false}};
  Machine ma{"MA", {"m0"}, "m0", {"m0"}, {}};
  ma.transitions = {{"m0", Action::Send("resp", "back"), "m0", false}};
  auto sys = build_system({sa, ma}, {{"back", "MA", "SA", 2, false}}, "timers");

  auto idle = initial_state(sys);
  CHECK(is_enabled(sys, idle, {0, 1}));

  auto queued = make_state(sys, {0, 0}, {{"resp"}});
  auto lazy = enabled_transitions(sys, queued);
  CHECK(lazy == std::vector<TransitionRef>{{0, 0}, {1, 0}});
  auto eager = enabled_transitions(sys, queued, {.timeout_mode = TimeoutMode::kEager});
  CHECK(eager == std::vector<TransitionRef>{{0, 0}, {0, 1}, {1, 0}});
}

TEST_CASE("overflow modes") {
  Machine a{"A", {"x"}, "x", {}, {}};
  a.transitions = {{"x", Action::Send("m", "c"), "x", false}};
  Machine b{"B", {"y"}, "y", {}, {}};
  auto sys = build_system({a, b}, {{"c", "A", "B", 1, false}}, "ovf");
  auto full = make_state(sys, {0, 0}, {{"m"}});

  CHECK(enabled_transitions(sys, full).empty());
  CHECK(classify_state(sys, full) == StateClass::kUnspecifiedReception);

  SemanticsOptions err{.overflow_mode = OverflowMode::kError};
  REQUIRE(enabled_transitions(sys, full, err).size() == 1);
  auto out = apply_transition(sys, full, {0, 0}, err);
  REQUIRE(out.size() == 1);
  CHECK(out[0].label == EventLabel::kOverflow);
  CHECK(out[0].state.overflow());
  CHECK(out[0].state.queue(0).size() == 1);
  CHECK(to_string(sys, out[0].state) == "(x,y|c:[m])!overflow");
  CHECK(classify_state(sys, out[0].state, err) == StateClass::kOverflow);
}

TEST_CASE("a full lossy channel can only lose") {
  Machine a{"A", {"x"}, "x", {}, {}};
  a.transitions = {{"x", Action::Send("m", "c"), "x", false}};
  Machine b{"B", {"y"}, "y", {}, {}};
  auto sys = build_system({a, b}, {{"c", "A", "B", 1, true}}, "lossyfull");
  auto full = make_state(sys, {0, 0}, {{"m"}});
  for (auto mode : {OverflowMode::kBlock, OverflowMode::kError}) {
    auto out = apply_transition(sys, full, {0, 0}, {.overflow_mode = mode});
    REQUIRE(out.size() == 1);
    CHECK(out[0].label == EventLabel::kLose);
    CHECK(out[0].state == full);
  }
}

TEST_CASE("classification examples") {
  auto term = models::ping_pong({.terminal = true});
  CHECK(classify_state(term, initial_state(term)) == StateClass::kProperTermination);
  CHECK(classify_state(term, make_state(term, {0, 0}, {{"ping"}, {}})) == StateClass::kRunning);

  Machine a{"A", {"a0", "a1"}, "a0", {}, {}};
  a.transitions = {{"a0", Action::Send("bad", "c"), "a1", false},
                   {"a0", Action::Send("ping", "c"), "a1", false}};
  Machine b{"B", {"b0"}, "b0", {}, {}};
  b.transitions = {{"b0", Action::Recv("ping", "c"), "b0", false}};
  auto sys = build_system({a, b}, {{"c", "A", "B", 1, false}}, "bad");
  auto stuck = make_state(sys, {1, 0}, {{"bad"}});
  CHECK(classify_state(sys, stuck) == StateClass::kUnspecifiedReception);
  CHECK(unreceivable_head(sys, stuck) == 0);
  CHECK(classify_state(sys, make_state(sys, {1, 0}, {{}})) == StateClass::kDeadlock);
  CHECK(unreceivable_head(sys, make_state(sys, {1, 0}, {{}})) == -1);
}

TEST_CASE("state ordering and hashing follow the packed form") {
  auto sys = models::ping_pong();
  auto a = initial_state(sys);
  auto b = apply_transition(sys, a, {0, 0})[0].state;
  CHECK(a != b);
  CHECK((a < b || b < a));
  CHECK(GlobalStateHash{}(a) == GlobalStateHash{}(initial_state(sys)));
}

// Random walks over random systems; every step checks the local laws.
TEST_CASE("semantic properties on random systems") {
  std::mt19937 rng(20260415);
  testing::RandomShape shape{.max_machines = 3, .max_states = 3, .max_channels = 3,
                             .max_capacity = 2};
  int steps_checked = 0;
  for (int sys_i = 0; sys_i < 300; ++sys_i) {
    auto sys = testing::random_system(rng, shape);
    for (auto opts : {SemanticsOptions{},
                      SemanticsOptions{TimeoutMode::kEager, OverflowMode::kError}}) {
      for (int walk = 0; walk < 5; ++walk) {
        auto g = initial_state(sys);
        for (int step = 0; step < 30 && !g.overflow(); ++step) {
          auto cls = classify_state(sys, g, opts);
          auto en = enabled_transitions(sys, g, opts);
          CHECK(en == enabled_transitions(sys, g, opts));
          CHECK(std::is_sorted(en.begin(), en.end()));

          bool all_term = true;
          for (std::size_t m = 0; m < g.machine_count(); ++m)
            all_term = all_term && sys.is_terminal(m, g.local(m));
          bool empty = total_queued(g) == 0;
          if (all_term && empty) {
            CHECK(cls == StateClass::kProperTermination);
          } else if (!en.empty()) {
            CHECK(cls == StateClass::kRunning);
          } else {
            CHECK(cls == (unreceivable_head(sys, g) >= 0 ? StateClass::kUnspecifiedReception
                                                         : StateClass::kDeadlock));
          }
          if (en.empty()) break;

          auto ref = en[std::uniform_int_distribution<std::size_t>(0, en.size() - 1)(rng)];
          auto out = apply_transition(sys, g, ref, opts);
          CHECK(out == apply_transition(sys, g, ref, opts));
          const auto& tr = sys.transition(ref.machine, ref.transition);
          bool lossy_room = tr.kind == ActionKind::kSend && sys.channel(tr.channel).lossy &&
                            g.queue(tr.channel).size() < sys.channel(tr.channel).capacity;
          CHECK((out.size() == 2) == lossy_room);
          CHECK(!out.empty());

          for (const auto& s : out) {
            CHECK(s.state.local(ref.machine) == tr.to);
            CHECK(total_queued(s.state) <= total_queued(g) + 1);
            if (!s.state.overflow()) {
              for (std::size_t c = 0; c < s.state.channel_count(); ++c)
                CHECK(s.state.queue(c).size() <= sys.channel(c).capacity);
            }
            if (tr.kind == ActionKind::kRecv) {
              auto before = g.queue(tr.channel);
              auto after = s.state.queue(tr.channel);
              REQUIRE(!before.empty());
              CHECK(before.front() == tr.message);
              CHECK(std::equal(before.begin() + 1, before.end(), after.begin(), after.end()));
            }
          }
          g = out[std::uniform_int_distribution<std::size_t>(0, out.size() - 1)(rng)].state;
          ++steps_checked;
        }
      }
    }
  }
  CHECK(steps_checked > 1000);
}
