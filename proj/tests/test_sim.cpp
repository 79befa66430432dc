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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cfsm/models.hpp"
#include "cfsm/msc.hpp"
#include "cfsm/sim.hpp"
#include "doctest.h"
#include "files.hpp"
#include "random_system.hpp"

using namespace cfsm;
using sim::SimConfig;

namespace {

System with_lossy_channel(const System& base, const std::string& channel) {
  std::vector<Channel> cs(base.channels().begin(), base.channels().end());
  for (auto& c : cs) c.lossy = c.name == channel;
  return build_system({base.machines().begin(), base.machines().end()}, cs, base.name());
}

void check_conservation(const sim::SimMetrics& m) {
  CHECK(m.sent == m.delivered + m.lost + m.in_transit);
}

sim::SystemFactory nmp_factory(bool lossy) {
  return [lossy](double nodes, const SimConfig& cfg) {
    return models::nmp_scaled(static_cast<int>(nodes), lossy, cfg.requests);
  };
}

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("lossless NMP completes its request") {
  auto r = sim::run_simulation(models::nmp_correct(), {.seed = 1, .loss_prob = 0.0});
  CHECK(r.metrics.completed_requests == 1);
  CHECK(r.metrics.lost == 0);
  CHECK(r.metrics.retransmissions == 0);
  CHECK(r.metrics.failed_requests == 0);
  CHECK(!r.metrics.deadlocked);
  CHECK(r.metrics.unspecified_events == 0);
  check_conservation(r.metrics);
  CHECK(r.metrics.in_transit == 0);
  // Env->SA, SA->MA, 2 x (MA->N, N->MA), MA->SA: one hop each.
  CHECK(r.metrics.sent == 7);
  CHECK(r.metrics.sim_time == doctest::Approx(7.0));
  CHECK(r.metrics.mean_response_delay == doctest::Approx(7.0));
  CHECK(msc::render_event_log(r.trace).rfind("msc nmp\n0: send req Env -> env_sa\n", 0) == 0);
}

TEST_CASE("certain loss on SA->MA exhausts the retransmit budget") {
  auto sys = with_lossy_channel(models::nmp_correct(), "sa_ma");
  auto r = sim::run_simulation(sys, {.loss_prob = 1.0, .max_retransmits = 3});
  CHECK(r.metrics.failed_requests == 1);
  CHECK(r.metrics.retransmissions == 3);
  CHECK(r.metrics.completed_requests == 0);
  CHECK(r.metrics.lost == 4);
  CHECK(r.metrics.deadlocked);
  check_conservation(r.metrics);
}

TEST_CASE("binomial loss on the streaming model") {
  const double p = 0.2;
  const double n = 1000;
  const double sigma = std::sqrt(p * (1 - p) / n);
  auto sys = models::stream(1000);
  auto r42 = sim::run_simulation(sys, {.seed = 42, .loss_prob = p, .send_interval = 1.0});
  CHECK(r42.metrics.sent == 1000);
  CHECK(std::abs(static_cast<double>(r42.metrics.lost) / n - p) <= 3 * sigma);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto r = sim::run_simulation(sys, {.seed = seed, .loss_prob = p, .send_interval = 1.0});
    CHECK(r.metrics.sent == 1000);
    CHECK(std::abs(static_cast<double>(r.metrics.lost) / n - p) <= 4 * sigma);
    check_conservation(r.metrics);
  }
}

TEST_CASE("runs are reproducible") {
  auto sys = models::nmp_scaled(4, true, 3);
  SimConfig cfg{.seed = 9, .loss_prob = 0.3, .jitter = 0.7, .timeout_after = 5};
  auto a = sim::run_simulation(sys, cfg);
  auto b = sim::run_simulation(sys, cfg);
  CHECK(a.metrics == b.metrics);
  CHECK(a.trace == b.trace);
  cfg.seed = 10;
  CHECK(!(sim::run_simulation(sys, cfg).trace == a.trace));
}

TEST_CASE("conservation on random systems and models") {
  std::mt19937 rng(77);
  for (int i = 0; i < 200; ++i) {
    auto sys = testing::random_system(rng, {.max_machines = 3, .max_channels = 3});
    SimConfig cfg{.seed = static_cast<std::uint64_t>(i), .loss_prob = 0.3, .jitter = 1.5,
                  .timeout_after = 2, .max_time = 500, .max_steps = 20'000};
    auto r = sim::run_simulation(sys, cfg);
    check_conservation(r.metrics);
    CHECK(r.metrics.delivered + r.metrics.lost <= r.metrics.sent);
  }
  for (int nodes : {1, 5, 9}) {
    auto r = sim::run_simulation(models::nmp_scaled(nodes, true, 2),
                                 {.seed = 3, .loss_prob = 0.25, .timeout_after = 6});
    check_conservation(r.metrics);
  }
}

TEST_CASE("zero loss means no loss and no spurious retransmissions") {
  for (int nodes : {1, 5, 15}) {
    auto r = sim::run_simulation(models::nmp_scaled(nodes, true, 3),
                                 {.loss_prob = 0.0, .delay = 2, .timeout_after = 100});
    CHECK(r.metrics.lost == 0);
    CHECK(r.metrics.retransmissions == 0);
    CHECK(r.metrics.completed_requests == 3);
  }
  // A timer shorter than the round trip retransmits even without loss.
  auto r = sim::run_simulation(models::nmp_correct(), {.delay = 10, .timeout_after = 5});
  CHECK(r.metrics.lost == 0);
  CHECK(r.metrics.retransmissions > 0);
}

TEST_CASE("fault variants under simulation") {
  auto un = sim::run_simulation(models::nmp_variant(models::NmpVariant::kUnspecifiedFault),
                                {.delay = 10, .timeout_after = 5});
  CHECK(un.metrics.unspecified_events > 0);
  auto ll = sim::run_simulation(models::nmp_variant(models::NmpVariant::kLivelockFault),
                                {.max_time = 1000});
  CHECK(ll.metrics.completed_requests <= 1);
}

TEST_CASE("pacing and congestion") {
  auto sys = models::stream(10, false);
  auto paced = sim::run_simulation(sys, {.delay = 1, .send_interval = 2});
  CHECK(paced.metrics.sim_time == doctest::Approx(19.0));
  CHECK(paced.metrics.lost == 0);

  auto burst = sim::run_simulation(models::stream(100, false),
                                   {.delay = 5, .overflow = OverflowMode::kError});
  CHECK(burst.metrics.lost > 0);
  check_conservation(burst.metrics);
  auto blocked = sim::run_simulation(models::stream(100, false), {.delay = 5});
  CHECK(blocked.metrics.lost == 0);
  CHECK(blocked.metrics.delivered == 100);
}

TEST_CASE("invalid configurations") {
  auto sys = models::nmp_correct();
  CHECK_THROWS_AS(sim::run_simulation(sys, {.loss_prob = 1.5}), sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.loss_prob = -0.1}), sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.delay = -1}), sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.timeout_after = 0}), sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.max_time = 0}), sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.channel_delay = {{"nope", 1.0}}}),
                  sim::InvalidConfig);
  CHECK_THROWS_AS(sim::run_simulation(sys, {.loss_prob = std::nan("")}), sim::InvalidConfig);
}

TEST_CASE("sweeps") {
  SUBCASE("loss probability") {
    auto table = sim::sweep(
        [](double, const SimConfig&) { return models::stream(200); },
        sim::SweepParameter::kLossProb, {0.0, 0.5}, {.seed = 5, .send_interval = 1}, 4);
    REQUIRE(table.size() == 2);
    CHECK(table[0].value == 0.0);
    CHECK(table[0].mean.lost == 0.0);
    CHECK(table[1].mean.lost > 0.0);
  }
  SUBCASE("single run equals the run itself") {
    SimConfig base{.seed = 11, .loss_prob = 0.2};
    auto table = sim::sweep(nmp_factory(true), sim::SweepParameter::kNodeCount, {3}, base, 1);
    auto direct = sim::run_simulation(models::nmp_scaled(3, true), base).metrics;
    REQUIRE(table.size() == 1);
    CHECK(table[0].mean.sent == static_cast<double>(direct.sent));
    CHECK(table[0].mean.lost == static_cast<double>(direct.lost));
    CHECK(table[0].mean.completed == static_cast<double>(direct.completed_requests));
    CHECK(table[0].mean.mean_delay == direct.mean_response_delay);
    CHECK(table[0].mean.sim_time == direct.sim_time);
  }
  SUBCASE("node count trend") {
    auto table = sim::sweep(nmp_factory(true), sim::SweepParameter::kNodeCount, {5, 10, 15},
                            {.seed = 1, .loss_prob = 0.1}, 30);
    REQUIRE(table.size() == 3);
    CHECK(table[0].value == 5);
    CHECK(table[2].value == 15);
    CHECK(table[0].mean.lost <= table[1].mean.lost);
    CHECK(table[1].mean.lost <= table[2].mean.lost);
  }
  SUBCASE("send rate maps to the send interval") {
    auto table = sim::sweep(
        [](double, const SimConfig&) { return models::stream(20, false); },
        sim::SweepParameter::kSendRate, {0.5}, {.delay = 1}, 1);
    CHECK(table[0].mean.sim_time == doctest::Approx(39.0));
  }
  SUBCASE("errors name the value and run") {
    auto bad = [](double v, const SimConfig&) { return models::nmp_scaled(static_cast<int>(v), false); };
    try {
      sim::sweep(bad, sim::SweepParameter::kNodeCount, {2, 99}, {}, 2);
      FAIL("expected SweepError");
    } catch (const sim::SweepError& e) {
      CHECK(e.value() == 99);
    }
    try {
      sim::sweep([](double, const SimConfig&) { return models::nmp_correct(); },
                 sim::SweepParameter::kLossProb, {0.1, 2.0}, {}, 2);
      FAIL("expected SweepError");
    } catch (const sim::SweepError& e) {
      CHECK(e.value() == 2.0);
      CHECK(e.run() == 0);
    }
    CHECK_THROWS_AS(sim::sweep(bad, sim::SweepParameter::kNodeCount, {}, {}, 1),
                    sim::InvalidConfig);
  }
}

TEST_CASE("CSV export") {
  const std::string header =
      "param,sent,delivered,lost,retransmissions,completed,failed,mean_delay,unspecified,"
      "deadlocked_frac,sim_time\n";
  CHECK(sim::export_csv({}) == header);

  auto table = sim::sweep(nmp_factory(true), sim::SweepParameter::kNodeCount, {2, 3, 4},
                          {.seed = 42, .loss_prob = 0.1, .timeout_after = 10}, 10);
  auto csv = sim::export_csv(table);
  CHECK(line_count(csv) == 4);
  CHECK(csv.rfind(header, 0) == 0);
  CHECK(csv == testing::read_file(testing::source_path("tests/golden/nmp_sweep_seed42.csv")));
}

TEST_CASE("number formatting is locale independent and round-trips") {
  CHECK(sim::format_number(0.1) == "0.1");
  CHECK(sim::format_number(1.0) == "1");
  CHECK(sim::format_number(2.5) == "2.5");
  CHECK(sim::format_number(0.0) == "0");
  CHECK(std::stod(sim::format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
