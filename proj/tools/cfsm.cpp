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

// cfsm: validate, simulate, chart and format CFSM protocol models.
//
// Exit codes: 0 clean, 1 diagnostics found, 2 usage or parse error,
// 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "cfsm/dsl.hpp"
#include "cfsm/models.hpp"
#include "cfsm/msc.hpp"
#include "cfsm/reachability.hpp"
#include "cfsm/sim.hpp"

namespace {

using namespace cfsm;

constexpr int kClean = 0;
constexpr int kFindings = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Source {
  std::string file;
  std::string model;
  models::ModelParams params;

  void add_options(CLI::App* cmd) {
    cmd->add_option("file", file, "model file (.cfsm)");
    cmd->add_option("--model", model, "bundled model name (see `cfsm model list`)");
    cmd->add_option("--nodes", params.nodes, "node count for nmp_scaled");
    cmd->add_flag("--lossy", params.lossy, "lossy channels for nmp_scaled and stream");
    cmd->add_option("--requests", params.requests,
                    "monitoring rounds (nmp_scaled) or message count (stream)");
  }

  System load() const {
    if (file.empty() == model.empty()) {
      throw UsageError("give exactly one of a model file or --model");
    }
    if (!model.empty()) return load_bundled(model, params);
    std::ifstream in(file, std::ios::binary);
    if (!in) throw UsageError("cannot read " + file);
    std::ostringstream text;
    text << in.rdbuf();
    auto result = dsl::parse(text.str());
    if (auto* diags = std::get_if<std::vector<dsl::ParseDiagnostic>>(&result)) {
      std::cerr << dsl::render(*diags, file);
      throw UsageError(file + ": not a valid model");
    }
    return std::get<System>(std::move(result));
  }

  static System load_bundled(const std::string& name, const models::ModelParams& params) {
    try {
      return models::bundled(name, params);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    } catch (const std::out_of_range& e) {
      throw UsageError(e.what());
    }
  }
};

struct Semantics {
  std::string timeout_mode = "lazy";
  std::string overflow = "block";
  std::size_t max_states = ExploreLimits{}.max_states;
  std::optional<std::size_t> max_depth;

  void add_options(CLI::App* cmd) {
    cmd->add_option("--timeout-mode", timeout_mode, "lazy or eager")
        ->check(CLI::IsMember({"lazy", "eager"}));
    cmd->add_option("--overflow", overflow, "block or error")
        ->check(CLI::IsMember({"block", "error"}));
    cmd->add_option("--max-states", max_states, "state limit")->check(CLI::PositiveNumber);
    cmd->add_option("--max-depth", max_depth, "BFS depth limit");
  }

  SemanticsOptions options() const {
    return {timeout_mode == "eager" ? TimeoutMode::kEager : TimeoutMode::kLazy,
            overflow == "error" ? OverflowMode::kError : OverflowMode::kBlock};
  }
  ExploreLimits limits() const { return {max_states, max_depth}; }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw UsageError("cannot write " + path);
}

std::string event_log(const ReachabilityGraph& graph, const std::vector<std::size_t>& path) {
  return msc::render_event_log(
      msc::trace_from_path(graph.system(), steps_of(graph, path), graph.options()));
}

// --- validate ----------------------------------------------------------------

struct ValidateCmd {
  Source source;
  Semantics semantics;
  std::string json_path, dot_path, msc_path;

  int run() const {
    const System system = source.load();
    const auto graph = explore(system, semantics.options(), semantics.limits());
    const auto diags = run_detectors(graph);

    std::cout << "system " << system.name() << ": " << graph.state_count() << " states, "
              << graph.edges().size() << " edges\n";
    if (graph.truncated()) std::cout << "warning: exploration truncated\n";
    std::cout << diags.size() << (diags.size() == 1 ? " diagnostic\n" : " diagnostics\n");

    std::map<DiagnosticKind, std::size_t> counts;
    for (const auto& d : diags) ++counts[d.kind];
    for (const auto& [kind, n] : counts) std::cout << "  " << to_string(kind) << ": " << n << "\n";

    constexpr std::size_t kShown = 10;
    for (std::size_t i = 0; i < diags.size() && i < kShown; ++i) {
      std::cout << to_string(diags[i].kind) << ": " << diags[i].detail << "\n";
    }
    if (diags.size() > kShown) std::cout << "... " << diags.size() - kShown << " more\n";

    const Diagnostic* witness = nullptr;
    for (const auto& d : diags) {
      if (d.state) {
        witness = &d;
        break;
      }
    }
    std::string log;
    if (witness != nullptr) {
      log = event_log(graph, witness->path);
      std::cout << "counterexample (" << to_string(witness->kind) << "):\n" << log;
    }

    if (!json_path.empty()) write_file(json_path, export_json(graph, diags));
    if (!dot_path.empty()) write_file(dot_path, export_dot(graph));
    if (!msc_path.empty()) write_file(msc_path, witness ? log : msc::render_event_log(msc::empty_trace(system)));
    return diags.empty() && !graph.truncated() ? kClean : kFindings;
  }
};

// --- msc -------------------------------------------------------------------

struct MscCmd {
  Source source;
  Semantics semantics;
  std::string target = "deadlock";
  bool diagram = false;

  int run() const {
    const System system = source.load();
    const auto graph = explore(system, semantics.options(), semantics.limits());
    std::optional<std::vector<std::size_t>> path;
    auto first_of = [&path](const std::vector<Diagnostic>& diags) {
      if (!diags.empty()) path = diags.front().path;
    };
    if (target == "deadlock") first_of(find_deadlocks(graph));
    if (target == "unspec") first_of(find_unspecified_receptions(graph));
    if (target == "livelock") first_of(find_livelocks(graph));
    if (target == "done") {
      for (std::size_t s = 0; s < graph.state_count(); ++s) {
        if (graph.state_class(s) == StateClass::kProperTermination) {
          path = shortest_path(graph, s);
          break;
        }
      }
    }
    if (!path) {
      std::cerr << "no " << target << " state reachable\n";
      return kFindings;
    }
    auto trace = msc::trace_from_path(system, steps_of(graph, *path), graph.options());
    std::cout << (diagram ? msc::render_sequence_diagram(trace) : msc::render_event_log(trace));
    return kClean;
  }
};

// --- simulate ----------------------------------------------------------------

struct SimulateCmd {
  Source source;
  sim::SimConfig cfg;
  std::string overflow = "block";
  int runs = 1;
  std::string sweep_param;
  std::vector<double> values;
  std::string csv_path, msc_path;

  static void print_line(const char* key, double v) {
    std::cout << key << ':' << sim::format_number(v) << '\n';
  }

  int run() {
    cfg.requests = source.params.requests;
    cfg.overflow = overflow == "error" ? OverflowMode::kError : OverflowMode::kBlock;
    if (runs < 1) throw UsageError("--runs must be at least 1");
    if (!sweep_param.empty()) return run_sweep();
    if (!values.empty()) throw UsageError("--values needs --sweep");

    const System system = source.load();
    std::vector<sim::SimMetrics> all;
    for (int r = 0; r < runs; ++r) {
      sim::SimConfig one = cfg;
      one.seed = cfg.seed + static_cast<std::uint64_t>(r);
      auto result = run_checked(system, one);
      if (r == 0 && !msc_path.empty()) write_file(msc_path, msc::render_event_log(result.trace));
      all.push_back(result.metrics);
    }
    if (runs == 1) {
      const auto& m = all.front();
      print_line("sent", static_cast<double>(m.sent));
      print_line("delivered", static_cast<double>(m.delivered));
      print_line("lost", static_cast<double>(m.lost));
      print_line("in_transit", static_cast<double>(m.in_transit));
      print_line("retransmissions", static_cast<double>(m.retransmissions));
      print_line("completed", static_cast<double>(m.completed_requests));
      print_line("failed", static_cast<double>(m.failed_requests));
      print_line("mean_delay", m.mean_response_delay);
      print_line("unspecified", static_cast<double>(m.unspecified_events));
      print_line("deadlocked", m.deadlocked ? 1 : 0);
      print_line("sim_time", m.sim_time);
      return kClean;
    }
    const auto mean = sim::mean_of(all);
    print_line("runs", runs);
    print_line("sent", mean.sent);
    print_line("delivered", mean.delivered);
    print_line("lost", mean.lost);
    print_line("retransmissions", mean.retransmissions);
    print_line("completed", mean.completed);
    print_line("failed", mean.failed);
    print_line("mean_delay", mean.mean_delay);
    print_line("unspecified", mean.unspecified);
    print_line("deadlocked_frac", mean.deadlocked_frac);
    print_line("sim_time", mean.sim_time);
    print_line("error_rate", mean.error_rate());
    return kClean;
  }

  static sim::SimResult run_checked(const System& system, const sim::SimConfig& cfg) {
    try {
      return sim::run_simulation(system, cfg);
    } catch (const sim::InvalidConfig& e) {
      throw UsageError(e.what());
    }
  }

  int run_sweep() {
    if (values.empty()) throw UsageError("--sweep needs --values");
    sim::SweepParameter parameter = sim::SweepParameter::kLossProb;
    sim::SystemFactory factory;
    if (sweep_param == "nodes") {
      parameter = sim::SweepParameter::kNodeCount;
      if (source.model != "nmp_scaled") throw UsageError("--sweep nodes needs --model nmp_scaled");
      for (double v : values) {
        if (v != static_cast<int>(v) || v < 1 || v > models::kMaxNodes) {
          throw UsageError("node counts must be integers in [1, 32]");
        }
      }
      const auto params = source.params;
      factory = [params](double nodes, const sim::SimConfig&) {
        auto p = params;
        p.nodes = static_cast<int>(nodes);
        return models::bundled("nmp_scaled", p);
      };
    } else {
      parameter = sweep_param == "loss" ? sim::SweepParameter::kLossProb
                                        : sim::SweepParameter::kSendRate;
      for (double v : values) {
        if (parameter == sim::SweepParameter::kLossProb && !(v >= 0 && v <= 1)) {
          throw UsageError("loss values must be in [0, 1]");
        }
        if (parameter == sim::SweepParameter::kSendRate && !(v > 0)) {
          throw UsageError("rates must be > 0");
        }
      }
      const System system = source.load();
      factory = [system](double, const sim::SimConfig&) { return system; };
    }
    try {
      sim::validate(cfg, System{});
    } catch (const sim::InvalidConfig& e) {
      throw UsageError(e.what());
    }
    const auto table = sim::sweep(factory, parameter, values, cfg, runs);
    const auto csv = sim::export_csv(table);
    if (csv_path.empty()) {
      std::cout << csv;
    } else {
      write_file(csv_path, csv);
    }
    return kClean;
  }
};

// --- fmt / model ---------------------------------------------------------------

struct FmtCmd {
  std::string file;
  bool write = false;

  int run() const {
    Source source;
    source.file = file;
    const auto text = dsl::format(source.load());
    if (write) {
      write_file(file, text);
    } else {
      std::cout << text;
    }
    return kClean;
  }
};

struct ModelCmd {
  std::string name;
  models::ModelParams params;

  int run() const {
    if (name == "list") {
      for (const auto& n : models::bundled_names()) std::cout << n << "\n";
      return kClean;
    }
    std::cout << dsl::format(Source::load_bundled(name, params));
    return kClean;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Validation, simulation and charting for communicating FSM protocols", "cfsm"};
  app.require_subcommand(1);

  ValidateCmd validate;
  auto* v = app.add_subcommand("validate", "explore the state space and run every detector");
  validate.source.add_options(v);
  validate.semantics.add_options(v);
  v->add_option("--json", validate.json_path, "write the diagnostics document");
  v->add_option("--dot", validate.dot_path, "write the reachability graph");
  v->add_option("--msc", validate.msc_path, "write the first counterexample's event log");

  SimulateCmd simulate;
  auto* s = app.add_subcommand("simulate", "discrete-event simulation over timed lossy channels");
  simulate.source.add_options(s);
  s->add_option("--seed", simulate.cfg.seed, "base seed; run i uses seed + i");
  s->add_option("--loss", simulate.cfg.loss_prob, "loss probability on lossy channels");
  s->add_option("--delay", simulate.cfg.delay, "channel transit time");
  s->add_option("--jitter", simulate.cfg.jitter, "extra uniform transit time");
  s->add_option("--timeout-after", simulate.cfg.timeout_after, "timer duration");
  s->add_option("--max-retransmits", simulate.cfg.max_retransmits, "consecutive expiries allowed");
  s->add_option("--max-time", simulate.cfg.max_time, "simulation horizon");
  s->add_option("--send-interval", simulate.cfg.send_interval, "spacing of source sends");
  s->add_option("--overflow", simulate.overflow, "block or error")
      ->check(CLI::IsMember({"block", "error"}));
  s->add_option("--runs", simulate.runs, "runs (per sweep value)");
  s->add_option("--sweep", simulate.sweep_param, "nodes, loss or rate")
      ->check(CLI::IsMember({"nodes", "loss", "rate"}));
  s->add_option("--values", simulate.values, "sweep values")->delimiter(',');
  s->add_option("--csv", simulate.csv_path, "write the sweep table here");
  s->add_option("--msc", simulate.msc_path, "write the (first) run's event log");

  MscCmd chart;
  auto* m = app.add_subcommand("msc", "print a shortest run to a chosen kind of state");
  chart.source.add_options(m);
  chart.semantics.add_options(m);
  m->add_option("--to", chart.target, "deadlock, unspec, livelock or done")
      ->check(CLI::IsMember({"deadlock", "unspec", "livelock", "done"}));
  m->add_flag("--diagram", chart.diagram, "sequence diagram instead of the event log");

  FmtCmd fmt;
  auto* f = app.add_subcommand("fmt", "print a model file in canonical form");
  f->add_option("file", fmt.file, "model file")->required();
  f->add_flag("-w,--write", fmt.write, "rewrite the file in place");

  ModelCmd model;
  auto* b = app.add_subcommand("model", "list bundled models or print one as DSL text");
  b->add_option("name", model.name, "`list` or a model name")->required();
  b->add_option("--nodes", model.params.nodes, "node count for nmp_scaled");
  b->add_flag("--lossy", model.params.lossy, "lossy channels");
  b->add_option("--requests", model.params.requests, "rounds or message count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (v->parsed()) return validate.run();
    if (s->parsed()) return simulate.run();
    if (m->parsed()) return chart.run();
    if (f->parsed()) return fmt.run();
    if (b->parsed()) return model.run();
  } catch (const UsageError& e) {
    std::cerr << "cfsm: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "cfsm: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
