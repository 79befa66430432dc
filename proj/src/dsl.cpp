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

#include "cfsm/dsl.hpp"

#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>

namespace cfsm::dsl {

namespace {

enum class Tok { kIdent, kInt, kLBrace, kRBrace, kColon, kSemi, kComma, kArrow, kEnd };

struct Token {
  Tok kind = Tok::kEnd;
  std::string_view text;
  SourceSpan span;
};

struct SyntaxError {
  SourceSpan span;
  std::string message;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_blank();
      const SourceSpan at{line_, column_, 0};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::kEnd, {}, {line_, column_, 0}});
        return out;
      }
      const char c = text_[pos_];
      const std::size_t start = pos_;
      Tok kind;
      if (is_alpha(c)) {
        while (pos_ < text_.size() && (is_alpha(text_[pos_]) || is_digit(text_[pos_]))) {
          advance();
        }
        kind = Tok::kIdent;
      } else if (is_digit(c)) {
        while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
        kind = Tok::kInt;
      } else if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
        advance();
        advance();
        kind = Tok::kArrow;
      } else {
        switch (c) {
          case '{': kind = Tok::kLBrace; break;
          case '}': kind = Tok::kRBrace; break;
          case ':': kind = Tok::kColon; break;
          case ';': kind = Tok::kSemi; break;
          case ',': kind = Tok::kComma; break;
          default:
            throw SyntaxError{{at.line, at.column, 1},
                              "unexpected character '" + std::string(1, c) + "'"};
        }
        advance();
      }
      const auto length = static_cast<int>(pos_ - start);
      out.push_back({kind, text_.substr(start, pos_ - start), {at.line, at.column, length}});
    }
  }

 private:
  static bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// Where each element of the parsed system came from, indexed like the lists
// handed to build_system.
struct SpanIndex {
  struct ChannelSpans {
    SourceSpan name, sender, receiver, capacity;
  };
  struct TransitionSpans {
    SourceSpan whole, from, to, message, channel;
  };
  struct MachineSpans {
    SourceSpan name, initial;
    std::vector<SourceSpan> states, terminals;
    std::vector<TransitionSpans> transitions;
  };
  SourceSpan system;
  std::vector<ChannelSpans> channels;
  std::vector<MachineSpans> machines;

  SourceSpan locate(const ModelErrorSite& site) const {
    using F = ModelErrorSite::Field;
    const auto at = [](const auto& v, int i) { return v.at(static_cast<std::size_t>(i)); };
    switch (site.field) {
      case F::kSystemName: return system;
      case F::kChannelName: return at(channels, site.channel).name;
      case F::kChannelSender: return at(channels, site.channel).sender;
      case F::kChannelReceiver: return at(channels, site.channel).receiver;
      case F::kChannelCapacity: return at(channels, site.channel).capacity;
      case F::kMachineName: return at(machines, site.machine).name;
      case F::kState: return at(at(machines, site.machine).states, site.index);
      case F::kInitial: return at(machines, site.machine).initial;
      case F::kTerminal: return at(at(machines, site.machine).terminals, site.index);
      case F::kTransitionFrom: return at(at(machines, site.machine).transitions, site.index).from;
      case F::kTransitionTo: return at(at(machines, site.machine).transitions, site.index).to;
      case F::kTransitionChannel:
        return at(at(machines, site.machine).transitions, site.index).channel;
      case F::kTransitionMessage:
        return at(at(machines, site.machine).transitions, site.index).message;
      case F::kTransition: return at(at(machines, site.machine).transitions, site.index).whole;
    }
    return system;
  }
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  void parse_system() {
    expect_keyword("system");
    auto name = expect_ident("system name");
    name_ = std::string(name.text);
    spans_.system = name.span;
    expect(Tok::kLBrace, "'{'");
    while (!peek_is(Tok::kRBrace)) {
      if (peek_keyword("channel")) {
        parse_channel();
      } else if (peek_keyword("machine")) {
        parse_machine();
      } else {
        fail_here("expected 'channel', 'machine' or '}'");
      }
    }
    expect(Tok::kRBrace, "'}'");
    if (!peek_is(Tok::kEnd)) fail_here("unexpected text after system declaration");
  }

  std::string name_;
  std::vector<Machine> machines_;
  std::vector<Channel> channels_;
  SpanIndex spans_;

 private:
  void parse_channel() {
    expect_keyword("channel");
    Channel channel;
    SpanIndex::ChannelSpans spans;
    auto name = expect_ident("channel name");
    channel.name = std::string(name.text);
    spans.name = name.span;
    expect(Tok::kColon, "':'");
    auto sender = expect_ident("sender machine");
    channel.sender = std::string(sender.text);
    spans.sender = sender.span;
    expect(Tok::kArrow, "'->'");
    auto receiver = expect_ident("receiver machine");
    channel.receiver = std::string(receiver.text);
    spans.receiver = receiver.span;
    expect_keyword("capacity");
    const auto& cap = peek();
    if (cap.kind != Tok::kInt) fail_here("expected capacity (integer)");
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(cap.text.data(), cap.text.data() + cap.text.size(), value);
    if (ec != std::errc() || ptr != cap.text.data() + cap.text.size()) {
      semantic_.push_back({cap.span, "capacity out of range", ParseDiagnostic::Kind::kSemantic});
    }
    channel.capacity = value;
    spans.capacity = cap.span;
    ++pos_;
    if (peek_keyword("lossy")) {
      ++pos_;
      channel.lossy = true;
    }
    expect(Tok::kSemi, "';'");
    channels_.push_back(std::move(channel));
    spans_.channels.push_back(spans);
  }

  void parse_machine() {
    expect_keyword("machine");
    Machine machine;
    SpanIndex::MachineSpans spans;
    auto name = expect_ident("machine name");
    machine.name = std::string(name.text);
    spans.name = name.span;
    expect(Tok::kLBrace, "'{'");
    expect_keyword("init");
    auto init = expect_ident("initial state");
    machine.initial = std::string(init.text);
    spans.initial = init.span;
    expect(Tok::kSemi, "';'");
    if (peek_keyword("terminal")) {
      ++pos_;
      do {
        auto t = expect_ident("terminal state");
        machine.terminals.emplace_back(t.text);
        spans.terminals.push_back(t.span);
      } while (accept(Tok::kComma));
      expect(Tok::kSemi, "';'");
    }
    while (!peek_is(Tok::kRBrace)) {
      if (!peek_keyword("state")) fail_here("expected 'state' or '}'");
      ++pos_;
      auto state = expect_ident("state name");
      machine.states.emplace_back(state.text);
      spans.states.push_back(state.span);
      expect(Tok::kLBrace, "'{'");
      while (!peek_is(Tok::kRBrace)) {
        parse_transition(machine, spans, state);
      }
      expect(Tok::kRBrace, "'}'");
    }
    expect(Tok::kRBrace, "'}'");
    machines_.push_back(std::move(machine));
    spans_.machines.push_back(std::move(spans));
  }

  void parse_transition(Machine& machine, SpanIndex::MachineSpans& spans,
                        const Token& state) {
    Transition tr;
    SpanIndex::TransitionSpans ts;
    tr.from = std::string(state.text);
    ts.from = state.span;
    const auto& head = peek();
    ts.whole = head.span;
    if (peek_keyword("recv") || peek_keyword("send")) {
      const bool send = head.text == "send";
      ++pos_;
      auto message = expect_ident("message name");
      expect_keyword(send ? "to" : "from");
      auto channel = expect_ident("channel name");
      tr.action = send ? Action::Send(std::string(message.text), std::string(channel.text))
                       : Action::Recv(std::string(message.text), std::string(channel.text));
      ts.message = message.span;
      ts.channel = channel.span;
    } else if (peek_keyword("timeout")) {
      ++pos_;
      tr.action = Action::Timeout();
    } else if (peek_keyword("tau")) {
      ++pos_;
      tr.action = Action::Tau();
    } else {
      fail_here("expected 'recv', 'send', 'timeout', 'tau' or '}'");
    }
    expect(Tok::kArrow, "'->'");
    auto target = expect_ident("target state");
    tr.to = std::string(target.text);
    ts.to = target.span;
    if (peek_keyword("progress")) {
      ++pos_;
      tr.progress = true;
    }
    expect(Tok::kSemi, "';'");
    machine.transitions.push_back(std::move(tr));
    spans.transitions.push_back(ts);
  }

  const Token& peek() const { return tokens_[pos_]; }
  bool peek_is(Tok kind) const { return peek().kind == kind; }
  bool peek_keyword(std::string_view word) const {
    return peek().kind == Tok::kIdent && peek().text == word;
  }
  bool accept(Tok kind) {
    if (!peek_is(kind)) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    const auto& tok = peek();
    std::string found = tok.kind == Tok::kEnd ? "end of input" : "'" + std::string(tok.text) + "'";
    throw SyntaxError{tok.span, message + ", found " + found};
  }

  void expect(Tok kind, const char* what) {
    if (!accept(kind)) fail_here(std::string("expected ") + what);
  }
  void expect_keyword(std::string_view word) {
    if (!peek_keyword(word)) fail_here("expected '" + std::string(word) + "'");
    ++pos_;
  }
  Token expect_ident(const char* what) {
    if (!peek_is(Tok::kIdent)) fail_here(std::string("expected ") + what);
    return tokens_[pos_++];
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;

 public:
  std::vector<ParseDiagnostic> semantic_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  std::vector<ParseDiagnostic> diagnostics;
  try {
    Parser parser(Lexer(text).run());
    parser.parse_system();
    if (!parser.semantic_.empty()) return parser.semantic_;
    try {
      return build_system(std::move(parser.machines_), std::move(parser.channels_),
                          std::move(parser.name_));
    } catch (const ModelError& e) {
      diagnostics.push_back(
          {parser.spans_.locate(e.site()), e.what(), ParseDiagnostic::Kind::kSemantic});
    }
  } catch (const SyntaxError& e) {
    diagnostics.push_back({e.span, e.message, ParseDiagnostic::Kind::kSyntax});
  }
  return diagnostics;
}

std::string format(const System& system) {
  std::string out = "system " + system.name() + " {\n";
  for (const auto& ch : system.channels()) {
    out += "  channel " + ch.name + " : " + ch.sender + " -> " + ch.receiver +
           " capacity " + std::to_string(ch.capacity);
    if (ch.lossy) out += " lossy";
    out += ";\n";
  }
  for (const auto& m : system.machines()) {
    out += "\n  machine " + m.name + " {\n";
    out += "    init " + m.initial + ";\n";
    if (!m.terminals.empty()) {
      out += "    terminal ";
      for (std::size_t i = 0; i < m.terminals.size(); ++i) {
        if (i > 0) out += ", ";
        out += m.terminals[i];
      }
      out += ";\n";
    }
    std::size_t t = 0;
    for (const auto& state : m.states) {
      const bool empty = t >= m.transitions.size() || m.transitions[t].from != state;
      if (empty) {
        out += "    state " + state + " {}\n";
        continue;
      }
      out += "    state " + state + " {\n";
      for (; t < m.transitions.size() && m.transitions[t].from == state; ++t) {
        const auto& tr = m.transitions[t];
        out += "      " + describe(tr.action) + " -> " + tr.to;
        if (tr.progress) out += " progress";
        out += ";\n";
      }
      out += "    }\n";
    }
    out += "  }\n";
  }
  out += "}\n";
  return out;
}

std::string render(const std::vector<ParseDiagnostic>& diagnostics, std::string_view origin) {
  std::string out;
  for (const auto& d : diagnostics) {
    out += std::string(origin) + ":" + std::to_string(d.span.line) + ":" +
           std::to_string(d.span.column) + ": " +
           (d.kind == ParseDiagnostic::Kind::kSyntax ? "syntax error: " : "error: ") + d.message +
           "\n";
  }
  return out;
}

}  // namespace cfsm::dsl
