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

#ifndef CFSM_DSL_HPP_
#define CFSM_DSL_HPP_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cfsm/model.hpp"

namespace cfsm::dsl {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ParseDiagnostic {
  enum class Kind { kSyntax, kSemantic };

  SourceSpan span;
  std::string message;
  Kind kind = Kind::kSyntax;
};

using ParseResult = std::variant<System, std::vector<ParseDiagnostic>>;

/**
 * Parses `.cfsm` text:
 *
 *   system   = "system" IDENT "{" { channel | machine } "}"
 *   channel  = "channel" IDENT ":" IDENT "->" IDENT "capacity" INT ["lossy"] ";"
 *   machine  = "machine" IDENT "{" "init" IDENT ";"
 *              ["terminal" IDENT {"," IDENT} ";"] { state } "}"
 *   state    = "state" IDENT "{" { trans } "}"
 *   trans    = ( "recv" IDENT "from" IDENT | "send" IDENT "to" IDENT
 *              | "timeout" | "tau" ) "->" IDENT ["progress"] ";"
 *
 * `#` starts a comment running to end of line. Either a fully validated
 * System comes back or at least one diagnostic; never a partial system.
 */
ParseResult parse(std::string_view text);

/// Canonical text. parse(format(s)) == s for every valid system.
std::string format(const System& system);

/// "line:col: error: message" lines, one per diagnostic.
std::string render(const std::vector<ParseDiagnostic>& diagnostics,
                   std::string_view origin = "<input>");

}  // namespace cfsm::dsl

#endif  // CFSM_DSL_HPP_
