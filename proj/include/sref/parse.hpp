#pragma once

#include <string>

#include "sref/speclang.hpp"

// Text front end: the .hat module format, the shared literal / SRE / LTLf
// grammars, and the module printer used by the round-trip tests.  See
// docs/spec-language.md for the grammar.

namespace sref {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_), col(col_) {}
};

// Scope for resolving program variables inside qualifiers and formulas.
using VarScope = std::map<std::string, Sort>;

ModuleFile parse_module(Ctx& ctx, const std::string& text);
ModuleFile parse_module_file(Ctx& ctx, const std::string& path);

// Standalone entry points (shared grammar, same scoping rules).
FormulaPtr parse_formula(Ctx& ctx, const std::string& text, const VarScope& scope);
SymEvent parse_literal(Ctx& ctx, const std::string& text, const VarScope& scope);
ReId parse_sre(Ctx& ctx, const std::string& text, const VarScope& scope);
LTLfPtr parse_ltlf(Ctx& ctx, const std::string& text, const VarScope& scope);

std::string print_module(const Ctx& ctx, const ModuleFile& mod);

bool module_eq(const ModuleFile& a, const ModuleFile& b);

}  // namespace sref
