#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sref/logic.hpp"
#include "sref/solver.hpp"

// Symbolic events over a fixed effect signature: stratified literals (at
// most one qualified atom per effectful function, plus a flag admitting all
// functions not named), the Boolean event algebra, inclusion checking,
// constraint extraction, and ground matching.

namespace sref {

struct EffectDecl {
  std::string fname;
  std::vector<Sort> arg_sorts;
  Sort ret_sort;
};

struct EffectSignature {
  std::vector<EffectDecl> decls;

  const EffectDecl* find(const std::string& fname) const {
    for (const auto& d : decls)
      if (d.fname == fname) return &d;
    return nullptr;
  }
  void add(EffectDecl d);
};

// Canonical names for event-local argument/return variables inside
// qualifiers; user-facing names are rewritten to these at construction so
// that qualifiers of the same function can be conjoined directly.
std::string arg_var_name(size_t i);
inline const char* ret_var_name() { return "%r"; }
ValuePtr arg_var(const EffectDecl& d, size_t i);
ValuePtr ret_var(const EffectDecl& d);

// Stratified literal.  `atoms` is sorted by fname and holds each function's
// qualifier over the canonical local names; `others_included` tells whether
// every function of the signature not listed is admitted with a true
// qualifier.  Normal form: with others_included, atoms with a true
// qualifier are dropped; without it, atoms with a false qualifier are.
struct SymEvent {
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  bool others_included = false;
  std::uint64_t hash = 0;

  bool is_bottom() const { return atoms.empty() && !others_included; }
  bool is_top() const { return atoms.empty() && others_included; }
  const FormulaPtr* find(const std::string& fname) const {
    for (const auto& [f, q] : atoms)
      if (f == fname) return &q;
    return nullptr;
  }
};

SymEvent mk_event(std::vector<std::pair<std::string, FormulaPtr>> atoms, bool others_included);
SymEvent bottom_event();
SymEvent top_event();
// <fname | qualifier>, all other functions excluded.
SymEvent atom_event(const std::string& fname, FormulaPtr qualifier);

bool event_eq(const SymEvent& a, const SymEvent& b);
std::string event_str(const SymEvent& e);

SymEvent complement(const SymEvent& e);
SymEvent meet(const SymEvent& a, const SymEvent& b);
SymEvent join(const SymEvent& a, const SymEvent& b);

struct GroundEvent {
  std::string fname;
  std::vector<Constant> args;
  Constant ret;

  bool operator==(const GroundEvent& o) const {
    return fname == o.fname && args == o.args && ret == o.ret;
  }
  std::string str() const;
};

// Inclusion of literal denotations under every interpretation: for each
// function of the signature, the implication between qualifiers must be
// valid after replacing event locals by shared fresh symbolic variables.
enum class Inclusion { Yes, No, Unknown };
Inclusion includes(const SymEvent& sub, const SymEvent& super, const EffectSignature& sig,
                   SymGen& gen, Solver& solver);

// Reachability constraint of one symbolic event: disjunction over atoms of
// their qualifiers with locals freshened; others_included contributes true
// iff the signature has a function outside the atom set.
FormulaPtr constr_event(const SymEvent& e, const EffectSignature& sig, SymGen& gen);

// constr_event, also reporting the fresh locals chosen per function so a
// model can be turned back into a ground event.
struct EventConstraint {
  FormulaPtr formula;
  std::vector<std::pair<std::string, std::vector<SymVar>>> locals;  // per fname: args then ret
};
EventConstraint constr_event_locals(const SymEvent& e, const EffectSignature& sig, SymGen& gen);

// True iff alpha lies in the denotation of sigma(e).
bool match_ground(const SymEvent& e, const GroundEvent& alpha, const Interpretation& sigma,
                  const EffectSignature& sig);

// Rewrites program variables inside qualifiers (event locals are untouched:
// bindings for canonical local names are not allowed).
SymEvent substitute(const SymEvent& e, const std::map<std::string, ValuePtr>& binding);
SymEvent substitute_syms(const SymEvent& e, const std::map<int, Constant>& sigma);

void collect_syms(const SymEvent& e, std::map<int, SymVar>& out);

}  // namespace sref
