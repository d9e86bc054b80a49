#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sref/ltlf.hpp"
#include "sref/sre.hpp"

// Surface specification/source language and the core language it translates
// to: harness construction, expression translation, and substitution.

namespace sref {

// --- core language -----------------------------------------------------------

struct CoreExpr;
using ExprPtr = std::shared_ptr<const CoreExpr>;

// Monadic normal form: applications and effects occur only as let bindings.
struct CoreExpr {
  enum class Kind {
    // values
    Var,     // program variable
    First,   // first-order symbolic value (constants, symbols, ops)
    Fun,     // fun x. e
    Fix,     // fix f. fun x. e
    // computations
    GenSym,  // ??τ
    Abort,
    Assume,  // assume(φ)
    Admit,   // admit(R)
    Append,  // append(R)
    Let,     // let x = e1 in e2
    LetApp,  // let x = v v̄ in e2
    Choice,  // e1 ⊗ e2
  };

  Kind kind;
  std::string name;               // Var; Fun param; Fix self; Let/LetApp binder
  Sort sort;                      // Var/GenSym/Fun param sort
  ValuePtr first;                 // First
  FormulaPtr formula;             // Assume
  ReId re = 0;                    // Admit/Append
  ExprPtr callee;                 // LetApp
  std::vector<ExprPtr> args;      // LetApp arguments (values)
  std::vector<ExprPtr> kids;      // Fun/Fix: body; Let: rhs, body; LetApp: body; Choice: both
  std::uint64_t hash = 0;
};

ExprPtr e_var(std::string name, Sort sort);
ExprPtr e_first(ValuePtr v);
ExprPtr e_unit();
ExprPtr e_fun(std::string param, Sort sort, ExprPtr body);
ExprPtr e_fix(std::string self, ExprPtr fun);
ExprPtr e_gensym(Sort sort, std::string hint = "");
ExprPtr e_abort();
ExprPtr e_assume(FormulaPtr f);
ExprPtr e_admit(ReId r);
ExprPtr e_append(ReId r);
ExprPtr e_let(std::string x, ExprPtr rhs, ExprPtr body);
ExprPtr e_letapp(std::string x, ExprPtr callee, std::vector<ExprPtr> args, ExprPtr body);
ExprPtr e_choice(ExprPtr a, ExprPtr b);
ExprPtr e_seq(ExprPtr a, ExprPtr b);  // let _ = a in b

// assert(φ) ≐ (assume ¬φ; abort) ⊗ assume φ, with trivially-true/false
// branches pruned; affirm(R) is the admit analogue.
ExprPtr desugar_assert(Ctx& ctx, const FormulaPtr& f);
ExprPtr desugar_affirm(Ctx& ctx, ReId r);

bool is_value(const ExprPtr& e);
bool expr_eq(const ExprPtr& a, const ExprPtr& b);
std::string expr_str(const Ctx& ctx, const ExprPtr& e);

// Capture-avoiding substitution of a value for a program variable, through
// expressions, qualifier formulas and SRE qualifiers.
ExprPtr subst(Ctx& ctx, const ExprPtr& e, const std::string& x, const ExprPtr& v);

// Free program variables (empty for well-formed harnesses).
void free_vars(const ExprPtr& e, std::map<std::string, Sort>& out,
               std::vector<std::string> bound = {});
bool check_mnf(const ExprPtr& e);

// --- surface language --------------------------------------------------------

struct SourceExpr;
using SourcePtr = std::shared_ptr<const SourceExpr>;

struct SourceExpr {
  enum class Kind { Value, Gensym, Call, If, Let, LetRec, Assert, Assume };

  Kind kind;
  ValuePtr value;                  // Value
  Sort sort;                       // Gensym sort; Let annotation; LetRec return sort
  std::string name;                // Call target; Let/LetRec binder
  std::vector<ValuePtr> args;      // Call arguments (values only)
  FormulaPtr formula;              // If condition; Assert/Assume
  std::vector<SourcePtr> kids;     // If: then, else; Let: rhs?, body; LetRec: fun body, body;
                                   // Assert/Assume: continuation (may be empty)
  std::vector<std::pair<std::string, Sort>> params;  // LetRec parameters
};

struct MethodSpec {
  std::vector<std::pair<std::string, Sort>> params;
  std::vector<std::pair<std::string, Sort>> ghosts;
  FormulaPtr require;
  ReId context = 0;
  std::string ret_name;
  Sort ret_sort;
  FormulaPtr ensure;
  ReId effect = 0;
};

struct MethodDef {
  std::string name;
  std::vector<std::pair<std::string, Sort>> params;
  Sort ret_sort;
  SourcePtr body;
};

struct ModuleFile {
  std::vector<std::string> sorts;                 // declared uninterpreted sorts
  EffectSignature sig;
  std::vector<std::pair<std::string, MethodSpec>> api_specs;     // effectful APIs
  std::vector<std::pair<std::string, MethodSpec>> method_specs;  // ADT methods
  std::vector<MethodDef> methods;
  std::string harness_method;

  const MethodSpec* find_api_spec(const std::string& f) const;
  const MethodSpec* find_method_spec(const std::string& m) const;
  const MethodDef* find_method(const std::string& m) const;
};

// Closure value for one effectful API: asserts the precondition (compiled
// to assume: the library call is modelled as succeeding), admits the
// context, generates the return symbol, assumes the ensure clause, appends
// the effect, and returns the symbol.
ExprPtr api_closure(Ctx& ctx, const std::string& fname, const MethodSpec& spec);

// Effectful calls become applications of api_closure values; conditionals
// become assume/choice pairs; recursion goes through fix.
ExprPtr translate_expr(Ctx& ctx, const ModuleFile& mod, const SourcePtr& e);

ExprPtr translate_method_value(Ctx& ctx, const ModuleFile& mod, const MethodDef& def);

struct Harness {
  ExprPtr expr;
  ReId post = 0;  // context · effect, threaded to the engines directly
};

// let params = ??; let ghosts = ??; assume(require); append(context);
// let y = f(params); assert(ensure) — the trailing affirm is not emitted:
// its SRE is returned as `post` and discharged as part of the symbolic
// state.
Harness get_harness(Ctx& ctx, const MethodSpec& spec, const ExprPtr& method_value);

Harness build_harness(Ctx& ctx, const ModuleFile& mod, const std::string& method);

}  // namespace sref
