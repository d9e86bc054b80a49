#pragma once

#include <memory>

#include "sref/sre.hpp"

// Linear temporal logic over finite traces: AST, translation to SREs, and
// a direct finite-trace evaluator used as the independent oracle for the
// translation.

namespace sref {

struct LTLfFormula;
using LTLfPtr = std::shared_ptr<const LTLfFormula>;

struct LTLfFormula {
  enum class Kind { Lit, X, U, W, F, G, Not, And, Or };

  Kind kind;
  SymEvent lit;               // Kind::Lit, and the first operand of U/W
  std::vector<LTLfPtr> kids;  // X/F/G/Not: 1; U/W: 1 (second operand); And/Or: 2
};

LTLfPtr ltlf_lit(SymEvent e);
LTLfPtr ltlf_x(LTLfPtr f);
LTLfPtr ltlf_u(SymEvent lit, LTLfPtr f);
LTLfPtr ltlf_w(SymEvent lit, LTLfPtr f);
LTLfPtr ltlf_f(LTLfPtr f);
LTLfPtr ltlf_g(LTLfPtr f);
LTLfPtr ltlf_not(LTLfPtr f);
LTLfPtr ltlf_and(LTLfPtr a, LTLfPtr b);
LTLfPtr ltlf_or(LTLfPtr a, LTLfPtr b);

// Structural translation:
//   lit     ->  lit · •*          (the current event matches)
//   X R     ->  • · R
//   l U R   ->  l* · R
//   l W R   ->  ¬(•* · R) ∨ (l* · R)
//   F R     ->  •* · R
//   G R     ->  ¬(•* · (¬R ∧ • · •*))
// The G rule restricts the quantified suffix to nonempty ones; with the
// verbatim ¬(•*·¬R) the ε suffix always lies in ¬R for any non-nullable R,
// collapsing G to ∅.
ReId to_sre(Ctx& ctx, const LTLfPtr& f);

// Direct positional semantics matching the translation above.
bool eval_ltlf(Ctx& ctx, const LTLfPtr& f, const GroundTrace& tau, const Interpretation& sigma);

LTLfPtr ltlf_substitute(const LTLfPtr& f, const std::map<std::string, ValuePtr>& binding);

std::string ltlf_str(const LTLfPtr& f);

}  // namespace sref
