#include "sref/ltlf.hpp"

namespace sref {

namespace {

LTLfPtr mk(LTLfFormula::Kind k, SymEvent lit, std::vector<LTLfPtr> kids) {
  auto n = std::make_shared<LTLfFormula>();
  n->kind = k;
  n->lit = std::move(lit);
  n->kids = std::move(kids);
  return n;
}

}  // namespace

LTLfPtr ltlf_lit(SymEvent e) { return mk(LTLfFormula::Kind::Lit, std::move(e), {}); }
LTLfPtr ltlf_x(LTLfPtr f) { return mk(LTLfFormula::Kind::X, bottom_event(), {std::move(f)}); }
LTLfPtr ltlf_u(SymEvent lit, LTLfPtr f) {
  return mk(LTLfFormula::Kind::U, std::move(lit), {std::move(f)});
}
LTLfPtr ltlf_w(SymEvent lit, LTLfPtr f) {
  return mk(LTLfFormula::Kind::W, std::move(lit), {std::move(f)});
}
LTLfPtr ltlf_f(LTLfPtr f) { return mk(LTLfFormula::Kind::F, bottom_event(), {std::move(f)}); }
LTLfPtr ltlf_g(LTLfPtr f) { return mk(LTLfFormula::Kind::G, bottom_event(), {std::move(f)}); }
LTLfPtr ltlf_not(LTLfPtr f) { return mk(LTLfFormula::Kind::Not, bottom_event(), {std::move(f)}); }
LTLfPtr ltlf_and(LTLfPtr a, LTLfPtr b) {
  return mk(LTLfFormula::Kind::And, bottom_event(), {std::move(a), std::move(b)});
}
LTLfPtr ltlf_or(LTLfPtr a, LTLfPtr b) {
  return mk(LTLfFormula::Kind::Or, bottom_event(), {std::move(a), std::move(b)});
}

ReId to_sre(Ctx& ctx, const LTLfPtr& f) {
  ReArena& a = ctx.arena;
  const ReId top = a.literal(top_event());
  const ReId top_star = a.star(top);
  switch (f->kind) {
    case LTLfFormula::Kind::Lit:
      return a.concat2(a.literal(f->lit), top_star);
    case LTLfFormula::Kind::X:
      return a.concat2(top, to_sre(ctx, f->kids[0]));
    case LTLfFormula::Kind::U:
      return a.concat2(a.star(a.literal(f->lit)), to_sre(ctx, f->kids[0]));
    case LTLfFormula::Kind::W: {
      ReId r = to_sre(ctx, f->kids[0]);
      ReId never = a.negate(a.concat2(top_star, r));
      ReId until = a.concat2(a.star(a.literal(f->lit)), r);
      return a.disj({never, until});
    }
    case LTLfFormula::Kind::F:
      return a.concat2(top_star, to_sre(ctx, f->kids[0]));
    case LTLfFormula::Kind::G: {
      ReId r = to_sre(ctx, f->kids[0]);
      ReId nonempty = a.concat2(top, top_star);
      return a.negate(a.concat2(top_star, a.conj({a.negate(r), nonempty})));
    }
    case LTLfFormula::Kind::Not:
      return a.negate(to_sre(ctx, f->kids[0]));
    case LTLfFormula::Kind::And:
      return a.conj({to_sre(ctx, f->kids[0]), to_sre(ctx, f->kids[1])});
    case LTLfFormula::Kind::Or:
      return a.disj({to_sre(ctx, f->kids[0]), to_sre(ctx, f->kids[1])});
  }
  throw std::runtime_error("to_sre: bad node");
}

namespace {

bool eval_at(Ctx& ctx, const LTLfPtr& f, const GroundTrace& tau, size_t i,
             const Interpretation& sigma) {
  const size_t n = tau.size();
  switch (f->kind) {
    case LTLfFormula::Kind::Lit:
      return i < n && match_ground(f->lit, tau[i], sigma, ctx.sig);
    case LTLfFormula::Kind::X:
      return i < n && eval_at(ctx, f->kids[0], tau, i + 1, sigma);
    case LTLfFormula::Kind::U: {
      for (size_t k = i; k <= n; ++k) {
        if (eval_at(ctx, f->kids[0], tau, k, sigma)) return true;
        if (k < n && !match_ground(f->lit, tau[k], sigma, ctx.sig)) return false;
      }
      return false;
    }
    case LTLfFormula::Kind::W: {
      bool fires = false;
      for (size_t k = i; k <= n; ++k)
        if (eval_at(ctx, f->kids[0], tau, k, sigma)) { fires = true; break; }
      if (!fires) return true;  // ¬(•*·R)
      for (size_t k = i; k <= n; ++k) {
        if (eval_at(ctx, f->kids[0], tau, k, sigma)) return true;
        if (k < n && !match_ground(f->lit, tau[k], sigma, ctx.sig)) return false;
      }
      return false;
    }
    case LTLfFormula::Kind::F: {
      for (size_t k = i; k <= n; ++k)
        if (eval_at(ctx, f->kids[0], tau, k, sigma)) return true;
      return false;
    }
    case LTLfFormula::Kind::G: {
      for (size_t k = i; k < n; ++k)  // nonempty suffixes only
        if (!eval_at(ctx, f->kids[0], tau, k, sigma)) return false;
      return true;
    }
    case LTLfFormula::Kind::Not:
      return !eval_at(ctx, f->kids[0], tau, i, sigma);
    case LTLfFormula::Kind::And:
      return eval_at(ctx, f->kids[0], tau, i, sigma) && eval_at(ctx, f->kids[1], tau, i, sigma);
    case LTLfFormula::Kind::Or:
      return eval_at(ctx, f->kids[0], tau, i, sigma) || eval_at(ctx, f->kids[1], tau, i, sigma);
  }
  return false;
}

}  // namespace

bool eval_ltlf(Ctx& ctx, const LTLfPtr& f, const GroundTrace& tau, const Interpretation& sigma) {
  return eval_at(ctx, f, tau, 0, sigma);
}

LTLfPtr ltlf_substitute(const LTLfPtr& f, const std::map<std::string, ValuePtr>& binding) {
  SymEvent lit = f->kind == LTLfFormula::Kind::Lit || f->kind == LTLfFormula::Kind::U ||
                         f->kind == LTLfFormula::Kind::W
                     ? substitute(f->lit, binding)
                     : f->lit;
  std::vector<LTLfPtr> kids;
  kids.reserve(f->kids.size());
  for (const auto& k : f->kids) kids.push_back(ltlf_substitute(k, binding));
  auto n = std::make_shared<LTLfFormula>();
  n->kind = f->kind;
  n->lit = std::move(lit);
  n->kids = std::move(kids);
  return n;
}

std::string ltlf_str(const LTLfPtr& f) {
  switch (f->kind) {
    case LTLfFormula::Kind::Lit: return event_str(f->lit);
    case LTLfFormula::Kind::X: return "X " + ltlf_str(f->kids[0]);
    case LTLfFormula::Kind::U: return "(" + event_str(f->lit) + " U " + ltlf_str(f->kids[0]) + ")";
    case LTLfFormula::Kind::W: return "(" + event_str(f->lit) + " W " + ltlf_str(f->kids[0]) + ")";
    case LTLfFormula::Kind::F: return "F " + ltlf_str(f->kids[0]);
    case LTLfFormula::Kind::G: return "G " + ltlf_str(f->kids[0]);
    case LTLfFormula::Kind::Not: return "~(" + ltlf_str(f->kids[0]) + ")";
    case LTLfFormula::Kind::And:
      return "(" + ltlf_str(f->kids[0]) + " /\\ " + ltlf_str(f->kids[1]) + ")";
    case LTLfFormula::Kind::Or:
      return "(" + ltlf_str(f->kids[0]) + " \\/ " + ltlf_str(f->kids[1]) + ")";
  }
  return "?";
}

}  // namespace sref
