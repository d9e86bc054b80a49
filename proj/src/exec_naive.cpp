#include <deque>
#include <set>

#include "sref/exec.hpp"

namespace sref {

std::string verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Falsified: return "Falsified";
    case Verdict::NotFalsifiedAtBound: return "NotFalsifiedAtBound";
    case Verdict::Budget: return "Budget";
    case Verdict::Unknown: return "Unknown";
  }
  return "?";
}

namespace {

ExprPtr apply_one(Ctx& ctx, const std::string& binder, const ExprPtr& callee,
                  const std::vector<ExprPtr>& args, const ExprPtr& cont) {
  // LetAppFun / LetAppFix, peeling one argument.
  std::vector<ExprPtr> rest(args.begin() + 1, args.end());
  if (callee->kind == CoreExpr::Kind::Fun) {
    ExprPtr body = subst(ctx, callee->kids[0], callee->name, args[0]);
    if (rest.empty()) return e_let(binder, std::move(body), cont);
    static int k = 0;
    std::string tmp = "$app" + std::to_string(k++);
    return e_let(tmp, std::move(body),
                 e_letapp(binder, e_var(tmp, Sort::unit()), std::move(rest), cont));
  }
  if (callee->kind == CoreExpr::Kind::Fix) {
    // v_f = fix f. fun x. e1  applied to v:  let y = (fun f. e1[x↦v]) v_f
    const ExprPtr& fun = callee->kids[0];
    ExprPtr unrolled = subst(ctx, fun->kids[0], fun->name, args[0]);
    ExprPtr wrapper = e_fun(callee->name, Sort::unit(), std::move(unrolled));
    std::vector<ExprPtr> new_args;
    new_args.push_back(callee);
    new_args.insert(new_args.end(), rest.begin(), rest.end());
    return e_letapp(binder, std::move(wrapper), std::move(new_args), cont);
  }
  throw std::runtime_error("application of a non-function value");
}

}  // namespace

std::vector<NState> step_naive(Ctx& ctx, const NState& s) {
  const ExprPtr& e = s.e;
  switch (e->kind) {
    case CoreExpr::Kind::GenSym: {
      SymVar v = ctx.gen.fresh(e->sort, e->name);
      return {{s.phi, s.curr, e_first(mk_sym(v)), s.events}};
    }
    case CoreExpr::Kind::Assume:
      return {{mk_and2(s.phi, e->formula), s.curr, e_unit(), s.events}};
    case CoreExpr::Kind::Admit:
      return {{s.phi, ctx.arena.conj({s.curr, e->re}), e_unit(), s.events}};
    case CoreExpr::Kind::Append:
      return {{s.phi, ctx.arena.concat2(s.curr, e->re), e_unit(), s.events + 1}};
    case CoreExpr::Kind::Choice:
      return {{s.phi, s.curr, e->kids[0], s.events}, {s.phi, s.curr, e->kids[1], s.events}};
    case CoreExpr::Kind::Let: {
      const ExprPtr& rhs = e->kids[0];
      if (rhs->kind == CoreExpr::Kind::Abort)  // AbortProp
        return {{s.phi, s.curr, e_abort(), s.events}};
      if (is_value(rhs))  // LetVal
        return {{s.phi, s.curr, subst(ctx, e->kids[1], e->name, rhs), s.events}};
      std::vector<NState> inner = step_naive(ctx, {s.phi, s.curr, rhs, s.events});  // LetExp
      std::vector<NState> out;
      out.reserve(inner.size());
      for (auto& st : inner)
        out.push_back({st.phi, st.curr, e_let(e->name, st.e, e->kids[1]), st.events});
      return out;
    }
    case CoreExpr::Kind::LetApp:
      return {{s.phi, s.curr, apply_one(ctx, e->name, e->callee, e->args, e->kids[0]), s.events}};
    default:
      throw std::runtime_error("stuck non-value state (translation bug): " + expr_str(ctx, e));
  }
}

// ---------------------------------------------------------------------------
// sat_sre: mintermization
// ---------------------------------------------------------------------------

namespace {

struct Minterms {
  // Per fname: the distinct qualifier formulas found in R's atoms.
  std::vector<std::pair<std::string, std::vector<FormulaPtr>>> preds;

  const std::vector<FormulaPtr>* find(const std::string& f) const {
    for (const auto& [g, qs] : preds)
      if (g == f) return &qs;
    return nullptr;
  }
};

void collect_preds(Ctx& ctx, ReId r, Minterms& m, std::set<ReId>& seen) {
  if (!seen.insert(r).second) return;
  const ReNode& n = ctx.arena.node(r);
  if (n.kind == ReKind::Lit) {
    const SymEvent& e = ctx.arena.lit(n.lit);
    for (const auto& [f, q] : e.atoms) {
      if (is_true(q) || is_false(q)) continue;
      bool found = false;
      for (auto& [g, qs] : m.preds) {
        if (g != f) continue;
        found = true;
        bool dup = false;
        for (const auto& q2 : qs)
          if (formula_eq(q, q2)) { dup = true; break; }
        if (!dup) qs.push_back(q);
      }
      if (!found) m.preds.push_back({f, {q}});
    }
    return;
  }
  for (ReId k : n.kids) collect_preds(ctx, k, m, seen);
}

struct Letter {
  std::string fname;
  std::uint32_t mask = 0;     // sign assignment over preds[fname]
  FormulaPtr cube;            // conjunction over event-local names
};

// letter ∈ literal?
bool letter_in(const Minterms& m, const Letter& letter, const SymEvent& e) {
  const FormulaPtr* q = e.find(letter.fname);
  if (!q) return e.others_included;
  if (is_true(*q)) return true;
  if (is_false(*q)) return false;
  const auto* qs = m.find(letter.fname);
  for (size_t i = 0; qs && i < qs->size(); ++i)
    if (formula_eq((*qs)[i], *q)) return (letter.mask >> i) & 1;
  throw std::runtime_error("unregistered qualifier during mintermization");
}

ReId letter_deriv(Ctx& ctx, const Minterms& m, ReId r, const Letter& letter,
                  std::map<std::pair<ReId, std::pair<std::string, std::uint32_t>>, ReId>& memo) {
  auto key = std::make_pair(r, std::make_pair(letter.fname, letter.mask));
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  const ReNode n = ctx.arena.node(r);
  ReId out = ctx.arena.empty();
  switch (n.kind) {
    case ReKind::Empty:
    case ReKind::Eps:
      out = ctx.arena.empty();
      break;
    case ReKind::Lit:
      out = letter_in(m, letter, ctx.arena.lit(n.lit)) ? ctx.arena.eps() : ctx.arena.empty();
      break;
    case ReKind::Star:
      out = ctx.arena.concat2(letter_deriv(ctx, m, n.kids[0], letter, memo), r);
      break;
    case ReKind::Concat: {
      ReId head = n.kids[0];
      std::vector<ReId> rest(n.kids.begin() + 1, n.kids.end());
      ReId tail = ctx.arena.concat(std::move(rest));
      ReId left = ctx.arena.concat2(letter_deriv(ctx, m, head, letter, memo), tail);
      out = ctx.arena.nullable(head)
                ? ctx.arena.disj({left, letter_deriv(ctx, m, tail, letter, memo)})
                : left;
      break;
    }
    case ReKind::Not:
      out = ctx.arena.negate(letter_deriv(ctx, m, n.kids[0], letter, memo));
      break;
    case ReKind::And: {
      std::vector<ReId> kids;
      for (ReId k : n.kids) kids.push_back(letter_deriv(ctx, m, k, letter, memo));
      out = ctx.arena.conj(std::move(kids));
      break;
    }
    case ReKind::Or: {
      std::vector<ReId> kids;
      for (ReId k : n.kids) kids.push_back(letter_deriv(ctx, m, k, letter, memo));
      out = ctx.arena.disj(std::move(kids));
      break;
    }
  }
  memo[key] = out;
  return out;
}

}  // namespace

SatSreResult sat_sre(Ctx& ctx, const FormulaPtr& phi, ReId r, const Bounds& bounds) {
  SatSreResult res;
  Minterms m;
  std::set<ReId> seen;
  collect_preds(ctx, r, m, seen);
  // Every signature function gets letters, including unqualified ones.
  for (const auto& d : ctx.sig.decls)
    if (!m.find(d.fname)) m.preds.push_back({d.fname, {}});

  // Build satisfiable letters; sign consistency between compound qualifiers
  // and their parts falls out of the per-cube unsat pruning.
  std::vector<Letter> alphabet;
  for (const auto& [f, qs] : m.preds) {
    if (qs.size() > 20) {
      res.verdict = SatVerdict::Unknown;
      res.note = "minterm explosion: " + std::to_string(qs.size()) + " predicates on " + f;
      return res;
    }
    const EffectDecl* d = ctx.sig.find(f);
    for (std::uint32_t mask = 0; mask < (1u << qs.size()); ++mask) {
      std::vector<FormulaPtr> cube;
      for (size_t i = 0; i < qs.size(); ++i)
        cube.push_back((mask >> i) & 1 ? qs[i] : mk_not(qs[i]));
      Letter letter{f, mask, mk_and(cube)};
      if (!qs.empty()) {
        // prune letters whose cube cannot be satisfied by any event
        std::map<std::string, ValuePtr> fresh;
        for (size_t i = 0; i < d->arg_sorts.size(); ++i)
          fresh[arg_var_name(i)] = mk_sym(ctx.gen.fresh(d->arg_sorts[i], "mt"));
        fresh[ret_var_name()] = mk_sym(ctx.gen.fresh(d->ret_sort, "mt"));
        SatResult sr = ctx.solver->check_sat(substitute(letter.cube, fresh));
        if (sr.verdict == SatVerdict::Unsat) continue;
        // Unknown letters are kept: dropping them could miss witnesses.
      }
      alphabet.push_back(std::move(letter));
      if (alphabet.size() > static_cast<size_t>(bounds.minterm_cap)) {
        res.verdict = SatVerdict::Unknown;
        res.note = "minterm cap exceeded";
        return res;
      }
    }
  }

  std::map<std::pair<ReId, std::pair<std::string, std::uint32_t>>, ReId> memo;

  // Letter-automaton closure: which states can reach an accepting state.
  std::set<ReId> reachable_states{r};
  std::vector<ReId> work{r};
  std::map<ReId, std::vector<std::pair<size_t, ReId>>> edges;  // state -> (letter, succ)
  bool closed = true;
  while (!work.empty()) {
    ReId s = work.back();
    work.pop_back();
    for (size_t li = 0; li < alphabet.size(); ++li) {
      ReId t = letter_deriv(ctx, m, s, alphabet[li], memo);
      edges[s].push_back({li, t});
      if (reachable_states.insert(t).second) {
        work.push_back(t);
        if (reachable_states.size() > 4096) { closed = false; work.clear(); break; }
      }
    }
  }
  std::set<ReId> can_accept;
  if (closed) {
    for (ReId s : reachable_states)
      if (ctx.arena.nullable(s)) can_accept.insert(s);
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [s, succs] : edges) {
        if (can_accept.count(s)) continue;
        for (const auto& [li, t] : succs)
          if (can_accept.count(t)) { can_accept.insert(s); changed = true; break; }
      }
    }
    if (!can_accept.count(r)) {
      res.verdict = SatVerdict::Unsat;
      return res;
    }
  }

  // Word enumeration in increasing length.
  const size_t bound = bounds.witness_len >= 0 ? static_cast<size_t>(bounds.witness_len) : 6;
  struct Item {
    ReId state;
    std::vector<size_t> word;  // letter indices
  };
  std::deque<Item> frontier;
  frontier.push_back({r, {}});
  bool any_unknown = false;
  std::int64_t budget = bounds.max_steps;
  for (size_t len = 0; len <= bound && !frontier.empty(); ++len) {
    for (const Item& item : frontier) {
      if (!ctx.arena.nullable(item.state)) continue;
      // Discharge Φ together with the per-position minterm constraints.
      std::vector<FormulaPtr> conj{phi};
      std::vector<std::vector<std::pair<std::string, std::vector<SymVar>>>> pos_locals;
      for (size_t pos = 0; pos < item.word.size(); ++pos) {
        const Letter& letter = alphabet[item.word[pos]];
        const EffectDecl* d = ctx.sig.find(letter.fname);
        std::map<std::string, ValuePtr> fresh;
        std::vector<SymVar> locals;
        for (size_t i = 0; i < d->arg_sorts.size(); ++i) {
          SymVar v = ctx.gen.fresh(d->arg_sorts[i], letter.fname + ".a" + std::to_string(i));
          fresh[arg_var_name(i)] = mk_sym(v);
          locals.push_back(v);
        }
        SymVar rv = ctx.gen.fresh(d->ret_sort, letter.fname + ".r");
        fresh[ret_var_name()] = mk_sym(rv);
        locals.push_back(rv);
        conj.push_back(substitute(letter.cube, fresh));
        pos_locals.push_back({{letter.fname, std::move(locals)}});
      }
      SatResult sr = ctx.solver->check_sat(mk_and(std::move(conj)));
      if (sr.verdict == SatVerdict::Unknown) {
        any_unknown = true;
        continue;
      }
      if (sr.verdict == SatVerdict::Sat) {
        res.verdict = SatVerdict::Sat;
        res.model = sr.model;
        for (size_t pos = 0; pos < item.word.size(); ++pos) {
          const Letter& letter = alphabet[item.word[pos]];
          const EffectDecl* d = ctx.sig.find(letter.fname);
          GroundEvent ge;
          ge.fname = letter.fname;
          const auto& locals = pos_locals[pos][0].second;
          for (size_t i = 0; i < d->arg_sorts.size(); ++i)
            ge.args.push_back(sr.model.lookup(locals[i].id).value_or(Constant{d->arg_sorts[i], 0}));
          ge.ret = sr.model.lookup(locals.back().id).value_or(Constant{d->ret_sort, 0});
          res.witness.push_back(std::move(ge));
        }
        return res;
      }
    }
    if (len == bound) break;
    std::deque<Item> next_frontier;
    for (const Item& item : frontier) {
      for (size_t li = 0; li < alphabet.size(); ++li) {
        if (--budget < 0) {
          res.verdict = SatVerdict::Unknown;
          res.note = "witness search budget exhausted";
          return res;
        }
        ReId t = letter_deriv(ctx, m, item.state, alphabet[li], memo);
        if (ctx.arena.is_empty(t)) continue;
        if (closed && !can_accept.count(t)) continue;
        Item child;
        child.state = t;
        child.word = item.word;
        child.word.push_back(li);
        next_frontier.push_back(std::move(child));
      }
    }
    frontier = std::move(next_frontier);
  }

  if (any_unknown) {
    res.verdict = SatVerdict::Unknown;
    res.note = "some words blocked on Unknown";
  } else if (frontier.empty()) {
    res.verdict = SatVerdict::Unsat;  // all accepting continuations exhausted
  } else {
    res.verdict = SatVerdict::Unknown;
    res.note = "witness bound reached with live states";
  }
  return res;
}

// ---------------------------------------------------------------------------
// run_naive
// ---------------------------------------------------------------------------

FalsifyResult run_naive(Ctx& ctx, const Harness& harness, const Bounds& bounds) {
  auto t0 = std::chrono::steady_clock::now();
  auto deadline = t0 + bounds.timeout;
  const SolverStats before = ctx.solver->stats();

  FalsifyResult out;
  std::deque<NState> frontier;
  frontier.push_back({mk_true(), ctx.arena.eps(), harness.expr, 0});
  std::int64_t budget = bounds.max_steps;
  bool any_unknown = false;
  bool out_of_budget = false;

  auto finish = [&](Verdict v) {
    out.verdict = v;
    out.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const SolverStats after = ctx.solver->stats();
    out.stats.solver_calls = after.queries - before.queries;
    out.stats.solver_ms = after.total_ms - before.total_ms;
    return out;
  };

  // Bound the witness length by the number of events the harness can
  // append, if the caller did not fix one.
  Bounds local = bounds;
  if (local.witness_len < 0) local.witness_len = bounds.max_events + 2;

  while (!frontier.empty()) {
    if (std::chrono::steady_clock::now() > deadline || --budget < 0) {
      out_of_budget = true;
      break;
    }
    NState s = frontier.front();
    frontier.pop_front();
    if (s.events > bounds.max_events) continue;  // beyond the event bound
    out.stats.states++;

    if (s.e->kind == CoreExpr::Kind::Abort) {
      SatResult sr = ctx.solver->check_sat(s.phi);
      if (sr.verdict == SatVerdict::Sat) {
        out.witness = Witness{{}, sr.model, {}};
        out.note = "abort reachable";
        return finish(Verdict::Falsified);
      }
      if (sr.verdict == SatVerdict::Unknown) any_unknown = true;
      continue;
    }
    if (is_value(s.e)) {
      ReId query = ctx.arena.conj({s.curr, ctx.arena.negate(harness.post)});
      SatSreResult sr = sat_sre(ctx, s.phi, query, local);
      if (sr.verdict == SatVerdict::Sat) {
        out.witness = Witness{{}, sr.model, sr.witness};
        // Replay: the model must satisfy Φ, the witness must lie in the
        // produced-context language and escape the postcondition.
        bool ok = eval_ground(s.phi, sr.model) &&
                  ground_match(ctx, s.curr, sr.witness, sr.model) &&
                  !ground_match(ctx, harness.post, sr.witness, sr.model);
        out.replay_checked = true;
        if (!ok) {
          out.note = "replay failed (engine bug)";
          return finish(Verdict::Unknown);
        }
        return finish(Verdict::Falsified);
      }
      if (sr.verdict == SatVerdict::Unknown) any_unknown = true;
      continue;
    }
    for (NState& succ : step_naive(ctx, s)) frontier.push_back(std::move(succ));
  }

  if (out_of_budget) return finish(Verdict::Budget);
  if (any_unknown) return finish(Verdict::Unknown);
  return finish(Verdict::NotFalsifiedAtBound);
}

}  // namespace sref
