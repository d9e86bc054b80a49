#include <algorithm>
#include <iostream>
#include <queue>
#include <set>

#include "sref/exec.hpp"

namespace sref {

namespace {

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t state_key(const DState& s) {
  std::uint64_t h = hash_combine(s.phi->hash, s.cont);
  for (LitId l : s.trace) h = hash_combine(h, l + 3);
  h = hash_combine(h, s.e->hash);
  return h;
}

ExprPtr apply_one(Ctx& ctx, const std::string& binder, const ExprPtr& callee,
                  const std::vector<ExprPtr>& args, const ExprPtr& cont) {
  std::vector<ExprPtr> rest(args.begin() + 1, args.end());
  if (callee->kind == CoreExpr::Kind::Fun) {
    ExprPtr body = subst(ctx, callee->kids[0], callee->name, args[0]);
    if (rest.empty()) return e_let(binder, std::move(body), cont);
    static int k = 0;
    std::string tmp = "$dapp" + std::to_string(k++);
    return e_let(tmp, std::move(body),
                 e_letapp(binder, e_var(tmp, Sort::unit()), std::move(rest), cont));
  }
  if (callee->kind == CoreExpr::Kind::Fix) {
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

bool early_refute(const Ctx& ctx, const DState& s) { return ctx.arena.is_empty(s.cont); }

SatResult reachable(Ctx& ctx, const FormulaPtr& phi, const SymTrace& trace) {
  std::vector<FormulaPtr> conj{phi};
  for (LitId l : trace) conj.push_back(constr_event(ctx.arena.lit(l), ctx.sig, ctx.gen));
  return ctx.solver->check_sat(mk_and(std::move(conj)));
}

// DAdmit: fork on each Τ_past ⊑ R_past compatible with the current trace.
// The prefix enumeration of R_past is interleaved with the pointwise
// compatibility check so incompatible branches are never materialized.
std::vector<DState> admit_step(Ctx& ctx, const DState& s, ReId past, const Bounds& bounds) {
  (void)bounds;
  std::vector<DState> out;
  struct Frame {
    ReId state;
    SymTrace conj;  // pointwise meets so far
    bool via_unknown;
  };
  std::vector<Frame> level{{past, {}, false}};
  for (size_t pos = 0; pos <= s.trace.size(); ++pos) {
    if (pos == s.trace.size()) {
      for (const Frame& fr : level) {
        if (!ctx.arena.nullable(fr.state)) continue;  // Τ_past ⊑ R_past needs ν
        DState succ = s;
        succ.trace = fr.conj;
        succ.e = e_unit();
        succ.via_unknown = s.via_unknown || fr.via_unknown;
        out.push_back(std::move(succ));
      }
      break;
    }
    std::vector<Frame> next_level;
    for (const Frame& fr : level) {
      std::vector<LitId> ls = next_literals(ctx, fr.state);
      for (LitId l : ls) {
        if (ctx.arena.lit(l).is_bottom()) continue;
        SymEvent m = meet(ctx.arena.lit(l), ctx.arena.lit(s.trace[pos]));
        if (m.is_bottom()) continue;  // incompatible: never materialized
        Frame child;
        child.via_unknown = fr.via_unknown;
        try {
          child.state = deriv_literal(ctx, fr.state, l);
        } catch (const SolverUnknownError&) {
          child.state = fr.state;
          child.via_unknown = true;
        }
        if (ctx.arena.is_empty(child.state)) continue;
        child.conj = fr.conj;
        child.conj.push_back(ctx.arena.intern(m));
        next_level.push_back(std::move(child));
      }
    }
    level = std::move(next_level);
    if (level.empty()) break;  // no compatible sample: state pruned
  }
  return out;
}

// DAppend: sample Τ_eff ⊑ R_eff, pair with equal-length prefixes of the
// continuation effect (dead ones included), conjoin, and derive.
// Successors are ordered by DistToDead of the resulting continuation.
std::vector<DState> append_step(Ctx& ctx, const DState& s, ReId eff, int sample_len,
                                const Bounds& bounds) {
  std::vector<DState> out;
  std::vector<PrefixItem> effs;
  sample_traces(ctx, eff, static_cast<size_t>(sample_len), [&](const PrefixItem& item) {
    if (!item.trace.empty()) effs.push_back(item);
    return true;
  });
  for (const PrefixItem& te : effs) {
    enumerate_prefixes(
        ctx, s.cont, te.trace.size(), /*include_dead=*/true,
        [&](const PrefixItem& tp) {
          if (tp.trace.size() != te.trace.size()) return true;
          auto conj = trace_conj(ctx, te.trace, tp.trace);
          if (!conj) return true;
          DState succ = s;
          succ.trace.insert(succ.trace.end(), conj->begin(), conj->end());
          succ.cont = tp.deriv;
          succ.e = e_unit();
          succ.events = s.events + static_cast<int>(conj->size());
          succ.via_unknown = s.via_unknown || te.via_unknown || tp.via_unknown;
          out.push_back(std::move(succ));
          return true;
        },
        /*keep_unknown=*/true);
  }
  std::stable_sort(out.begin(), out.end(), [&](const DState& a, const DState& b) {
    bool ua = a.via_unknown, ub = b.via_unknown;
    if (ua != ub) return !ua;  // Unknown-blocked branches go last, not dropped
    return dist_to_dead(ctx, a.cont, bounds.dist_cutoff) <
           dist_to_dead(ctx, b.cont, bounds.dist_cutoff);
  });
  return out;
}

std::vector<DState> step_deriv(Ctx& ctx, const DState& s, const Bounds& bounds) {
  const ExprPtr& e = s.e;
  switch (e->kind) {
    case CoreExpr::Kind::GenSym: {
      SymVar v = ctx.gen.fresh(e->sort, e->name);
      DState succ = s;
      succ.e = e_first(mk_sym(v));
      return {succ};
    }
    case CoreExpr::Kind::Assume: {
      DState succ = s;
      succ.phi = mk_and2(s.phi, e->formula);
      succ.e = e_unit();
      return {succ};
    }
    case CoreExpr::Kind::Admit:
      return admit_step(ctx, s, e->re, bounds);
    case CoreExpr::Kind::Append:
      return append_step(ctx, s, e->re, bounds.max_ctx, bounds);
    case CoreExpr::Kind::Choice: {
      DState a = s, b = s;
      a.e = e->kids[0];
      b.e = e->kids[1];
      return {a, b};
    }
    case CoreExpr::Kind::Let: {
      const ExprPtr& rhs = e->kids[0];
      if (rhs->kind == CoreExpr::Kind::Abort) {
        DState succ = s;
        succ.e = e_abort();
        return {succ};
      }
      if (is_value(rhs)) {
        DState succ = s;
        succ.e = subst(ctx, e->kids[1], e->name, rhs);
        return {succ};
      }
      DState inner = s;
      inner.e = rhs;
      std::vector<DState> stepped = step_deriv(ctx, inner, bounds);
      for (DState& st : stepped) st.e = e_let(e->name, st.e, e->kids[1]);
      return stepped;
    }
    case CoreExpr::Kind::LetApp: {
      DState succ = s;
      succ.e = apply_one(ctx, e->name, e->callee, e->args, e->kids[0]);
      return {succ};
    }
    default:
      throw std::runtime_error("stuck non-value state (translation bug): " + expr_str(ctx, e));
  }
}

// ---------------------------------------------------------------------------
// run_deriv
// ---------------------------------------------------------------------------

namespace {

// One reachability query that keeps the per-event fresh locals, so a Sat
// model can be turned into a ground trace: each literal is instantiated by
// the locals of whichever of its atoms the model satisfies.
struct ReachOutcome {
  SatVerdict verdict = SatVerdict::Unknown;
  Interpretation model;
  GroundTrace ground;
};

ReachOutcome reach_and_instantiate(Ctx& ctx, const FormulaPtr& phi, const SymTrace& trace) {
  ReachOutcome out;
  std::vector<FormulaPtr> conj{phi};
  std::vector<EventConstraint> ecs;
  for (LitId l : trace) {
    ecs.push_back(constr_event_locals(ctx.arena.lit(l), ctx.sig, ctx.gen));
    conj.push_back(ecs.back().formula);
  }
  SatResult sr = ctx.solver->check_sat(mk_and(std::move(conj)));
  out.verdict = sr.verdict;
  if (sr.verdict != SatVerdict::Sat) return out;
  out.model = sr.model;
  for (size_t pos = 0; pos < trace.size(); ++pos) {
    const SymEvent& lit = ctx.arena.lit(trace[pos]);
    const EventConstraint& ec = ecs[pos];
    bool done = false;
    for (const auto& [fname, locals] : ec.locals) {
      const EffectDecl* d = ctx.sig.find(fname);
      GroundEvent ge;
      ge.fname = fname;
      for (size_t i = 0; i < d->arg_sorts.size(); ++i)
        ge.args.push_back(out.model.lookup(locals[i].id).value_or(Constant{d->arg_sorts[i], 0}));
      ge.ret = out.model.lookup(locals.back().id).value_or(Constant{d->ret_sort, 0});
      if (match_ground(lit, ge, out.model, ctx.sig)) {
        out.ground.push_back(std::move(ge));
        done = true;
        break;
      }
    }
    if (!done && lit.others_included) {
      for (const auto& d : ctx.sig.decls) {
        if (lit.find(d.fname)) continue;
        GroundEvent ge;
        ge.fname = d.fname;
        for (const auto& as : d.arg_sorts) ge.args.push_back(Constant{as, 0});
        ge.ret = Constant{d.ret_sort, 0};
        out.ground.push_back(std::move(ge));
        done = true;
        break;
      }
    }
    if (!done) {
      out.verdict = SatVerdict::Unknown;  // cannot materialize this event
      return out;
    }
  }
  return out;
}

struct PrioCmp {
  Ctx* ctx;
  const Bounds* bounds;
  bool operator()(const DState& a, const DState& b) const {
    // max-heap: invert.  Priority: smaller DistToDead, then fewer produced
    // events, then smaller state id.
    size_t da = dist_to_dead(*ctx, a.cont, bounds->dist_cutoff);
    size_t db = dist_to_dead(*ctx, b.cont, bounds->dist_cutoff);
    if (da != db) return da > db;
    if (a.events != b.events) return a.events > b.events;
    return a.id > b.id;
  }
};

}  // namespace

bool replay(Ctx& ctx, const FalsifyResult& r, ReId post) {
  if (r.verdict != Verdict::Falsified || !r.witness) return false;
  const Witness& w = *r.witness;
  Interpretation sigma = w.model;
  // Complete the model over the postcondition's symbols.
  std::map<int, SymVar> syms;
  re_collect_syms(ctx, post, syms);
  for (const auto& [id, v] : syms)
    if (!sigma.values.count(id)) sigma.values[id] = Constant{v.sort, 0};
  if (!w.trace.empty()) {
    if (w.ground.size() != w.trace.size()) return false;
    for (size_t i = 0; i < w.trace.size(); ++i)
      if (!match_ground(ctx.arena.lit(w.trace[i]), w.ground[i], sigma, ctx.sig)) return false;
  }
  return !ground_match(ctx, post, w.ground, sigma);
}

FalsifyResult run_deriv(Ctx& ctx, const Harness& harness, const Bounds& bounds) {
  auto t0 = std::chrono::steady_clock::now();
  auto deadline = t0 + bounds.timeout;
  const SolverStats before = ctx.solver->stats();

  FalsifyResult out;
  bool any_unknown = false;
  bool out_of_budget = false;
  std::uint64_t next_id = 0;
  std::set<std::uint64_t> visited;

  auto finish = [&](Verdict v) {
    out.verdict = v;
    out.stats.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    const SolverStats after = ctx.solver->stats();
    out.stats.solver_calls = after.queries - before.queries;
    out.stats.solver_ms = after.total_ms - before.total_ms;
    return out;
  };

  // Candidate falsification: establish reachability, materialize the
  // ground witness, and gate the verdict on a successful replay.
  auto report = [&](const DState& s, const char* why) -> bool {
    ReachOutcome ro = reach_and_instantiate(ctx, s.phi, s.trace);
    if (ro.verdict == SatVerdict::Unknown) {
      any_unknown = true;
      return false;
    }
    if (ro.verdict == SatVerdict::Unsat) return false;
    FalsifyResult candidate;
    candidate.verdict = Verdict::Falsified;
    candidate.witness = Witness{s.trace, ro.model, ro.ground};
    if (!replay(ctx, candidate, harness.post)) {
      // A failed replay is an engine bug: downgrade and log, never report.
      std::cerr << "[deriv] replay failed for candidate (" << why << "); downgrading\n";
      any_unknown = true;
      return false;
    }
    out.witness = candidate.witness;
    out.replay_checked = true;
    out.note = why;
    return true;
  };

  // Iterative deepening on the sampled context length.
  for (int round = 1; round <= bounds.max_ctx; ++round) {
    Bounds round_bounds = bounds;
    round_bounds.max_ctx = round;
    std::priority_queue<DState, std::vector<DState>, PrioCmp> queue(
        PrioCmp{&ctx, &round_bounds});
    DState init{mk_true(), {}, harness.post, harness.expr, 0, false, next_id++};
    queue.push(init);
    std::int64_t budget = bounds.max_steps;
    std::int64_t expansions = 0;

    while (!queue.empty()) {
      if (std::chrono::steady_clock::now() > deadline || --budget < 0) {
        out_of_budget = true;
        break;
      }
      DState s = queue.top();
      queue.pop();
      out.stats.states++;
      out.stats.max_trace = std::max(out.stats.max_trace, s.trace.size());

      if (static_cast<int>(s.trace.size()) > bounds.max_events) continue;

      if (early_refute(ctx, s)) {
        if (report(s, "dead continuation")) return finish(Verdict::Falsified);
        continue;
      }
      if (s.e->kind == CoreExpr::Kind::Abort) {
        if (report(s, "abort reachable")) return finish(Verdict::Falsified);
        continue;
      }
      if (is_value(s.e)) {
        if (!ctx.arena.nullable(s.cont)) {
          if (report(s, "non-nullable continuation at exit")) return finish(Verdict::Falsified);
        }
        continue;
      }

      // Lazy reachability pruning.
      if (bounds.reach_every > 0 && ++expansions % bounds.reach_every == 0) {
        SatResult sr = reachable(ctx, s.phi, s.trace);
        if (sr.verdict == SatVerdict::Unsat) continue;
      }

      std::vector<DState> succs;
      try {
        succs = step_deriv(ctx, s, round_bounds);
      } catch (const SolverUnknownError&) {
        any_unknown = true;
        continue;
      } catch (const NotAPrefixError&) {
        any_unknown = true;
        continue;
      }
      for (DState& succ : succs) {
        succ.id = next_id++;
        std::uint64_t key = state_key(succ);
        if (!visited.insert(key).second) continue;
        queue.push(std::move(succ));
      }
    }
    if (out_of_budget) break;
  }

  if (out_of_budget) return finish(Verdict::Budget);
  if (any_unknown) return finish(Verdict::Unknown);
  return finish(Verdict::NotFalsifiedAtBound);
}

}  // namespace sref
