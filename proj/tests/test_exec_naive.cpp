#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kv_fixtures.hpp"

using namespace sref;
using namespace sref::testing;

namespace {

std::string bench_path(const std::string& name) {
  return std::string(BENCH_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("step rules of the trace-augmented semantics") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  ReArena& a = c.arena;
  FormulaPtr phi = mk_true();
  ReId eps = a.eps();
  ReId lit = a.literal(u.lit_eq("f", 1));

  // Assume
  SymGen g0;
  FormulaPtr cond = mk_eq(mk_sym(g0.fresh(Sort::integer(), "x")), mk_int(1));
  auto r1 = step_naive(c, {phi, eps, e_assume(cond), 0});
  REQUIRE(r1.size() == 1);
  CHECK(formula_eq(r1[0].phi, cond));
  CHECK(r1[0].curr == eps);
  CHECK(r1[0].e->kind == CoreExpr::Kind::First);

  // Admit conjoins, Append concatenates
  auto r2 = step_naive(c, {phi, lit, e_admit(a.star(lit)), 0});
  CHECK(r2[0].curr == a.conj({lit, a.star(lit)}));
  auto r3 = step_naive(c, {phi, lit, e_append(lit), 0});
  CHECK(r3[0].curr == a.concat2(lit, lit));
  CHECK(r3[0].events == 1);

  // Choice yields both branches in order
  auto r4 = step_naive(c, {phi, eps, e_choice(e_unit(), e_abort()), 0});
  REQUIRE(r4.size() == 2);
  CHECK(r4[0].e->kind == CoreExpr::Kind::First);
  CHECK(r4[1].e->kind == CoreExpr::Kind::Abort);

  // GenSym produces a fresh symbolic value
  auto r5 = step_naive(c, {phi, eps, e_gensym(Sort::integer(), "n"), 0});
  REQUIRE(r5.size() == 1);
  REQUIRE(r5[0].e->kind == CoreExpr::Kind::First);
  CHECK(r5[0].e->first->kind == SymValue::Kind::Sym);

  // LetVal substitutes; abort propagates out of let
  ExprPtr lv = e_let("x", e_first(mk_int(3)), e_var("x", Sort::integer()));
  auto r6 = step_naive(c, {phi, eps, lv, 0});
  CHECK(value_eq(r6[0].e->first, mk_int(3)));
  auto r7 = step_naive(c, {phi, eps, e_let("x", e_abort(), e_unit()), 0});
  CHECK(r7[0].e->kind == CoreExpr::Kind::Abort);

  // LetAppFun and LetAppFix
  ExprPtr id = e_fun("x", Sort::integer(), e_var("x", Sort::integer()));
  auto r8 = step_naive(c, {phi, eps, e_letapp("y", id, {e_first(mk_int(5))},
                                              e_var("y", Sort::integer())), 0});
  REQUIRE(r8.size() == 1);
  CHECK(r8[0].e->kind == CoreExpr::Kind::Let);

  ExprPtr fixv = e_fix("f", e_fun("x", Sort::integer(), e_var("x", Sort::integer())));
  auto r9 = step_naive(c, {phi, eps, e_letapp("y", fixv, {e_first(mk_int(5))},
                                              e_var("y", Sort::integer())), 0});
  REQUIRE(r9.size() == 1);
  REQUIRE(r9[0].e->kind == CoreExpr::Kind::LetApp);
  CHECK(r9[0].e->callee->kind == CoreExpr::Kind::Fun);  // λf. e1[x↦v] applied to the fix
  CHECK(r9[0].e->args[0]->kind == CoreExpr::Kind::Fix);
}

TEST_CASE("sat_sre: witnesses, unsat, and the event-conjunction example") {
  KvUniverse kv;
  Ctx& c = kv.ctx;
  ReArena& a = c.arena;
  Bounds bounds;
  bounds.witness_len = 3;
  SymVar av = c.gen.fresh(kv.node, "a"), bv = c.gen.fresh(kv.node, "b");
  VarScope sc{{"a", kv.node}, {"b", kv.node}};
  auto lit = [&](const std::string& t) {
    return re_substitute(c, a.literal(parse_literal(c, t, sc)),
                         {{"a", mk_sym(av)}, {"b", mk_sym(bv)}});
  };

  // one put reaches acceptance at length 1
  SatSreResult r = sat_sre(c, mk_true(), lit("<Nxt.put a b>"), bounds);
  REQUIRE(r.verdict == SatVerdict::Sat);
  REQUIRE(r.witness.size() == 1);
  CHECK(r.witness[0].fname == "Nxt.put");
  CHECK(ground_match(c, lit("<Nxt.put a b>"), r.witness, r.model));

  // conflicting single-event conjunction under a ≠ b
  ReId conj = a.conj({lit("<Nxt.put k v | k = a /\\ v = b>"),
                      lit("<Nxt.put k v | k = b /\\ v = b>")});
  SatSreResult r2 = sat_sre(c, mk_ne(mk_sym(av), mk_sym(bv)), conj, bounds);
  CHECK(r2.verdict == SatVerdict::Unsat);
  // ... and satisfiable without that constraint
  SatSreResult r3 = sat_sre(c, mk_true(), conj, bounds);
  REQUIRE(r3.verdict == SatVerdict::Sat);
  CHECK(r3.model.lookup(av.id).value() == r3.model.lookup(bv.id).value());

  // a structurally empty language is unsat outright
  SatSreResult r4 = sat_sre(c, mk_true(), a.conj({a.eps(), lit("<Nxt.put a b>")}), bounds);
  CHECK(r4.verdict == SatVerdict::Unsat);
}

TEST_CASE("property: sat_sre against the bounded brute-force oracle") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  Rng rng(4242);
  std::vector<SymVar> syms;
  for (int i = 0; i < 3; ++i) syms.push_back(c.gen.fresh(u.v, "q" + std::to_string(i)));
  std::vector<SymEvent> pool{u.lit_eq_sym("f", syms[0]), u.lit_eq_sym("g", syms[1]),
                             complement(u.lit_eq_sym("f", syms[2])), u.lit_eq("f", 1),
                             top_event()};
  Bounds bounds;
  bounds.witness_len = 4;
  // oracle domain covers the solver's small-model window for 3 vars
  std::vector<GroundEvent> alpha;
  for (int x = 0; x <= 5; ++x) {
    alpha.push_back({"f", {Constant{u.v, x}}, Constant{Sort::unit(), 0}});
    alpha.push_back({"g", {Constant{u.v, x}}, Constant{Sort::unit(), 0}});
  }
  int checked = 0;
  for (int iter = 0; iter < 500; ++iter) {
    ReId r = random_sre(c, rng, pool, 3);
    FormulaPtr phi = rng.flip() ? mk_true()
                                : mk_ne(mk_sym(syms[0]), mk_sym(syms[rng.below(3)]));
    SatSreResult sr = sat_sre(c, phi, r, bounds);
    if (sr.verdict == SatVerdict::Unknown) continue;
    ++checked;
    if (sr.verdict == SatVerdict::Sat) {
      // the reported witness replays
      REQUIRE(eval_ground(phi, sr.model));
      REQUIRE(ground_match(c, r, sr.witness, sr.model));
    } else {
      // no sigma over the bounded domain yields an accepted word <= 4
      for (const auto& sigma : all_sigmas(syms, 6)) {
        if (!eval_ground(phi, sigma)) continue;
        REQUIRE(ground_words(c, r, alpha, 4, sigma).empty());
      }
    }
  }
  CHECK(checked > 300);
}

TEST_CASE("run_naive falsifies the weakened self-divide via abort") {
  Ctx c1;
  BoundedSolver s1;
  c1.solver = &s1;
  ModuleFile bug = parse_module_file(c1, bench_path("selfdivide_bug.hat"));
  Bounds bounds;
  bounds.max_steps = 4000;
  FalsifyResult r = run_naive(c1, build_harness(c1, bug, "self_divide"), bounds);
  CHECK(r.verdict == Verdict::Falsified);
  REQUIRE(r.witness);
  CHECK(r.witness->ground.empty());  // pure client: the abort itself is the bug

  Ctx c2;
  BoundedSolver s2;
  c2.solver = &s2;
  ModuleFile fix = parse_module_file(c2, bench_path("selfdivide_fix.hat"));
  FalsifyResult r2 = run_naive(c2, build_harness(c2, fix, "self_divide"), bounds);
  CHECK(r2.verdict == Verdict::NotFalsifiedAtBound);
}

TEST_CASE("run_naive falsifies the ordered-put client on the decreasing branch") {
  Ctx c1;
  BoundedSolver s1;
  c1.solver = &s1;
  ModuleFile bug = parse_module_file(c1, bench_path("orderedput_client_bug.hat"));
  Bounds bounds;
  bounds.max_steps = 6000;
  bounds.witness_len = 4;
  FalsifyResult r = run_naive(c1, build_harness(c1, bug, "client"), bounds);
  REQUIRE(r.verdict == Verdict::Falsified);
  REQUIRE(r.witness);
  // the witness pair of puts has decreasing keys, with g1 < g2 around them
  REQUIRE(r.witness->ground.size() >= 2);
  CHECK(r.witness->ground[0].fname == "put");

  Ctx c2;
  BoundedSolver s2;
  c2.solver = &s2;
  ModuleFile fix = parse_module_file(c2, bench_path("orderedput_client_fix.hat"));
  FalsifyResult r2 = run_naive(c2, build_harness(c2, fix, "client"), bounds);
  CHECK(r2.verdict == Verdict::NotFalsifiedAtBound);
}
