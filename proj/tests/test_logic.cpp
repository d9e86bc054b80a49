#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace sref;
using namespace sref::testing;

TEST_CASE("fresh_sym issues strictly increasing ids") {
  SymGen gen;
  SymVar a = gen.fresh(Sort::integer(), "n");
  SymVar b = gen.fresh(Sort::integer(), "n");
  CHECK(a.id == 0);
  CHECK(b.id == 1);
  CHECK(a.id != b.id);

  Sort node = Sort::uninterpreted("Node");
  SymVar hd = gen.fresh(node, "hd");
  CHECK(hd.sort == node);
  CHECK(hd.hint == "hd");

  int prev = hd.id;
  for (int i = 0; i < 1'000'000; ++i) {
    SymVar v = gen.fresh(Sort::integer(), "x");
    REQUIRE(v.id > prev);
    prev = v.id;
  }
}

TEST_CASE("substitute replaces program variables") {
  ValuePtr x = mk_var("x", Sort::integer());
  FormulaPtr f = mk_atom(mk_op("<", {mk_int(0), x}));  // x > 0
  FormulaPtr g = substitute(f, {{"x", mk_int(5)}});
  CHECK(is_true(g));  // constant-folded

  // (key=k ∧ val=v)[k↦a, v↦b]
  Sort node = Sort::uninterpreted("Node");
  SymGen gen;
  ValuePtr a = mk_sym(gen.fresh(node, "a"));
  ValuePtr b = mk_sym(gen.fresh(node, "b"));
  FormulaPtr pair = mk_and2(mk_eq(mk_var("key", node), mk_var("k", node)),
                            mk_eq(mk_var("val", node), mk_var("v", node)));
  FormulaPtr bound = substitute(pair, {{"k", a}, {"v", b}});
  FormulaPtr expect = mk_and2(mk_eq(mk_var("key", node), a), mk_eq(mk_var("val", node), b));
  CHECK(formula_eq(bound, expect));

  // identity binding keeps structure
  CHECK(formula_eq(substitute(pair, {{"k", mk_var("k", node)}}), pair));

  // sort mismatch is an error
  CHECK_THROWS(substitute(pair, {{"k", mk_int(1)}}));
}

TEST_CASE("check_sat on the fixed examples") {
  BoundedSolver solver;
  SymGen gen;
  ValuePtr x = mk_sym(gen.fresh(Sort::integer(), "x"));
  FormulaPtr contra = mk_and2(mk_atom(mk_op("<", {mk_int(0), x})), mk_eq(x, mk_int(0)));
  CHECK(solver.check_sat(contra).verdict == SatVerdict::Unsat);

  // Φ_bad = n₀≠null ∧ u₀≠u ∧ n₁≠null ∧ u₁=u
  Sort node = Sort::uninterpreted("Node");
  Sort elem = Sort::uninterpreted("Elem");
  ValuePtr n0 = mk_sym(gen.fresh(node, "n0")), n1 = mk_sym(gen.fresh(node, "n1"));
  ValuePtr u = mk_sym(gen.fresh(elem, "u")), u0 = mk_sym(gen.fresh(elem, "u0"));
  ValuePtr u1 = mk_sym(gen.fresh(elem, "u1"));
  ValuePtr null = mk_constant({node, 0});
  FormulaPtr phi_bad = mk_and({mk_ne(n0, null), mk_ne(u0, u), mk_ne(n1, null), mk_eq(u1, u)});
  SatResult r = solver.check_sat(phi_bad);
  REQUIRE(r.verdict == SatVerdict::Sat);
  CHECK(eval_ground(phi_bad, r.model));

  ValuePtr g1 = mk_sym(gen.fresh(Sort::integer(), "g1"));
  ValuePtr g2 = mk_sym(gen.fresh(Sort::integer(), "g2"));
  FormulaPtr order = mk_and({mk_atom(mk_op("<", {g1, g2})), mk_eq(g1, mk_int(2)),
                             mk_eq(g2, mk_int(1))});
  CHECK(solver.check_sat(order).verdict == SatVerdict::Unsat);
}

TEST_CASE("check_valid mirrors check_sat of the negation") {
  BoundedSolver solver;
  SymGen gen;
  CHECK(solver.check_valid(mk_true()) == ValidVerdict::Valid);

  Sort node = Sort::uninterpreted("Node");
  ValuePtr k = mk_sym(gen.fresh(node, "k")), a = mk_sym(gen.fresh(node, "a"));
  ValuePtr v = mk_sym(gen.fresh(node, "v")), b = mk_sym(gen.fresh(node, "b"));
  FormulaPtr strong = mk_and2(mk_eq(k, a), mk_eq(v, b));
  FormulaPtr weak = mk_eq(k, a);
  CHECK(solver.check_valid(mk_or2(mk_not(strong), weak)) == ValidVerdict::Valid);
  CHECK(solver.check_valid(mk_or2(mk_not(weak), strong)) == ValidVerdict::Invalid);
}

TEST_CASE("eval_ground basics and model cross-check") {
  SymGen gen;
  SymVar xv = gen.fresh(Sort::integer(), "x");
  ValuePtr x = mk_sym(xv);
  FormulaPtr pos = mk_atom(mk_op("<", {mk_int(0), x}));
  Interpretation one{{{xv.id, Constant{Sort::integer(), 1}}}};
  Interpretation zero{{{xv.id, Constant{Sort::integer(), 0}}}};
  CHECK(eval_ground(pos, one));
  CHECK(!eval_ground(pos, zero));
  CHECK_THROWS(eval_ground(pos, Interpretation{}));
}

namespace {

// Random closed formulas over <=4 Int symbols with constants in -8..8.
FormulaPtr random_formula(Rng& rng, const std::vector<ValuePtr>& vars, int depth) {
  if (depth == 0 || rng.below(3) == 0) {
    ValuePtr lhs = vars[rng.below(vars.size())];
    ValuePtr rhs = rng.flip() ? vars[rng.below(vars.size())]
                              : mk_int(static_cast<std::int64_t>(rng.below(17)) - 8);
    const char* ops[] = {"=", "!=", "<", "<="};
    return mk_atom(mk_op(ops[rng.below(4)], {lhs, rhs}));
  }
  switch (rng.below(3)) {
    case 0: return mk_not(random_formula(rng, vars, depth - 1));
    case 1:
      return mk_and2(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
    default:
      return mk_or2(random_formula(rng, vars, depth - 1), random_formula(rng, vars, depth - 1));
  }
}

}  // namespace

TEST_CASE("property: sat models evaluate true; unsat has no bounded model") {
  BoundedSolver solver;
  SymGen gen;
  std::vector<SymVar> symvars;
  std::vector<ValuePtr> vars;
  for (int i = 0; i < 4; ++i) {
    symvars.push_back(gen.fresh(Sort::integer(), "v" + std::to_string(i)));
    vars.push_back(mk_sym(symvars.back()));
  }
  Rng rng(42);
  int sat_count = 0, unsat_count = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    FormulaPtr f = random_formula(rng, vars, 3);
    SatResult r = solver.check_sat(f);
    if (r.verdict == SatVerdict::Sat) {
      ++sat_count;
      REQUIRE(eval_ground(f, r.model));
    } else if (r.verdict == SatVerdict::Unsat) {
      ++unsat_count;
      if (unsat_count > 12) continue;  // exhaustive cross-check is 17^4 evals
      // bounded-domain completeness: exhaustive search over -8..8 agrees
      std::vector<Interpretation> sigmas{{}};
      for (const auto& v : symvars) {
        std::vector<Interpretation> next;
        for (const auto& s : sigmas)
          for (int d = -8; d <= 8; ++d) {
            Interpretation s2 = s;
            s2.values[v.id] = Constant{Sort::integer(), d};
            next.push_back(std::move(s2));
          }
        sigmas = std::move(next);
      }
      for (const auto& s : sigmas) REQUIRE(!eval_ground(f, s));
    }
  }
  CHECK(sat_count > 0);
  CHECK(unsat_count > 0);
}

TEST_CASE("check_valid agrees with unsat of the negation") {
  BoundedSolver solver;
  SymGen gen;
  std::vector<ValuePtr> vars;
  for (int i = 0; i < 3; ++i) vars.push_back(mk_sym(gen.fresh(Sort::integer(), "w")));
  Rng rng(77);
  for (int iter = 0; iter < 200; ++iter) {
    FormulaPtr f = random_formula(rng, vars, 2);
    ValidVerdict v = solver.check_valid(f);
    SatResult n = solver.check_sat(mk_not(f));
    if (v == ValidVerdict::Unknown || n.verdict == SatVerdict::Unknown) continue;
    CHECK((v == ValidVerdict::Valid) == (n.verdict == SatVerdict::Unsat));
  }
}
