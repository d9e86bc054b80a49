#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "oracles.hpp"

using namespace sref;

TEST_CASE("render_query emits the SMT-LIB2 protocol") {
  SymGen gen;
  Sort node = Sort::uninterpreted("Node");
  ValuePtr a = mk_sym(gen.fresh(node, "a"));
  ValuePtr x = mk_sym(gen.fresh(Sort::integer(), "x"));
  FormulaPtr f = mk_and2(mk_ne(a, mk_constant({node, 0})), mk_atom(mk_op("<", {mk_int(0), x})));
  std::string q = Smt2ProcessSolver::render_query(f);
  CHECK(q.find("(set-logic ALL)") != std::string::npos);
  CHECK(q.find("(declare-const a$0 Int)") != std::string::npos);
  CHECK(q.find("(declare-const x$1 Int)") != std::string::npos);
  CHECK(q.find("(assert") != std::string::npos);
  CHECK(q.find("(check-sat)") != std::string::npos);
  CHECK(q.find("(get-model)") != std::string::npos);
  // uninterpreted sorts are Ints constrained nonnegative, null is 0
  CHECK(q.find("(>= a$0 0)") != std::string::npos);
  CHECK(q.find("(not (=") != std::string::npos);
}

namespace {

// A mock solver: answers sat with a canned model, unsat, or hangs,
// depending on a marker constant in the query.
const char* kMockScript = R"PY(#!/usr/bin/env python3
import sys, time, re
text = open(sys.argv[1]).read()
if "12345" in text:
    print("unsat")
elif "77777" in text:
    time.sleep(30)
else:
    print("sat")
    print("(model")
    for name in re.findall(r"declare-const (\S+) Int", text):
        print(f"  (define-fun {name} () Int 4)")
    for name in re.findall(r"declare-const (\S+) Bool", text):
        print(f"  (define-fun {name} () Bool true)")
    print(")")
)PY";

std::string write_mock() {
  std::string path = "/tmp/sref_mock_solver.py";
  std::ofstream out(path);
  out << kMockScript;
  out.close();
  return "python3 " + path;
}

}  // namespace

TEST_CASE("subprocess solver round-trips sat/unsat/timeout") {
  Smt2ProcessSolver solver(write_mock());
  solver.set_default_budget(std::chrono::milliseconds(2000));
  SymGen gen;
  ValuePtr x = mk_sym(gen.fresh(Sort::integer(), "x"));
  ValuePtr b = mk_sym(gen.fresh(Sort::boolean(), "b"));

  SatResult sat = solver.check_sat(mk_and2(mk_eq(x, mk_int(4)), mk_atom(b)));
  REQUIRE(sat.verdict == SatVerdict::Sat);
  CHECK(sat.model.lookup(0).value().value == 4);
  CHECK(sat.model.lookup(1).value().value == 1);
  CHECK(eval_ground(mk_eq(x, mk_int(4)), sat.model));

  SatResult unsat = solver.check_sat(mk_eq(x, mk_int(12345)));
  CHECK(unsat.verdict == SatVerdict::Unsat);

  SatResult hung = solver.check_sat(mk_eq(x, mk_int(77777)), std::chrono::milliseconds(300));
  CHECK(hung.verdict == SatVerdict::Unknown);  // timeout is Unknown, never Unsat
}

TEST_CASE("missing solver binary reports Unknown") {
  Smt2ProcessSolver solver("/nonexistent/solver");
  SymGen gen;
  ValuePtr x = mk_sym(gen.fresh(Sort::integer(), "x"));
  CHECK(solver.check_sat(mk_eq(x, mk_int(1))).verdict == SatVerdict::Unknown);
}
