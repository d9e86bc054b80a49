#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "sref/logic.hpp"

// Satisfiability and validity for closed qualifier formulas.  Two backends:
// an SMT-LIB2 text protocol over a child process, and a built-in
// bounded-domain solver (exhaustive over small domains) used when no
// external solver is configured.

namespace sref {

enum class SatVerdict { Sat, Unsat, Unknown };
enum class ValidVerdict { Valid, Invalid, Unknown };

struct SatResult {
  SatVerdict verdict = SatVerdict::Unknown;
  Interpretation model;  // set iff verdict == Sat
  std::string reason;    // diagnostics for Unknown

  static SatResult sat(Interpretation m) { return {SatVerdict::Sat, std::move(m), {}}; }
  static SatResult unsat() { return {SatVerdict::Unsat, {}, {}}; }
  static SatResult unknown(std::string why) { return {SatVerdict::Unknown, {}, std::move(why)}; }
};

struct SolverStats {
  std::int64_t queries = 0;
  std::int64_t sat = 0;
  std::int64_t unsat = 0;
  std::int64_t unknown = 0;
  double total_ms = 0.0;
};

class Solver {
 public:
  virtual ~Solver() = default;

  // Pre: f closed.  Sat models make eval_ground(f, model) true.
  // Solver crash or timeout reports Unknown, never Unsat.
  SatResult check_sat(const FormulaPtr& f, std::chrono::milliseconds budget);
  ValidVerdict check_valid(const FormulaPtr& f, std::chrono::milliseconds budget);

  SatResult check_sat(const FormulaPtr& f) { return check_sat(f, default_budget_); }
  ValidVerdict check_valid(const FormulaPtr& f) { return check_valid(f, default_budget_); }

  void set_default_budget(std::chrono::milliseconds b) { default_budget_ = b; }
  const SolverStats& stats() const { return stats_; }

 protected:
  virtual SatResult do_check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) = 0;

 private:
  SolverStats stats_;
  std::chrono::milliseconds default_budget_{2000};  // per-query timeout, default 2 s
};

// Exhaustive search over small per-sort domains with unit propagation.
// Bool ranges over {0,1}; an uninterpreted sort over 0..(#vars + #constants
// of that sort); Int over [-B, B] with B = max(8, max |constant| + #int
// vars + 1).  Sat answers are exact; Unsat is complete only relative to
// these windows, which suffices for the qualifier fragment exercised here.
class BoundedSolver : public Solver {
 public:
  explicit BoundedSolver(std::int64_t max_nodes = 4'000'000) : max_nodes_(max_nodes) {}

 protected:
  SatResult do_check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) override;

 private:
  std::int64_t max_nodes_;
};

// Child-process backend speaking SMT-LIB2: emits (set-logic ALL),
// declare-const per symbolic variable, assert, check-sat, get-model.  The
// command is invoked as `cmd <file>` per query; uninterpreted sorts are
// encoded as Int with null = 0.
class Smt2ProcessSolver : public Solver {
 public:
  explicit Smt2ProcessSolver(std::string command) : command_(std::move(command)) {}

  static std::string render_query(const FormulaPtr& f);

 protected:
  SatResult do_check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) override;

 private:
  std::string command_;
};

std::unique_ptr<Solver> make_solver(const std::string& solver_cmd);

}  // namespace sref
