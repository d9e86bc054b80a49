#pragma once

#include <chrono>
#include <optional>

#include "sref/speclang.hpp"

// The two falsification engines: the naive trace-augmented baseline with
// mintermization-based satisfiability, and the derivative-guided engine
// with prefix sampling, DistToDead prioritization and early ∅-refutation.

namespace sref {

struct Bounds {
  int max_steps = 20000;    // expansion budget per deepening round
  int max_ctx = 4;          // iterative-deepening limit on sampled trace length
  int max_events = 16;      // cap on |Τ| (produced + admitted events)
  int dist_cutoff = 4;      // DistToDead exploration cutoff
  int reach_every = 8;      // lazy reachability pruning period
  int witness_len = -1;     // naive witness-word bound; -1 = |appended events| + 2
  int minterm_cap = 4096;
  std::chrono::milliseconds timeout{60000};
};

enum class Verdict { Falsified, NotFalsifiedAtBound, Budget, Unknown };

std::string verdict_str(Verdict v);

struct RunStats {
  std::int64_t states = 0;
  std::int64_t solver_calls = 0;
  double wall_ms = 0.0;
  double solver_ms = 0.0;
  size_t max_trace = 0;
};

struct Witness {
  SymTrace trace;        // empty for the naive engine
  Interpretation model;
  GroundTrace ground;
};

struct FalsifyResult {
  Verdict verdict = Verdict::Unknown;
  std::optional<Witness> witness;
  RunStats stats;
  bool replay_checked = false;
  std::string note;
};

// --- naive engine ------------------------------------------------------------

struct NState {
  FormulaPtr phi;
  ReId curr;
  ExprPtr e;
  int events = 0;  // appended-event count, capped by Bounds::max_events
};

// One small-step of the trace-augmented semantics; Choice yields both
// branches.  Pre: e is not a value and not abort.
std::vector<NState> step_naive(Ctx& ctx, const NState& s);

struct SatSreResult {
  SatVerdict verdict = SatVerdict::Unknown;
  Interpretation model;
  GroundTrace witness;
  std::string note;
};

// Satisfiability of (Φ, R): mintermize the qualifiers occurring in R into a
// finite alphabet, enumerate accepting words by increasing length up to the
// witness bound, and discharge each word's per-position constraints
// together with Φ.  Unsat only when the letter automaton cannot accept at
// all, or every accepting word up to the bound is refuted and no deeper
// accepting continuation remains.
SatSreResult sat_sre(Ctx& ctx, const FormulaPtr& phi, ReId r, const Bounds& bounds);

FalsifyResult run_naive(Ctx& ctx, const Harness& harness, const Bounds& bounds);

// --- derivative engine ---------------------------------------------------------

struct DState {
  FormulaPtr phi;
  SymTrace trace;
  ReId cont;
  ExprPtr e;
  int events = 0;
  bool via_unknown = false;
  std::uint64_t id = 0;
};

std::vector<DState> step_deriv(Ctx& ctx, const DState& s, const Bounds& bounds);
std::vector<DState> admit_step(Ctx& ctx, const DState& s, ReId past, const Bounds& bounds);
std::vector<DState> append_step(Ctx& ctx, const DState& s, ReId eff, int sample_len,
                                const Bounds& bounds);

// True iff the continuation effect is the ∅ node; the caller still has to
// establish reachability before declaring a falsification.
bool early_refute(const Ctx& ctx, const DState& s);

SatResult reachable(Ctx& ctx, const FormulaPtr& phi, const SymTrace& trace);

FalsifyResult run_deriv(Ctx& ctx, const Harness& harness, const Bounds& bounds);

// Re-validates a Falsified result: instantiates the witness trace to ground
// events under the model and confirms the path condition holds and the
// ground trace is rejected by the postcondition.
bool replay(Ctx& ctx, const FalsifyResult& r, ReId post);

}  // namespace sref
