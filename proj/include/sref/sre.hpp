#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include "sref/events.hpp"

// Symbolic regular expressions: hash-consed nodes with rewriting smart
// constructors, nullability, symbolic derivatives, next-literal
// computation, prefix enumeration and trace sampling, DistToDead, trace
// conjunction, and the ground (classic-derivative) oracle.

namespace sref {

using ReId = std::uint32_t;
using LitId = std::uint32_t;

enum class ReKind : std::uint8_t { Empty, Eps, Lit, Star, Concat, Not, And, Or };

struct ReNode {
  ReKind kind;
  bool nullable;
  LitId lit = 0;            // ReKind::Lit
  std::vector<ReId> kids;   // Star/Not: 1; Concat/And/Or: >= 2
  std::uint64_t hash;
};

// Thrown when a literal handed to deriv_literal is neither included in nor
// disjoint from a Lit node; public entry points only derive over literals
// obtained from next_literals, which cannot trigger it.
struct NotAPrefixError : std::runtime_error {
  NotAPrefixError() : std::runtime_error("literal is not a singleton prefix") {}
};

// Thrown when an inclusion check comes back Unknown from the solver.
struct SolverUnknownError : std::runtime_error {
  SolverUnknownError() : std::runtime_error("solver returned Unknown during derivative") {}
};

class ReArena {
 public:
  // Literal interning (structural equality on stratified form).
  LitId intern(const SymEvent& e);
  const SymEvent& lit(LitId id) const { return lits_[id]; }
  LitId bottom_lit() { return intern(bottom_event()); }
  LitId top_lit() { return intern(top_event()); }

  ReId empty();
  ReId eps();
  ReId literal(const SymEvent& e);
  ReId literal(LitId id);
  ReId star(ReId r);
  ReId concat(std::vector<ReId> rs);
  ReId concat2(ReId a, ReId b) { return concat({a, b}); }
  ReId negate(ReId r);
  ReId conj(std::vector<ReId> rs);
  ReId disj(std::vector<ReId> rs);

  const ReNode& node(ReId id) const { return nodes_[id]; }
  bool nullable(ReId id) const { return nodes_[id].nullable; }
  bool is_empty(ReId id) const { return nodes_[id].kind == ReKind::Empty; }
  size_t size() const { return nodes_.size(); }

 private:
  ReId intern_node(ReNode n);

  std::vector<ReNode> nodes_;
  std::unordered_map<std::uint64_t, std::vector<ReId>> node_index_;
  std::vector<SymEvent> lits_;
  std::unordered_map<std::uint64_t, std::vector<LitId>> lit_index_;
};

// Shared engine context: the effect signature, the hash-cons arena, the
// fresh-symbol source, the solver session, and the memo tables for
// next-literal sets, derivatives and DistToDead.  Single-threaded by
// design; immutable values may be copied out and shipped elsewhere.
struct Ctx {
  EffectSignature sig;
  ReArena arena;
  SymGen gen;
  Solver* solver = nullptr;

  size_t next_literal_cap = 256;

  std::unordered_map<ReId, std::vector<LitId>> next_memo;
  std::map<std::pair<ReId, LitId>, ReId> deriv_memo;
  std::unordered_map<ReId, size_t> dist_memo;
};

using SymTrace = std::vector<LitId>;
using GroundTrace = std::vector<GroundEvent>;

std::string re_str(const Ctx& ctx, ReId r);
std::string trace_str(const Ctx& ctx, const SymTrace& t);

// --- algebraic operations ---------------------------------------------------

// Admissible next events of R.  Every returned literal is a singleton
// prefix of R; together with literal_set_complement of the result they
// cover the whole event space.  Syntactic-bottom members produced by the
// join are filtered; the {⊥} base for ∅/ε is kept.  Throws
// std::runtime_error if the set exceeds ctx.next_literal_cap.
std::vector<LitId> next_literals(Ctx& ctx, ReId r);

// ∁L = complement of the join of the set; the derivative of R over it is ∅.
LitId literal_set_complement(Ctx& ctx, const std::vector<LitId>& ls);

// Symbolic derivative over a singleton prefix; pre: lit stems from
// next_literals(r) ∪ {complement} (or lies below one of them).
ReId deriv_literal(Ctx& ctx, ReId r, LitId lit);
ReId deriv_trace(Ctx& ctx, ReId r, const SymTrace& t);

struct PrefixItem {
  SymTrace trace;
  ReId deriv;
  bool via_unknown = false;  // some step used the ε-overapproximation below
};

// Enumerates (Τ, ∂_Τ R) in BFS order (nondecreasing |Τ|), deterministically.
// include_dead additionally explores the complement literal at each level;
// without it, branches whose derivative simplifies to ∅ are pruned.  When
// keep_unknown is false, branches blocked on an Unknown inclusion are
// dropped with a note to stderr; when true they continue with ε as the
// over-approximate residual at the blocked literal and carry via_unknown,
// so callers can deprioritize them (a final replay still gates verdicts).
// The visitor returns false to stop early.
void enumerate_prefixes(Ctx& ctx, ReId r, size_t max_len, bool include_dead,
                        const std::function<bool(const PrefixItem&)>& yield,
                        bool keep_unknown = false);

// Prefixes whose derivative is nullable: symbolic traces Τ ⊑ R.
void sample_traces(Ctx& ctx, ReId r, size_t max_len,
                   const std::function<bool(const PrefixItem&)>& yield);
std::vector<PrefixItem> sample_traces_upto(Ctx& ctx, ReId r, size_t max_len);

// DistToDead(R) = min |Τ| with ∂_Τ(R) = ∅ (syntactically, after rewriting).
inline constexpr size_t kAboveCutoff = std::numeric_limits<size_t>::max();
size_t dist_to_dead(Ctx& ctx, ReId r, size_t cutoff);

// Pointwise conjunction of equal-length traces; nullopt when the lengths
// differ or some pointwise meet is syntactically bottom.
std::optional<SymTrace> trace_conj(Ctx& ctx, const SymTrace& a, const SymTrace& b);

// --- ground oracle -----------------------------------------------------------

// Classic Brzozowski recursion; qualifiers may reference symbolic variables
// covered by sigma.
ReId ground_deriv(Ctx& ctx, ReId r, const GroundEvent& alpha, const Interpretation& sigma);
bool ground_match(Ctx& ctx, ReId r, const GroundTrace& tau, const Interpretation& sigma);

// All accepted words up to max_len over a finite alphabet, by exhaustive
// enumeration; the brute-force language oracle for tests.
std::vector<GroundTrace> ground_words(Ctx& ctx, ReId r, const std::vector<GroundEvent>& alphabet,
                                      size_t max_len, const Interpretation& sigma = {});

// --- plumbing ----------------------------------------------------------------

ReId re_substitute(Ctx& ctx, ReId r, const std::map<std::string, ValuePtr>& binding);
void re_collect_syms(const Ctx& ctx, ReId r, std::map<int, SymVar>& out);

}  // namespace sref
