#pragma once

#include <cstdint>
#include <vector>

#include "sref/exec.hpp"
#include "sref/parse.hpp"

// Test-only oracles, independent of the derivative implementation paths
// they check: a backtracking matcher over the SRE syntax tree, exhaustive
// word/interpretation enumerators over small domains, and a deterministic
// RNG for the property suites.

namespace sref::testing {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9E3779B97F4A7C15ULL) {}
  std::uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  bool flip() { return next() & 1; }
};

// Membership by backtracking over the syntax tree (no derivatives at all).
inline bool backtrack_match(Ctx& ctx, ReId r, const GroundTrace& w, const Interpretation& sigma,
                            size_t lo, size_t hi) {
  const ReNode& n = ctx.arena.node(r);
  switch (n.kind) {
    case ReKind::Empty: return false;
    case ReKind::Eps: return lo == hi;
    case ReKind::Lit:
      return hi == lo + 1 && match_ground(ctx.arena.lit(n.lit), w[lo], sigma, ctx.sig);
    case ReKind::Star: {
      if (lo == hi) return true;
      for (size_t mid = lo + 1; mid <= hi; ++mid)
        if (backtrack_match(ctx, n.kids[0], w, sigma, lo, mid) &&
            backtrack_match(ctx, r, w, sigma, mid, hi))
          return true;
      return false;
    }
    case ReKind::Concat: {
      // split among n parts recursively: first part then the rest
      std::vector<ReId> rest(n.kids.begin() + 1, n.kids.end());
      ReId tail = ctx.arena.concat(std::move(rest));
      for (size_t mid = lo; mid <= hi; ++mid)
        if (backtrack_match(ctx, n.kids[0], w, sigma, lo, mid) &&
            backtrack_match(ctx, tail, w, sigma, mid, hi))
          return true;
      return false;
    }
    case ReKind::Not: return !backtrack_match(ctx, n.kids[0], w, sigma, lo, hi);
    case ReKind::And: {
      for (ReId k : n.kids)
        if (!backtrack_match(ctx, k, w, sigma, lo, hi)) return false;
      return true;
    }
    case ReKind::Or: {
      for (ReId k : n.kids)
        if (backtrack_match(ctx, k, w, sigma, lo, hi)) return true;
      return false;
    }
  }
  return false;
}

inline bool backtrack_match(Ctx& ctx, ReId r, const GroundTrace& w,
                            const Interpretation& sigma = {}) {
  return backtrack_match(ctx, r, w, sigma, 0, w.size());
}

// All words over `alphabet` of length <= max_len, in length-lexicographic
// order.
inline std::vector<GroundTrace> all_words(const std::vector<GroundEvent>& alphabet,
                                          size_t max_len) {
  std::vector<GroundTrace> out{{}};
  std::vector<GroundTrace> level{{}};
  for (size_t len = 1; len <= max_len; ++len) {
    std::vector<GroundTrace> next;
    for (const auto& w : level)
      for (const auto& a : alphabet) {
        GroundTrace w2 = w;
        w2.push_back(a);
        next.push_back(w2);
        out.push_back(std::move(w2));
      }
    level = std::move(next);
  }
  return out;
}

// All interpretations of the given variables over value domain 0..dom-1.
inline std::vector<Interpretation> all_sigmas(const std::vector<SymVar>& vars, int dom) {
  std::vector<Interpretation> out{{}};
  for (const auto& v : vars) {
    std::vector<Interpretation> next;
    for (const auto& s : out)
      for (int d = 0; d < dom; ++d) {
        Interpretation s2 = s;
        s2.values[v.id] = Constant{v.sort, d};
        next.push_back(std::move(s2));
      }
    out = std::move(next);
  }
  return out;
}

// --- shared small test universes ---------------------------------------------

// One-argument effects f and g over an uninterpreted sort V; the ground
// alphabet takes argument values 0..2 with unit results.
struct SmallUniverse {
  Ctx ctx;
  BoundedSolver solver;
  Sort v = Sort::uninterpreted("V");
  std::vector<GroundEvent> alphabet;

  SmallUniverse() {
    ctx.sig.add({"f", {v}, Sort::unit()});
    ctx.sig.add({"g", {v}, Sort::unit()});
    ctx.solver = &solver;
    for (int x = 0; x <= 2; ++x) alphabet.push_back({"f", {Constant{v, x}}, Constant{Sort::unit(), 0}});
    for (int x = 0; x <= 2; ++x) alphabet.push_back({"g", {Constant{v, x}}, Constant{Sort::unit(), 0}});
  }

  // ground literal <f | %0 = c> etc.
  SymEvent lit_eq(const std::string& f, int c) {
    return atom_event(f, mk_eq(mk_var(arg_var_name(0), v), mk_constant({v, c})));
  }
  SymEvent lit_ne(const std::string& f, int c) {
    return atom_event(f, mk_ne(mk_var(arg_var_name(0), v), mk_constant({v, c})));
  }
  // literal over a symbolic variable: <f | %0 = x>
  SymEvent lit_eq_sym(const std::string& f, const SymVar& x) {
    return atom_event(f, mk_eq(mk_var(arg_var_name(0), v), mk_sym(x)));
  }
};

// The motivating key-value-store universe: Nxt / Val stores over Node/Elem.
struct KvUniverse {
  Ctx ctx;
  BoundedSolver solver;
  Sort node = Sort::uninterpreted("Node");
  Sort elem = Sort::uninterpreted("Elem");

  KvUniverse() {
    ctx.sig.add({"Nxt.put", {node, node}, Sort::unit()});
    ctx.sig.add({"Nxt.get", {node}, node});
    ctx.sig.add({"Val.put", {node, elem}, Sort::unit()});
    ctx.sig.add({"Val.get", {node}, elem});
    ctx.solver = &solver;
  }

  VarScope scope(std::initializer_list<std::pair<std::string, Sort>> vars) {
    VarScope s;
    for (const auto& [n, so] : vars) s.emplace(n, so);
    return s;
  }
};

// Random ground SREs over the SmallUniverse literal pool.
inline ReId random_sre(Ctx& ctx, Rng& rng, const std::vector<SymEvent>& pool, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    switch (rng.below(8)) {
      case 0: return ctx.arena.eps();
      case 1: return ctx.arena.empty();
      default: return ctx.arena.literal(pool[rng.below(pool.size())]);
    }
  }
  switch (rng.below(6)) {
    case 0: return ctx.arena.star(random_sre(ctx, rng, pool, depth - 1));
    case 1:
      return ctx.arena.concat2(random_sre(ctx, rng, pool, depth - 1),
                               random_sre(ctx, rng, pool, depth - 1));
    case 2: return ctx.arena.negate(random_sre(ctx, rng, pool, depth - 1));
    case 3:
      return ctx.arena.conj({random_sre(ctx, rng, pool, depth - 1),
                             random_sre(ctx, rng, pool, depth - 1)});
    default:
      return ctx.arena.disj({random_sre(ctx, rng, pool, depth - 1),
                             random_sre(ctx, rng, pool, depth - 1)});
  }
}

}  // namespace sref::testing
