#pragma once

#include "oracles.hpp"

// The linked-list-on-KVStore fixtures used across the sre/ltlf/engine
// tests: the context and effect languages of the remove method, built over
// ghost nodes a and b.
//
//   g  = <Nxt.put a b>         the link put
//   m  = <Nxt.put a !b>        unlink a from b
//   mb = ~m                    anything but an unlink
//   d  = <Nxt.put !a b>        link another node to b (the unsafe event)
//   l1 = ~d                    anything but the unsafe event

namespace sref::testing {

struct RemoveFixture {
  KvUniverse kv;
  SymVar a, b;
  SymEvent g, m, mb, d, l1, loop_k, t0;
  ReId ctx_auto = 0;    // automaton-faithful context: (~g ∨ g·mb*·m)* · g · mb*
  ReId ctx_pinned = 0;  // benchmark-style context: t0* · g · t0*
  ReId eff = 0;         // (~d)* · (eps ∨ m · .*)

  RemoveFixture() {
    Ctx& c = kv.ctx;
    a = c.gen.fresh(kv.node, "a");
    b = c.gen.fresh(kv.node, "b");
    VarScope sc{{"a", kv.node}, {"b", kv.node}};
    auto lit = [&](const std::string& text) {
      SymEvent e = parse_literal(c, text, sc);
      return substitute(e, {{"a", mk_sym(a)}, {"b", mk_sym(b)}});
    };
    g = lit("<Nxt.put a b>");
    m = lit("<Nxt.put a !b>");
    mb = complement(m);
    d = lit("<Nxt.put !a b>");
    l1 = complement(d);
    loop_k = meet(l1, mb);  // the safe self-loop of the effect automaton
    t0 = meet(complement(lit("<Nxt.put a _>")), complement(lit("<Nxt.put !a b>")));

    ReArena& A = c.arena;
    ReId Lg = A.literal(g), Lm = A.literal(m), Lmb = A.literal(mb), Lt0 = A.literal(t0);
    ReId head = A.star(A.disj({A.literal(complement(g)), A.concat({Lg, A.star(Lmb), Lm})}));
    ctx_auto = A.concat({head, Lg, A.star(Lmb)});
    ctx_pinned = A.concat({A.star(Lt0), Lg, A.star(Lt0)});
    ReId top_star = A.star(A.literal(top_event()));
    eff = A.concat2(A.star(A.literal(l1)),
                    A.disj({A.eps(), A.concat2(Lm, top_star)}));
  }

  // Ground alphabet over nodes {0..3} and elems {0..2}; gets return nodes /
  // elems, puts return unit.  Kept small: it is only used denotationally.
  std::vector<GroundEvent> alphabet(int nodes = 4, int elems = 2) const {
    std::vector<GroundEvent> out;
    const Sort& N = kv.node;
    const Sort& E = kv.elem;
    for (int k = 0; k < nodes; ++k)
      for (int v = 0; v < nodes; ++v)
        out.push_back({"Nxt.put", {Constant{N, k}, Constant{N, v}}, Constant{Sort::unit(), 0}});
    for (int k = 0; k < nodes; ++k)
      for (int v = 0; v < elems; ++v)
        out.push_back({"Val.put", {Constant{N, k}, Constant{E, v}}, Constant{Sort::unit(), 0}});
    (void)elems;
    return out;
  }

  Interpretation sigma(int av, int bv) const {
    Interpretation s;
    s.values[a.id] = Constant{kv.node, av};
    s.values[b.id] = Constant{kv.node, bv};
    return s;
  }
};

// Bounded-language equality under every interpretation of the given
// symbols over 0..dom-1.
inline bool bounded_equiv(Ctx& ctx, ReId r1, ReId r2, const std::vector<GroundEvent>& alphabet,
                          size_t max_len, const std::vector<SymVar>& syms = {}, int dom = 3) {
  for (const auto& sigma : all_sigmas(syms, dom)) {
    auto w1 = ground_words(ctx, r1, alphabet, max_len, sigma);
    auto w2 = ground_words(ctx, r2, alphabet, max_len, sigma);
    if (w1 != w2) return false;
  }
  return true;
}

}  // namespace sref::testing
