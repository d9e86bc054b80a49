#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kv_fixtures.hpp"

using namespace sref;
using namespace sref::testing;

namespace {

LTLfPtr random_ltlf(Rng& rng, const std::vector<SymEvent>& pool, int depth) {
  if (depth == 0 || rng.below(3) == 0) return ltlf_lit(pool[rng.below(pool.size())]);
  switch (rng.below(7)) {
    case 0: return ltlf_x(random_ltlf(rng, pool, depth - 1));
    case 1: return ltlf_u(pool[rng.below(pool.size())], random_ltlf(rng, pool, depth - 1));
    case 2: return ltlf_w(pool[rng.below(pool.size())], random_ltlf(rng, pool, depth - 1));
    case 3: return ltlf_f(random_ltlf(rng, pool, depth - 1));
    case 4: return ltlf_g(random_ltlf(rng, pool, depth - 1));
    case 5: return ltlf_not(random_ltlf(rng, pool, depth - 1));
    default:
      return rng.flip()
                 ? ltlf_and(random_ltlf(rng, pool, depth - 1), random_ltlf(rng, pool, depth - 1))
                 : ltlf_or(random_ltlf(rng, pool, depth - 1), random_ltlf(rng, pool, depth - 1));
  }
}

}  // namespace

TEST_CASE("translation rules: structural cases") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  ReArena& a = c.arena;
  SymEvent fa = u.lit_eq("f", 1);
  ReId top_star = a.star(a.literal(top_event()));

  // F R = •*·R
  ReId f = to_sre(c, ltlf_f(ltlf_lit(fa)));
  CHECK(f == a.concat({top_star, a.literal(fa), top_star}));

  // ℓ U R = ℓ*·R
  SymEvent gb = u.lit_eq("g", 0);
  ReId uu = to_sre(c, ltlf_u(gb, ltlf_lit(fa)));
  CHECK(uu == a.concat({a.star(a.literal(gb)), a.literal(fa), top_star}));

  // X on the empty trace is false because •·R accepts no empty word
  CHECK(!c.arena.nullable(to_sre(c, ltlf_x(ltlf_lit(fa)))));
}

TEST_CASE("eval_ltlf pinned conventions") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  GroundEvent ea = u.alphabet[1];  // f(1)
  GroundEvent eb = u.alphabet[0];  // f(0)
  SymEvent la = u.lit_eq("f", 1);
  SymEvent lb = u.lit_eq("g", 0);

  CHECK(eval_ltlf(c, ltlf_g(ltlf_lit(la)), {ea, ea}, {}));
  CHECK(!eval_ltlf(c, ltlf_g(ltlf_lit(la)), {ea, eb}, {}));
  CHECK(eval_ltlf(c, ltlf_g(ltlf_lit(la)), {}, {}));  // G over ε is true
  CHECK(!eval_ltlf(c, ltlf_f(ltlf_lit(lb)), {ea}, {}));
  CHECK(!eval_ltlf(c, ltlf_f(ltlf_lit(lb)), {}, {}));  // F over ε, non-nullable body
  CHECK(!eval_ltlf(c, ltlf_x(ltlf_lit(la)), {}, {}));  // X needs an event
  CHECK(eval_ltlf(c, ltlf_x(ltlf_lit(la)), {eb, ea}, {}));
}

TEST_CASE("the stored pattern equals the context language denotationally") {
  RemoveFixture fx;
  Ctx& c = fx.kv.ctx;
  ReArena& a = c.arena;
  VarScope sc{{"a", fx.kv.node}, {"b", fx.kv.node}};

  LTLfPtr stored = parse_ltlf(c, "F (<Nxt.put a b> /\\ X G ~<Nxt.put a _>)", sc);
  ReId lhs = re_substitute(c, to_sre(c, stored), {{"a", mk_sym(fx.a)}, {"b", mk_sym(fx.b)}});

  // R_{a↷b} = •* · <Nxt.put a b> · (~<Nxt.put a _>)*
  SymEvent keep = substitute(complement(parse_literal(c, "<Nxt.put a _>", sc)),
                             {{"a", mk_sym(fx.a)}, {"b", mk_sym(fx.b)}});
  ReId top_star = a.star(a.literal(top_event()));
  ReId rhs = a.concat({top_star, a.literal(fx.g), a.star(a.literal(keep))});

  CHECK(bounded_equiv(c, lhs, rhs, fx.alphabet(3, 2), 4, {fx.a, fx.b}, 3));
}

TEST_CASE("parse_ltlf grammar and errors") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  LTLfPtr w = parse_ltlf(c, "<f 1> W <g 2>", {});
  CHECK(w->kind == LTLfFormula::Kind::W);
  LTLfPtr uu = parse_ltlf(c, "~<f 1> U <g 2>", {});
  CHECK(uu->kind == LTLfFormula::Kind::U);
  CHECK(uu->lit.others_included);  // ~literal is the event complement

  CHECK_THROWS_AS(parse_ltlf(c, "G", {}), ParseError);
  CHECK_THROWS_AS(parse_ltlf(c, "(F <f 1>) U <g 2>", {}), ParseError);  // non-literal U lhs
}

TEST_CASE("property: translation adequacy on random formulas") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  Rng rng(90210);
  std::vector<SymEvent> pool{u.lit_eq("f", 0), u.lit_ne("f", 1), u.lit_eq("g", 2)};
  std::vector<GroundEvent> alpha{u.alphabet[0], u.alphabet[1], u.alphabet[5]};
  auto words = all_words(alpha, 4);
  for (int iter = 0; iter < 300; ++iter) {
    LTLfPtr f = random_ltlf(rng, pool, 3);
    ReId r = to_sre(c, f);
    for (const auto& w : words)
      REQUIRE(eval_ltlf(c, f, w, {}) == ground_match(c, r, w, {}));
  }
}

TEST_CASE("property: W decomposes into never-fires or until") {
  SmallUniverse u;
  Ctx& c = u.ctx;
  ReArena& a = c.arena;
  Rng rng(1212);
  std::vector<SymEvent> pool{u.lit_eq("f", 0), u.lit_eq("g", 1), complement(u.lit_eq("f", 2))};
  std::vector<GroundEvent> alpha{u.alphabet[0], u.alphabet[2], u.alphabet[4]};
  ReId top_star = a.star(a.literal(top_event()));
  for (int iter = 0; iter < 100; ++iter) {
    SymEvent lit = pool[rng.below(pool.size())];
    LTLfPtr body = random_ltlf(rng, pool, 2);
    ReId w = to_sre(c, ltlf_w(lit, body));
    ReId r = to_sre(c, body);
    ReId never = a.negate(a.concat2(top_star, r));
    ReId until = a.concat2(a.star(a.literal(lit)), r);
    for (const auto& word : all_words(alpha, 3))
      REQUIRE(ground_match(c, w, word, {}) ==
              (ground_match(c, never, word, {}) || ground_match(c, until, word, {})));
  }
}
