#include "sref/sre.hpp"

#include <algorithm>
#include <deque>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace sref {

namespace {

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t node_hash(const ReNode& n) {
  std::uint64_t h = hash_combine(0xE5, static_cast<std::uint64_t>(n.kind));
  h = hash_combine(h, n.lit + 7);
  for (ReId k : n.kids) h = hash_combine(h, k + 13);
  return h;
}

}  // namespace

LitId ReArena::intern(const SymEvent& e) {
  auto& bucket = lit_index_[e.hash];
  for (LitId id : bucket)
    if (event_eq(lits_[id], e)) return id;
  LitId id = static_cast<LitId>(lits_.size());
  lits_.push_back(e);
  bucket.push_back(id);
  return id;
}

ReId ReArena::intern_node(ReNode n) {
  n.hash = node_hash(n);
  auto& bucket = node_index_[n.hash];
  for (ReId id : bucket) {
    const ReNode& o = nodes_[id];
    if (o.kind == n.kind && o.lit == n.lit && o.kids == n.kids) return id;
  }
  ReId id = static_cast<ReId>(nodes_.size());
  nodes_.push_back(std::move(n));
  bucket.push_back(id);
  return id;
}

ReId ReArena::empty() { return intern_node({ReKind::Empty, false, 0, {}, 0}); }
ReId ReArena::eps() { return intern_node({ReKind::Eps, true, 0, {}, 0}); }

ReId ReArena::literal(const SymEvent& e) {
  if (e.is_bottom()) return empty();
  return intern_node({ReKind::Lit, false, intern(e), {}, 0});
}

ReId ReArena::literal(LitId id) {
  if (lits_[id].is_bottom()) return empty();
  return intern_node({ReKind::Lit, false, id, {}, 0});
}

ReId ReArena::star(ReId r) {
  const ReNode& n = nodes_[r];
  if (n.kind == ReKind::Empty || n.kind == ReKind::Eps) return eps();
  if (n.kind == ReKind::Star) return r;
  return intern_node({ReKind::Star, true, 0, {r}, 0});
}

ReId ReArena::concat(std::vector<ReId> rs) {
  std::vector<ReId> flat;
  for (ReId r : rs) {
    const ReNode& n = nodes_[r];
    if (n.kind == ReKind::Empty) return empty();
    if (n.kind == ReKind::Eps) continue;
    if (n.kind == ReKind::Concat)
      flat.insert(flat.end(), n.kids.begin(), n.kids.end());
    else
      flat.push_back(r);
  }
  if (flat.empty()) return eps();
  if (flat.size() == 1) return flat[0];
  bool nullable = true;
  for (ReId r : flat) nullable = nullable && nodes_[r].nullable;
  return intern_node({ReKind::Concat, nullable, 0, std::move(flat), 0});
}

ReId ReArena::negate(ReId r) {
  const ReNode& n = nodes_[r];
  if (n.kind == ReKind::Not) return n.kids[0];
  return intern_node({ReKind::Not, !n.nullable, 0, {r}, 0});
}

ReId ReArena::conj(std::vector<ReId> rs) {
  std::vector<ReId> flat;
  for (ReId r : rs) {
    const ReNode& n = nodes_[r];
    if (n.kind == ReKind::Empty) return empty();
    if (n.kind == ReKind::And)
      flat.insert(flat.end(), n.kids.begin(), n.kids.end());
    else
      flat.push_back(r);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) throw std::runtime_error("conj of empty list");
  if (flat.size() == 1) return flat[0];
  bool nullable = true;
  for (ReId r : flat) nullable = nullable && nodes_[r].nullable;
  return intern_node({ReKind::And, nullable, 0, std::move(flat), 0});
}

ReId ReArena::disj(std::vector<ReId> rs) {
  std::vector<ReId> flat;
  for (ReId r : rs) {
    const ReNode& n = nodes_[r];
    if (n.kind == ReKind::Empty) continue;
    if (n.kind == ReKind::Or)
      flat.insert(flat.end(), n.kids.begin(), n.kids.end());
    else
      flat.push_back(r);
  }
  std::sort(flat.begin(), flat.end());
  flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
  if (flat.empty()) return empty();
  if (flat.size() == 1) return flat[0];
  bool nullable = false;
  for (ReId r : flat) nullable = nullable || nodes_[r].nullable;
  return intern_node({ReKind::Or, nullable, 0, std::move(flat), 0});
}

std::string re_str(const Ctx& ctx, ReId r) {
  const ReNode& n = ctx.arena.node(r);
  switch (n.kind) {
    case ReKind::Empty: return "empty";
    case ReKind::Eps: return "eps";
    case ReKind::Lit: {
      const SymEvent& e = ctx.arena.lit(n.lit);
      if (e.is_top()) return ".";
      if (e.atoms.size() == 1 && !e.others_included) return event_str(e);
      return "[" + event_str(e) + "]";
    }
    case ReKind::Star: return "(" + re_str(ctx, n.kids[0]) + ")*";
    case ReKind::Not: return "!(" + re_str(ctx, n.kids[0]) + ")";
    case ReKind::Concat:
    case ReKind::And:
    case ReKind::Or: {
      const char* sep = n.kind == ReKind::Concat ? " ; " : n.kind == ReKind::And ? " /\\ " : " \\/ ";
      std::string s = "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += sep;
        s += re_str(ctx, n.kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string trace_str(const Ctx& ctx, const SymTrace& t) {
  if (t.empty()) return "eps";
  std::string s;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) s += " ; ";
    s += "[" + event_str(ctx.arena.lit(t[i])) + "]";
  }
  return s;
}

// ---------------------------------------------------------------------------
// next literals
// ---------------------------------------------------------------------------

namespace {

std::vector<LitId> dedup_filter(Ctx& ctx, std::vector<LitId> ls, bool keep_bottom = false) {
  std::vector<LitId> out;
  std::set<LitId> seen;
  for (LitId l : ls) {
    if (!keep_bottom && ctx.arena.lit(l).is_bottom()) continue;
    if (seen.insert(l).second) out.push_back(l);
  }
  if (out.size() > ctx.next_literal_cap)
    throw std::runtime_error("next-literal set exceeds cap (" +
                             std::to_string(ctx.next_literal_cap) + ")");
  return out;
}

SymEvent join_all(Ctx& ctx, const std::vector<LitId>& ls) {
  SymEvent acc = bottom_event();
  for (LitId l : ls) acc = join(acc, ctx.arena.lit(l));
  return acc;
}

// L1 ⋈ L2 = { l1⊓l2, l1⊓∁L2, ∁L1⊓l2 }
std::vector<LitId> join_sets(Ctx& ctx, const std::vector<LitId>& a, const std::vector<LitId>& b) {
  SymEvent ca = complement(join_all(ctx, a));
  SymEvent cb = complement(join_all(ctx, b));
  std::vector<LitId> out;
  for (LitId l1 : a)
    for (LitId l2 : b) out.push_back(ctx.arena.intern(meet(ctx.arena.lit(l1), ctx.arena.lit(l2))));
  for (LitId l1 : a) out.push_back(ctx.arena.intern(meet(ctx.arena.lit(l1), cb)));
  for (LitId l2 : b) out.push_back(ctx.arena.intern(meet(ca, ctx.arena.lit(l2))));
  return dedup_filter(ctx, std::move(out));
}

}  // namespace

std::vector<LitId> next_literals(Ctx& ctx, ReId r) {
  auto& memo = ctx.next_memo;
  auto it = memo.find(r);
  if (it != memo.end()) return it->second;

  const ReNode n = ctx.arena.node(r);
  std::vector<LitId> out;
  switch (n.kind) {
    case ReKind::Empty:
    case ReKind::Eps:
      out = {ctx.arena.bottom_lit()};
      break;
    case ReKind::Lit:
      out = {n.lit};
      break;
    case ReKind::Star:
      out = next_literals(ctx, n.kids[0]);
      break;
    case ReKind::Concat: {
      // fold as R1 · (R2 · ... · Rn)
      ReId head = n.kids[0];
      std::vector<ReId> rest(n.kids.begin() + 1, n.kids.end());
      ReId tail = ctx.arena.concat(std::move(rest));
      out = next_literals(ctx, head);
      if (ctx.arena.nullable(head)) out = join_sets(ctx, out, next_literals(ctx, tail));
      break;
    }
    case ReKind::Not: {
      out = next_literals(ctx, n.kids[0]);
      SymEvent comp = complement(join_all(ctx, out));
      if (!comp.is_bottom()) out.push_back(ctx.arena.intern(comp));
      out = dedup_filter(ctx, std::move(out));
      break;
    }
    case ReKind::And: {
      // The pairwise-meet set alone does not decide each conjunct's leaves
      // for literals refined only against its complement; the join ⋈ adds
      // exactly the decided-dead elements (ℓ₁⊓∁L₂ etc.), keeping the
      // Lit-base dichotomy total.  Their derivative is ∅ by construction.
      out = next_literals(ctx, n.kids[0]);
      for (size_t i = 1; i < n.kids.size(); ++i)
        out = join_sets(ctx, out, next_literals(ctx, n.kids[i]));
      break;
    }
    case ReKind::Or: {
      out = next_literals(ctx, n.kids[0]);
      for (size_t i = 1; i < n.kids.size(); ++i)
        out = join_sets(ctx, out, next_literals(ctx, n.kids[i]));
      break;
    }
  }
  if (out.empty()) out = {ctx.arena.bottom_lit()};
  memo[r] = out;
  return out;
}

LitId literal_set_complement(Ctx& ctx, const std::vector<LitId>& ls) {
  return ctx.arena.intern(complement(join_all(ctx, ls)));
}

// ---------------------------------------------------------------------------
// symbolic derivative
// ---------------------------------------------------------------------------

ReId deriv_literal(Ctx& ctx, ReId r, LitId lit) {
  if (ctx.arena.lit(lit).is_bottom())
    throw std::runtime_error("derivative over the bottom literal");
  auto& memo = ctx.deriv_memo;
  auto key = std::make_pair(r, lit);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;

  const ReNode n = ctx.arena.node(r);
  ReId out = ctx.arena.empty();
  switch (n.kind) {
    case ReKind::Empty:
    case ReKind::Eps:
      out = ctx.arena.empty();
      break;
    case ReKind::Lit: {
      if (!ctx.solver) throw std::runtime_error("no solver configured");
      const SymEvent& sub = ctx.arena.lit(lit);
      const SymEvent& sup = ctx.arena.lit(n.lit);
      Inclusion in = includes(sub, sup, ctx.sig, ctx.gen, *ctx.solver);
      if (in == Inclusion::Yes) {
        out = ctx.arena.eps();
        break;
      }
      if (in == Inclusion::Unknown) throw SolverUnknownError();
      Inclusion out_of = includes(sub, complement(sup), ctx.sig, ctx.gen, *ctx.solver);
      if (out_of == Inclusion::Yes) {
        out = ctx.arena.empty();
        break;
      }
      if (out_of == Inclusion::Unknown) throw SolverUnknownError();
      throw NotAPrefixError();
    }
    case ReKind::Star:
      out = ctx.arena.concat2(deriv_literal(ctx, n.kids[0], lit), r);
      break;
    case ReKind::Concat: {
      ReId head = n.kids[0];
      std::vector<ReId> rest(n.kids.begin() + 1, n.kids.end());
      ReId tail = ctx.arena.concat(std::move(rest));
      ReId left = ctx.arena.concat2(deriv_literal(ctx, head, lit), tail);
      if (ctx.arena.nullable(head))
        out = ctx.arena.disj({left, deriv_literal(ctx, tail, lit)});
      else
        out = left;
      break;
    }
    case ReKind::Not:
      out = ctx.arena.negate(deriv_literal(ctx, n.kids[0], lit));
      break;
    case ReKind::And: {
      std::vector<ReId> kids;
      kids.reserve(n.kids.size());
      for (ReId k : n.kids) kids.push_back(deriv_literal(ctx, k, lit));
      out = ctx.arena.conj(std::move(kids));
      break;
    }
    case ReKind::Or: {
      std::vector<ReId> kids;
      kids.reserve(n.kids.size());
      for (ReId k : n.kids) kids.push_back(deriv_literal(ctx, k, lit));
      out = ctx.arena.disj(std::move(kids));
      break;
    }
  }
  memo[key] = out;
  return out;
}

ReId deriv_trace(Ctx& ctx, ReId r, const SymTrace& t) {
  ReId cur = r;
  for (LitId l : t) cur = deriv_literal(ctx, cur, l);
  return cur;
}

// ---------------------------------------------------------------------------
// prefix enumeration / sampling
// ---------------------------------------------------------------------------

void enumerate_prefixes(Ctx& ctx, ReId r, size_t max_len, bool include_dead,
                        const std::function<bool(const PrefixItem&)>& yield,
                        bool keep_unknown) {
  std::deque<PrefixItem> frontier;
  frontier.push_back({{}, r, false});
  if (!yield(frontier.front())) return;
  size_t level = 0;
  while (level < max_len && !frontier.empty()) {
    std::deque<PrefixItem> next_frontier;
    for (const PrefixItem& item : frontier) {
      std::vector<LitId> ls = next_literals(ctx, item.deriv);
      std::vector<LitId> filtered;
      for (LitId l : ls)
        if (!ctx.arena.lit(l).is_bottom()) filtered.push_back(l);
      if (include_dead) {
        LitId comp = literal_set_complement(ctx, ls);
        if (!ctx.arena.lit(comp).is_bottom()) filtered.push_back(comp);
      }
      for (LitId l : filtered) {
        PrefixItem child;
        child.trace = item.trace;
        child.trace.push_back(l);
        child.via_unknown = item.via_unknown;
        try {
          child.deriv = deriv_literal(ctx, item.deriv, l);
        } catch (const SolverUnknownError&) {
          if (!keep_unknown) {
            std::cerr << "[sre] dropping prefix branch on Unknown inclusion\n";
            continue;
          }
          // Over-approximate the blocked step by ε so the branch survives
          // at lowest priority; verdicts behind it are gated by replay.
          child.deriv = item.deriv;
          child.via_unknown = true;
        }
        if (!include_dead && ctx.arena.is_empty(child.deriv)) continue;
        if (!yield(child)) return;
        next_frontier.push_back(std::move(child));
      }
    }
    frontier = std::move(next_frontier);
    ++level;
  }
}

void sample_traces(Ctx& ctx, ReId r, size_t max_len,
                   const std::function<bool(const PrefixItem&)>& yield) {
  enumerate_prefixes(ctx, r, max_len, /*include_dead=*/false,
                     [&](const PrefixItem& item) {
                       if (ctx.arena.nullable(item.deriv)) return yield(item);
                       return true;
                     });
}

std::vector<PrefixItem> sample_traces_upto(Ctx& ctx, ReId r, size_t max_len) {
  std::vector<PrefixItem> out;
  sample_traces(ctx, r, max_len, [&](const PrefixItem& item) {
    out.push_back(item);
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// DistToDead
// ---------------------------------------------------------------------------

size_t dist_to_dead(Ctx& ctx, ReId r, size_t cutoff) {
  auto& exact = ctx.dist_memo;
  auto it = exact.find(r);
  if (it != exact.end()) return it->second <= cutoff ? it->second : kAboveCutoff;

  if (ctx.arena.is_empty(r)) {
    exact[r] = 0;
    return 0;
  }
  std::set<ReId> visited{r};
  std::vector<ReId> frontier{r};
  for (size_t d = 1; d <= cutoff; ++d) {
    std::vector<ReId> next_frontier;
    for (ReId s : frontier) {
      std::vector<LitId> ls;
      try {
        ls = next_literals(ctx, s);
      } catch (const std::runtime_error&) {
        continue;  // cap blown: treat this state as opaque
      }
      LitId comp = literal_set_complement(ctx, ls);
      std::vector<LitId> all = ls;
      if (!ctx.arena.lit(comp).is_bottom()) all.push_back(comp);
      for (LitId l : all) {
        if (ctx.arena.lit(l).is_bottom()) continue;
        ReId d2;
        try {
          d2 = deriv_literal(ctx, s, l);
        } catch (const SolverUnknownError&) {
          continue;
        }
        if (ctx.arena.is_empty(d2)) {
          exact[r] = d;
          return d;
        }
        if (visited.insert(d2).second) next_frontier.push_back(d2);
      }
    }
    frontier = std::move(next_frontier);
    if (frontier.empty()) break;  // no dead state reachable at all
  }
  return kAboveCutoff;
}

// ---------------------------------------------------------------------------
// trace conjunction
// ---------------------------------------------------------------------------

std::optional<SymTrace> trace_conj(Ctx& ctx, const SymTrace& a, const SymTrace& b) {
  if (a.size() != b.size()) return std::nullopt;
  SymTrace out;
  out.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    SymEvent m = meet(ctx.arena.lit(a[i]), ctx.arena.lit(b[i]));
    if (m.is_bottom()) return std::nullopt;
    out.push_back(ctx.arena.intern(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ground oracle
// ---------------------------------------------------------------------------

ReId ground_deriv(Ctx& ctx, ReId r, const GroundEvent& alpha, const Interpretation& sigma) {
  const ReNode n = ctx.arena.node(r);
  switch (n.kind) {
    case ReKind::Empty:
    case ReKind::Eps:
      return ctx.arena.empty();
    case ReKind::Lit:
      return match_ground(ctx.arena.lit(n.lit), alpha, sigma, ctx.sig) ? ctx.arena.eps()
                                                                       : ctx.arena.empty();
    case ReKind::Star:
      return ctx.arena.concat2(ground_deriv(ctx, n.kids[0], alpha, sigma), r);
    case ReKind::Concat: {
      ReId head = n.kids[0];
      std::vector<ReId> rest(n.kids.begin() + 1, n.kids.end());
      ReId tail = ctx.arena.concat(std::move(rest));
      ReId left = ctx.arena.concat2(ground_deriv(ctx, head, alpha, sigma), tail);
      if (ctx.arena.nullable(head))
        return ctx.arena.disj({left, ground_deriv(ctx, tail, alpha, sigma)});
      return left;
    }
    case ReKind::Not:
      return ctx.arena.negate(ground_deriv(ctx, n.kids[0], alpha, sigma));
    case ReKind::And: {
      std::vector<ReId> kids;
      for (ReId k : n.kids) kids.push_back(ground_deriv(ctx, k, alpha, sigma));
      return ctx.arena.conj(std::move(kids));
    }
    case ReKind::Or: {
      std::vector<ReId> kids;
      for (ReId k : n.kids) kids.push_back(ground_deriv(ctx, k, alpha, sigma));
      return ctx.arena.disj(std::move(kids));
    }
  }
  return ctx.arena.empty();
}

bool ground_match(Ctx& ctx, ReId r, const GroundTrace& tau, const Interpretation& sigma) {
  ReId cur = r;
  for (const GroundEvent& alpha : tau) cur = ground_deriv(ctx, cur, alpha, sigma);
  return ctx.arena.nullable(cur);
}

std::vector<GroundTrace> ground_words(Ctx& ctx, ReId r, const std::vector<GroundEvent>& alphabet,
                                      size_t max_len, const Interpretation& sigma) {
  std::vector<GroundTrace> out;
  // Trie walk: one incremental derivative per prefix node.
  struct Item { GroundTrace word; ReId state; };
  std::deque<Item> frontier;
  frontier.push_back({{}, r});
  size_t level = 0;
  while (true) {
    for (const Item& item : frontier)
      if (ctx.arena.nullable(item.state)) out.push_back(item.word);
    if (level == max_len) break;
    std::deque<Item> next_frontier;
    for (const Item& item : frontier) {
      for (const GroundEvent& alpha : alphabet) {
        Item child;
        child.word = item.word;
        child.word.push_back(alpha);
        child.state = ground_deriv(ctx, item.state, alpha, sigma);
        next_frontier.push_back(std::move(child));
      }
    }
    frontier = std::move(next_frontier);
    ++level;
  }
  return out;
}

// ---------------------------------------------------------------------------
// plumbing
// ---------------------------------------------------------------------------

ReId re_substitute(Ctx& ctx, ReId r, const std::map<std::string, ValuePtr>& binding) {
  const ReNode n = ctx.arena.node(r);
  switch (n.kind) {
    case ReKind::Empty:
    case ReKind::Eps:
      return r;
    case ReKind::Lit:
      return ctx.arena.literal(substitute(ctx.arena.lit(n.lit), binding));
    case ReKind::Star:
      return ctx.arena.star(re_substitute(ctx, n.kids[0], binding));
    case ReKind::Not:
      return ctx.arena.negate(re_substitute(ctx, n.kids[0], binding));
    case ReKind::Concat:
    case ReKind::And:
    case ReKind::Or: {
      std::vector<ReId> kids;
      kids.reserve(n.kids.size());
      for (ReId k : n.kids) kids.push_back(re_substitute(ctx, k, binding));
      if (n.kind == ReKind::Concat) return ctx.arena.concat(std::move(kids));
      if (n.kind == ReKind::And) return ctx.arena.conj(std::move(kids));
      return ctx.arena.disj(std::move(kids));
    }
  }
  return r;
}

void re_collect_syms(const Ctx& ctx, ReId r, std::map<int, SymVar>& out) {
  const ReNode& n = ctx.arena.node(r);
  if (n.kind == ReKind::Lit) {
    collect_syms(ctx.arena.lit(n.lit), out);
    return;
  }
  for (ReId k : n.kids) re_collect_syms(ctx, k, out);
}

}  // namespace sref
