#include "sref/events.hpp"

#include <algorithm>
#include <sstream>

namespace sref {

void EffectSignature::add(EffectDecl d) {
  if (const EffectDecl* prev = find(d.fname)) {
    // re-declaring the identical signature is a no-op (modules re-parsed
    // against one shared context); a conflicting one is an error
    if (prev->arg_sorts == d.arg_sorts && prev->ret_sort == d.ret_sort) return;
    throw std::runtime_error("conflicting effect declaration: " + d.fname);
  }
  decls.push_back(std::move(d));
}

std::string arg_var_name(size_t i) { return "%" + std::to_string(i); }

ValuePtr arg_var(const EffectDecl& d, size_t i) {
  if (i >= d.arg_sorts.size())
    throw std::runtime_error(d.fname + ": argument index out of range");
  return mk_var(arg_var_name(i), d.arg_sorts[i]);
}

ValuePtr ret_var(const EffectDecl& d) { return mk_var(ret_var_name(), d.ret_sort); }

namespace {

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t event_hash(const std::vector<std::pair<std::string, FormulaPtr>>& atoms,
                         bool others) {
  std::uint64_t h = others ? 0x0D1 : 0x0D2;
  for (const auto& [f, q] : atoms)
    h = hash_combine(h, hash_combine(std::hash<std::string>{}(f), q->hash));
  return h;
}

}  // namespace

SymEvent mk_event(std::vector<std::pair<std::string, FormulaPtr>> atoms, bool others_included) {
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::string, FormulaPtr>> out;
  for (auto& [f, q] : atoms) {
    if (!out.empty() && out.back().first == f)
      throw std::runtime_error("stratified literal has two atoms for " + f);
    if (others_included && is_true(q)) continue;   // redundant with the flag
    if (!others_included && is_false(q)) continue; // absence already means excluded
    out.emplace_back(f, q);
  }
  SymEvent e;
  e.atoms = std::move(out);
  e.others_included = others_included;
  e.hash = event_hash(e.atoms, e.others_included);
  return e;
}

SymEvent bottom_event() { return mk_event({}, false); }
SymEvent top_event() { return mk_event({}, true); }

SymEvent atom_event(const std::string& fname, FormulaPtr qualifier) {
  return mk_event({{fname, std::move(qualifier)}}, false);
}

bool event_eq(const SymEvent& a, const SymEvent& b) {
  if (a.hash != b.hash || a.others_included != b.others_included ||
      a.atoms.size() != b.atoms.size())
    return false;
  for (size_t i = 0; i < a.atoms.size(); ++i) {
    if (a.atoms[i].first != b.atoms[i].first) return false;
    if (!formula_eq(a.atoms[i].second, b.atoms[i].second)) return false;
  }
  return true;
}

std::string event_str(const SymEvent& e) {
  if (e.is_bottom()) return "<!>";
  if (e.is_top()) return ".";
  std::ostringstream os;
  bool first = true;
  for (const auto& [f, q] : e.atoms) {
    if (!first) os << " || ";
    first = false;
    os << "<" << f;
    if (!is_true(q)) os << " | " << formula_str(q);
    os << ">";
  }
  if (e.others_included) os << " || <other>";
  return os.str();
}

SymEvent complement(const SymEvent& e) {
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  atoms.reserve(e.atoms.size());
  for (const auto& [f, q] : e.atoms) atoms.emplace_back(f, mk_not(q));
  return mk_event(std::move(atoms), !e.others_included);
}

SymEvent meet(const SymEvent& a, const SymEvent& b) {
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  for (const auto& [f, q] : a.atoms) {
    if (const FormulaPtr* p = b.find(f)) {
      atoms.emplace_back(f, mk_and2(q, *p));
    } else if (b.others_included) {
      atoms.emplace_back(f, q);
    }
  }
  for (const auto& [f, q] : b.atoms) {
    if (!a.find(f) && a.others_included) atoms.emplace_back(f, q);
  }
  return mk_event(std::move(atoms), a.others_included && b.others_included);
}

SymEvent join(const SymEvent& a, const SymEvent& b) {
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  for (const auto& [f, q] : a.atoms) {
    if (const FormulaPtr* p = b.find(f)) {
      atoms.emplace_back(f, mk_or2(q, *p));
    } else if (!b.others_included) {
      atoms.emplace_back(f, q);
    }
    // with b.others_included the union at f is everything: covered by flag
  }
  for (const auto& [f, q] : b.atoms) {
    if (!a.find(f) && !a.others_included) atoms.emplace_back(f, q);
  }
  return mk_event(std::move(atoms), a.others_included || b.others_included);
}

std::string GroundEvent::str() const {
  std::ostringstream os;
  os << fname << "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    os << args[i].str();
  }
  os << ")";
  if (ret.sort.kind != SortKind::Unit) os << " -> " << ret.str();
  return os.str();
}

namespace {

// Qualifier of `e` at fname, as seen by the algebra: absent atom means
// true or false depending on others_included.
FormulaPtr qual_at(const SymEvent& e, const std::string& fname) {
  if (const FormulaPtr* p = e.find(fname)) return *p;
  return e.others_included ? mk_true() : mk_false();
}

std::map<std::string, ValuePtr> local_binding(const EffectDecl& d, SymGen& gen,
                                              std::vector<SymVar>* out_locals) {
  std::map<std::string, ValuePtr> binding;
  for (size_t i = 0; i < d.arg_sorts.size(); ++i) {
    SymVar v = gen.fresh(d.arg_sorts[i], d.fname + ".a" + std::to_string(i));
    binding[arg_var_name(i)] = mk_sym(v);
    if (out_locals) out_locals->push_back(v);
  }
  SymVar r = gen.fresh(d.ret_sort, d.fname + ".r");
  binding[ret_var_name()] = mk_sym(r);
  if (out_locals) out_locals->push_back(r);
  return binding;
}

}  // namespace

Inclusion includes(const SymEvent& sub, const SymEvent& super, const EffectSignature& sig,
                   SymGen& gen, Solver& solver) {
  bool unknown = false;
  for (const auto& d : sig.decls) {
    FormulaPtr q_sub = qual_at(sub, d.fname);
    FormulaPtr q_super = qual_at(super, d.fname);
    if (is_false(q_sub) || is_true(q_super)) continue;
    auto binding = local_binding(d, gen, nullptr);
    FormulaPtr impl = mk_or2(mk_not(substitute(q_sub, binding)), substitute(q_super, binding));
    switch (solver.check_valid(impl)) {
      case ValidVerdict::Valid: break;
      case ValidVerdict::Invalid: return Inclusion::No;
      case ValidVerdict::Unknown: unknown = true; break;
    }
  }
  return unknown ? Inclusion::Unknown : Inclusion::Yes;
}

EventConstraint constr_event_locals(const SymEvent& e, const EffectSignature& sig, SymGen& gen) {
  EventConstraint out;
  std::vector<FormulaPtr> disjuncts;
  for (const auto& [f, q] : e.atoms) {
    const EffectDecl* d = sig.find(f);
    if (!d) throw std::runtime_error("literal names unknown effect " + f);
    std::vector<SymVar> locals;
    auto binding = local_binding(*d, gen, &locals);
    disjuncts.push_back(substitute(q, binding));
    out.locals.emplace_back(f, std::move(locals));
  }
  if (e.others_included) {
    for (const auto& d : sig.decls) {
      if (!e.find(d.fname)) {
        disjuncts.push_back(mk_true());
        break;
      }
    }
  }
  out.formula = mk_or(std::move(disjuncts));
  return out;
}

FormulaPtr constr_event(const SymEvent& e, const EffectSignature& sig, SymGen& gen) {
  return constr_event_locals(e, sig, gen).formula;
}

bool match_ground(const SymEvent& e, const GroundEvent& alpha, const Interpretation& sigma,
                  const EffectSignature& sig) {
  const EffectDecl* d = sig.find(alpha.fname);
  if (!d) throw std::runtime_error("ground event names unknown effect " + alpha.fname);
  const FormulaPtr* q = e.find(alpha.fname);
  if (!q) return e.others_included;
  std::map<std::string, ValuePtr> binding;
  for (size_t i = 0; i < alpha.args.size(); ++i)
    binding[arg_var_name(i)] = mk_constant(alpha.args[i]);
  binding[ret_var_name()] = mk_constant(alpha.ret);
  return eval_ground(substitute(*q, binding), sigma);
}

SymEvent substitute(const SymEvent& e, const std::map<std::string, ValuePtr>& binding) {
  for (const auto& [name, v] : binding)
    if (!name.empty() && name[0] == '%')
      throw std::runtime_error("cannot rebind event-local " + name);
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  atoms.reserve(e.atoms.size());
  for (const auto& [f, q] : e.atoms) atoms.emplace_back(f, substitute(q, binding));
  return mk_event(std::move(atoms), e.others_included);
}

SymEvent substitute_syms(const SymEvent& e, const std::map<int, Constant>& sigma) {
  std::vector<std::pair<std::string, FormulaPtr>> atoms;
  atoms.reserve(e.atoms.size());
  for (const auto& [f, q] : e.atoms) atoms.emplace_back(f, substitute_syms(q, sigma));
  return mk_event(std::move(atoms), e.others_included);
}

void collect_syms(const SymEvent& e, std::map<int, SymVar>& out) {
  for (const auto& [f, q] : e.atoms) collect_syms(q, out);
}

}  // namespace sref
