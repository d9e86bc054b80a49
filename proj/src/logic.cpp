#include "sref/logic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace sref {

namespace {

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t hash_str(const std::string& s) {
  return std::hash<std::string>{}(s);
}

std::uint64_t sort_hash(const Sort& s) {
  return hash_combine(static_cast<std::uint64_t>(s.kind) + 11, hash_str(s.name));
}

}  // namespace

std::string Sort::str() const {
  switch (kind) {
    case SortKind::Unit: return "Unit";
    case SortKind::Bool: return "Bool";
    case SortKind::Int: return "Int";
    case SortKind::Uninterpreted: return name;
  }
  return "?";
}

std::string Constant::str() const {
  switch (sort.kind) {
    case SortKind::Unit: return "()";
    case SortKind::Bool: return value ? "true" : "false";
    case SortKind::Int: return std::to_string(value);
    case SortKind::Uninterpreted:
      if (value == 0) return "null";
      return sort.name + "#" + std::to_string(value);
  }
  return "?";
}

ValuePtr mk_constant(Constant c) {
  auto n = std::make_shared<SymValue>();
  n->kind = SymValue::Kind::Constant;
  n->sort = c.sort;
  n->constant = std::move(c);
  n->hash = hash_combine(1, hash_combine(sort_hash(n->sort), static_cast<std::uint64_t>(n->constant.value)));
  return n;
}

ValuePtr mk_unit() { return mk_constant({Sort::unit(), 0}); }
ValuePtr mk_bool(bool b) { return mk_constant({Sort::boolean(), b ? 1 : 0}); }
ValuePtr mk_int(std::int64_t v) { return mk_constant({Sort::integer(), v}); }

ValuePtr mk_var(std::string name, Sort sort) {
  auto n = std::make_shared<SymValue>();
  n->kind = SymValue::Kind::Var;
  n->sort = std::move(sort);
  n->name = std::move(name);
  n->hash = hash_combine(2, hash_combine(sort_hash(n->sort), hash_str(n->name)));
  return n;
}

ValuePtr mk_sym(SymVar v) {
  auto n = std::make_shared<SymValue>();
  n->kind = SymValue::Kind::Sym;
  n->sort = v.sort;
  n->sym = std::move(v);
  n->hash = hash_combine(3, static_cast<std::uint64_t>(n->sym.id) + 0x51ULL);
  return n;
}

namespace {

bool is_comparison(const std::string& op) {
  return op == "=" || op == "!=" || op == "<" || op == "<=";
}

bool is_arith(const std::string& op) { return op == "+" || op == "-"; }

}  // namespace

ValuePtr mk_op(const std::string& op, std::vector<ValuePtr> args) {
  auto n = std::make_shared<SymValue>();
  n->kind = SymValue::Kind::Op;
  n->name = op;
  if (is_comparison(op)) {
    if (args.size() != 2) throw std::runtime_error("operator " + op + " expects 2 arguments");
    if (args[0]->sort != args[1]->sort)
      throw std::runtime_error("sort mismatch in " + op + ": " + args[0]->sort.str() + " vs " +
                               args[1]->sort.str());
    if ((op == "<" || op == "<=") && args[0]->sort.kind != SortKind::Int)
      throw std::runtime_error("order comparison requires Int operands");
    n->sort = Sort::boolean();
  } else if (is_arith(op)) {
    if (args.size() != 2) throw std::runtime_error("operator " + op + " expects 2 arguments");
    if (args[0]->sort.kind != SortKind::Int || args[1]->sort.kind != SortKind::Int)
      throw std::runtime_error("arithmetic requires Int operands");
    n->sort = Sort::integer();
  } else {
    // Uninterpreted function application; result sort defaults to Int and
    // can be refined by the caller.
    n->sort = Sort::integer();
  }
  n->args = std::move(args);
  std::uint64_t h = hash_combine(4, hash_str(op));
  for (const auto& a : n->args) h = hash_combine(h, a->hash);
  n->hash = h;
  return n;
}

bool value_eq(const ValuePtr& a, const ValuePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind || a->sort != b->sort) return false;
  switch (a->kind) {
    case SymValue::Kind::Constant: return a->constant == b->constant;
    case SymValue::Kind::Var: return a->name == b->name;
    case SymValue::Kind::Sym: return a->sym.id == b->sym.id;
    case SymValue::Kind::Op: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!value_eq(a->args[i], b->args[i])) return false;
      return true;
    }
  }
  return false;
}

std::string value_str(const ValuePtr& v) {
  switch (v->kind) {
    case SymValue::Kind::Constant: return v->constant.str();
    case SymValue::Kind::Var: return v->name;
    case SymValue::Kind::Sym:
      return v->sym.hint.empty() ? "$" + std::to_string(v->sym.id)
                                 : v->sym.hint + "$" + std::to_string(v->sym.id);
    case SymValue::Kind::Op: {
      std::ostringstream os;
      if (v->args.size() == 2 && (is_comparison(v->name) || is_arith(v->name))) {
        os << "(" << value_str(v->args[0]) << " " << v->name << " " << value_str(v->args[1]) << ")";
      } else {
        os << v->name << "(";
        for (size_t i = 0; i < v->args.size(); ++i) {
          if (i) os << ", ";
          os << value_str(v->args[i]);
        }
        os << ")";
      }
      return os.str();
    }
  }
  return "?";
}

namespace {

FormulaPtr mk_leaf(Formula::Kind k) {
  auto n = std::make_shared<Formula>();
  n->kind = k;
  n->hash = k == Formula::Kind::True ? 0xACE1ULL : 0xACE2ULL;
  return n;
}

const FormulaPtr kTrue = mk_leaf(Formula::Kind::True);
const FormulaPtr kFalse = mk_leaf(Formula::Kind::False);

}  // namespace

FormulaPtr mk_true() { return kTrue; }
FormulaPtr mk_false() { return kFalse; }

bool is_true(const FormulaPtr& f) { return f->kind == Formula::Kind::True; }
bool is_false(const FormulaPtr& f) { return f->kind == Formula::Kind::False; }

FormulaPtr mk_atom(ValuePtr v) {
  if (v->sort.kind != SortKind::Bool)
    throw std::runtime_error("formula atom must have sort Bool, got " + v->sort.str());
  if (v->kind == SymValue::Kind::Constant) return v->constant.value ? kTrue : kFalse;
  // Constant-fold comparisons between equal/unequal constants.
  if (v->kind == SymValue::Kind::Op && v->args.size() == 2 &&
      v->args[0]->kind == SymValue::Kind::Constant && v->args[1]->kind == SymValue::Kind::Constant) {
    std::int64_t x = v->args[0]->constant.value, y = v->args[1]->constant.value;
    if (v->name == "=") return x == y ? kTrue : kFalse;
    if (v->name == "!=") return x != y ? kTrue : kFalse;
    if (v->name == "<") return x < y ? kTrue : kFalse;
    if (v->name == "<=") return x <= y ? kTrue : kFalse;
  }
  auto n = std::make_shared<Formula>();
  n->kind = Formula::Kind::Atom;
  n->atom = std::move(v);
  n->hash = hash_combine(0xA70,  n->atom->hash);
  return n;
}

FormulaPtr mk_not(FormulaPtr f) {
  if (is_true(f)) return kFalse;
  if (is_false(f)) return kTrue;
  if (f->kind == Formula::Kind::Not) return f->kids[0];
  auto n = std::make_shared<Formula>();
  n->kind = Formula::Kind::Not;
  n->kids = {std::move(f)};
  n->hash = hash_combine(0x207, n->kids[0]->hash);
  return n;
}

namespace {

FormulaPtr neg_of(const FormulaPtr& f) {
  return f->kind == Formula::Kind::Not ? f->kids[0] : mk_not(f);
}

bool contains_formula(const std::vector<FormulaPtr>& xs, const FormulaPtr& f) {
  for (const auto& g : xs)
    if (formula_eq(f, g)) return true;
  return false;
}

FormulaPtr mk_nary(Formula::Kind kind, std::vector<FormulaPtr> fs) {
  const bool conj = kind == Formula::Kind::And;
  std::vector<FormulaPtr> flat;
  for (auto& f : fs) {
    if (conj ? is_true(f) : is_false(f)) continue;
    if (conj ? is_false(f) : is_true(f)) return conj ? kFalse : kTrue;
    if (f->kind == kind) {
      for (const auto& k : f->kids) flat.push_back(k);
    } else {
      flat.push_back(std::move(f));
    }
  }
  // Drop structural duplicates, keeping first occurrence.
  std::vector<FormulaPtr> out;
  for (auto& f : flat) {
    bool dup = false;
    for (const auto& g : out)
      if (formula_eq(f, g)) { dup = true; break; }
    if (!dup) out.push_back(std::move(f));
  }
  // Complementary pair: f and ¬f together decide the connective.
  for (const auto& f : out)
    if (contains_formula(out, neg_of(f))) return conj ? kFalse : kTrue;
  if (conj) {
    // A conjunct ¬(p₁∧…∧pₖ) is false when every pᵢ is among the siblings,
    // and redundant when some ¬pᵢ is; the event-algebra meets rely on this
    // to keep contradictory literals syntactically bottom.
    std::vector<FormulaPtr> kept;
    for (const auto& f : out) {
      if (f->kind == Formula::Kind::Not && f->kids[0]->kind == Formula::Kind::And) {
        const auto& parts = f->kids[0]->kids;
        bool all_present = true, some_refuted = false;
        for (const auto& p : parts) {
          if (!contains_formula(out, p)) all_present = false;
          if (contains_formula(out, neg_of(p))) some_refuted = true;
        }
        if (all_present) return kFalse;
        if (some_refuted) continue;  // entailed by the siblings
      }
      kept.push_back(f);
    }
    out = std::move(kept);
  }
  if (out.empty()) return conj ? kTrue : kFalse;
  if (out.size() == 1) return out[0];
  auto n = std::make_shared<Formula>();
  n->kind = kind;
  n->kids = std::move(out);
  std::uint64_t h = conj ? 0xA17D : 0x0817;
  for (const auto& k : n->kids) h = hash_combine(h, k->hash);
  n->hash = h;
  return n;
}

}  // namespace

FormulaPtr mk_and(std::vector<FormulaPtr> fs) { return mk_nary(Formula::Kind::And, std::move(fs)); }
FormulaPtr mk_or(std::vector<FormulaPtr> fs) { return mk_nary(Formula::Kind::Or, std::move(fs)); }
FormulaPtr mk_and2(FormulaPtr a, FormulaPtr b) { return mk_and({std::move(a), std::move(b)}); }
FormulaPtr mk_or2(FormulaPtr a, FormulaPtr b) { return mk_or({std::move(a), std::move(b)}); }

FormulaPtr mk_eq(ValuePtr a, ValuePtr b) { return mk_atom(mk_op("=", {std::move(a), std::move(b)})); }

// Disequalities are normalized to ¬(=) so that complements produced by the
// event algebra line up structurally with parsed !=-atoms.
FormulaPtr mk_ne(ValuePtr a, ValuePtr b) { return mk_not(mk_eq(std::move(a), std::move(b))); }

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  switch (a->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Atom: return value_eq(a->atom, b->atom);
    default: {
      if (a->kids.size() != b->kids.size()) return false;
      for (size_t i = 0; i < a->kids.size(); ++i)
        if (!formula_eq(a->kids[i], b->kids[i])) return false;
      return true;
    }
  }
}

std::string formula_str(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True: return "true";
    case Formula::Kind::False: return "false";
    case Formula::Kind::Atom: return value_str(f->atom);
    case Formula::Kind::Not: return "!" + formula_str(f->kids[0]);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::string sep = f->kind == Formula::Kind::And ? " /\\ " : " \\/ ";
      std::string s = "(";
      for (size_t i = 0; i < f->kids.size(); ++i) {
        if (i) s += sep;
        s += formula_str(f->kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

ValuePtr substitute(const ValuePtr& v, const std::map<std::string, ValuePtr>& binding) {
  switch (v->kind) {
    case SymValue::Kind::Constant:
    case SymValue::Kind::Sym: return v;
    case SymValue::Kind::Var: {
      auto it = binding.find(v->name);
      if (it == binding.end()) return v;
      if (it->second->sort != v->sort)
        throw std::runtime_error("sort mismatch substituting " + v->name + ": " + v->sort.str() +
                                 " := " + it->second->sort.str());
      return it->second;
    }
    case SymValue::Kind::Op: {
      std::vector<ValuePtr> args;
      args.reserve(v->args.size());
      bool changed = false;
      for (const auto& a : v->args) {
        args.push_back(substitute(a, binding));
        changed = changed || args.back().get() != a.get();
      }
      if (!changed) return v;
      return mk_op(v->name, std::move(args));
    }
  }
  return v;
}

FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, ValuePtr>& binding) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: {
      auto v = substitute(f->atom, binding);
      if (v.get() == f->atom.get()) return f;
      return mk_atom(std::move(v));
    }
    case Formula::Kind::Not: return mk_not(substitute(f->kids[0], binding));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (const auto& k : f->kids) kids.push_back(substitute(k, binding));
      return f->kind == Formula::Kind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
  }
  return f;
}

ValuePtr substitute_syms(const ValuePtr& v, const std::map<int, Constant>& sigma) {
  switch (v->kind) {
    case SymValue::Kind::Constant:
    case SymValue::Kind::Var: return v;
    case SymValue::Kind::Sym: {
      auto it = sigma.find(v->sym.id);
      if (it == sigma.end()) return v;
      return mk_constant(it->second);
    }
    case SymValue::Kind::Op: {
      std::vector<ValuePtr> args;
      args.reserve(v->args.size());
      for (const auto& a : v->args) args.push_back(substitute_syms(a, sigma));
      return mk_op(v->name, std::move(args));
    }
  }
  return v;
}

FormulaPtr substitute_syms(const FormulaPtr& f, const std::map<int, Constant>& sigma) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return f;
    case Formula::Kind::Atom: return mk_atom(substitute_syms(f->atom, sigma));
    case Formula::Kind::Not: return mk_not(substitute_syms(f->kids[0], sigma));
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<FormulaPtr> kids;
      kids.reserve(f->kids.size());
      for (const auto& k : f->kids) kids.push_back(substitute_syms(k, sigma));
      return f->kind == Formula::Kind::And ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
  }
  return f;
}

void collect_syms(const ValuePtr& v, std::map<int, SymVar>& out) {
  switch (v->kind) {
    case SymValue::Kind::Sym: out.emplace(v->sym.id, v->sym); break;
    case SymValue::Kind::Op:
      for (const auto& a : v->args) collect_syms(a, out);
      break;
    default: break;
  }
}

void collect_syms(const FormulaPtr& f, std::map<int, SymVar>& out) {
  if (f->kind == Formula::Kind::Atom) {
    collect_syms(f->atom, out);
    return;
  }
  for (const auto& k : f->kids) collect_syms(k, out);
}

namespace {

bool value_closed(const ValuePtr& v) {
  switch (v->kind) {
    case SymValue::Kind::Var: return false;
    case SymValue::Kind::Op:
      for (const auto& a : v->args)
        if (!value_closed(a)) return false;
      return true;
    default: return true;
  }
}

}  // namespace

bool is_closed(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::True:
    case Formula::Kind::False: return true;
    case Formula::Kind::Atom: return value_closed(f->atom);
    default:
      for (const auto& k : f->kids)
        if (!is_closed(k)) return false;
      return true;
  }
}

std::string Interpretation::str() const {
  std::string s = "{";
  bool first = true;
  for (const auto& [id, c] : values) {
    if (!first) s += ", ";
    first = false;
    s += "$" + std::to_string(id) + "=" + c.str();
  }
  return s + "}";
}

Constant eval_value(const ValuePtr& v, const Interpretation& sigma) {
  switch (v->kind) {
    case SymValue::Kind::Constant: return v->constant;
    case SymValue::Kind::Var:
      throw std::runtime_error("eval_value: open value, free variable " + v->name);
    case SymValue::Kind::Sym: {
      auto c = sigma.lookup(v->sym.id);
      if (!c) throw std::runtime_error("eval_value: interpretation misses $" + std::to_string(v->sym.id));
      return *c;
    }
    case SymValue::Kind::Op: {
      if (v->name == "+" || v->name == "-") {
        auto a = eval_value(v->args[0], sigma), b = eval_value(v->args[1], sigma);
        return {Sort::integer(), v->name == "+" ? a.value + b.value : a.value - b.value};
      }
      if (is_comparison(v->name)) {
        auto a = eval_value(v->args[0], sigma), b = eval_value(v->args[1], sigma);
        bool r = v->name == "=" ? a.value == b.value
               : v->name == "!=" ? a.value != b.value
               : v->name == "<" ? a.value < b.value
                                : a.value <= b.value;
        return {Sort::boolean(), r ? 1 : 0};
      }
      throw std::runtime_error("eval_value: uninterpreted operator " + v->name);
    }
  }
  throw std::runtime_error("eval_value: bad node");
}

bool eval_ground(const FormulaPtr& f, const Interpretation& sigma) {
  switch (f->kind) {
    case Formula::Kind::True: return true;
    case Formula::Kind::False: return false;
    case Formula::Kind::Atom: return eval_value(f->atom, sigma).value != 0;
    case Formula::Kind::Not: return !eval_ground(f->kids[0], sigma);
    case Formula::Kind::And:
      for (const auto& k : f->kids)
        if (!eval_ground(k, sigma)) return false;
      return true;
    case Formula::Kind::Or:
      for (const auto& k : f->kids)
        if (eval_ground(k, sigma)) return true;
      return false;
  }
  return false;
}

}  // namespace sref
