#include <sstream>

#include "sref/parse.hpp"

namespace sref {

namespace {

void collect_prog_vars(const FormulaPtr& f, std::vector<std::string>& out) {
  std::function<void(const ValuePtr&)> walk = [&](const ValuePtr& v) {
    if (v->kind == SymValue::Kind::Var) out.push_back(v->name);
    for (const auto& a : v->args) walk(a);
  };
  std::function<void(const FormulaPtr&)> go = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Atom) { walk(g->atom); return; }
    for (const auto& k : g->kids) go(k);
  };
  go(f);
}

std::string pick_name(const std::string& base, const std::vector<std::string>& taken) {
  std::string n = base;
  int bump = 0;
  while (std::find(taken.begin(), taken.end(), n) != taken.end())
    n = base + std::to_string(bump++);
  return n;
}

std::string print_atom(const Ctx& ctx, const std::string& fname, const FormulaPtr& qual) {
  const EffectDecl* d = ctx.sig.find(fname);
  if (!d) throw std::runtime_error("print: unknown effect " + fname);
  if (is_true(qual)) return "<" + fname + ">";
  std::vector<std::string> taken;
  collect_prog_vars(qual, taken);
  std::map<std::string, ValuePtr> rename;
  std::ostringstream os;
  os << "<" << fname;
  for (size_t i = 0; i < d->arg_sorts.size(); ++i) {
    std::string n = pick_name("a" + std::to_string(i), taken);
    taken.push_back(n);
    rename[arg_var_name(i)] = mk_var(n, d->arg_sorts[i]);
    os << " " << n;
  }
  std::string rn = pick_name("r", taken);
  rename[ret_var_name()] = mk_var(rn, d->ret_sort);
  os << " = " << rn << " | " << formula_str(substitute(qual, rename)) << ">";
  return os.str();
}

std::string print_literal(const Ctx& ctx, const SymEvent& e) {
  if (e.is_top()) return ".";
  if (e.is_bottom()) return "~.";
  const SymEvent& base = e.others_included ? complement(e) : e;
  std::string inner;
  for (size_t i = 0; i < base.atoms.size(); ++i) {
    if (i) inner += " | ";
    inner += print_atom(ctx, base.atoms[i].first, base.atoms[i].second);
  }
  if (base.atoms.size() > 1 || e.others_included) inner = "(" + inner + ")";
  return e.others_included ? "~" + inner : inner;
}

std::string print_sre(const Ctx& ctx, ReId r) {
  const ReNode& n = ctx.arena.node(r);
  switch (n.kind) {
    case ReKind::Empty: return "empty";
    case ReKind::Eps: return "eps";
    case ReKind::Lit: return print_literal(ctx, ctx.arena.lit(n.lit));
    case ReKind::Star: return "(" + print_sre(ctx, n.kids[0]) + ")*";
    case ReKind::Not: return "!(" + print_sre(ctx, n.kids[0]) + ")";
    case ReKind::Concat:
    case ReKind::And:
    case ReKind::Or: {
      const char* sep = n.kind == ReKind::Concat ? " ; " : n.kind == ReKind::And ? " /\\ " : " \\/ ";
      std::string s = "(";
      for (size_t i = 0; i < n.kids.size(); ++i) {
        if (i) s += sep;
        s += print_sre(ctx, n.kids[i]);
      }
      return s + ")";
    }
  }
  return "?";
}

std::string print_value(const ValuePtr& v) { return value_str(v); }

std::string print_params(const std::vector<std::pair<std::string, Sort>>& ps) {
  std::string s = "(";
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i) s += ", ";
    s += ps[i].first + ": " + ps[i].second.str();
  }
  return s + ")";
}

std::string print_source(const SourcePtr& e, int indent) {
  std::string pad(indent * 2, ' ');
  switch (e->kind) {
    case SourceExpr::Kind::Value: return pad + print_value(e->value);
    case SourceExpr::Kind::Gensym: return pad + "?? : " + e->sort.str();
    case SourceExpr::Kind::Call: {
      std::string s = pad + e->name + "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) s += ", ";
        s += print_value(e->args[i]);
      }
      return s + ")";
    }
    case SourceExpr::Kind::If:
      return pad + "if " + formula_str(e->formula) + " then\n" + print_source(e->kids[0], indent + 1) +
             "\n" + pad + "else\n" + print_source(e->kids[1], indent + 1);
    case SourceExpr::Kind::Let: {
      if (e->name == "_")
        return print_source(e->kids[0], indent) + ";\n" + print_source(e->kids[1], indent);
      std::string rhs = print_source(e->kids[0], 0);
      return pad + "let " + e->name + " = " + rhs + " in\n" + print_source(e->kids[1], indent);
    }
    case SourceExpr::Kind::LetRec:
      return pad + "let rec " + e->name + " " + print_params(e->params) + " : " +
             e->sort.str() + " =\n" + print_source(e->kids[0], indent + 1) + "\n" + pad + "in\n" +
             print_source(e->kids[1], indent);
    case SourceExpr::Kind::Assert:
    case SourceExpr::Kind::Assume: {
      const char* kw = e->kind == SourceExpr::Kind::Assert ? "assert" : "assume";
      std::string s = pad + kw + " (" + formula_str(e->formula) + ")";
      if (!e->kids.empty()) s += ";\n" + print_source(e->kids[0], indent);
      return s;
    }
  }
  return "?";
}

std::string print_spec(const Ctx& ctx, const std::string& name, const MethodSpec& s) {
  std::ostringstream os;
  os << "spec " << name << " " << print_params(s.params) << "\n";
  if (!s.ghosts.empty()) os << "  ghost " << print_params(s.ghosts) << "\n";
  if (!is_true(s.require)) os << "  require " << formula_str(s.require) << "\n";
  os << "  context " << print_sre(ctx, s.context) << "\n";
  os << "  return " << s.ret_name << " : " << s.ret_sort.str() << "\n";
  if (!is_true(s.ensure)) os << "  ensures " << formula_str(s.ensure) << "\n";
  os << "  effect " << print_sre(ctx, s.effect) << "\n";
  return os.str();
}

}  // namespace

std::string print_module(const Ctx& ctx, const ModuleFile& mod) {
  std::ostringstream os;
  for (const auto& s : mod.sorts) os << "sort " << s << "\n";
  os << "\n";
  for (const auto& d : mod.sig.decls) {
    os << "effect " << d.fname << " (";
    for (size_t i = 0; i < d.arg_sorts.size(); ++i) {
      if (i) os << ", ";
      os << d.arg_sorts[i].str();
    }
    os << ") -> " << d.ret_sort.str() << "\n";
  }
  os << "\n";
  for (const auto& [f, s] : mod.api_specs) os << print_spec(ctx, f, s) << "\n";
  for (const auto& [m, s] : mod.method_specs) os << print_spec(ctx, m, s) << "\n";
  for (const auto& d : mod.methods) {
    os << "method " << d.name << " " << print_params(d.params) << " : " << d.ret_sort.str()
       << " =\n"
       << print_source(d.body, 1) << "\n\n";
  }
  if (!mod.harness_method.empty()) os << "harness " << mod.harness_method << "\n";
  return os.str();
}

namespace {

bool source_eq(const SourcePtr& a, const SourcePtr& b) {
  if (a->kind != b->kind || a->name != b->name || a->sort != b->sort) return false;
  if (!!a->value != !!b->value || (a->value && !value_eq(a->value, b->value))) return false;
  if (!!a->formula != !!b->formula || (a->formula && !formula_eq(a->formula, b->formula)))
    return false;
  if (a->args.size() != b->args.size() || a->kids.size() != b->kids.size() ||
      a->params != b->params)
    return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!value_eq(a->args[i], b->args[i])) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!source_eq(a->kids[i], b->kids[i])) return false;
  return true;
}

bool spec_eq(const MethodSpec& a, const MethodSpec& b) {
  return a.params == b.params && a.ghosts == b.ghosts && formula_eq(a.require, b.require) &&
         a.context == b.context && a.ret_name == b.ret_name && a.ret_sort == b.ret_sort &&
         formula_eq(a.ensure, b.ensure) && a.effect == b.effect;
}

}  // namespace

bool module_eq(const ModuleFile& a, const ModuleFile& b) {
  if (a.sorts != b.sorts || a.harness_method != b.harness_method) return false;
  if (a.sig.decls.size() != b.sig.decls.size()) return false;
  for (size_t i = 0; i < a.sig.decls.size(); ++i) {
    const auto& da = a.sig.decls[i];
    const auto& db = b.sig.decls[i];
    if (da.fname != db.fname || da.arg_sorts != db.arg_sorts || da.ret_sort != db.ret_sort)
      return false;
  }
  if (a.api_specs.size() != b.api_specs.size() || a.method_specs.size() != b.method_specs.size() ||
      a.methods.size() != b.methods.size())
    return false;
  for (size_t i = 0; i < a.api_specs.size(); ++i)
    if (a.api_specs[i].first != b.api_specs[i].first ||
        !spec_eq(a.api_specs[i].second, b.api_specs[i].second))
      return false;
  for (size_t i = 0; i < a.method_specs.size(); ++i)
    if (a.method_specs[i].first != b.method_specs[i].first ||
        !spec_eq(a.method_specs[i].second, b.method_specs[i].second))
      return false;
  for (size_t i = 0; i < a.methods.size(); ++i) {
    if (a.methods[i].name != b.methods[i].name || a.methods[i].params != b.methods[i].params ||
        a.methods[i].ret_sort != b.methods[i].ret_sort)
      return false;
    if (!source_eq(a.methods[i].body, b.methods[i].body)) return false;
  }
  return true;
}

}  // namespace sref
