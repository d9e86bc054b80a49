#include "sref/speclang.hpp"

#include <algorithm>
#include <sstream>

namespace sref {

namespace {

std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

ExprPtr mk(CoreExpr n) {
  std::uint64_t h = hash_combine(0xC0DE, static_cast<std::uint64_t>(n.kind));
  h = hash_combine(h, std::hash<std::string>{}(n.name));
  h = hash_combine(h, std::hash<std::string>{}(n.sort.str()));
  if (n.first) h = hash_combine(h, n.first->hash);
  if (n.formula) h = hash_combine(h, n.formula->hash);
  h = hash_combine(h, n.re);
  if (n.callee) h = hash_combine(h, n.callee->hash);
  for (const auto& a : n.args) h = hash_combine(h, a->hash);
  for (const auto& k : n.kids) h = hash_combine(h, k->hash);
  n.hash = h;
  return std::make_shared<CoreExpr>(std::move(n));
}

}  // namespace

ExprPtr e_var(std::string name, Sort sort) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Var;
  n.name = std::move(name);
  n.sort = std::move(sort);
  return mk(std::move(n));
}

ExprPtr e_first(ValuePtr v) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::First;
  n.first = std::move(v);
  return mk(std::move(n));
}

ExprPtr e_unit() { return e_first(mk_unit()); }

ExprPtr e_fun(std::string param, Sort sort, ExprPtr body) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Fun;
  n.name = std::move(param);
  n.sort = std::move(sort);
  n.kids = {std::move(body)};
  return mk(std::move(n));
}

ExprPtr e_fix(std::string self, ExprPtr fun) {
  if (fun->kind != CoreExpr::Kind::Fun) throw std::runtime_error("fix expects a fun");
  CoreExpr n;
  n.kind = CoreExpr::Kind::Fix;
  n.name = std::move(self);
  n.kids = {std::move(fun)};
  return mk(std::move(n));
}

ExprPtr e_gensym(Sort sort, std::string hint) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::GenSym;
  n.sort = std::move(sort);
  n.name = std::move(hint);
  return mk(std::move(n));
}

ExprPtr e_abort() {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Abort;
  return mk(std::move(n));
}

ExprPtr e_assume(FormulaPtr f) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Assume;
  n.formula = std::move(f);
  return mk(std::move(n));
}

ExprPtr e_admit(ReId r) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Admit;
  n.re = r;
  return mk(std::move(n));
}

ExprPtr e_append(ReId r) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Append;
  n.re = r;
  return mk(std::move(n));
}

ExprPtr e_let(std::string x, ExprPtr rhs, ExprPtr body) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Let;
  n.name = std::move(x);
  n.kids = {std::move(rhs), std::move(body)};
  return mk(std::move(n));
}

ExprPtr e_letapp(std::string x, ExprPtr callee, std::vector<ExprPtr> args, ExprPtr body) {
  if (args.empty()) throw std::runtime_error("application without arguments");
  CoreExpr n;
  n.kind = CoreExpr::Kind::LetApp;
  n.name = std::move(x);
  n.callee = std::move(callee);
  n.args = std::move(args);
  n.kids = {std::move(body)};
  return mk(std::move(n));
}

ExprPtr e_choice(ExprPtr a, ExprPtr b) {
  CoreExpr n;
  n.kind = CoreExpr::Kind::Choice;
  n.kids = {std::move(a), std::move(b)};
  return mk(std::move(n));
}

ExprPtr e_seq(ExprPtr a, ExprPtr b) { return e_let("_", std::move(a), std::move(b)); }

ExprPtr desugar_assert(Ctx& ctx, const FormulaPtr& f) {
  (void)ctx;
  if (is_true(f)) return e_assume(f);
  if (is_false(f)) return e_seq(e_assume(mk_true()), e_abort());
  return e_choice(e_seq(e_assume(mk_not(f)), e_abort()), e_assume(f));
}

ExprPtr desugar_affirm(Ctx& ctx, ReId r) {
  return e_choice(e_seq(e_admit(ctx.arena.negate(r)), e_abort()), e_admit(r));
}

bool is_value(const ExprPtr& e) {
  switch (e->kind) {
    case CoreExpr::Kind::Var:
    case CoreExpr::Kind::First:
    case CoreExpr::Kind::Fun:
    case CoreExpr::Kind::Fix:
      return true;
    default:
      return false;
  }
}

bool expr_eq(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash || a->kind != b->kind) return false;
  if (a->name != b->name || a->sort != b->sort || a->re != b->re) return false;
  if (!!a->first != !!b->first || (a->first && !value_eq(a->first, b->first))) return false;
  if (!!a->formula != !!b->formula || (a->formula && !formula_eq(a->formula, b->formula)))
    return false;
  if (!!a->callee != !!b->callee || (a->callee && !expr_eq(a->callee, b->callee))) return false;
  if (a->args.size() != b->args.size() || a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_eq(a->args[i], b->args[i])) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_eq(a->kids[i], b->kids[i])) return false;
  return true;
}

std::string expr_str(const Ctx& ctx, const ExprPtr& e) {
  switch (e->kind) {
    case CoreExpr::Kind::Var: return e->name;
    case CoreExpr::Kind::First: return value_str(e->first);
    case CoreExpr::Kind::Fun:
      return "(fun " + e->name + ": " + e->sort.str() + ". " + expr_str(ctx, e->kids[0]) + ")";
    case CoreExpr::Kind::Fix: return "(fix " + e->name + ". " + expr_str(ctx, e->kids[0]) + ")";
    case CoreExpr::Kind::GenSym: return "??" + (e->name.empty() ? "" : "'" + e->name) + ":" + e->sort.str();
    case CoreExpr::Kind::Abort: return "abort";
    case CoreExpr::Kind::Assume: return "assume(" + formula_str(e->formula) + ")";
    case CoreExpr::Kind::Admit: return "admit(" + re_str(ctx, e->re) + ")";
    case CoreExpr::Kind::Append: return "append(" + re_str(ctx, e->re) + ")";
    case CoreExpr::Kind::Let:
      return "let " + e->name + " = " + expr_str(ctx, e->kids[0]) + " in\n" +
             expr_str(ctx, e->kids[1]);
    case CoreExpr::Kind::LetApp: {
      std::string s = "let " + e->name + " = " + expr_str(ctx, e->callee);
      for (const auto& a : e->args) s += " " + expr_str(ctx, a);
      return s + " in\n" + expr_str(ctx, e->kids[0]);
    }
    case CoreExpr::Kind::Choice:
      return "(" + expr_str(ctx, e->kids[0]) + ")\n (+) (" + expr_str(ctx, e->kids[1]) + ")";
  }
  return "?";
}

ExprPtr subst(Ctx& ctx, const ExprPtr& e, const std::string& x, const ExprPtr& v) {
  std::map<std::string, ValuePtr> fo_binding;
  if (v->kind == CoreExpr::Kind::First) fo_binding[x] = v->first;
  else if (v->kind == CoreExpr::Kind::Var) fo_binding[x] = mk_var(v->name, v->sort);

  std::function<ExprPtr(const ExprPtr&)> go = [&](const ExprPtr& e0) -> ExprPtr {
    switch (e0->kind) {
      case CoreExpr::Kind::Var:
        return e0->name == x ? v : e0;
      case CoreExpr::Kind::First:
        return fo_binding.empty() ? e0 : e_first(substitute(e0->first, fo_binding));
      case CoreExpr::Kind::Fun:
        if (e0->name == x) return e0;  // shadowed
        return e_fun(e0->name, e0->sort, go(e0->kids[0]));
      case CoreExpr::Kind::Fix:
        if (e0->name == x) return e0;
        return e_fix(e0->name, go(e0->kids[0]));
      case CoreExpr::Kind::GenSym:
      case CoreExpr::Kind::Abort:
        return e0;
      case CoreExpr::Kind::Assume:
        return fo_binding.empty() ? e0 : e_assume(substitute(e0->formula, fo_binding));
      case CoreExpr::Kind::Admit:
        return fo_binding.empty() ? e0 : e_admit(re_substitute(ctx, e0->re, fo_binding));
      case CoreExpr::Kind::Append:
        return fo_binding.empty() ? e0 : e_append(re_substitute(ctx, e0->re, fo_binding));
      case CoreExpr::Kind::Let: {
        ExprPtr rhs = go(e0->kids[0]);
        ExprPtr body = e0->name == x ? e0->kids[1] : go(e0->kids[1]);
        return e_let(e0->name, std::move(rhs), std::move(body));
      }
      case CoreExpr::Kind::LetApp: {
        ExprPtr callee = go(e0->callee);
        std::vector<ExprPtr> args;
        args.reserve(e0->args.size());
        for (const auto& a : e0->args) args.push_back(go(a));
        ExprPtr body = e0->name == x ? e0->kids[0] : go(e0->kids[0]);
        return e_letapp(e0->name, std::move(callee), std::move(args), std::move(body));
      }
      case CoreExpr::Kind::Choice:
        return e_choice(go(e0->kids[0]), go(e0->kids[1]));
    }
    return e0;
  };
  return go(e);
}

void free_vars(const ExprPtr& e, std::map<std::string, Sort>& out, std::vector<std::string> bound) {
  auto is_bound = [&](const std::string& n) {
    return std::find(bound.begin(), bound.end(), n) != bound.end();
  };
  auto add_value = [&](const ValuePtr& v) {
    std::function<void(const ValuePtr&)> walk = [&](const ValuePtr& u) {
      if (u->kind == SymValue::Kind::Var && !is_bound(u->name) && u->name[0] != '%')
        out.emplace(u->name, u->sort);
      for (const auto& a : u->args) walk(a);
    };
    walk(v);
  };
  std::function<void(const FormulaPtr&)> add_formula = [&](const FormulaPtr& f) {
    if (f->kind == Formula::Kind::Atom) add_value(f->atom);
    for (const auto& k : f->kids) add_formula(k);
  };

  switch (e->kind) {
    case CoreExpr::Kind::Var:
      if (!is_bound(e->name)) out.emplace(e->name, e->sort);
      return;
    case CoreExpr::Kind::First: add_value(e->first); return;
    case CoreExpr::Kind::Fun: {
      bound.push_back(e->name);
      free_vars(e->kids[0], out, bound);
      return;
    }
    case CoreExpr::Kind::Fix: {
      bound.push_back(e->name);
      free_vars(e->kids[0], out, bound);
      return;
    }
    case CoreExpr::Kind::GenSym:
    case CoreExpr::Kind::Abort:
      return;
    case CoreExpr::Kind::Assume: add_formula(e->formula); return;
    case CoreExpr::Kind::Admit:
    case CoreExpr::Kind::Append:
      return;  // SRE qualifier vars are checked by the parser against scopes
    case CoreExpr::Kind::Let: {
      free_vars(e->kids[0], out, bound);
      bound.push_back(e->name);
      free_vars(e->kids[1], out, bound);
      return;
    }
    case CoreExpr::Kind::LetApp: {
      free_vars(e->callee, out, bound);
      for (const auto& a : e->args) free_vars(a, out, bound);
      bound.push_back(e->name);
      free_vars(e->kids[0], out, bound);
      return;
    }
    case CoreExpr::Kind::Choice:
      free_vars(e->kids[0], out, bound);
      free_vars(e->kids[1], out, bound);
      return;
  }
}

namespace {

bool mnf_value(const ExprPtr& e) {
  switch (e->kind) {
    case CoreExpr::Kind::Var:
    case CoreExpr::Kind::First:
      return true;
    case CoreExpr::Kind::Fun:
      return check_mnf(e->kids[0]);
    case CoreExpr::Kind::Fix:
      return mnf_value(e->kids[0]);
    default:
      return false;
  }
}

}  // namespace

bool check_mnf(const ExprPtr& e) {
  switch (e->kind) {
    case CoreExpr::Kind::Var:
    case CoreExpr::Kind::First:
    case CoreExpr::Kind::Fun:
    case CoreExpr::Kind::Fix:
      return mnf_value(e);
    case CoreExpr::Kind::GenSym:
    case CoreExpr::Kind::Abort:
    case CoreExpr::Kind::Assume:
    case CoreExpr::Kind::Admit:
    case CoreExpr::Kind::Append:
      return true;
    case CoreExpr::Kind::Let:
      return check_mnf(e->kids[0]) && check_mnf(e->kids[1]);
    case CoreExpr::Kind::LetApp: {
      if (!mnf_value(e->callee)) return false;
      for (const auto& a : e->args)
        if (!mnf_value(a)) return false;
      return check_mnf(e->kids[0]);
    }
    case CoreExpr::Kind::Choice:
      return check_mnf(e->kids[0]) && check_mnf(e->kids[1]);
  }
  return false;
}

// ---------------------------------------------------------------------------
// module lookups
// ---------------------------------------------------------------------------

const MethodSpec* ModuleFile::find_api_spec(const std::string& f) const {
  for (const auto& [name, s] : api_specs)
    if (name == f) return &s;
  return nullptr;
}

const MethodSpec* ModuleFile::find_method_spec(const std::string& m) const {
  for (const auto& [name, s] : method_specs)
    if (name == m) return &s;
  return nullptr;
}

const MethodDef* ModuleFile::find_method(const std::string& m) const {
  for (const auto& d : methods)
    if (d.name == m) return &d;
  return nullptr;
}

// ---------------------------------------------------------------------------
// translation
// ---------------------------------------------------------------------------

ExprPtr api_closure(Ctx& ctx, const std::string& fname, const MethodSpec& spec) {
  // Innermost outward: ghosts, assume(require), admit(context), ret gensym,
  // assume(ensure), append(effect), ret.  The library-side assert of the
  // precondition is compiled to assume: the call is modelled as succeeding
  // because the client, not the library, is being falsified.
  ExprPtr body = e_var(spec.ret_name, spec.ret_sort);
  body = e_seq(e_append(spec.effect), std::move(body));
  body = e_seq(e_assume(spec.ensure), std::move(body));
  body = e_let(spec.ret_name, e_gensym(spec.ret_sort, spec.ret_name), std::move(body));
  body = e_seq(e_admit(spec.context), std::move(body));
  body = e_seq(e_assume(spec.require), std::move(body));
  for (auto it = spec.ghosts.rbegin(); it != spec.ghosts.rend(); ++it)
    body = e_let(it->first, e_gensym(it->second, it->first), std::move(body));
  for (auto it = spec.params.rbegin(); it != spec.params.rend(); ++it)
    body = e_fun(it->first, it->second, std::move(body));
  (void)ctx;
  (void)fname;
  return body;
}

namespace {

int fresh_binder_counter = 0;

std::string fresh_binder() { return "$t" + std::to_string(fresh_binder_counter++); }

ExprPtr translate_call(Ctx& ctx, const ModuleFile& mod, const std::string& target,
                       const std::vector<ValuePtr>& args, const std::string& binder,
                       ExprPtr cont, const std::map<std::string, ExprPtr>& funs) {
  std::vector<ExprPtr> arg_exprs;
  arg_exprs.reserve(args.size());
  for (const auto& a : args) {
    if (a->kind == SymValue::Kind::Var)
      arg_exprs.push_back(e_var(a->name, a->sort));
    else
      arg_exprs.push_back(e_first(a));
  }
  if (const MethodSpec* api = mod.find_api_spec(target)) {
    return e_letapp(binder, api_closure(ctx, target, *api), std::move(arg_exprs), std::move(cont));
  }
  auto fit = funs.find(target);
  if (fit != funs.end())
    return e_letapp(binder, fit->second, std::move(arg_exprs), std::move(cont));
  if (const MethodDef* def = mod.find_method(target))
    return e_letapp(binder, translate_method_value(ctx, mod, *def), std::move(arg_exprs),
                    std::move(cont));
  throw std::runtime_error("call to unknown function " + target);
}

ExprPtr translate(Ctx& ctx, const ModuleFile& mod, const SourcePtr& e,
                  std::map<std::string, ExprPtr> funs) {
  switch (e->kind) {
    case SourceExpr::Kind::Value:
      return e->value->kind == SymValue::Kind::Var ? e_var(e->value->name, e->value->sort)
                                                   : e_first(e->value);
    case SourceExpr::Kind::Gensym:
      return e_gensym(e->sort);
    case SourceExpr::Kind::Call: {
      std::string binder = fresh_binder();
      return translate_call(ctx, mod, e->name, e->args, binder,
                            e_var(binder, Sort::unit()), funs);
    }
    case SourceExpr::Kind::If: {
      ExprPtr then_e = translate(ctx, mod, e->kids[0], funs);
      ExprPtr else_e = translate(ctx, mod, e->kids[1], funs);
      return e_choice(e_seq(e_assume(e->formula), std::move(then_e)),
                      e_seq(e_assume(mk_not(e->formula)), std::move(else_e)));
    }
    case SourceExpr::Kind::Let: {
      ExprPtr body = translate(ctx, mod, e->kids[1], funs);
      const SourcePtr& rhs = e->kids[0];
      if (rhs->kind == SourceExpr::Kind::Call)
        return translate_call(ctx, mod, rhs->name, rhs->args, e->name, std::move(body), funs);
      return e_let(e->name, translate(ctx, mod, rhs, funs), std::move(body));
    }
    case SourceExpr::Kind::LetRec: {
      // fix f. fun p1. ... fun pn. body
      std::map<std::string, ExprPtr> inner = funs;
      inner[e->name] = e_var(e->name, Sort::unit());  // bound by the fix binder
      ExprPtr fbody = translate(ctx, mod, e->kids[0], inner);
      for (auto it = e->params.rbegin(); it != e->params.rend(); ++it)
        fbody = e_fun(it->first, it->second, std::move(fbody));
      ExprPtr fixv = e_fix(e->name, std::move(fbody));
      funs[e->name] = e_var(e->name, Sort::unit());
      ExprPtr body = translate(ctx, mod, e->kids[1], funs);
      return e_let(e->name, std::move(fixv), std::move(body));
    }
    case SourceExpr::Kind::Assert: {
      ExprPtr a = desugar_assert(ctx, e->formula);
      if (e->kids.empty()) return a;
      return e_seq(std::move(a), translate(ctx, mod, e->kids[0], funs));
    }
    case SourceExpr::Kind::Assume: {
      ExprPtr a = e_assume(e->formula);
      if (e->kids.empty()) return a;
      return e_seq(std::move(a), translate(ctx, mod, e->kids[0], funs));
    }
  }
  throw std::runtime_error("translate: bad node");
}

}  // namespace

ExprPtr translate_expr(Ctx& ctx, const ModuleFile& mod, const SourcePtr& e) {
  return translate(ctx, mod, e, {});
}

ExprPtr translate_method_value(Ctx& ctx, const ModuleFile& mod, const MethodDef& def) {
  ExprPtr body = translate_expr(ctx, mod, def.body);
  for (auto it = def.params.rbegin(); it != def.params.rend(); ++it)
    body = e_fun(it->first, it->second, std::move(body));
  return body;
}

Harness get_harness(Ctx& ctx, const MethodSpec& spec, const ExprPtr& method_value) {
  ExprPtr tail = desugar_assert(ctx, spec.ensure);  // references ret_name
  std::vector<ExprPtr> args;
  for (const auto& [p, s] : spec.params) args.push_back(e_var(p, s));
  ExprPtr body = args.empty()
                     ? e_let(spec.ret_name, method_value, std::move(tail))
                     : e_letapp(spec.ret_name, method_value, std::move(args), std::move(tail));
  body = e_seq(e_append(spec.context), std::move(body));
  body = e_seq(e_assume(spec.require), std::move(body));
  for (auto it = spec.ghosts.rbegin(); it != spec.ghosts.rend(); ++it)
    body = e_let(it->first, e_gensym(it->second, it->first), std::move(body));
  for (auto it = spec.params.rbegin(); it != spec.params.rend(); ++it)
    body = e_let(it->first, e_gensym(it->second, it->first), std::move(body));
  Harness h;
  h.expr = std::move(body);
  h.post = ctx.arena.concat2(spec.context, spec.effect);
  return h;
}

Harness build_harness(Ctx& ctx, const ModuleFile& mod, const std::string& method) {
  const MethodDef* def = mod.find_method(method);
  if (!def) throw std::runtime_error("no such method: " + method);
  const MethodSpec* spec = mod.find_method_spec(method);
  if (!spec) throw std::runtime_error("no spec for method: " + method);
  return get_harness(ctx, *spec, translate_method_value(ctx, mod, *def));
}

}  // namespace sref
