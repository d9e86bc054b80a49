#include "sref/parse.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

namespace sref {

namespace {

// ---------------------------------------------------------------------------
// lexer
// ---------------------------------------------------------------------------

enum class Tok {
  Ident, Int, LParen, RParen, LAngle, RAngle, Pipe, Amp, Comma, Colon, Semi,
  Star, Bang, Tilde, Dot, Eq, Ne, Le, Ge, Plus, Minus, Arrow, AndOp, OrOp,
  Gensym, Underscore, End
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t num = 0;
  int line = 1, col = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') { ++line; col = 1; ++i; continue; }
    if (isspace(static_cast<unsigned char>(c))) { ++col; ++i; continue; }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    int tok_col = col;
    auto push_at = [&](Tok k, std::string text, std::int64_t num = 0) {
      out.push_back({k, std::move(text), num, line, tok_col});
    };
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\''))
        ++j;
      // qualified name: Name.name
      if (j < src.size() && src[j] == '.' && j + 1 < src.size() &&
          isalpha(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && (isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
          ++j;
      }
      push_at(Tok::Ident, src.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && isdigit(static_cast<unsigned char>(src[j]))) ++j;
      push_at(Tok::Int, src.substr(i, j - i), std::stoll(src.substr(i, j - i)));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (two('/', '\\')) { push_at(Tok::AndOp, "/\\"); i += 2; col += 2; continue; }
    if (two('\\', '/')) { push_at(Tok::OrOp, "\\/"); i += 2; col += 2; continue; }
    if (two('!', '=')) { push_at(Tok::Ne, "!="); i += 2; col += 2; continue; }
    if (two('<', '=')) { push_at(Tok::Le, "<="); i += 2; col += 2; continue; }
    if (two('>', '=')) { push_at(Tok::Ge, ">="); i += 2; col += 2; continue; }
    if (two('-', '>')) { push_at(Tok::Arrow, "->"); i += 2; col += 2; continue; }
    if (two('?', '?')) { push_at(Tok::Gensym, "??"); i += 2; col += 2; continue; }
    switch (c) {
      case '(': push_at(Tok::LParen, "("); break;
      case ')': push_at(Tok::RParen, ")"); break;
      case '<': push_at(Tok::LAngle, "<"); break;
      case '>': push_at(Tok::RAngle, ">"); break;
      case '|': push_at(Tok::Pipe, "|"); break;
      case '&': push_at(Tok::Amp, "&"); break;
      case ',': push_at(Tok::Comma, ","); break;
      case ':': push_at(Tok::Colon, ":"); break;
      case ';': push_at(Tok::Semi, ";"); break;
      case '*': push_at(Tok::Star, "*"); break;
      case '!': push_at(Tok::Bang, "!"); break;
      case '~': push_at(Tok::Tilde, "~"); break;
      case '.': push_at(Tok::Dot, "."); break;
      case '=': push_at(Tok::Eq, "="); break;
      case '+': push_at(Tok::Plus, "+"); break;
      case '-': push_at(Tok::Minus, "-"); break;
      case '_': push_at(Tok::Underscore, "_"); break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "", 0, line, col});
  return out;
}

// ---------------------------------------------------------------------------
// parser
// ---------------------------------------------------------------------------

struct Macro {
  std::vector<std::string> params;
  std::vector<Token> body;
};

struct Parser {
  Ctx& ctx;
  std::vector<Token> toks;
  size_t pos = 0;
  std::map<std::string, Sort> sorts;  // declared uninterpreted sorts by name
  std::map<std::string, Macro> macros;
  ModuleFile mod;
  int macro_depth = 0;

  explicit Parser(Ctx& c) : ctx(c) {}

  const Token& peek(size_t k = 0) const { return toks[std::min(pos + k, toks.size() - 1)]; }
  const Token& cur() const { return toks[pos]; }
  Token eat() { return toks[pos == toks.size() - 1 ? pos : pos++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const std::string& s) const { return cur().kind == Tok::Ident && cur().text == s; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, cur().line, cur().col);
  }
  Token expect(Tok k, const std::string& what) {
    if (!at(k)) fail("expected " + what + ", got '" + cur().text + "'");
    return eat();
  }
  void expect_kw(const std::string& s) {
    if (!at_kw(s)) fail("expected '" + s + "'");
    eat();
  }

  Sort parse_sort() {
    Token t = expect(Tok::Ident, "sort name");
    if (t.text == "Unit") return Sort::unit();
    if (t.text == "Bool") return Sort::boolean();
    if (t.text == "Int") return Sort::integer();
    auto it = sorts.find(t.text);
    if (it == sorts.end()) throw ParseError("unknown sort " + t.text, t.line, t.col);
    return it->second;
  }

  // --- terms and formulas ---------------------------------------------------

  // `null` parses with a placeholder sort resolved against the context.
  static bool is_null_placeholder(const ValuePtr& v) {
    return v->kind == SymValue::Kind::Constant && v->sort.kind == SortKind::Uninterpreted &&
           v->sort.name == "?null";
  }

  ValuePtr coerce(const ValuePtr& v, const Sort& want) const {
    if (is_null_placeholder(v)) {
      if (want.kind != SortKind::Uninterpreted)
        throw std::runtime_error("null used at non-reference sort " + want.str());
      return mk_constant({want, 0});
    }
    // Numerals are sort-polymorphic: an Int literal names the value of an
    // uninterpreted sort when the position demands one (null is 0).
    if (want.kind == SortKind::Uninterpreted && v->kind == SymValue::Kind::Constant &&
        v->sort.kind == SortKind::Int) {
      if (v->constant.value < 0)
        throw std::runtime_error("negative value for reference sort " + want.str());
      return mk_constant({want, v->constant.value});
    }
    return v;
  }

  ValuePtr parse_factor(const VarScope& scope) {
    if (at(Tok::Int)) return mk_int(eat().num);
    if (at(Tok::Minus)) {
      eat();
      Token t = expect(Tok::Int, "integer");
      return mk_int(-t.num);
    }
    if (at(Tok::LParen)) {
      eat();
      if (at(Tok::RParen)) { eat(); return mk_unit(); }
      ValuePtr v = parse_term(scope);
      expect(Tok::RParen, ")");
      return v;
    }
    if (at(Tok::Ident)) {
      Token t = eat();
      if (t.text == "true") return mk_bool(true);
      if (t.text == "false") return mk_bool(false);
      if (t.text == "null") return mk_constant({Sort::uninterpreted("?null"), 0});
      auto it = scope.find(t.text);
      if (it == scope.end()) throw ParseError("unbound variable " + t.text, t.line, t.col);
      return mk_var(t.text, it->second);
    }
    fail("expected a term");
  }

  ValuePtr parse_term(const VarScope& scope) {
    ValuePtr v = parse_factor(scope);
    while (at(Tok::Plus) || at(Tok::Minus)) {
      std::string op = eat().text;
      ValuePtr rhs = parse_factor(scope);
      v = mk_op(op, {v, rhs});
    }
    return v;
  }

  FormulaPtr parse_cmp(const VarScope& scope) {
    ValuePtr lhs = parse_term(scope);
    std::string op;
    if (at(Tok::Eq)) op = "=";
    else if (at(Tok::Ne)) op = "!=";
    else if (at(Tok::LAngle)) op = "<";
    else if (at(Tok::Le)) op = "<=";
    else if (at(Tok::RAngle)) op = ">";
    else if (at(Tok::Ge)) op = ">=";
    if (op.empty()) {
      if (is_null_placeholder(lhs)) fail("null needs a comparison partner");
      if (lhs->sort.kind != SortKind::Bool) fail("expected a boolean term");
      return mk_atom(lhs);
    }
    eat();
    ValuePtr rhs = parse_term(scope);
    lhs = coerce(lhs, rhs->sort);
    rhs = coerce(rhs, lhs->sort);
    if (op == ">") return mk_atom(mk_op("<", {rhs, lhs}));
    if (op == ">=") return mk_atom(mk_op("<=", {rhs, lhs}));
    if (op == "!=") return mk_ne(lhs, rhs);
    return mk_atom(mk_op(op, {lhs, rhs}));
  }

  FormulaPtr parse_formula_not(const VarScope& scope) {
    if (at(Tok::Bang)) {
      eat();
      return mk_not(parse_formula_not(scope));
    }
    if (at(Tok::LParen)) {
      eat();
      FormulaPtr f = parse_formula_or(scope);
      expect(Tok::RParen, ")");
      return f;
    }
    if (at_kw("true")) { eat(); return mk_true(); }
    if (at_kw("false")) { eat(); return mk_false(); }
    return parse_cmp(scope);
  }

  FormulaPtr parse_formula_and(const VarScope& scope) {
    FormulaPtr f = parse_formula_not(scope);
    while (at(Tok::AndOp)) {
      eat();
      f = mk_and2(f, parse_formula_not(scope));
    }
    return f;
  }

  FormulaPtr parse_formula_or(const VarScope& scope) {
    FormulaPtr f = parse_formula_and(scope);
    while (at(Tok::OrOp)) {
      eat();
      f = mk_or2(f, parse_formula_and(scope));
    }
    return f;
  }

  // --- literals --------------------------------------------------------------

  // <f a !b _>  |  <f x y = r | phi>  |  <f>
  SymEvent parse_angle_literal(const VarScope& scope) {
    expect(Tok::LAngle, "<");
    Token fname = expect(Tok::Ident, "effect name");
    const EffectDecl* decl = ctx.sig.find(fname.text);
    if (!decl) throw ParseError("unknown effect " + fname.text, fname.line, fname.col);

    // Determine whether this is the named form by scanning for '|' or '='
    // before the closing '>'.
    bool named = false;
    for (size_t k = pos; k < toks.size(); ++k) {
      if (toks[k].kind == Tok::RAngle || toks[k].kind == Tok::End) break;
      if (toks[k].kind == Tok::Pipe || toks[k].kind == Tok::Eq) { named = true; break; }
      if (toks[k].kind == Tok::LAngle) break;
    }

    FormulaPtr qual = mk_true();
    if (named) {
      VarScope inner = scope;
      std::map<std::string, ValuePtr> rename;
      size_t argi = 0;
      while (!at(Tok::Eq) && !at(Tok::Pipe) && !at(Tok::RAngle)) {
        Token a = expect(Tok::Ident, "argument name");
        if (argi >= decl->arg_sorts.size()) fail("too many arguments for " + decl->fname);
        inner[a.text] = decl->arg_sorts[argi];
        rename[a.text] = arg_var(*decl, argi);
        ++argi;
      }
      if (argi != decl->arg_sorts.size()) fail("argument count mismatch for " + decl->fname);
      if (at(Tok::Eq)) {
        eat();
        Token r = expect(Tok::Ident, "return name");
        inner[r.text] = decl->ret_sort;
        rename[r.text] = ret_var(*decl);
      }
      if (at(Tok::Pipe)) {
        eat();
        qual = parse_formula_or(inner);
        qual = substitute(qual, rename);
      }
      expect(Tok::RAngle, ">");
    } else {
      std::vector<FormulaPtr> conj;
      size_t argi = 0;
      while (!at(Tok::RAngle)) {
        if (argi >= decl->arg_sorts.size()) fail("too many arguments for " + decl->fname);
        if (at(Tok::Underscore)) {
          eat();
        } else if (at(Tok::Bang)) {
          eat();
          ValuePtr t = coerce(parse_factor(scope), decl->arg_sorts[argi]);
          conj.push_back(mk_ne(arg_var(*decl, argi), t));
        } else {
          ValuePtr t = coerce(parse_factor(scope), decl->arg_sorts[argi]);
          conj.push_back(mk_eq(arg_var(*decl, argi), t));
        }
        ++argi;
      }
      if (argi != 0 && argi != decl->arg_sorts.size())
        fail("argument count mismatch for " + decl->fname);
      expect(Tok::RAngle, ">");
      qual = mk_and(std::move(conj));
    }
    return atom_event(decl->fname, qual);
  }

  SymEvent parse_literal_factor(const VarScope& scope) {
    if (at(Tok::Tilde)) {
      eat();
      return complement(parse_literal_factor(scope));
    }
    if (at(Tok::Dot)) {
      eat();
      return top_event();
    }
    if (at(Tok::LParen)) {
      eat();
      SymEvent e = parse_literal_expr(scope);
      expect(Tok::RParen, ")");
      return e;
    }
    return parse_angle_literal(scope);
  }

  SymEvent parse_literal_meet(const VarScope& scope) {
    SymEvent e = parse_literal_factor(scope);
    while (at(Tok::Amp)) {
      eat();
      e = meet(e, parse_literal_factor(scope));
    }
    return e;
  }

  SymEvent parse_literal_expr(const VarScope& scope) {
    SymEvent e = parse_literal_meet(scope);
    while (at(Tok::Pipe)) {
      eat();
      e = join(e, parse_literal_meet(scope));
    }
    return e;
  }

  bool literal_starts() const {
    return at(Tok::LAngle) || at(Tok::Tilde) || at(Tok::Dot);
  }

  // --- LTLf ------------------------------------------------------------------

  bool temporal_starts() const {
    return at_kw("F") || at_kw("G") || at_kw("X");
  }

  LTLfPtr parse_ltlf_formula(const VarScope& scope) {
    LTLfPtr lhs = parse_ltlf_or(scope);
    if (at_kw("U") || at_kw("W")) {
      bool is_u = cur().text == "U";
      eat();
      if (lhs->kind != LTLfFormula::Kind::Lit)
        fail("first operand of U/W must be a single literal");
      LTLfPtr rhs = parse_ltlf_formula(scope);
      return is_u ? ltlf_u(lhs->lit, rhs) : ltlf_w(lhs->lit, rhs);
    }
    return lhs;
  }

  LTLfPtr parse_ltlf_or(const VarScope& scope) {
    LTLfPtr f = parse_ltlf_and(scope);
    while (at(Tok::OrOp)) {
      eat();
      f = ltlf_or(f, parse_ltlf_and(scope));
    }
    return f;
  }

  LTLfPtr parse_ltlf_and(const VarScope& scope) {
    LTLfPtr f = parse_ltlf_unary(scope);
    while (at(Tok::AndOp)) {
      eat();
      f = ltlf_and(f, parse_ltlf_unary(scope));
    }
    return f;
  }

  LTLfPtr parse_ltlf_unary(const VarScope& scope) {
    if (at_kw("F")) { eat(); return ltlf_f(parse_ltlf_formula(scope)); }
    if (at_kw("G")) { eat(); return ltlf_g(parse_ltlf_formula(scope)); }
    if (at_kw("X")) { eat(); return ltlf_x(parse_ltlf_formula(scope)); }
    if (at(Tok::Tilde)) {
      // `~` before a literal is the event-algebra complement (still a
      // literal, usable as a U/W operand); before `(` it negates a formula.
      if (peek(1).kind == Tok::LParen) {
        eat();
        eat();
        LTLfPtr f = parse_ltlf_formula(scope);
        expect(Tok::RParen, ")");
        return ltlf_not(f);
      }
      return ltlf_lit(parse_literal_meet(scope));
    }
    if (literal_starts()) return ltlf_lit(parse_literal_meet(scope));
    if (at(Tok::LParen)) {
      eat();
      LTLfPtr f = parse_ltlf_formula(scope);
      expect(Tok::RParen, ")");
      return f;
    }
    fail("expected an LTLf formula");
  }

  // --- SREs -------------------------------------------------------------------

  ReId parse_sre_expr(const VarScope& scope) {
    ReId r = parse_sre_and(scope);
    while (at(Tok::OrOp)) {
      eat();
      r = ctx.arena.disj({r, parse_sre_and(scope)});
    }
    return r;
  }

  ReId parse_sre_and(const VarScope& scope) {
    ReId r = parse_sre_cat(scope);
    while (at(Tok::AndOp)) {
      eat();
      r = ctx.arena.conj({r, parse_sre_cat(scope)});
    }
    return r;
  }

  bool sre_unit_starts() const {
    return literal_starts() || at(Tok::LParen) || at(Tok::Bang) || temporal_starts() ||
           at_kw("empty") || at_kw("eps") ||
           (at(Tok::Ident) && macros.count(cur().text) > 0);
  }

  ReId parse_sre_cat(const VarScope& scope) {
    ReId r = parse_sre_unary(scope);
    while (true) {
      if (at(Tok::Semi)) {
        eat();
        r = ctx.arena.concat2(r, parse_sre_unary(scope));
      } else if (sre_unit_starts() && !at_kw("U") && !at_kw("W")) {
        r = ctx.arena.concat2(r, parse_sre_unary(scope));
      } else {
        break;
      }
    }
    return r;
  }

  ReId parse_sre_unary(const VarScope& scope) {
    if (at(Tok::Bang)) {
      eat();
      return ctx.arena.negate(parse_sre_unary(scope));
    }
    if (temporal_starts()) return to_sre(ctx, parse_ltlf_formula(scope));
    ReId r = parse_sre_primary(scope);
    while (at(Tok::Star)) {
      eat();
      r = ctx.arena.star(r);
    }
    return r;
  }

  ReId parse_sre_primary(const VarScope& scope) {
    if (at_kw("empty")) { eat(); return ctx.arena.empty(); }
    if (at_kw("eps")) { eat(); return ctx.arena.eps(); }
    if (at(Tok::Ident) && macros.count(cur().text)) return parse_macro_use(scope);
    if (literal_starts()) {
      SymEvent e = parse_literal_expr(scope);
      // A literal directly followed by U/W heads an LTLf formula.
      if (at_kw("U") || at_kw("W")) {
        bool is_u = cur().text == "U";
        eat();
        LTLfPtr rhs = parse_ltlf_formula(scope);
        return to_sre(ctx, is_u ? ltlf_u(e, rhs) : ltlf_w(e, rhs));
      }
      return ctx.arena.literal(e);
    }
    if (at(Tok::LParen)) {
      eat();
      ReId r = parse_sre_expr(scope);
      expect(Tok::RParen, ")");
      return r;
    }
    fail("expected an SRE");
  }

  ReId parse_macro_use(const VarScope& scope) {
    Token name = eat();
    const Macro& m = macros.at(name.text);
    expect(Tok::LParen, "(");
    std::vector<ValuePtr> args;
    if (!at(Tok::RParen)) {
      args.push_back(parse_term(scope));
      while (at(Tok::Comma)) {
        eat();
        args.push_back(parse_term(scope));
      }
    }
    expect(Tok::RParen, ")");
    if (args.size() != m.params.size())
      throw ParseError("macro " + name.text + " expects " + std::to_string(m.params.size()) +
                           " arguments",
                       name.line, name.col);
    for (const auto& a : args)
      if (is_null_placeholder(a))
        throw ParseError("null cannot be a macro argument (sort unknown)", name.line, name.col);

    if (macro_depth > 16) throw ParseError("macro recursion too deep", name.line, name.col);

    // Re-parse the macro body with parameters scoped at the call's sorts,
    // then substitute the argument values.
    VarScope inner;
    std::map<std::string, ValuePtr> binding;
    for (size_t i = 0; i < args.size(); ++i) {
      inner[m.params[i]] = args[i]->sort;
      binding[m.params[i]] = args[i];
    }
    Parser sub(ctx);
    sub.toks = m.body;
    sub.toks.push_back({Tok::End, "", 0, name.line, name.col});
    sub.sorts = sorts;
    sub.macros = macros;
    sub.macro_depth = macro_depth + 1;
    ReId r = sub.parse_sre_expr(inner);
    if (!sub.at(Tok::End))
      throw ParseError("trailing tokens in macro " + name.text, sub.cur().line, sub.cur().col);
    return re_substitute(ctx, r, binding);
  }

  // --- surface expressions ----------------------------------------------------

  struct MethodScope {
    VarScope vars;
    std::map<std::string, std::pair<std::vector<Sort>, Sort>> funs;  // local let-recs
  };

  Sort call_ret_sort(const std::string& target, const MethodScope& sc, size_t nargs,
                     const Token& where) {
    if (const EffectDecl* d = ctx.sig.find(target)) {
      if (nargs != d->arg_sorts.size())
        throw ParseError("arity mismatch calling " + target, where.line, where.col);
      if (!mod.find_api_spec(target))
        throw ParseError("effectful call to " + target + " but no spec is declared",
                         where.line, where.col);
      return d->ret_sort;
    }
    auto it = sc.funs.find(target);
    if (it != sc.funs.end()) {
      if (nargs != it->second.first.size())
        throw ParseError("arity mismatch calling " + target, where.line, where.col);
      return it->second.second;
    }
    if (const MethodDef* m = mod.find_method(target)) {
      if (nargs != m->params.size())
        throw ParseError("arity mismatch calling " + target, where.line, where.col);
      return m->ret_sort;
    }
    throw ParseError("call to unknown function " + target, where.line, where.col);
  }

  bool call_starts() const {
    return at(Tok::Ident) && peek(1).kind == Tok::LParen &&
           (ctx.sig.find(cur().text) || mod.find_method(cur().text) ||
            cur().text.find('.') != std::string::npos || true) &&
           !at_kw("if") && !at_kw("let") && !at_kw("assert") && !at_kw("assume");
  }

  SourcePtr src_node(SourceExpr n) { return std::make_shared<SourceExpr>(std::move(n)); }

  SourcePtr parse_call(MethodScope& sc, Sort* out_sort) {
    Token name = expect(Tok::Ident, "function name");
    expect(Tok::LParen, "(");
    std::vector<ValuePtr> args;
    if (!at(Tok::RParen)) {
      args.push_back(parse_term(sc.vars));
      while (at(Tok::Comma)) {
        eat();
        args.push_back(parse_term(sc.vars));
      }
    }
    expect(Tok::RParen, ")");
    Sort ret = call_ret_sort(name.text, sc, args.size(), name);
    // Coerce null placeholders against the callee's parameter sorts.
    std::vector<Sort> param_sorts;
    if (const EffectDecl* d = ctx.sig.find(name.text)) param_sorts = d->arg_sorts;
    else if (sc.funs.count(name.text)) param_sorts = sc.funs[name.text].first;
    else if (const MethodDef* m = mod.find_method(name.text))
      for (const auto& [pn, ps] : m->params) param_sorts.push_back(ps);
    for (size_t i = 0; i < args.size(); ++i) {
      args[i] = coerce(args[i], param_sorts[i]);
      if (args[i]->sort != param_sorts[i])
        throw ParseError("argument sort mismatch calling " + name.text, name.line, name.col);
    }
    if (out_sort) *out_sort = ret;
    SourceExpr n;
    n.kind = SourceExpr::Kind::Call;
    n.name = name.text;
    n.args = std::move(args);
    n.sort = ret;
    return src_node(std::move(n));
  }

  SourcePtr parse_simple(MethodScope& sc, Sort* out_sort) {
    if (at(Tok::Gensym)) {
      eat();
      expect(Tok::Colon, ": sort after ??");
      Sort s = parse_sort();
      if (out_sort) *out_sort = s;
      SourceExpr n;
      n.kind = SourceExpr::Kind::Gensym;
      n.sort = s;
      return src_node(std::move(n));
    }
    if (call_starts()) return parse_call(sc, out_sort);
    ValuePtr v = parse_term(sc.vars);
    if (is_null_placeholder(v)) fail("null needs a sorted context");
    if (out_sort) *out_sort = v->sort;
    SourceExpr n;
    n.kind = SourceExpr::Kind::Value;
    n.value = std::move(v);
    return src_node(std::move(n));
  }

  std::vector<std::pair<std::string, Sort>> parse_params() {
    std::vector<std::pair<std::string, Sort>> out;
    expect(Tok::LParen, "(");
    while (!at(Tok::RParen)) {
      Token n = expect(Tok::Ident, "parameter name");
      expect(Tok::Colon, ":");
      Sort s = parse_sort();
      out.emplace_back(n.text, s);
      if (at(Tok::Comma)) eat();
    }
    expect(Tok::RParen, ")");
    return out;
  }

  SourcePtr parse_expr(MethodScope sc) {
    if (at_kw("if")) {
      eat();
      FormulaPtr c = parse_formula_or(sc.vars);
      expect_kw("then");
      SourcePtr t = parse_expr(sc);
      expect_kw("else");
      SourcePtr e = parse_expr(sc);
      SourceExpr n;
      n.kind = SourceExpr::Kind::If;
      n.formula = std::move(c);
      n.kids = {std::move(t), std::move(e)};
      return src_node(std::move(n));
    }
    if (at_kw("let") && peek(1).kind == Tok::Ident && peek(1).text == "rec") {
      eat();
      eat();
      Token name = expect(Tok::Ident, "function name");
      auto params = parse_params();
      expect(Tok::Colon, ":");
      Sort ret = parse_sort();
      expect(Tok::Eq, "=");
      MethodScope inner = sc;
      for (const auto& [p, s] : params) inner.vars[p] = s;
      inner.funs[name.text] = {sorts_of(params), ret};
      SourcePtr fbody = parse_expr(inner);
      expect_kw("in");
      sc.funs[name.text] = {sorts_of(params), ret};
      SourcePtr body = parse_expr(sc);
      SourceExpr n;
      n.kind = SourceExpr::Kind::LetRec;
      n.name = name.text;
      n.params = params;
      n.sort = ret;
      n.kids = {std::move(fbody), std::move(body)};
      return src_node(std::move(n));
    }
    if (at_kw("let")) {
      eat();
      // multi-binder sugar: let a, b = rhs1, rhs2 in e
      std::vector<Token> names;
      names.push_back(expect(Tok::Ident, "binder"));
      while (at(Tok::Comma)) {
        eat();
        names.push_back(expect(Tok::Ident, "binder"));
      }
      std::optional<Sort> ann;
      if (at(Tok::Colon)) {
        eat();
        ann = parse_sort();
      }
      expect(Tok::Eq, "=");
      std::vector<SourcePtr> rhss;
      std::vector<Sort> rhs_sorts;
      for (size_t i = 0; i < names.size(); ++i) {
        if (i) expect(Tok::Comma, ",");
        Sort s = Sort::unit();
        rhss.push_back(parse_simple(sc, &s));
        rhs_sorts.push_back(s);
      }
      expect_kw("in");
      if (ann && names.size() == 1 && *ann != rhs_sorts[0])
        fail("annotation does not match binding sort");
      for (size_t i = 0; i < names.size(); ++i) sc.vars[names[i].text] = rhs_sorts[i];
      SourcePtr body = parse_expr(sc);
      for (size_t i = names.size(); i-- > 0;) {
        SourceExpr n;
        n.kind = SourceExpr::Kind::Let;
        n.name = names[i].text;
        n.sort = rhs_sorts[i];
        n.kids = {rhss[i], std::move(body)};
        body = src_node(std::move(n));
      }
      return body;
    }
    if (at_kw("assert") || at_kw("assume")) {
      bool is_assert = cur().text == "assert";
      eat();
      expect(Tok::LParen, "(");
      FormulaPtr f = parse_formula_or(sc.vars);
      expect(Tok::RParen, ")");
      SourceExpr n;
      n.kind = is_assert ? SourceExpr::Kind::Assert : SourceExpr::Kind::Assume;
      n.formula = std::move(f);
      if (at(Tok::Semi)) {
        eat();
        n.kids = {parse_expr(sc)};
      }
      return src_node(std::move(n));
    }
    if (at(Tok::LParen) && !(peek(1).kind == Tok::RParen)) {
      // grouped compound expression; a lone () is a unit value handled below
      size_t save = pos;
      eat();
      if (at_kw("if") || at_kw("let") || at_kw("assert") || at_kw("assume")) {
        SourcePtr e = parse_expr(sc);
        expect(Tok::RParen, ")");
        if (at(Tok::Semi)) {
          eat();
          SourcePtr rest = parse_expr(sc);
          SourceExpr n;
          n.kind = SourceExpr::Kind::Let;
          n.name = "_";
          n.sort = Sort::unit();
          n.kids = {std::move(e), std::move(rest)};
          return src_node(std::move(n));
        }
        return e;
      }
      pos = save;
    }
    Sort s = Sort::unit();
    SourcePtr e = parse_simple(sc, &s);
    if (at(Tok::Semi)) {
      eat();
      SourcePtr rest = parse_expr(sc);
      SourceExpr n;
      n.kind = SourceExpr::Kind::Let;
      n.name = "_";
      n.sort = s;
      n.kids = {std::move(e), std::move(rest)};
      return src_node(std::move(n));
    }
    return e;
  }

  static std::vector<Sort> sorts_of(const std::vector<std::pair<std::string, Sort>>& ps) {
    std::vector<Sort> out;
    out.reserve(ps.size());
    for (const auto& [n, s] : ps) out.push_back(s);
    return out;
  }

  // --- top level ---------------------------------------------------------------

  MethodSpec parse_spec_body() {
    MethodSpec spec;
    spec.params = parse_params();
    VarScope scope;
    for (const auto& [n, s] : spec.params) scope[n] = s;
    if (at_kw("ghost")) {
      eat();
      spec.ghosts = parse_params();
      for (const auto& [n, s] : spec.ghosts) scope[n] = s;
    }
    spec.require = mk_true();
    if (at_kw("require")) {
      eat();
      spec.require = parse_formula_or(scope);
    }
    spec.context = ctx.arena.eps();
    if (at_kw("context")) {
      eat();
      spec.context = parse_sre_expr(scope);
    }
    expect_kw("return");
    Token rn = expect(Tok::Ident, "return name");
    expect(Tok::Colon, ":");
    spec.ret_name = rn.text;
    spec.ret_sort = parse_sort();
    scope[spec.ret_name] = spec.ret_sort;
    spec.ensure = mk_true();
    if (at_kw("ensures")) {
      eat();
      spec.ensure = parse_formula_or(scope);
    }
    spec.effect = ctx.arena.eps();
    if (at_kw("effect")) {
      eat();
      spec.effect = parse_sre_expr(scope);
    }
    return spec;
  }

  void parse_item() {
    if (at_kw("sort")) {
      eat();
      Token n = expect(Tok::Ident, "sort name");
      if (sorts.count(n.text)) throw ParseError("duplicate sort " + n.text, n.line, n.col);
      sorts[n.text] = Sort::uninterpreted(n.text);
      mod.sorts.push_back(n.text);
      return;
    }
    if (at_kw("effect")) {
      eat();
      Token n = expect(Tok::Ident, "effect name");
      expect(Tok::LParen, "(");
      std::vector<Sort> args;
      while (!at(Tok::RParen)) {
        args.push_back(parse_sort());
        if (at(Tok::Comma)) eat();
      }
      expect(Tok::RParen, ")");
      expect(Tok::Arrow, "->");
      Sort ret = parse_sort();
      ctx.sig.add({n.text, std::move(args), ret});
      mod.sig = ctx.sig;
      return;
    }
    if (at_kw("def")) {
      eat();
      Token n = expect(Tok::Ident, "macro name");
      Macro m;
      expect(Tok::LParen, "(");
      while (!at(Tok::RParen)) {
        m.params.push_back(expect(Tok::Ident, "macro parameter").text);
        if (at(Tok::Comma)) eat();
      }
      expect(Tok::RParen, ")");
      expect(Tok::Eq, "=");
      // capture tokens to end of line (macros are single-line)
      int line = cur().line;
      while (!at(Tok::End) && cur().line == line) m.body.push_back(eat());
      macros[n.text] = std::move(m);
      return;
    }
    if (at_kw("spec")) {
      eat();
      Token n = expect(Tok::Ident, "spec target");
      MethodSpec spec = parse_spec_body();
      if (ctx.sig.find(n.text)) {
        const EffectDecl* d = ctx.sig.find(n.text);
        if (spec.params.size() != d->arg_sorts.size())
          throw ParseError("spec arity differs from effect declaration for " + n.text, n.line,
                           n.col);
        for (size_t i = 0; i < spec.params.size(); ++i)
          if (spec.params[i].second != d->arg_sorts[i])
            throw ParseError("spec parameter sort differs from effect declaration for " + n.text,
                             n.line, n.col);
        if (spec.ret_sort != d->ret_sort)
          throw ParseError("spec return sort differs from effect declaration for " + n.text,
                           n.line, n.col);
        mod.api_specs.emplace_back(n.text, std::move(spec));
      } else {
        mod.method_specs.emplace_back(n.text, std::move(spec));
      }
      return;
    }
    if (at_kw("method")) {
      eat();
      Token n = expect(Tok::Ident, "method name");
      MethodDef def;
      def.name = n.text;
      def.params = parse_params();
      expect(Tok::Colon, ":");
      def.ret_sort = parse_sort();
      expect(Tok::Eq, "=");
      mod.methods.push_back(def);  // visible for recursion/arity before body
      MethodScope sc;
      for (const auto& [p, s] : def.params) sc.vars[p] = s;
      SourcePtr body = parse_expr(sc);
      mod.methods.back().body = std::move(body);
      return;
    }
    if (at_kw("harness")) {
      eat();
      Token n = expect(Tok::Ident, "method name");
      mod.harness_method = n.text;
      return;
    }
    fail("expected a top-level item");
  }

  ModuleFile run() {
    while (!at(Tok::End)) parse_item();
    // every effectful call must target an API with a spec (checked during
    // body parsing); the harness method needs both a body and a spec
    if (!mod.harness_method.empty()) {
      if (!mod.find_method(mod.harness_method))
        fail("harness names unknown method " + mod.harness_method);
      if (!mod.find_method_spec(mod.harness_method))
        fail("harness method has no spec: " + mod.harness_method);
    }
    for (const auto& [f, spec] : mod.api_specs) check_spec_scope(f, spec);
    for (const auto& [m, spec] : mod.method_specs) check_spec_scope(m, spec);
    return mod;
  }

  void check_spec_scope(const std::string& name, const MethodSpec& spec) {
    (void)name;
    (void)spec;  // scope errors are raised during clause parsing
  }
};

}  // namespace

ModuleFile parse_module(Ctx& ctx, const std::string& text) {
  Parser p(ctx);
  p.toks = lex(text);
  return p.run();
}

ModuleFile parse_module_file(Ctx& ctx, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module(ctx, ss.str());
}

FormulaPtr parse_formula(Ctx& ctx, const std::string& text, const VarScope& scope) {
  Parser p(ctx);
  p.toks = lex(text);
  for (const auto& [n, s] : scope)
    if (s.kind == SortKind::Uninterpreted) p.sorts[s.name] = s;
  FormulaPtr f = p.parse_formula_or(scope);
  if (!p.at(Tok::End)) p.fail("trailing tokens");
  return f;
}

SymEvent parse_literal(Ctx& ctx, const std::string& text, const VarScope& scope) {
  Parser p(ctx);
  p.toks = lex(text);
  for (const auto& [n, s] : scope)
    if (s.kind == SortKind::Uninterpreted) p.sorts[s.name] = s;
  SymEvent e = p.parse_literal_expr(scope);
  if (!p.at(Tok::End)) p.fail("trailing tokens");
  return e;
}

ReId parse_sre(Ctx& ctx, const std::string& text, const VarScope& scope) {
  Parser p(ctx);
  p.toks = lex(text);
  for (const auto& [n, s] : scope)
    if (s.kind == SortKind::Uninterpreted) p.sorts[s.name] = s;
  ReId r = p.parse_sre_expr(scope);
  if (!p.at(Tok::End)) p.fail("trailing tokens");
  return r;
}

LTLfPtr parse_ltlf(Ctx& ctx, const std::string& text, const VarScope& scope) {
  Parser p(ctx);
  p.toks = lex(text);
  for (const auto& [n, s] : scope)
    if (s.kind == SortKind::Uninterpreted) p.sorts[s.name] = s;
  LTLfPtr f = p.parse_ltlf_formula(scope);
  if (!p.at(Tok::End)) p.fail("trailing tokens");
  return f;
}

}  // namespace sref
