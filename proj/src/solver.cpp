#include "sref/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <vector>

namespace sref {

SatResult Solver::check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) {
  auto t0 = std::chrono::steady_clock::now();
  SatResult r = do_check_sat(f, budget);
  auto t1 = std::chrono::steady_clock::now();
  stats_.queries++;
  stats_.total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
  switch (r.verdict) {
    case SatVerdict::Sat: stats_.sat++; break;
    case SatVerdict::Unsat: stats_.unsat++; break;
    case SatVerdict::Unknown: stats_.unknown++; break;
  }
  return r;
}

ValidVerdict Solver::check_valid(const FormulaPtr& f, std::chrono::milliseconds budget) {
  SatResult r = check_sat(mk_not(f), budget);
  switch (r.verdict) {
    case SatVerdict::Unsat: return ValidVerdict::Valid;
    case SatVerdict::Sat: return ValidVerdict::Invalid;
    case SatVerdict::Unknown: return ValidVerdict::Unknown;
  }
  return ValidVerdict::Unknown;
}

namespace {

enum class Tri { False, True, Unknown };

struct Domain {
  std::int64_t lo = 0, hi = 0;
};

struct SearchState {
  std::vector<SymVar> vars;                    // ordered by first occurrence
  std::map<int, int> index;                    // sym id -> position in vars
  std::vector<Domain> domains;
  std::vector<std::optional<std::int64_t>> assign;
  std::int64_t nodes = 0;
  std::int64_t max_nodes;
  std::chrono::steady_clock::time_point deadline;
  bool budget_hit = false;

  bool out_of_budget() {
    if (++nodes % 512 == 0 && std::chrono::steady_clock::now() > deadline) budget_hit = true;
    if (nodes > max_nodes) budget_hit = true;
    return budget_hit;
  }
};

void order_syms(const FormulaPtr& f, std::vector<SymVar>& out, std::map<int, int>& index) {
  std::function<void(const ValuePtr&)> walk_v = [&](const ValuePtr& v) {
    if (v->kind == SymValue::Kind::Sym) {
      if (!index.count(v->sym.id)) {
        index[v->sym.id] = static_cast<int>(out.size());
        out.push_back(v->sym);
      }
    } else if (v->kind == SymValue::Kind::Op) {
      for (const auto& a : v->args) walk_v(a);
    }
  };
  std::function<void(const FormulaPtr&)> walk_f = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Atom) { walk_v(g->atom); return; }
    for (const auto& k : g->kids) walk_f(k);
  };
  walk_f(f);
}

void collect_consts(const FormulaPtr& f, std::int64_t& max_abs) {
  std::function<void(const ValuePtr&)> walk_v = [&](const ValuePtr& v) {
    if (v->kind == SymValue::Kind::Constant)
      max_abs = std::max(max_abs, std::abs(v->constant.value));
    for (const auto& a : v->args) walk_v(a);
  };
  std::function<void(const FormulaPtr&)> walk_f = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Atom) { walk_v(g->atom); return; }
    for (const auto& k : g->kids) walk_f(k);
  };
  walk_f(f);
}

std::optional<std::int64_t> eval_partial(const ValuePtr& v, SearchState& st, bool& uninterp) {
  switch (v->kind) {
    case SymValue::Kind::Constant: return v->constant.value;
    case SymValue::Kind::Var: throw std::runtime_error("check_sat: formula not closed");
    case SymValue::Kind::Sym: {
      auto it = st.index.find(v->sym.id);
      return st.assign[it->second];
    }
    case SymValue::Kind::Op: {
      if (v->name != "+" && v->name != "-" && v->name != "=" && v->name != "!=" &&
          v->name != "<" && v->name != "<=") {
        uninterp = true;
        return std::nullopt;
      }
      auto a = eval_partial(v->args[0], st, uninterp);
      auto b = eval_partial(v->args[1], st, uninterp);
      if (!a || !b) return std::nullopt;
      if (v->name == "+") return *a + *b;
      if (v->name == "-") return *a - *b;
      if (v->name == "=") return *a == *b ? 1 : 0;
      if (v->name == "!=") return *a != *b ? 1 : 0;
      if (v->name == "<") return *a < *b ? 1 : 0;
      return *a <= *b ? 1 : 0;
    }
  }
  return std::nullopt;
}

Tri eval3(const FormulaPtr& f, SearchState& st, bool& uninterp) {
  switch (f->kind) {
    case Formula::Kind::True: return Tri::True;
    case Formula::Kind::False: return Tri::False;
    case Formula::Kind::Atom: {
      auto v = eval_partial(f->atom, st, uninterp);
      if (!v) return Tri::Unknown;
      return *v ? Tri::True : Tri::False;
    }
    case Formula::Kind::Not: {
      Tri t = eval3(f->kids[0], st, uninterp);
      if (t == Tri::Unknown) return t;
      return t == Tri::True ? Tri::False : Tri::True;
    }
    case Formula::Kind::And: {
      bool any_unknown = false;
      for (const auto& k : f->kids) {
        Tri t = eval3(k, st, uninterp);
        if (t == Tri::False) return Tri::False;
        if (t == Tri::Unknown) any_unknown = true;
      }
      return any_unknown ? Tri::Unknown : Tri::True;
    }
    case Formula::Kind::Or: {
      bool any_unknown = false;
      for (const auto& k : f->kids) {
        Tri t = eval3(k, st, uninterp);
        if (t == Tri::True) return Tri::True;
        if (t == Tri::Unknown) any_unknown = true;
      }
      return any_unknown ? Tri::Unknown : Tri::False;
    }
  }
  return Tri::Unknown;
}

// Unit propagation over the conjunctive skeleton: atoms reachable through
// And(+)/Or(-)/Not parity must hold, so x=c and x=y atoms there force
// assignments once one side is known.
bool propagate(const FormulaPtr& f, bool positive, SearchState& st,
               std::vector<int>& trail, bool& conflict) {
  auto try_assign = [&](const ValuePtr& sym, std::int64_t val) -> bool {
    int idx = st.index.at(sym->sym.id);
    auto& slot = st.assign[idx];
    if (slot) {
      if (*slot != val) conflict = true;
      return false;
    }
    const Domain& d = st.domains[idx];
    if (val < d.lo || val > d.hi) { conflict = true; return false; }
    slot = val;
    trail.push_back(idx);
    return true;
  };

  bool progress = false;
  switch (f->kind) {
    case Formula::Kind::Atom: {
      if (!positive) return false;
      const auto& a = f->atom;
      if (a->kind == SymValue::Kind::Sym)  // boolean variable asserted true
        return try_assign(a, 1);
      if (a->kind != SymValue::Kind::Op || a->name != "=") return false;
      const auto& x = a->args[0];
      const auto& y = a->args[1];
      bool uninterp = false;
      auto xv = eval_partial(x, st, uninterp);
      auto yv = eval_partial(y, st, uninterp);
      if (x->kind == SymValue::Kind::Sym && !xv && yv) return try_assign(x, *yv);
      if (y->kind == SymValue::Kind::Sym && !yv && xv) return try_assign(y, *xv);
      return false;
    }
    case Formula::Kind::Not:
      if (f->kids[0]->kind == Formula::Kind::Atom && positive) {
        // !b for a boolean variable b
        const auto& a = f->kids[0]->atom;
        if (a->kind == SymValue::Kind::Sym) return try_assign(a, 0);
        return false;
      }
      return propagate(f->kids[0], !positive, st, trail, conflict);
    case Formula::Kind::And:
      if (!positive) return false;
      for (const auto& k : f->kids) {
        progress |= propagate(k, true, st, trail, conflict);
        if (conflict) return progress;
      }
      return progress;
    case Formula::Kind::Or:
      if (positive) return false;
      for (const auto& k : f->kids) {
        progress |= propagate(k, false, st, trail, conflict);
        if (conflict) return progress;
      }
      return progress;
    default: return false;
  }
}

bool dfs(const FormulaPtr& f, SearchState& st) {
  if (st.out_of_budget()) return false;

  std::vector<int> trail;
  bool conflict = false;
  while (propagate(f, true, st, trail, conflict) && !conflict) {}
  bool uninterp = false;
  Tri t = conflict ? Tri::False : eval3(f, st, uninterp);
  if (uninterp) {
    st.budget_hit = true;  // cannot decide uninterpreted operators here
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) st.assign[*it].reset();
    return false;
  }
  if (t == Tri::True) return true;
  if (t == Tri::False) {
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) st.assign[*it].reset();
    return false;
  }

  int pick = -1;
  for (size_t i = 0; i < st.vars.size(); ++i)
    if (!st.assign[i]) { pick = static_cast<int>(i); break; }
  if (pick < 0) {
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) st.assign[*it].reset();
    return false;  // fully assigned but undetermined: only via uninterp, handled above
  }
  const Domain d = st.domains[pick];
  for (std::int64_t v = d.lo; v <= d.hi; ++v) {
    st.assign[pick] = v;
    if (dfs(f, st)) return true;
    if (st.budget_hit) break;
  }
  st.assign[pick].reset();
  for (auto it = trail.rbegin(); it != trail.rend(); ++it) st.assign[*it].reset();
  return false;
}

}  // namespace

SatResult BoundedSolver::do_check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) {
  SearchState st;
  st.max_nodes = max_nodes_;
  st.deadline = std::chrono::steady_clock::now() + budget;
  order_syms(f, st.vars, st.index);

  std::int64_t max_abs = 0;
  collect_consts(f, max_abs);
  std::map<std::string, std::int64_t> uninterp_count;
  std::int64_t int_count = 0;
  for (const auto& v : st.vars) {
    if (v.sort.kind == SortKind::Int) int_count++;
    if (v.sort.kind == SortKind::Uninterpreted) uninterp_count[v.sort.name]++;
  }
  const std::int64_t int_bound = std::max<std::int64_t>(8, max_abs + int_count + 1);
  st.domains.resize(st.vars.size());
  st.assign.resize(st.vars.size());
  for (size_t i = 0; i < st.vars.size(); ++i) {
    switch (st.vars[i].sort.kind) {
      case SortKind::Unit: st.domains[i] = {0, 0}; break;
      case SortKind::Bool: st.domains[i] = {0, 1}; break;
      case SortKind::Int: st.domains[i] = {-int_bound, int_bound}; break;
      case SortKind::Uninterpreted:
        st.domains[i] = {0, uninterp_count[st.vars[i].sort.name] + max_abs + 1};
        break;
    }
  }

  if (dfs(f, st)) {
    Interpretation m;
    for (size_t i = 0; i < st.vars.size(); ++i) {
      std::int64_t v = st.assign[i] ? *st.assign[i] : st.domains[i].lo;
      m.values[st.vars[i].id] = Constant{st.vars[i].sort, v};
    }
    return SatResult::sat(std::move(m));
  }
  if (st.budget_hit) return SatResult::unknown("bounded solver budget exhausted");
  return SatResult::unsat();
}

// ---------------------------------------------------------------------------
// SMT-LIB2 child process backend
// ---------------------------------------------------------------------------

namespace {

std::string smt_name(const SymVar& v) {
  std::string h;
  for (char c : v.hint)
    if (isalnum(static_cast<unsigned char>(c)) || c == '_') h += c;
  if (h.empty()) h = "x";
  return h + "$" + std::to_string(v.id);
}

std::string smt_sort(const Sort& s) {
  return s.kind == SortKind::Bool ? "Bool" : "Int";
}

void render_value(const ValuePtr& v, std::ostringstream& os,
                  std::map<std::string, std::pair<size_t, Sort>>& ufs) {
  switch (v->kind) {
    case SymValue::Kind::Constant:
      if (v->sort.kind == SortKind::Bool) {
        os << (v->constant.value ? "true" : "false");
      } else if (v->constant.value < 0) {
        os << "(- " << -v->constant.value << ")";
      } else {
        os << v->constant.value;
      }
      break;
    case SymValue::Kind::Var: throw std::runtime_error("smt2: formula not closed");
    case SymValue::Kind::Sym: os << smt_name(v->sym); break;
    case SymValue::Kind::Op: {
      std::string op = v->name;
      if (op == "!=") {
        os << "(not (= ";
        render_value(v->args[0], os, ufs);
        os << " ";
        render_value(v->args[1], os, ufs);
        os << "))";
        return;
      }
      if (op != "=" && op != "<" && op != "<=" && op != "+" && op != "-")
        ufs.emplace(op, std::make_pair(v->args.size(), v->sort));
      os << "(" << op;
      for (const auto& a : v->args) {
        os << " ";
        render_value(a, os, ufs);
      }
      os << ")";
      break;
    }
  }
}

void render_formula(const FormulaPtr& f, std::ostringstream& os,
                    std::map<std::string, std::pair<size_t, Sort>>& ufs) {
  switch (f->kind) {
    case Formula::Kind::True: os << "true"; break;
    case Formula::Kind::False: os << "false"; break;
    case Formula::Kind::Atom: render_value(f->atom, os, ufs); break;
    case Formula::Kind::Not:
      os << "(not ";
      render_formula(f->kids[0], os, ufs);
      os << ")";
      break;
    case Formula::Kind::And:
    case Formula::Kind::Or:
      os << (f->kind == Formula::Kind::And ? "(and" : "(or");
      for (const auto& k : f->kids) {
        os << " ";
        render_formula(k, os, ufs);
      }
      os << ")";
      break;
  }
}

}  // namespace

std::string Smt2ProcessSolver::render_query(const FormulaPtr& f) {
  std::map<int, SymVar> syms;
  collect_syms(f, syms);
  std::ostringstream body;
  std::map<std::string, std::pair<size_t, Sort>> ufs;
  body << "(assert ";
  render_formula(f, body, ufs);
  body << ")\n";

  std::ostringstream os;
  os << "(set-logic ALL)\n";
  for (const auto& [name, sig] : ufs) {
    os << "(declare-fun " << name << " (";
    for (size_t i = 0; i < sig.first; ++i) os << (i ? " Int" : "Int");
    os << ") " << smt_sort(sig.second) << ")\n";
  }
  for (const auto& [id, v] : syms) {
    os << "(declare-const " << smt_name(v) << " " << smt_sort(v.sort) << ")\n";
    if (v.sort.kind == SortKind::Uninterpreted)
      os << "(assert (>= " << smt_name(v) << " 0))\n";
    if (v.sort.kind == SortKind::Unit)
      os << "(assert (= " << smt_name(v) << " 0))\n";
  }
  os << body.str();
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

namespace {

struct ProcessOutput {
  int exit_code = -1;
  bool timed_out = false;
  std::string stdout_text;
};

ProcessOutput run_with_timeout(const std::vector<std::string>& argv,
                               std::chrono::milliseconds budget) {
  ProcessOutput out;
  int fds[2];
  if (pipe(fds) != 0) return out;
  pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    return out;
  }
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    dup2(fds[1], STDERR_FILENO);
    close(fds[0]);
    close(fds[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(fds[1]);
  auto deadline = std::chrono::steady_clock::now() + budget;
  std::string text;
  char buf[4096];
  bool open = true;
  while (open) {
    auto now = std::chrono::steady_clock::now();
    int wait_ms = now >= deadline
                      ? 0
                      : static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                             deadline - now).count());
    struct pollfd pfd{fds[0], POLLIN, 0};
    int pr = poll(&pfd, 1, std::min(wait_ms, 100));
    if (pr > 0) {
      ssize_t n = read(fds[0], buf, sizeof buf);
      if (n <= 0) open = false;
      else text.append(buf, static_cast<size_t>(n));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      out.timed_out = true;
      break;
    }
  }
  // Drain whatever remains after EOF/kill.
  ssize_t n;
  while ((n = read(fds[0], buf, sizeof buf)) > 0) text.append(buf, static_cast<size_t>(n));
  close(fds[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  out.stdout_text = std::move(text);
  return out;
}

std::vector<std::string> tokenize_sexp(const std::string& s) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == ')') {
      if (!cur.empty()) { toks.push_back(cur); cur.clear(); }
      toks.push_back(std::string(1, c));
    } else if (isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) { toks.push_back(cur); cur.clear(); }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

}  // namespace

SatResult Smt2ProcessSolver::do_check_sat(const FormulaPtr& f, std::chrono::milliseconds budget) {
  std::map<int, SymVar> syms;
  collect_syms(f, syms);

  char path[] = "/tmp/sref_query_XXXXXX.smt2";
  int fd = mkstemps(path, 5);
  if (fd < 0) return SatResult::unknown("cannot create temp file");
  std::string query = render_query(f);
  if (write(fd, query.data(), query.size()) != static_cast<ssize_t>(query.size())) {
    close(fd);
    unlink(path);
    return SatResult::unknown("cannot write query");
  }
  close(fd);

  std::vector<std::string> argv;
  std::istringstream cmd(command_);
  std::string part;
  while (cmd >> part) argv.push_back(part);
  argv.push_back(path);
  ProcessOutput po = run_with_timeout(argv, budget);
  unlink(path);

  if (po.timed_out) return SatResult::unknown("solver timeout");
  std::istringstream lines(po.stdout_text);
  std::string first;
  while (std::getline(lines, first)) {
    if (!first.empty()) break;
  }
  if (first == "unsat") return SatResult::unsat();
  if (first != "sat") return SatResult::unknown("solver said: " + (first.empty() ? "<nothing>" : first));

  // Parse (define-fun name () Sort value) entries from the model.
  std::map<std::string, const SymVar*> by_name;
  for (const auto& [id, v] : syms) by_name.emplace(smt_name(v), &syms.at(id));
  Interpretation m;
  auto toks = tokenize_sexp(po.stdout_text);
  for (size_t i = 0; i + 5 < toks.size(); ++i) {
    if (toks[i] != "define-fun") continue;
    const std::string& name = toks[i + 1];
    auto it = by_name.find(name);
    if (it == by_name.end()) continue;
    // skip "( )" arg list and the sort token
    size_t j = i + 2;
    if (j + 2 >= toks.size() || toks[j] != "(" || toks[j + 1] != ")") continue;
    j += 3;  // after sort
    if (j >= toks.size()) continue;
    std::int64_t val = 0;
    if (toks[j] == "true") {
      val = 1;
    } else if (toks[j] == "false") {
      val = 0;
    } else if (toks[j] == "(") {
      if (j + 2 < toks.size() && toks[j + 1] == "-") val = -std::stoll(toks[j + 2]);
    } else {
      val = std::stoll(toks[j]);
    }
    m.values[it->second->id] = Constant{it->second->sort, val};
  }
  // A model must be total on the formula's variables.
  for (const auto& [id, v] : syms)
    if (!m.values.count(id)) m.values[id] = Constant{v.sort, 0};
  return SatResult::sat(std::move(m));
}

std::unique_ptr<Solver> make_solver(const std::string& solver_cmd) {
  if (solver_cmd.empty()) return std::make_unique<BoundedSolver>();
  return std::make_unique<Smt2ProcessSolver>(solver_cmd);
}

}  // namespace sref
