#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Boolean formulas over symbolic first-order values, fresh-symbol
// generation, and ground evaluation.  The qualifier fragment is fixed to
// equality + linear integer arithmetic + uninterpreted sorts with equality;
// uninterpreted sorts are encoded as integers with null = 0.

namespace sref {

enum class SortKind { Unit, Bool, Int, Uninterpreted };

struct Sort {
  SortKind kind = SortKind::Unit;
  std::string name;  // set iff kind == Uninterpreted

  static Sort unit() { return {SortKind::Unit, {}}; }
  static Sort boolean() { return {SortKind::Bool, {}}; }
  static Sort integer() { return {SortKind::Int, {}}; }
  static Sort uninterpreted(std::string n) { return {SortKind::Uninterpreted, std::move(n)}; }

  bool operator==(const Sort& o) const { return kind == o.kind && name == o.name; }
  bool operator!=(const Sort& o) const { return !(*this == o); }
  std::string str() const;
};

struct SymVar {
  int id = -1;
  std::string hint;
  Sort sort;

  bool operator==(const SymVar& o) const { return id == o.id; }
};

// Issues globally unique symbolic-variable ids for one engine run.
class SymGen {
 public:
  SymVar fresh(Sort sort, const std::string& hint) {
    return SymVar{next_id_++, hint, std::move(sort)};
  }
  int issued() const { return next_id_; }

 private:
  int next_id_ = 0;
};

// A ground constant.  Unit is 0; Bool is 0/1; Int and uninterpreted sorts
// carry their value directly (uninterpreted values are nonnegative ints,
// with 0 reserved for null).
struct Constant {
  Sort sort;
  std::int64_t value = 0;

  bool operator==(const Constant& o) const { return sort == o.sort && value == o.value; }
  bool operator!=(const Constant& o) const { return !(*this == o); }
  std::string str() const;
};

struct SymValue;
using ValuePtr = std::shared_ptr<const SymValue>;

// Symbolic first-order value: constants, program variables, symbolic
// variables, and applications of the fixed operator signature
// (=, !=, <, <=, +, -) or user-declared uninterpreted functions.
struct SymValue {
  enum class Kind { Constant, Var, Sym, Op };

  Kind kind;
  Sort sort;
  Constant constant;           // Kind::Constant
  std::string name;            // Kind::Var (program name) or Kind::Op (op name)
  SymVar sym;                  // Kind::Sym
  std::vector<ValuePtr> args;  // Kind::Op
  std::uint64_t hash = 0;
};

ValuePtr mk_constant(Constant c);
ValuePtr mk_unit();
ValuePtr mk_bool(bool b);
ValuePtr mk_int(std::int64_t v);
ValuePtr mk_var(std::string name, Sort sort);
ValuePtr mk_sym(SymVar v);
ValuePtr mk_op(const std::string& op, std::vector<ValuePtr> args);

bool value_eq(const ValuePtr& a, const ValuePtr& b);
std::string value_str(const ValuePtr& v);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

// Boolean formula tree.  And/Or lists are non-empty, flattened, with
// True/False units dropped at construction.  A formula is closed when it
// contains no Var nodes.
struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or };

  Kind kind;
  ValuePtr atom;                   // Kind::Atom, of sort Bool
  std::vector<FormulaPtr> kids;    // Not (1), And/Or (>= 1)
  std::uint64_t hash = 0;
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_atom(ValuePtr v);
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(std::vector<FormulaPtr> fs);
FormulaPtr mk_or(std::vector<FormulaPtr> fs);
FormulaPtr mk_and2(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or2(FormulaPtr a, FormulaPtr b);

// Convenience atoms over the fixed signature.
FormulaPtr mk_eq(ValuePtr a, ValuePtr b);
FormulaPtr mk_ne(ValuePtr a, ValuePtr b);

bool formula_eq(const FormulaPtr& a, const FormulaPtr& b);
bool is_true(const FormulaPtr& f);
bool is_false(const FormulaPtr& f);
std::string formula_str(const FormulaPtr& f);

// Sort-checked substitution of program variables by symbolic values.
// Throws std::runtime_error on a sort mismatch.
ValuePtr substitute(const ValuePtr& v, const std::map<std::string, ValuePtr>& binding);
FormulaPtr substitute(const FormulaPtr& f, const std::map<std::string, ValuePtr>& binding);

// Substitution of symbolic variables (used when instantiating models).
ValuePtr substitute_syms(const ValuePtr& v, const std::map<int, Constant>& sigma);
FormulaPtr substitute_syms(const FormulaPtr& f, const std::map<int, Constant>& sigma);

void collect_syms(const FormulaPtr& f, std::map<int, SymVar>& out);
void collect_syms(const ValuePtr& v, std::map<int, SymVar>& out);
bool is_closed(const FormulaPtr& f);

// Interpretation of symbolic variables as constants.
struct Interpretation {
  std::map<int, Constant> values;  // SymVar id -> constant

  std::optional<Constant> lookup(int id) const {
    auto it = values.find(id);
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
  std::string str() const;
};

// Ground evaluation oracle.  Requires f closed and sigma total on its
// symbolic variables; throws std::runtime_error otherwise.
Constant eval_value(const ValuePtr& v, const Interpretation& sigma);
bool eval_ground(const FormulaPtr& f, const Interpretation& sigma);

}  // namespace sref
