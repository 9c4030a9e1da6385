#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ik {

using Int = boost::multiprecision::cpp_int;

struct FnSig {
  std::vector<std::string> args;
  std::string result;
};

// Many-sorted signature. Equality is built in; "0"/"1" are ordinary constants.
struct Signature {
  std::string name;
  std::vector<std::string> sorts;
  std::map<std::string, FnSig> functions;
  std::map<std::string, std::vector<std::string>> predicates;
  std::map<std::string, std::string> constants;

  void add_sort(const std::string& s);
  void add_function(const std::string& f, std::vector<std::string> args, std::string result);
  void add_predicate(const std::string& p, std::vector<std::string> args);
  void add_constant(const std::string& c, std::string sort);

  [[nodiscard]] auto has_sort(const std::string& s) const -> bool;
  [[nodiscard]] auto declared(const std::string& sym) const -> bool;
  [[nodiscard]] auto default_sort() const -> std::string;
};

// Named signatures: arith (alias nat), list_nat, list_z, free, list_free.
auto builtin_signature(const std::string& name) -> Signature;

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

struct TermNode {
  enum class Kind { Var, Const, Num, App };
  Kind kind;
  std::string name;
  std::string sort;
  Int value;
  std::vector<Term> args;
};

auto var(std::string name, std::string sort) -> Term;
auto cnst(std::string name, std::string sort) -> Term;
auto num(Int v) -> Term;
auto app(std::string fn, std::string sort, std::vector<Term> args) -> Term;

enum class FKind { Atom, Eq, Not, And, Or, Imp, Iff, Forall, Exists, ForallLt, ExistsLt };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

// name: predicate (Atom) or bound variable (quantifiers).
// terms: atom arguments, the two sides of Eq, or the bound of a bounded quantifier.
struct FormulaNode {
  FKind kind;
  std::string name;
  std::string sort;
  std::vector<Term> terms;
  std::vector<Formula> kids;
};

auto atom(std::string pred, std::vector<Term> args) -> Formula;
auto eq(Term a, Term b) -> Formula;
auto neg(Formula f) -> Formula;
auto conj(Formula a, Formula b) -> Formula;
auto conj(const std::vector<Formula>& fs) -> Formula;
auto disj(Formula a, Formula b) -> Formula;
auto imp(Formula a, Formula b) -> Formula;
auto iff(Formula a, Formula b) -> Formula;
auto forall(std::string v, std::string sort, Formula body) -> Formula;
auto exists(std::string v, std::string sort, Formula body) -> Formula;
auto forall_lt(std::string v, std::string sort, Term bound, Formula body) -> Formula;
auto exists_lt(std::string v, std::string sort, Term bound, Formula body) -> Formula;

[[nodiscard]] auto is_quantifier(FKind k) -> bool;
[[nodiscard]] auto is_bounded(FKind k) -> bool;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t pos);
  std::size_t position;
};

class SortError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Free variables take their sort from the first argument position they occupy,
// or from `free_sorts` when given.
auto parse(const std::string& text, const Signature& sig,
           const std::map<std::string, std::string>& free_sorts = {}) -> Formula;
auto parse_term(const std::string& text, const Signature& sig,
                const std::map<std::string, std::string>& free_sorts = {}) -> Term;

auto render(const Term& t) -> std::string;
auto render(const Formula& f) -> std::string;

auto equal(const Term& a, const Term& b) -> bool;
auto equal(const Formula& a, const Formula& b) -> bool;

auto free_vars(const Term& t) -> std::set<std::string>;
auto free_vars(const Formula& f) -> std::set<std::string>;
// Free variables with their sorts.
auto free_var_sorts(const Formula& f) -> std::map<std::string, std::string>;
auto all_vars(const Formula& f) -> std::set<std::string>;
auto is_closed(const Term& t) -> bool;

using Binding = std::map<std::string, Term>;

// x, x', x'', ... first name not in `avoid`.
auto fresh_name(const std::string& base, const std::set<std::string>& avoid) -> std::string;
// Strips trailing primes.
auto base_name(const std::string& v) -> std::string;

auto substitute(const Term& t, const Binding& b) -> Term;
// Capture-avoiding simultaneous substitution. With check_sorts the replacement
// must have the sort of the variable it replaces.
auto substitute(const Formula& f, const Binding& b, bool check_sorts = true) -> Formula;

// Graph predicate name for a function symbol: graph+, graph*, graph-len.
auto graph_name(const std::string& fn) -> std::string;
// Inverse of graph_name; empty when `pred` is not a graph name.
auto graph_function(const std::string& pred) -> std::string;

auto flatten(const Formula& f) -> Formula;

// One-sorted signature over sort "u" carrying every symbol of `sig` plus
// a unary tag predicate tag_<s> per tagged sort.
auto collapsed_signature(const Signature& sig, const std::map<std::string, Int>& tagging) -> Signature;
auto collapse_sorts(const Formula& f, const std::map<std::string, Int>& tagging) -> Formula;

// Value of a closed term built from numerals, 0, 1, + and *.
auto closed_value(const Term& t) -> Int;

}  // namespace ik
