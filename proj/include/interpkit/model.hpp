#pragma once

#include "interpkit/logic.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace ik {

// A natural or integer scalar, or a tuple of elements (lists, words, lists of words).
struct Element {
  Int value = 0;
  std::vector<Element> items;
  bool tuple = false;

  static auto scalar(Int v) -> Element;
  static auto of(std::vector<Element> xs) -> Element;
  static auto ints(const std::vector<Int>& xs) -> Element;

  [[nodiscard]] auto scalars() const -> std::vector<Int>;

  friend auto operator==(const Element& a, const Element& b) -> bool;
  friend auto operator<(const Element& a, const Element& b) -> bool;
};

auto to_string(const Element& e) -> std::string;

enum class Truth { True, False, Unknown };

auto to_string(Truth t) -> std::string;
auto t_not(Truth a) -> Truth;
auto t_and(Truth a, Truth b) -> Truth;
auto t_or(Truth a, Truth b) -> Truth;

using Env = std::vector<std::pair<std::string, Element>>;

auto env_lookup(const Env& env, const std::string& v) -> const Element*;
// Most recent binding whose name has base name `base`.
auto env_lookup_base(const Env& env, const std::string& base) -> const Element*;

// Decisive hints settle a quantifier from the hinted witnesses alone. Only a
// caller that knows the body takes one truth value across all witnesses may
// set the flag.
struct Hint {
  std::vector<Element> candidates;
  bool decisive = false;
};

using HintFn = std::function<std::optional<Hint>(const std::string& base, const Env& env)>;

struct Budget {
  std::uint64_t max_witnesses = 1000;
  // Keyed by bound-variable name (exact, then base name).
  std::map<std::string, std::vector<Element>> hints;
  HintFn hint_fn;
  // Take witnesses from equations and function-graph atoms of the body. A
  // forced witness lets an unbounded quantifier settle either way.
  bool solve = false;
};

class Model {
 public:
  Model(std::string name, Signature sig) : name_(std::move(name)), sig_(std::move(sig)) {}
  virtual ~Model() = default;

  [[nodiscard]] auto name() const -> const std::string& { return name_; }
  [[nodiscard]] auto signature() const -> const Signature& { return sig_; }

  [[nodiscard]] virtual auto constant(const std::string& c) const -> Element;
  [[nodiscard]] virtual auto apply(const std::string& fn, const std::vector<Element>& args) const -> Element = 0;
  [[nodiscard]] virtual auto holds(const std::string& pred, const std::vector<Element>& args) const -> bool;

  // Bounded quantifiers range over {x : size(x) < bound}, which is finite.
  [[nodiscard]] virtual auto size(const std::string& sort, const Element& e) const -> Int = 0;
  // Visits {x : size(x) < bound} in enumeration order until visit returns false.
  virtual void below(const std::string& sort, const Int& bound,
                     const std::function<bool(const Element&)>& visit) const = 0;
  // Visits the first `limit` carrier elements in enumeration order.
  virtual void enumerate(const std::string& sort, std::uint64_t limit,
                         const std::function<bool(const Element&)>& visit) const;

  // For an atom with exactly one unknown argument at `pos`: nullopt when the
  // predicate does not pin that argument, otherwise the unique value (or an
  // empty optional when there is none).
  [[nodiscard]] virtual auto determine(const std::string& pred, const std::vector<Element>& args,
                                       std::size_t pos) const -> std::optional<std::optional<Element>>;

  // Numeric coding of elements, used by the tagged one-sorted view.
  [[nodiscard]] virtual auto code(const std::string& sort, const Element& e) const -> Int;
  [[nodiscard]] virtual auto decode(const std::string& sort, const Int& n) const -> Element;

 protected:
  [[nodiscard]] auto graph_holds(const std::string& fn, const std::vector<Element>& args) const -> bool;

 private:
  std::string name_;
  Signature sig_;
};

using ModelPtr = std::shared_ptr<const Model>;

// nat, list_nat, list_z, free(r), list_free(r); `rank` applies to the free ones.
auto builtin_model(const std::string& name, int rank = 0) -> ModelPtr;

// One-sorted view of `base` over codes, for formulas produced by collapse_sorts.
auto tagged_model(ModelPtr base, std::map<std::string, Int> tagging) -> ModelPtr;

auto eval_term(const Model& m, const Term& t, const Env& env) -> Element;
auto eval_formula(const Model& m, const Formula& f, const Env& env, const Budget& b) -> Truth;
auto eval_formula(const Model& m, const Formula& f, const Budget& b = {}) -> Truth;

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ik
