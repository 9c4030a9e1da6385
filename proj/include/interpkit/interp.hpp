#pragma once

#include "interpkit/model.hpp"

#include <functional>
#include <optional>

namespace ik {

// Absolute interpretation of a source structure in a target structure.
//
// Variable conventions (j = 1..dim):
//   U         x.j
//   E         x.j, y.j
//   Q[sym]    x1.j .. xn.j, one block per argument (functions: arguments, then result)
//   Q[sort:s] x.j           extra condition for elements of source sort s
//   Q[bound:s] x.j, t.j     formula with one (hole) atom; (hole) is reached exactly
//                           for the x with size(x) < t in the source model
struct InterpretationCode {
  int dim = 1;
  Signature source;
  Signature target;
  Formula U;
  Formula E;
  std::map<std::string, Formula> Q;
  // Target sort of each coordinate, read off U.
  std::vector<std::string> coord_sorts;

  [[nodiscard]] auto sort_formula(const std::string& s) const -> Formula;
};

class CodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

auto coord_var(const std::string& v, int j) -> std::string;

// Fills coord_sorts and checks arities and sorts of every entry.
void finalize(InterpretationCode& code);

// listnat_in_nat, nat_in_listnat, listz_in_nat.
auto builtin_code(const std::string& name) -> InterpretationCode;
auto builtin_code_names() -> std::vector<std::string>;
// dim 1, U true, E equality, Q the atoms themselves.
auto identity_code(const Signature& sig) -> InterpretationCode;

struct Check {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::uint64_t unknown = 0;
  std::string counterexample;
};

struct ValidationReport {
  std::vector<Check> checks;
  [[nodiscard]] auto ok() const -> bool;
};

// Checks over dim-tuples whose coordinates are among the first `bound`
// elements of the coordinate's carrier: E is an equivalence on U, each
// function graph is single-valued modulo E (and total where a value lies in
// range), each constant names exactly one class.
auto validate(const InterpretationCode& code, const Model& target, std::uint64_t bound, const Budget& b = {})
    -> ValidationReport;

// Supplies a bound template for (sort, closed bound value) when the code has none.
using BoundTemplateFn = std::function<std::optional<Formula>(const std::string& sort, const Int& bound)>;

auto translate(const InterpretationCode& code, const Formula& f, const BoundTemplateFn& templates = {}) -> Formula;

// outer: A in B, inner: B in C. Result: A in C of dimension dim(outer)*dim(inner).
auto compose(const InterpretationCode& outer, const InterpretationCode& inner) -> InterpretationCode;

struct Disagreement {
  std::size_t index = 0;
  Truth native = Truth::Unknown;
  Truth translated = Truth::Unknown;
};

struct TransferReport {
  std::size_t total = 0;
  std::size_t agree = 0;
  std::vector<Disagreement> disagreements;
  [[nodiscard]] auto ok() const -> bool { return disagreements.empty(); }
};

auto transfer_check(const InterpretationCode& code, const Model& source, const Model& target,
                    const std::vector<Formula>& sentences, const Budget& source_budget,
                    const Budget& target_budget) -> TransferReport;

// Coordinate map: source element named by a tuple of target elements.
struct CoordinateMap {
  std::function<Element(const std::string& sort, const std::vector<Element>& tuple)> map;
};

auto builtin_coordinate_map(const std::string& code_name) -> CoordinateMap;
// Map of compose(outer, inner) from the maps of its parts.
auto compose_maps(const CoordinateMap& outer, const CoordinateMap& inner, const InterpretationCode& outer_code,
                  int inner_dim) -> CoordinateMap;

// Throws CodeError when the tuple fails U or the sort condition.
auto apply_coordinate(const InterpretationCode& code, const CoordinateMap& map, const Model& target,
                      const std::string& sort, const std::vector<Element>& tuple, const Budget& b = {}) -> Element;

auto write_code(const InterpretationCode& code) -> std::string;
auto read_code(const std::string& text) -> InterpretationCode;

}  // namespace ik
