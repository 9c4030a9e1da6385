#pragma once

#include "interpkit/interp.hpp"

namespace ik::fg {

// Letters are nonzero integers; the sign is the exponent. Words passed to
// multiply/invert are expected reduced; reduce accepts anything.
using Word = std::vector<int>;

class WordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check_letters(const Word& w, int rank);
auto is_reduced(const Word& w) -> bool;
auto is_cyclically_reduced(const Word& w) -> bool;

auto reduce(const Word& w, int rank) -> Word;
// reduce(w1 ⌢ w2), computed by stripping the longest cancelling block at the seam.
auto multiply(const Word& w1, const Word& w2, int rank) -> Word;
auto invert(const Word& w) -> Word;
auto power(const Word& w, int k, int rank) -> Word;

// Consecutive words differ by deleting or inserting one adjacent pair (a, -a).
using Chain = std::vector<Word>;

auto equivalence_witness(const Word& u, const Word& v, int rank) -> std::optional<Chain>;
// True when every step of `chain` is a single free cancellation or insertion.
auto replays(const Chain& chain) -> bool;
// Single cancelling-pair moves from w to reduce(w), ending at the reduced word.
auto cancellation_steps(const Word& w) -> Chain;

// "1,-2,3"; the empty word is "e".
auto format_word(const Word& w) -> std::string;
auto parse_word(const std::string& s) -> Word;

auto to_element(const Word& w) -> Element;
auto from_element(const Element& e) -> Word;

// All reduced words of length n (or at most n), ordered by length and then
// letters in the order 1, -1, 2, -2, ...
auto words_of_length(int rank, int n) -> std::vector<Word>;
auto words_up_to(int rank, int n) -> std::vector<Word>;

// Code of the free group on `rank` generators in list_z: U says "reduced, letters
// in range", E is equality, mul strips the maximal cancelling block.
auto free_code(int rank) -> InterpretationCode;
auto free_coordinate_map() -> CoordinateMap;

// Largest word code (folded letters) of a word of length below `len`.
auto max_word_code(int rank, int len) -> Int;

// A group sentence carried to arithmetic through list_z. `budget` holds the
// witness hints that pin the results of mul and inv.
struct Compiled {
  Formula listz;
  Formula arith;
  Budget budget;
};

// Every word quantifier must be bounded by a numeral (word length).
auto compile_sentence(const Formula& f, int rank) -> Compiled;

// Tuple-length bounds for the list-superstructure formulas.
struct FormulaParams {
  Int word_bound = 3;
  Int list_bound = 3;
};

// gen, red, free, freegen, rank_wd, memb, howson, howson_plus over list_free.
// Free variables: xs (list) for gen/free/freegen, ys (list) for red, z (word)
// and ys for memb. rank_wd, howson and howson_plus are sentences.
auto group_formula(const std::string& name, const FormulaParams& params = {}) -> Formula;
auto group_formula_names() -> std::vector<std::string>;
// Decisive witnesses for the list variables that only matter when built from
// the letters of a given generator list.
auto group_budget(const std::string& name, const FormulaParams& params = {}) -> Budget;
// 2(m1-1)(m2-1)+1.
auto howson_plus_bound(const Int& m1, const Int& m2) -> Int;

// Folded graph of a finitely generated subgroup, base vertex 0.
class StallingsGraph {
 public:
  StallingsGraph(const std::vector<Word>& gens, int rank);

  [[nodiscard]] auto accepts(const Word& w) const -> bool;
  [[nodiscard]] auto vertices() const -> std::size_t { return out_.size(); }
  [[nodiscard]] auto edges() const -> std::size_t;
  [[nodiscard]] auto rank() const -> std::size_t;
  // Free basis read off a spanning tree.
  [[nodiscard]] auto basis() const -> std::vector<Word>;
  [[nodiscard]] auto folded() const -> bool;

  // Component of the product graph at the pair of base vertices.
  static auto product(const StallingsGraph& a, const StallingsGraph& b) -> StallingsGraph;

 private:
  StallingsGraph() = default;
  int rank_ = 1;
  // out_[v][a-1] / in_[v][a-1]: endpoint of the a-labelled edge, or -1.
  std::vector<std::vector<int>> out_, in_;
};

auto membership(const std::vector<Word>& gens, const Word& w, int rank) -> bool;
auto intersect(const std::vector<Word>& g1, const std::vector<Word>& g2, int rank) -> std::vector<Word>;

// Primitive root of w up to conjugation: w = c^-1 p^k c with p cyclically
// reduced and not a proper power; returns c^-1 p c.
auto root(const Word& w, int rank) -> Word;
// k with u = base^k, if any.
auto power_of(const Word& u, const Word& base, int rank) -> std::optional<int>;
auto centralizer_sample(const Word& w, int maxlen, int rank) -> std::vector<Word>;

}  // namespace ik::fg
