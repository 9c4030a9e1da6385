#pragma once

#include "interpkit/freegroup.hpp"

namespace ik::pres {

using fg::Word;

struct Presentation {
  int rank = 1;
  std::vector<Word> relators;
};

// Relators are reduced and nonempty, letters in range.
void check_presentation(const Presentation& p);

// A factor is u r' u^-1 with r' a cyclic permutation of a relator or its
// inverse and u a prefix of the current word, so max_conjugator_len caps the
// insertion offset.
struct SearchBudget {
  int max_conjugator_len = 12;
  int max_factors = 8;
  int max_word_len = 12;
};

// Each step is one cancelling-pair move or one insertion/deletion of a relator
// or its inverse as a contiguous block.
using WitnessSequence = std::vector<Word>;

struct Answer {
  Truth truth = Truth::Unknown;
  WitnessSequence witness;  // TRUE only
  std::string certificate;  // FALSE only
};

auto nc_member(const Presentation& p, const Word& w, const SearchBudget& b = {}) -> Answer;
// Decided through nc_member(w1 w2^-1); the witness runs from w1 to w2.
auto eq_words(const Presentation& p, const Word& w1, const Word& w2, const SearchBudget& b = {}) -> Answer;
auto witness(const Presentation& p, const Word& w1, const Word& w2, const SearchBudget& b = {})
    -> std::optional<WitnessSequence>;

auto replays(const Presentation& p, const WitnessSequence& chain) -> bool;

// Exponent-sum vector, and whether it lies in the lattice spanned by the relators' vectors.
auto exponent_sums(const Word& w, int rank) -> std::vector<long long>;
auto abelian_trivial(const Presentation& p, const Word& w) -> bool;

// Todd-Coxeter enumeration of the cosets of the trivial subgroup. Present only
// when the enumeration closes within `max_cosets`.
class CosetTable {
 public:
  static auto enumerate(const Presentation& p, std::size_t max_cosets = 5000) -> std::optional<CosetTable>;
  [[nodiscard]] auto order() const -> std::size_t { return table_.size(); }
  // Coset reached from the identity coset by reading w.
  [[nodiscard]] auto trace(const Word& w) const -> std::size_t;
  [[nodiscard]] auto trivial(const Word& w) const -> bool { return trace(w) == 0; }

 private:
  int rank_ = 1;
  std::vector<std::vector<std::size_t>> table_;  // column 2(a-1) for a, 2(a-1)+1 for a^-1
};

using WordOracle = std::function<bool(const Word&, const Word&)>;

auto exponent_sum_oracle(const Presentation& p) -> WordOracle;
// Throws std::runtime_error when the enumeration does not close.
auto coset_oracle(const Presentation& p, std::size_t max_cosets = 5000) -> WordOracle;

// Code of the quotient over list_z extended by a predicate wp(list, list)
// standing for the oracle. `model` interprets that target signature.
struct QuotientCode {
  InterpretationCode code;
  ModelPtr model;
};

auto quotient_code(const Presentation& p, const WordOracle& oracle) -> QuotientCode;

struct HomReport {
  std::uint64_t products = 0;
  std::uint64_t relators = 0;
  std::uint64_t kernel = 0;
  std::uint64_t violations = 0;
  std::string first_violation;
  [[nodiscard]] auto ok() const -> bool { return violations == 0; }
};

// The natural map from the free group onto the quotient, checked through the
// quotient code's formulas on random products, the relators and kernel words.
auto hom_check(const Presentation& p, const WordOracle& oracle, std::uint64_t samples, const SearchBudget& b = {},
               std::uint64_t seed = 1) -> HomReport;

}  // namespace ik::pres
