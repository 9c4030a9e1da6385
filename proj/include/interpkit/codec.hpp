#pragma once

#include "interpkit/model.hpp"

#include <optional>
#include <utility>

namespace ik {

using NatTuple = std::vector<Int>;

auto pair(const Int& x, const Int& y) -> Int;
auto unpair(const Int& n) -> std::pair<Int, Int>;

// n = pair(k-1, m); m = a1 for k = 1, else pair(...pair(a1,a2)...,ak).
auto encode_tuple(const NatTuple& t) -> Int;
auto decode_tuple(const Int& n) -> NatTuple;

auto encode_nested(const std::vector<NatTuple>& tt) -> Int;
auto decode_nested(const Int& n) -> std::vector<NatTuple>;

// Word codes: pair(k, m) with m the iterated pairing of the k entries, and
// m = 0 when k = 0. Injective; codes pair(0, m>0) are unused.
auto encode_word_code(const NatTuple& t) -> Int;
auto decode_word_code(const Int& n) -> std::optional<NatTuple>;

// Integers as naturals: z >= 0 -> 2z, z < 0 -> 2|z|-1.
auto fold_int(const Int& z) -> Int;
auto unfold_int(const Int& v) -> Int;

enum class FoldKind { Sum, Prod, Pow, Count };

// sum/prod/count over t; pow takes t = (a, k) with k >= 1; count takes the target in `extra`.
auto fold(FoldKind kind, const NatTuple& t, const Int& extra = 0) -> Int;

// Gödel beta: c mod (1 + (j+1) d).
auto beta(const Int& c, const Int& d, const Int& j) -> Int;
// d: least multiple of lcm(1..len+1) that is >= max(seq); c: least residue by CRT.
auto beta_code(const NatTuple& seq) -> std::pair<Int, Int>;

// Emitted arithmetic formulas; free variables by kind:
//   T (n a i)   L (n k)   concat (x y z)   member (a x)   perm (s n)
//   sum/prod (s r)   count (s a r)   pow (a k r)
// Variants for the word-code convention: wT, wL, wconcat, wvalid (n).
auto emit_formula(const std::string& kind) -> Formula;
auto emit_kinds() -> std::vector<std::string>;

// Witness hints for the quantifiers inside emitted formulas.
auto codec_hints() -> HintFn;
auto codec_budget() -> Budget;

struct AxiomResult {
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::string counterexample;
};

struct AxiomReport {
  AxiomResult s[5];
  [[nodiscard]] auto ok() const -> bool;
};

auto check_axioms(const Int& bound, std::uint64_t samples, std::uint64_t seed = 1) -> AxiomReport;

}  // namespace ik
