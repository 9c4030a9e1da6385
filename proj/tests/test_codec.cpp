#include "interpkit/codec.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

using namespace ik;

namespace {

auto holds(const std::string& kind, const std::map<std::string, Int>& args) -> Truth {
  static auto m = builtin_model("nat");
  Env env;
  for (const auto& [k, v] : args) env.emplace_back(k, Element::scalar(v));
  return eval_formula(*m, emit_formula(kind), env, codec_budget());
}

auto tuple(std::initializer_list<long> xs) -> NatTuple {
  NatTuple t;
  for (long x : xs) t.emplace_back(x);
  return t;
}

auto random_tuple(std::mt19937_64& rng, int maxlen, long maxentry) -> NatTuple {
  NatTuple t(1 + rng() % static_cast<unsigned>(maxlen));
  for (auto& a : t) a = static_cast<long>(rng() % static_cast<unsigned long>(maxentry));
  return t;
}

}  // namespace

TEST_CASE("pairing agrees with the diagonal walk") {
  CHECK(pair(1, 2) == 8);
  for (long x = 0; x < 30; ++x)
    for (long y = 0; y < 30; ++y) CHECK(pair(x, y) == oracle::diagonal_index(x, y));
  for (long n = 0; n < 500; ++n) {
    auto [x, y] = unpair(n);
    auto [ox, oy] = oracle::diagonal_pair(n);
    CHECK(x == ox);
    CHECK(y == oy);
  }
}

TEST_CASE("encode_tuple") {
  CHECK(encode_tuple(tuple({0})) == 0);
  CHECK(encode_tuple(tuple({5})) == 20);
  CHECK(encode_tuple(tuple({1, 2})) == 53);
  CHECK(encode_tuple(tuple({1, 2})) == oracle::tuple_code({1, 2}));
  CHECK(encode_tuple(tuple({3, 0, 2})) == oracle::tuple_code({3, 0, 2}));
  CHECK(decode_tuple(0) == tuple({0}));
  CHECK(decode_tuple(53) == tuple({1, 2}));
  CHECK_THROWS(encode_tuple({}));
}

TEST_CASE("decode and encode are mutually inverse") {
  for (Int n = 0; n < 2000; ++n) CHECK(encode_tuple(decode_tuple(n)) == n);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    auto t = random_tuple(rng, 8, 1'000'000);
    CHECK(decode_tuple(encode_tuple(t)) == t);
  }
}

TEST_CASE("encode_nested") {
  CHECK(encode_nested({tuple({0})}) == 0);
  CHECK(encode_nested({tuple({5}), tuple({1, 2})}) == encode_tuple(tuple({20, 53})));
  CHECK(encode_nested({tuple({5}), tuple({1, 2})}) == 3799144);
  CHECK(decode_nested(3799144) == std::vector<NatTuple>{tuple({5}), tuple({1, 2})});
  CHECK_THROWS(encode_nested({}));
  CHECK_THROWS(encode_nested({tuple({1}), {}}));
}

TEST_CASE("word codes") {
  CHECK(encode_word_code({}) == 0);
  CHECK(decode_word_code(0) == NatTuple{});
  CHECK(decode_word_code(pair(0, 3)) == std::nullopt);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    auto t = random_tuple(rng, 6, 1000);
    CHECK(decode_word_code(encode_word_code(t)) == t);
  }
}

TEST_CASE("fold_int") {
  CHECK(fold_int(0) == 0);
  CHECK(fold_int(3) == 6);
  CHECK(fold_int(-3) == 5);
  for (long z = -50; z <= 50; ++z) CHECK(unfold_int(fold_int(z)) == z);
  for (long v = 0; v <= 100; ++v) CHECK(fold_int(unfold_int(v)) == v);
}

TEST_CASE("folds") {
  CHECK(fold(FoldKind::Sum, tuple({1, 2, 3})) == 6);
  CHECK(fold(FoldKind::Pow, tuple({2, 5})) == 32);
  CHECK(fold(FoldKind::Count, tuple({1, 2, 1}), 1) == 2);
  CHECK(fold(FoldKind::Prod, tuple({2, 3, 7})) == 42);
  CHECK_THROWS(fold(FoldKind::Pow, tuple({2, 0})));
}

TEST_CASE("fold laws") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    auto a = random_tuple(rng, 6, 50);
    auto b = random_tuple(rng, 6, 50);
    NatTuple ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    CHECK(fold(FoldKind::Sum, ab) == fold(FoldKind::Sum, a) + fold(FoldKind::Sum, b));
    CHECK(fold(FoldKind::Prod, ab) == fold(FoldKind::Prod, a) * fold(FoldKind::Prod, b));
    CHECK(fold(FoldKind::Count, ab, 7) == fold(FoldKind::Count, a, 7) + fold(FoldKind::Count, b, 7));
    NatTuple p = ab;
    std::shuffle(p.begin(), p.end(), rng);
    CHECK(fold(FoldKind::Sum, p) == fold(FoldKind::Sum, ab));
    CHECK(fold(FoldKind::Prod, p) == fold(FoldKind::Prod, ab));
  }
  for (long a = 0; a <= 5; ++a)
    for (long k = 1; k <= 10; ++k) CHECK(fold(FoldKind::Pow, tuple({a, k})) == fold(FoldKind::Prod, NatTuple(k, a)));
}

TEST_CASE("beta function") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    auto s = random_tuple(rng, 6, 40);
    auto [c, d] = beta_code(s);
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(beta(c, d, j + 1) == s[j]);
  }
}

TEST_CASE("check_axioms") {
  auto rep = check_axioms(60, 200);
  CHECK(rep.ok());
  for (const auto& r : rep.s) CHECK(r.checked > 0);
  CHECK_THROWS(check_axioms(0, 1));
}

TEST_CASE("axiom instances") {
  auto n = encode_tuple(tuple({4, 5}));
  auto t = decode_tuple(n);
  CHECK(t.size() == 2);
  for (long a = 0; a < 20; ++a) CHECK(holds("T", {{"n", n}, {"a", a}, {"i", 3}}) == Truth::False);
  auto m = encode_tuple(tuple({4, 5, 6}));
  CHECK(holds("T", {{"n", m}, {"a", 4}, {"i", 1}}) == Truth::True);
  CHECK(holds("T", {{"n", m}, {"a", 5}, {"i", 2}}) == Truth::True);
  CHECK(holds("T", {{"n", m}, {"a", 6}, {"i", 3}}) == Truth::True);
}

TEST_CASE("emitted formulas are arithmetic") {
  auto sig = builtin_signature("nat");
  for (const auto& k : emit_kinds()) {
    CAPTURE(k);
    Formula f = emit_formula(k);
    CHECK_NOTHROW(parse(render(f), sig, free_var_sorts(f)));
  }
  CHECK_THROWS(emit_formula("frob"));
}

TEST_CASE("emitted formula examples") {
  CHECK(holds("perm", {{"s", encode_tuple(tuple({2, 3, 1}))}, {"n", 3}}) == Truth::True);
  CHECK(holds("member", {{"a", 2}, {"x", 53}}) == Truth::True);
  CHECK(holds("member", {{"a", 3}, {"x", 53}}) == Truth::False);
  CHECK(holds("L", {{"n", encode_tuple(tuple({4, 5}))}, {"k", 2}}) == Truth::True);
}

TEST_CASE("emitted T, L and member agree with the codec") {
  for (long n = 0; n < 40; ++n) {
    auto t = decode_tuple(n);
    for (long k = 0; k < 6; ++k)
      CHECK(holds("L", {{"n", n}, {"k", k}}) == (Int(t.size()) == k ? Truth::True : Truth::False));
    for (long a = 0; a < 12; ++a) {
      bool in = std::find(t.begin(), t.end(), Int(a)) != t.end();
      CHECK(holds("member", {{"a", a}, {"x", n}}) == (in ? Truth::True : Truth::False));
      for (long i = 0; i < 5; ++i) {
        bool at = i >= 1 && i <= static_cast<long>(t.size()) && t[i - 1] == a;
        CHECK(holds("T", {{"n", n}, {"a", a}, {"i", i}}) == (at ? Truth::True : Truth::False));
      }
    }
  }
}

TEST_CASE("emitted perm recognises bijections of [1,n]") {
  for (long n = 1; n <= 3; ++n) {
    // All tuples of length n over 0..n+1, bijective or not.
    std::vector<long> digits(n, 0);
    for (;;) {
      NatTuple t(digits.begin(), digits.end());
      std::vector<long> sorted = digits;
      std::sort(sorted.begin(), sorted.end());
      std::vector<long> iota(n);
      std::iota(iota.begin(), iota.end(), 1);
      bool bij = sorted == iota;
      CAPTURE(n);
      CHECK(holds("perm", {{"s", encode_tuple(t)}, {"n", n}}) == (bij ? Truth::True : Truth::False));
      std::size_t j = 0;
      while (j < digits.size() && ++digits[j] > n + 1) digits[j++] = 0;
      if (j == digits.size()) break;
    }
  }
  // Right entries, wrong length.
  CHECK(holds("perm", {{"s", encode_tuple(tuple({1, 2}))}, {"n", 3}}) == Truth::False);
}

TEST_CASE("emitted concat agrees with the codec") {
  for (long x = 0; x < 15; ++x)
    for (long y = 0; y < 15; ++y) {
      auto a = decode_tuple(x);
      auto b = decode_tuple(y);
      a.insert(a.end(), b.begin(), b.end());
      Int z = encode_tuple(a);
      CHECK(holds("concat", {{"x", x}, {"y", y}, {"z", z}}) == Truth::True);
      CHECK(holds("concat", {{"x", x}, {"y", y}, {"z", z + 1}}) == Truth::False);
    }
}

TEST_CASE("emitted folds agree with the codec") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    auto t = random_tuple(rng, 4, 6);
    Int s = encode_tuple(t);
    Int sum = fold(FoldKind::Sum, t);
    Int prod = fold(FoldKind::Prod, t);
    Int cnt = fold(FoldKind::Count, t, 2);
    CHECK(holds("sum", {{"s", s}, {"r", sum}}) == Truth::True);
    CHECK(holds("sum", {{"s", s}, {"r", sum + 1}}) == Truth::False);
    CHECK(holds("prod", {{"s", s}, {"r", prod}}) == Truth::True);
    CHECK(holds("prod", {{"s", s}, {"r", prod + 1}}) == Truth::False);
    CHECK(holds("count", {{"s", s}, {"a", 2}, {"r", cnt}}) == Truth::True);
    CHECK(holds("count", {{"s", s}, {"a", 2}, {"r", cnt + 1}}) == Truth::False);
  }
  for (long a = 0; a <= 3; ++a)
    for (long k = 1; k <= 4; ++k) {
      Int p = fold(FoldKind::Pow, tuple({a, k}));
      CHECK(holds("pow", {{"a", a}, {"k", k}, {"r", p}}) == Truth::True);
      CHECK(holds("pow", {{"a", a}, {"k", k}, {"r", p + 1}}) == Truth::False);
    }
}

TEST_CASE("emitted word-code variants") {
  for (long n = 0; n < 60; ++n) {
    auto t = decode_word_code(n);
    CHECK(holds("wvalid", {{"n", n}}) == (t ? Truth::True : Truth::False));
    if (!t) continue;
    for (long k = 0; k < 4; ++k)
      CHECK(holds("wL", {{"n", n}, {"k", k}}) == (Int(t->size()) == k ? Truth::True : Truth::False));
    for (long a = 0; a < 6; ++a)
      for (long i = 1; i < 4; ++i) {
        bool at = i <= static_cast<long>(t->size()) && (*t)[i - 1] == a;
        CHECK(holds("wT", {{"n", n}, {"a", a}, {"i", i}}) == (at ? Truth::True : Truth::False));
      }
  }
}
