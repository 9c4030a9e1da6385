// Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include "interpkit/codec.hpp"
#include "interpkit/freegroup.hpp"
#include "interpkit/interp.hpp"
#include "interpkit/presentations.hpp"
#include "oracles.hpp"
#include "sentences.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

using namespace ik;
using fg::Word;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

auto seconds_since(Clock::time_point t0) -> double {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int n, const std::string& name, const std::function<Outcome()>& body, double limit = 0) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double dt = seconds_since(t0);
  if (limit > 0 && dt >= limit) {
    o.pass = false;
    o.detail += "; over the " + std::to_string(static_cast<int>(limit)) + " s limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str(), dt);
  std::fflush(stdout);
}

auto holds(const Formula& f, const std::vector<std::pair<std::string, Int>>& args) -> Truth {
  static const ModelPtr nat = builtin_model("nat");
  static const Budget b = codec_budget();
  Env env;
  for (const auto& [k, v] : args) env.emplace_back(k, Element::scalar(v));
  return eval_formula(*nat, f, env, b);
}

auto as_truth(bool b) -> Truth { return b ? Truth::True : Truth::False; }

auto word_code(const Word& w) -> Int {
  NatTuple t;
  for (int a : w) t.emplace_back(fold_int(a));
  return encode_word_code(t);
}

// Shortest p with w = p^k, for cyclically reduced w.
auto primitive_period(const Word& w) -> Word {
  for (std::size_t p = 1; p <= w.size(); ++p) {
    if (w.size() % p) continue;
    bool periodic = true;
    for (std::size_t i = p; periodic && i < w.size(); ++i) periodic = w[i] == w[i - p];
    if (periodic) return Word(w.begin(), w.begin() + static_cast<long>(p));
  }
  return w;
}

auto criterion1() -> Outcome {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> len(1, 8);
  std::uniform_int_distribution<long> entry(0, 999'999);
  long bad = 0;
  for (int i = 0; i < 100'000; ++i) {
    NatTuple t(static_cast<std::size_t>(len(rng)));
    for (auto& a : t) a = entry(rng);
    if (decode_tuple(encode_tuple(t)) != t) ++bad;
  }
  for (Int n = 0; n < 10'000; ++n)
    if (encode_tuple(decode_tuple(n)) != n) ++bad;
  return {bad == 0, "100000 random tuples, n < 10000, " + std::to_string(bad) + " mismatches"};
}

auto criterion2() -> Outcome {
  auto rep = check_axioms(200, 1000);
  std::ostringstream s;
  for (int i = 0; i < 5; ++i) s << (i ? ", " : "") << "S" << i + 1 << " " << rep.s[i].failed << "/" << rep.s[i].checked;
  return {rep.ok(), s.str()};
}

auto criterion3() -> Outcome {
  auto T = emit_formula("T"), L = emit_formula("L"), member = emit_formula("member"), perm = emit_formula("perm");
  long checked = 0, bad = 0;
  auto check = [&](Truth got, bool want) {
    ++checked;
    if (got != as_truth(want)) ++bad;
  };
  for (long n = 0; n < 200; ++n) {
    auto t = decode_tuple(n);
    for (long k = 0; k < 200; ++k) check(holds(L, {{"n", n}, {"k", k}}), Int(t.size()) == k);
    for (long a = 0; a < 200; ++a) {
      check(holds(member, {{"a", a}, {"x", n}}), std::find(t.begin(), t.end(), Int(a)) != t.end());
      for (long i = 0; i <= 10; ++i)
        check(holds(T, {{"n", n}, {"a", a}, {"i", i}}), i >= 1 && i <= static_cast<long>(t.size()) && t[i - 1] == a);
    }
  }
  // Every tuple of length n over [1, n] for n <= 5, against n and n + 1.
  long perms = 0;
  for (long n = 1; n <= 5; ++n) {
    std::vector<long> digits(static_cast<std::size_t>(n), 1);
    for (;;) {
      std::vector<long> sorted = digits;
      std::sort(sorted.begin(), sorted.end());
      std::vector<long> iota(static_cast<std::size_t>(n));
      std::iota(iota.begin(), iota.end(), 1);
      bool bij = sorted == iota;
      perms += bij;
      Int s = encode_tuple(NatTuple(digits.begin(), digits.end()));
      check(holds(perm, {{"s", s}, {"n", n}}), bij);
      check(holds(perm, {{"s", s}, {"n", n + 1}}), false);
      std::size_t j = 0;
      while (j < digits.size() && ++digits[j] > n) digits[j++] = 1;
      if (j == digits.size()) break;
    }
  }
  return {bad == 0 && perms == 1 + 2 + 6 + 24 + 120,
          std::to_string(checked) + " evaluations, " + std::to_string(perms) + " permutations, " +
              std::to_string(bad) + " disagreements"};
}

auto criterion4() -> Outcome {
  auto code = builtin_code("listnat_in_nat");
  gen::Sentences g(true, 104);
  std::vector<Formula> fs;
  for (int i = 0; i < 200; ++i) fs.push_back(parse(g.next(), code.source));
  auto rep = transfer_check(code, *builtin_model("list_nat"), *builtin_model("nat"), fs, {}, codec_budget());
  return {rep.ok() && rep.agree == 200, std::to_string(rep.agree) + "/" + std::to_string(rep.total) + " agree"};
}

auto criterion5() -> Outcome {
  auto code = compose(fg::free_code(2), builtin_code("listz_in_nat"));
  auto nat = builtin_model("nat");
  auto b = codec_budget();
  const Int list_tag = 3;
  auto env3 = [&](const Word& x, const Word& y, const Word& z) {
    return Env{{"x1.1", Element::scalar(word_code(x))}, {"x1.2", Element::scalar(list_tag)},
               {"x2.1", Element::scalar(word_code(y))}, {"x2.2", Element::scalar(list_tag)},
               {"x3.1", Element::scalar(word_code(z))}, {"x3.2", Element::scalar(list_tag)}};
  };
  auto ws = fg::words_up_to(2, 4);
  long pairs = 0, bad = 0;
  for (const auto& u : ws)
    for (const auto& v : ws) {
      ++pairs;
      Word cat = u;
      cat.insert(cat.end(), v.begin(), v.end());
      Word r = oracle::naive_reduce(cat);
      Word wrong = oracle::naive_reduce([&] {
        Word w = r;
        w.push_back(1);
        return w;
      }());
      bool ok = fg::multiply(u, v, 2) == r;
      ok = ok && eval_formula(*nat, code.Q.at("mul"), env3(u, v, r), b) == Truth::True;
      ok = ok && eval_formula(*nat, code.Q.at("mul"), env3(u, v, wrong), b) == Truth::False;
      Env e{{"x.1", Element::scalar(word_code(u))}, {"x.2", Element::scalar(list_tag)},
            {"y.1", Element::scalar(word_code(v))}, {"y.2", Element::scalar(list_tag)}};
      bool same = fg::equivalence_witness(u, v, 2).has_value();
      ok = ok && eval_formula(*nat, code.E, e, b) == as_truth(same);
      if (!ok) ++bad;
    }
  return {bad == 0, std::to_string(pairs) + " pairs, " + std::to_string(bad) + " disagreements"};
}

auto criterion6() -> Outcome {
  auto candidates = fg::words_up_to(2, 6);
  long ws = 0, commuting = 0, bad = 0;
  for (const auto& w : fg::words_up_to(2, 3)) {
    if (w.empty() || !fg::is_cyclically_reduced(w)) continue;
    ++ws;
    Word p = primitive_period(w);
    for (const auto& u : candidates) {
      if (fg::multiply(u, w, 2) != fg::multiply(w, u, 2)) continue;
      ++commuting;
      bool power = false;
      for (int k = -6; k <= 6 && !power; ++k) power = fg::power(p, k, 2) == u;
      if (!power) ++bad;
    }
  }
  return {bad == 0, std::to_string(ws) + " words, " + std::to_string(commuting) + " commuting pairs, " +
                        std::to_string(bad) + " exceptions"};
}

auto criterion7() -> Outcome {
  std::mt19937_64 rng(107);
  long bad = 0;
  std::size_t worst = 0;
  auto gens = [&] {
    std::vector<Word> g(1 + rng() % 3);
    for (auto& w : g) {
      do w = oracle::random_word(rng, 2, 4);
      while (w.empty());
    }
    return g;
  };
  for (int i = 0; i < 100; ++i) {
    auto g1 = gens();
    auto g2 = gens();
    auto in = fg::intersect(g1, g2, 2);
    long m1 = static_cast<long>(g1.size()), m2 = static_cast<long>(g2.size());
    long r = static_cast<long>(in.size());
    worst = std::max(worst, in.size());
    bool ok = r - 1 <= (m1 - 1) * (m2 - 1) && Int(r) <= fg::howson_plus_bound(m1, m2);
    for (const auto& w : in) ok = ok && fg::membership(g1, w, 2) && fg::membership(g2, w, 2);
    if (!ok) ++bad;
  }
  return {bad == 0, "100 pairs, largest intersection rank " + std::to_string(worst) + ", " + std::to_string(bad) +
                        " violations"};
}

auto criterion8() -> Outcome {
  pres::Presentation p{2, {{1, 2, -1, -2}}};
  auto ws = fg::words_up_to(2, 5);
  long pairs = 0, bad = 0, unknown = 0, trues = 0;
  for (const auto& u : ws)
    for (const auto& v : ws) {
      ++pairs;
      auto ans = pres::eq_words(p, u, v);
      bool want = pres::exponent_sums(u, 2) == pres::exponent_sums(v, 2);
      if (ans.truth == Truth::Unknown) {
        ++unknown;
        continue;
      }
      bool ok = ans.truth == as_truth(want);
      if (ans.truth == Truth::True) {
        ++trues;
        ok = ok && !ans.witness.empty() && ans.witness.front() == u && ans.witness.back() == v &&
             pres::replays(p, ans.witness);
      }
      if (!ok) ++bad;
    }
  auto hom = pres::hom_check(p, pres::exponent_sum_oracle(p), 1000);
  return {bad == 0 && unknown == 0 && hom.ok() && hom.products == 1000,
          std::to_string(pairs) + " pairs, " + std::to_string(trues) + " witnessed, " + std::to_string(unknown) +
              " unknown, " + std::to_string(bad) + " disagreements; hom_check " + std::to_string(hom.products) +
              " samples, " + std::to_string(hom.violations) + " violations"};
}

auto criterion9() -> Outcome {
  std::mt19937_64 rng(109);
  auto tuple = [&] {
    NatTuple t(1 + rng() % 6);
    for (auto& a : t) a = static_cast<long>(rng() % 50);
    return t;
  };
  long bad = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = tuple();
    auto b = tuple();
    NatTuple ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    NatTuple shuffled = ab;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    Int naive_sum = 0, naive_prod = 1;
    for (const auto& x : ab) naive_sum += x, naive_prod *= x;
    bool ok = fold(FoldKind::Sum, ab) == fold(FoldKind::Sum, a) + fold(FoldKind::Sum, b) &&
              fold(FoldKind::Prod, ab) == fold(FoldKind::Prod, a) * fold(FoldKind::Prod, b) &&
              fold(FoldKind::Sum, shuffled) == fold(FoldKind::Sum, ab) &&
              fold(FoldKind::Prod, shuffled) == fold(FoldKind::Prod, ab) && fold(FoldKind::Sum, ab) == naive_sum &&
              fold(FoldKind::Prod, ab) == naive_prod;
    if (!ok) ++bad;
  }
  for (long a = 0; a <= 5; ++a)
    for (long k = 1; k <= 10; ++k) {
      Int repeated = 1;
      for (long j = 0; j < k; ++j) repeated *= a;
      if (fold(FoldKind::Pow, NatTuple{a, k}) != repeated || fold(FoldKind::Prod, NatTuple(k, a)) != repeated) ++bad;
    }
  return {bad == 0, "1000 instances, pow for a <= 5, k <= 10, " + std::to_string(bad) + " failures"};
}

}  // namespace

int main() {
  report(1, "codec bijectivity", criterion1, 10);
  report(2, "enumeration axioms", criterion2, 60);
  report(3, "emitted formulas agree with the codec", criterion3);
  report(4, "transfer of list sentences to arithmetic", criterion4, 300);
  report(5, "free group calculus against compiled formulas", criterion5);
  report(6, "centralizers are cyclic", criterion6);
  report(7, "intersection rank bounds", criterion7);
  report(8, "word problem in the free abelian group of rank 2", criterion8);
  report(9, "fold laws", criterion9);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures ? 1 : 0;
}
