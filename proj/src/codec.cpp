#include "interpkit/codec.hpp"

#include <random>
#include <stdexcept>

namespace ik {

auto pair(const Int& x, const Int& y) -> Int {
  Int w = x + y;
  return w * (w + 1) / 2 + y;
}

auto unpair(const Int& n) -> std::pair<Int, Int> {
  Int w = (boost::multiprecision::sqrt(Int(8 * n + 1)) - 1) / 2;
  Int y = n - w * (w + 1) / 2;
  return {w - y, y};
}

namespace {

auto iterated(const NatTuple& t) -> Int {
  Int m = t[0];
  for (std::size_t i = 1; i < t.size(); ++i) m = pair(m, t[i]);
  return m;
}

auto unwind(Int m, const Int& k) -> NatTuple {
  auto len = static_cast<std::size_t>(k);
  NatTuple t(len);
  for (std::size_t j = len; j >= 2; --j) {
    auto [p, a] = unpair(m);
    t[j - 1] = a;
    m = p;
  }
  t[0] = m;
  return t;
}

}  // namespace

auto encode_tuple(const NatTuple& t) -> Int {
  if (t.empty()) throw std::invalid_argument("encode_tuple: empty tuple");
  for (const auto& a : t)
    if (a < 0) throw std::invalid_argument("encode_tuple: negative entry");
  return pair(t.size() - 1, iterated(t));
}

auto decode_tuple(const Int& n) -> NatTuple {
  if (n < 0) throw std::invalid_argument("decode_tuple: negative code");
  auto [x, m] = unpair(n);
  return unwind(m, x + 1);
}

auto encode_nested(const std::vector<NatTuple>& tt) -> Int {
  if (tt.empty()) throw std::invalid_argument("encode_nested: empty outer tuple");
  NatTuple codes;
  codes.reserve(tt.size());
  for (const auto& t : tt) codes.push_back(encode_tuple(t));
  return encode_tuple(codes);
}

auto decode_nested(const Int& n) -> std::vector<NatTuple> {
  std::vector<NatTuple> out;
  for (const auto& c : decode_tuple(n)) out.push_back(decode_tuple(c));
  return out;
}

auto encode_word_code(const NatTuple& t) -> Int {
  if (t.empty()) return 0;
  return pair(t.size(), iterated(t));
}

auto decode_word_code(const Int& n) -> std::optional<NatTuple> {
  if (n < 0) return std::nullopt;
  auto [k, m] = unpair(n);
  if (k == 0) {
    if (m != 0) return std::nullopt;
    return NatTuple{};
  }
  return unwind(m, k);
}

auto fold_int(const Int& z) -> Int { return z >= 0 ? Int(2 * z) : Int(-2 * z - 1); }

auto unfold_int(const Int& v) -> Int { return v % 2 == 0 ? Int(v / 2) : Int(-(v + 1) / 2); }

auto fold(FoldKind kind, const NatTuple& t, const Int& extra) -> Int {
  if (t.empty()) throw std::invalid_argument("fold: empty tuple");
  switch (kind) {
    case FoldKind::Sum:
    case FoldKind::Prod: {
      Int r = t[0];
      for (std::size_t i = 1; i < t.size(); ++i) r = kind == FoldKind::Sum ? Int(r + t[i]) : Int(r * t[i]);
      return r;
    }
    case FoldKind::Pow: {
      if (t.size() != 2 || t[1] < 1) throw std::invalid_argument("fold pow: expects (a, k) with k >= 1");
      Int r = t[0];
      for (Int i = 1; i < t[1]; ++i) r *= t[0];
      return r;
    }
    case FoldKind::Count: {
      Int r = t[0] == extra ? 1 : 0;
      for (std::size_t i = 1; i < t.size(); ++i)
        if (t[i] == extra) ++r;
      return r;
    }
  }
  throw std::invalid_argument("fold: unknown kind");
}

auto beta(const Int& c, const Int& d, const Int& j) -> Int { return c % (1 + (j + 1) * d); }

auto beta_code(const NatTuple& seq) -> std::pair<Int, Int> {
  if (seq.empty()) return {0, 1};
  Int l = 1;
  for (Int i = 2; i <= seq.size() + 1; ++i) l = boost::multiprecision::lcm(l, i);
  Int mx = 1;
  for (const auto& v : seq) mx = std::max(mx, v);
  Int d = ((mx + l - 1) / l) * l;
  Int c = 0;
  Int mod = 1;
  for (std::size_t j = 1; j <= seq.size(); ++j) {
    Int mj = 1 + Int(j + 1) * d;
    // Solve c + mod * s = seq[j-1] (mod mj).
    Int inv = 0;
    {
      Int a = mod % mj, b = mj, x0 = 1, x1 = 0;
      while (b != 0) {
        Int q = a / b;
        Int t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
      }
      inv = ((x0 % mj) + mj) % mj;
    }
    Int diff = ((seq[j - 1] - c) % mj + mj) % mj;
    Int s = diff * inv % mj;
    c += mod * s;
    mod *= mj;
  }
  return {c, d};
}

auto AxiomReport::ok() const -> bool {
  for (const auto& r : s)
    if (r.failed) return false;
  return true;
}

namespace {

auto component(const NatTuple& t, const Int& i) -> std::optional<Int> {
  if (i < 1 || i > t.size()) return std::nullopt;
  return t[static_cast<std::size_t>(i) - 1];
}

auto show(const NatTuple& t) -> std::string {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + t[i].str();
  return s + ")";
}

void fail(AxiomResult& r, const std::string& what) {
  if (r.failed++ == 0) r.counterexample = what;
}

}  // namespace

auto check_axioms(const Int& bound, std::uint64_t samples, std::uint64_t seed) -> AxiomReport {
  if (bound < 1) throw std::invalid_argument("check_axioms: bound must be at least 1");
  AxiomReport rep;
  std::vector<NatTuple> dec;
  for (Int n = 0; n < bound; ++n) dec.push_back(decode_tuple(n));

  for (std::size_t n = 0; n < dec.size(); ++n) {
    const auto& t = dec[n];
    ++rep.s[0].checked;
    if (t.empty() || encode_tuple(t) != n) fail(rep.s[0], "n=" + std::to_string(n));
    Int len = t.size();
    for (Int i = len + 1; i <= len + 2; ++i) {
      ++rep.s[1].checked;
      if (component(t, i)) fail(rep.s[1], "n=" + std::to_string(n) + " i=" + i.str());
    }
    for (Int i = 1; i <= len; ++i) {
      ++rep.s[2].checked;
      if (!component(t, i)) fail(rep.s[2], "n=" + std::to_string(n) + " i=" + i.str());
    }
  }
  for (std::size_t n = 0; n < dec.size(); ++n)
    for (std::size_t m = 0; m < dec.size(); ++m) {
      ++rep.s[3].checked;
      if (n != m && dec[n] == dec[m]) fail(rep.s[3], "n=" + std::to_string(n) + " m=" + std::to_string(m));
    }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(1, 4);
  std::uniform_int_distribution<std::uint64_t> entry(0, 999'999);
  for (std::uint64_t s = 0; s < samples; ++s) {
    NatTuple t(len(rng));
    for (auto& a : t) a = entry(rng);
    ++rep.s[4].checked;
    Int n = encode_tuple(t);
    NatTuple back = decode_tuple(n);
    bool good = back.size() == t.size();
    for (std::size_t i = 0; good && i < t.size(); ++i) good = component(back, i + 1) == t[i];
    if (!good) fail(rep.s[4], show(t));
  }
  return rep;
}

}  // namespace ik
