#include "interpkit/presentations.hpp"

#include "interpkit/codec.hpp"

#include <mutex>
#include <numeric>
#include <random>
#include <sstream>

namespace ik::pres {

using fg::reduce;
using fg::invert;
using fg::multiply;
using fg::format_word;

void check_presentation(const Presentation& p) {
  if (p.rank < 1) throw fg::WordError("rank must be at least 1");
  for (const auto& r : p.relators) {
    fg::check_letters(r, p.rank);
    if (r.empty() || !fg::is_reduced(r)) throw fg::WordError("relator " + format_word(r) + " is not reduced and nonempty");
  }
}

// ---------------------------------------------------------------- search ball

namespace {

struct Rotation {
  Word word;       // y x where s = x y and s is a relator or its inverse
  Word block;      // s
  std::size_t k;   // |x|
};

struct Parent {
  Word prev;
  std::size_t pos;
  std::size_t rotation;
};

struct Ball {
  std::vector<Rotation> rotations;
  std::map<Word, Parent> parent;  // e maps to itself with rotation npos
  std::vector<Word> order;
};

auto rotations_of(const Presentation& p) -> std::vector<Rotation> {
  std::vector<Rotation> out;
  std::set<Word> seen;
  for (const auto& r : p.relators)
    for (const Word& s : {r, invert(r)})
      for (std::size_t k = 0; k < s.size(); ++k) {
        Word w(s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
        w.insert(w.end(), s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k));
        if (seen.insert(w).second) out.push_back({w, s, k});
      }
  return out;
}

auto build_ball(const Presentation& p, const SearchBudget& b) -> Ball {
  Ball ball;
  ball.rotations = rotations_of(p);
  ball.parent[{}] = {{}, 0, std::string::npos};
  ball.order.push_back({});
  std::vector<Word> frontier{{}};
  for (int depth = 0; depth < b.max_factors && !frontier.empty(); ++depth) {
    std::vector<Word> next;
    for (const auto& u : frontier) {
      std::size_t last = std::min(u.size(), static_cast<std::size_t>(std::max(0, b.max_conjugator_len)));
      for (std::size_t i = 0; i <= last; ++i)
        for (std::size_t ri = 0; ri < ball.rotations.size(); ++ri) {
          Word raw(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(i));
          const Word& r = ball.rotations[ri].word;
          raw.insert(raw.end(), r.begin(), r.end());
          raw.insert(raw.end(), u.begin() + static_cast<std::ptrdiff_t>(i), u.end());
          Word v = reduce(raw, p.rank);
          if (static_cast<int>(v.size()) > b.max_word_len) continue;
          if (ball.parent.emplace(v, Parent{u, i, ri}).second) {
            ball.order.push_back(v);
            next.push_back(std::move(v));
          }
        }
    }
    frontier = std::move(next);
  }
  return ball;
}

auto ball_for(const Presentation& p, const SearchBudget& b) -> const Ball& {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Ball>> cache;
  std::ostringstream key;
  key << p.rank << '|' << b.max_conjugator_len << '|' << b.max_factors << '|' << b.max_word_len;
  for (const auto& r : p.relators) key << '|' << format_word(r);
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[key.str()];
  if (!slot) slot = std::make_unique<Ball>(build_ball(p, b));
  return *slot;
}

void append(WitnessSequence& chain, const Word& w) {
  if (chain.empty() || chain.back() != w) chain.push_back(w);
}

// Raw moves for u -> reduce(u[..i] y x u[i..]) where y x is a rotation of s = x y.
void expand_move(const Word& u, std::size_t i, const Rotation& rot, WitnessSequence& chain) {
  Word w = u;
  append(chain, w);
  auto at = [](std::size_t n) { return static_cast<std::ptrdiff_t>(n); };
  const Word& s = rot.block;
  Word y(s.begin() + at(rot.k), s.end());
  std::size_t m = rot.k == 0 ? 0 : y.size();
  for (std::size_t j = 0; j < m; ++j) {
    w.insert(w.begin() + at(i + j), {y[j], -y[j]});
    append(chain, w);
  }
  w.insert(w.begin() + at(i + m), s.begin(), s.end());
  append(chain, w);
  std::size_t p = i + m + s.size();
  for (std::size_t j = 1; j <= m; ++j) {
    w.erase(w.begin() + at(p - j), w.begin() + at(p - j + 2));
    append(chain, w);
  }
  for (const auto& step : fg::cancellation_steps(w)) append(chain, step);
}

// Raw chain from e to h, or nothing when h is outside the ball.
auto chain_from_identity(const Ball& ball, const Word& h) -> std::optional<WitnessSequence> {
  if (!ball.parent.count(h)) return std::nullopt;
  std::vector<Word> path{h};
  while (!path.back().empty()) path.push_back(ball.parent.at(path.back()).prev);
  std::reverse(path.begin(), path.end());
  WitnessSequence chain{{}};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const Parent& par = ball.parent.at(path[k]);
    expand_move(path[k - 1], par.pos, ball.rotations[par.rotation], chain);
  }
  return chain;
}

auto with_suffix(const WitnessSequence& chain, const Word& s) -> WitnessSequence {
  WitnessSequence out;
  for (const auto& w : chain) {
    Word v = w;
    v.insert(v.end(), s.begin(), s.end());
    out.push_back(std::move(v));
  }
  return out;
}

auto refute(const Presentation& p, const Word& h) -> std::string {
  if (!abelian_trivial(p, h)) {
    auto v = exponent_sums(h, p.rank);
    std::string s = "exponent sums (";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ") outside the relator lattice";
  }
  if (auto t = CosetTable::enumerate(p)) {
    std::size_t c = t->trace(h);
    if (c != 0)
      return "coset table of order " + std::to_string(t->order()) + " sends coset 0 to " + std::to_string(c);
  }
  return {};
}

}  // namespace

auto nc_member(const Presentation& p, const Word& w, const SearchBudget& b) -> Answer {
  check_presentation(p);
  Word h = reduce(w, p.rank);
  Answer a;
  if (auto chain = chain_from_identity(ball_for(p, b), h)) {
    auto back = fg::cancellation_steps(w);
    for (auto it = back.rbegin(); it != back.rend(); ++it) append(*chain, *it);
    a.truth = Truth::True;
    a.witness = std::move(*chain);
    return a;
  }
  a.certificate = refute(p, h);
  if (!a.certificate.empty()) a.truth = Truth::False;
  return a;
}

auto eq_words(const Presentation& p, const Word& w1, const Word& w2, const SearchBudget& b) -> Answer {
  check_presentation(p);
  Word r1 = reduce(w1, p.rank), r2 = reduce(w2, p.rank);
  Word h = multiply(r1, invert(r2), p.rank);
  Answer a;
  if (auto chain = chain_from_identity(ball_for(p, b), h)) {
    // e -> h carried along the suffix r2 runs from r2 to h r2, which reduces to r1.
    WitnessSequence up = with_suffix(*chain, r2);
    for (const auto& step : fg::cancellation_steps(up.back())) append(up, step);
    WitnessSequence out = fg::cancellation_steps(w1);
    for (auto it = up.rbegin(); it != up.rend(); ++it) append(out, *it);
    auto tail = fg::cancellation_steps(w2);
    for (auto it = tail.rbegin(); it != tail.rend(); ++it) append(out, *it);
    a.truth = Truth::True;
    a.witness = std::move(out);
    return a;
  }
  a.certificate = refute(p, h);
  if (!a.certificate.empty()) a.truth = Truth::False;
  return a;
}

auto witness(const Presentation& p, const Word& w1, const Word& w2, const SearchBudget& b)
    -> std::optional<WitnessSequence> {
  Answer a = eq_words(p, w1, w2, b);
  if (a.truth != Truth::True) return std::nullopt;
  return a.witness;
}

namespace {

// `longer` is `shorter` with `block` inserted somewhere.
auto block_inserted(const Word& longer, const Word& shorter, const Word& block) -> bool {
  if (longer.size() != shorter.size() + block.size()) return false;
  std::size_t i = 0;
  while (i < shorter.size() && longer[i] == shorter[i]) ++i;
  for (std::size_t start = 0; start <= i; ++start) {
    if (!std::equal(block.begin(), block.end(), longer.begin() + static_cast<std::ptrdiff_t>(start))) continue;
    if (std::equal(longer.begin() + static_cast<std::ptrdiff_t>(start + block.size()), longer.end(),
                   shorter.begin() + static_cast<std::ptrdiff_t>(start)))
      return true;
  }
  return false;
}

auto legal_move(const Presentation& p, const Word& a, const Word& b) -> bool {
  if (fg::replays({a, b})) return true;
  for (const auto& r : p.relators)
    for (const Word& s : {r, invert(r)})
      if (block_inserted(a, b, s) || block_inserted(b, a, s)) return true;
  return false;
}

}  // namespace

auto replays(const Presentation& p, const WitnessSequence& chain) -> bool {
  for (const auto& w : chain) fg::check_letters(w, p.rank);
  for (std::size_t i = 0; i + 1 < chain.size(); ++i)
    if (!legal_move(p, chain[i], chain[i + 1])) return false;
  return !chain.empty();
}

// ---------------------------------------------------------------- abelianization

auto exponent_sums(const Word& w, int rank) -> std::vector<long long> {
  std::vector<long long> v(static_cast<std::size_t>(rank), 0);
  for (int a : w) v[static_cast<std::size_t>(std::abs(a) - 1)] += a > 0 ? 1 : -1;
  return v;
}

auto abelian_trivial(const Presentation& p, const Word& w) -> bool {
  // Row echelon form of the relator vectors over the integers.
  std::vector<std::vector<long long>> rows;
  for (const auto& r : p.relators) rows.push_back(exponent_sums(r, p.rank));
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, column)
  std::size_t top = 0;
  for (std::size_t col = 0; col < static_cast<std::size_t>(p.rank) && top < rows.size(); ++col) {
    for (;;) {
      std::size_t best = rows.size();
      for (std::size_t r = top; r < rows.size(); ++r)
        if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
          best = r;
      if (best == rows.size()) break;
      std::swap(rows[top], rows[best]);
      bool done = true;
      for (std::size_t r = top + 1; r < rows.size(); ++r) {
        long long q = rows[r][col] / rows[top][col];
        for (std::size_t c = col; c < rows[r].size(); ++c) rows[r][c] -= q * rows[top][c];
        if (rows[r][col] != 0) done = false;
      }
      if (done) {
        pivots.emplace_back(top++, col);
        break;
      }
    }
  }
  auto v = exponent_sums(reduce(w, p.rank), p.rank);
  for (auto [r, col] : pivots) {
    if (v[col] % rows[r][col] != 0) return false;
    long long q = v[col] / rows[r][col];
    for (std::size_t c = col; c < v.size(); ++c) v[c] -= q * rows[r][c];
  }
  return std::all_of(v.begin(), v.end(), [](long long x) { return x == 0; });
}

// ---------------------------------------------------------------- coset enumeration

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

auto column(int a) -> std::size_t { return a > 0 ? 2 * static_cast<std::size_t>(a - 1) : 2 * static_cast<std::size_t>(-a - 1) + 1; }
auto inverse_column(std::size_t c) -> std::size_t { return c ^ 1U; }

class Enumerator {
 public:
  Enumerator(const Presentation& p, std::size_t limit)
      : p_(p), cols_(2 * static_cast<std::size_t>(p.rank)), limit_(limit) {
    add_row();
  }

  auto run() -> bool {
    for (std::size_t c = 0; c < table_.size(); ++c) {
      for (const auto& r : p_.relators) {
        if (!live(c)) break;
        if (!scan_and_fill(c, r)) return false;
      }
      if (!live(c)) continue;
      for (std::size_t x = 0; x < cols_; ++x)
        if (table_[c][x] == kNone && !define(c, x)) return false;
    }
    return true;
  }

  // Live rows renumbered from 0, with coset 0 first.
  auto compact() -> std::vector<std::vector<std::size_t>> {
    std::vector<std::size_t> index(table_.size(), kNone);
    std::size_t n = 0;
    for (std::size_t c = 0; c < table_.size(); ++c)
      if (live(c)) index[c] = n++;
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c = 0; c < table_.size(); ++c) {
      if (!live(c)) continue;
      std::vector<std::size_t> row(cols_);
      for (std::size_t x = 0; x < cols_; ++x) row[x] = index[rep(table_[c][x])];
      out.push_back(std::move(row));
    }
    return out;
  }

 private:
  auto live(std::size_t c) const -> bool { return parent_[c] == c; }

  auto rep(std::size_t c) -> std::size_t {
    std::size_t r = c;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[c] != r) {
      std::size_t next = parent_[c];
      parent_[c] = r;
      c = next;
    }
    return r;
  }

  void add_row() {
    parent_.push_back(table_.size());
    table_.emplace_back(cols_, kNone);
  }

  auto define(std::size_t c, std::size_t x) -> bool {
    if (table_.size() >= limit_) return false;
    std::size_t d = table_.size();
    add_row();
    table_[c][x] = d;
    table_[d][inverse_column(x)] = c;
    return true;
  }

  auto scan_and_fill(std::size_t c, const Word& r) -> bool {
    std::size_t f = c, b = c;
    std::size_t i = 0, j = r.size();
    for (;;) {
      while (i < j && table_[f][column(r[i])] != kNone) f = table_[f][column(r[i++])];
      if (i == j) {
        if (f != b) coincidence(f, b);
        return true;
      }
      while (j > i && table_[b][inverse_column(column(r[j - 1]))] != kNone)
        b = table_[b][inverse_column(column(r[--j]))];
      if (j == i) {
        coincidence(f, b);
        return true;
      }
      if (j == i + 1) {
        table_[f][column(r[i])] = b;
        table_[b][inverse_column(column(r[i]))] = f;
        return true;
      }
      if (!define(f, column(r[i]))) return false;
    }
  }

  void merge(std::size_t k, std::size_t l, std::vector<std::size_t>& queue) {
    k = rep(k), l = rep(l);
    if (k == l) return;
    if (l < k) std::swap(k, l);
    parent_[l] = k;
    queue.push_back(l);
  }

  void coincidence(std::size_t a, std::size_t b) {
    std::vector<std::size_t> queue;
    merge(a, b, queue);
    for (std::size_t q = 0; q < queue.size(); ++q) {
      std::size_t e = queue[q];
      for (std::size_t x = 0; x < cols_; ++x) {
        std::size_t f = table_[e][x];
        if (f == kNone) continue;
        table_[f][inverse_column(x)] = kNone;
        std::size_t e1 = rep(e), f1 = rep(f);
        if (table_[e1][x] != kNone) {
          merge(f1, table_[e1][x], queue);
        } else if (table_[f1][inverse_column(x)] != kNone) {
          merge(e1, table_[f1][inverse_column(x)], queue);
        } else {
          table_[e1][x] = f1;
          table_[f1][inverse_column(x)] = e1;
        }
      }
    }
  }

  const Presentation& p_;
  std::size_t cols_;
  std::size_t limit_;
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> table_;
};

}  // namespace

auto CosetTable::enumerate(const Presentation& p, std::size_t max_cosets) -> std::optional<CosetTable> {
  check_presentation(p);
  Enumerator en(p, max_cosets);
  if (!en.run()) return std::nullopt;
  CosetTable t;
  t.rank_ = p.rank;
  t.table_ = en.compact();
  return t;
}

auto CosetTable::trace(const Word& w) const -> std::size_t {
  fg::check_letters(w, rank_);
  std::size_t c = 0;
  for (int a : w) c = table_[c][column(a)];
  return c;
}

auto exponent_sum_oracle(const Presentation& p) -> WordOracle {
  return [p](const Word& a, const Word& b) { return abelian_trivial(p, multiply(reduce(a, p.rank), invert(reduce(b, p.rank)), p.rank)); };
}

auto coset_oracle(const Presentation& p, std::size_t max_cosets) -> WordOracle {
  auto t = CosetTable::enumerate(p, max_cosets);
  if (!t) throw std::runtime_error("coset enumeration did not close within " + std::to_string(max_cosets) + " cosets");
  return [t = *t](const Word& a, const Word& b) { return t.trace(a) == t.trace(b); };
}

// ---------------------------------------------------------------- quotient code

namespace {

class QuotientModel : public Model {
 public:
  QuotientModel(ModelPtr base, Signature sig, WordOracle oracle, int rank)
      : Model("list_z/wp", std::move(sig)), base_(std::move(base)), oracle_(std::move(oracle)), rank_(rank) {}

  auto constant(const std::string& c) const -> Element override { return base_->constant(c); }
  auto apply(const std::string& fn, const std::vector<Element>& a) const -> Element override {
    return base_->apply(fn, a);
  }
  auto holds(const std::string& p, const std::vector<Element>& a) const -> bool override {
    if (p != "wp") return base_->holds(p, a);
    try {
      Word u = fg::from_element(a.at(0)), v = fg::from_element(a.at(1));
      fg::check_letters(u, rank_);
      fg::check_letters(v, rank_);
      return oracle_(u, v);
    } catch (const fg::WordError&) {
      return false;
    }
  }
  auto size(const std::string& s, const Element& e) const -> Int override { return base_->size(s, e); }
  void below(const std::string& s, const Int& bound, const std::function<bool(const Element&)>& visit) const override {
    base_->below(s, bound, visit);
  }
  void enumerate(const std::string& s, std::uint64_t limit,
                 const std::function<bool(const Element&)>& visit) const override {
    base_->enumerate(s, limit, visit);
  }
  auto determine(const std::string& p, const std::vector<Element>& a, std::size_t pos) const
      -> std::optional<std::optional<Element>> override {
    if (p == "wp") return std::nullopt;
    return base_->determine(p, a, pos);
  }
  auto code(const std::string& s, const Element& e) const -> Int override { return base_->code(s, e); }
  auto decode(const std::string& s, const Int& n) const -> Element override { return base_->decode(s, n); }

 private:
  ModelPtr base_;
  WordOracle oracle_;
  int rank_;
};

}  // namespace

auto quotient_code(const Presentation& p, const WordOracle& oracle) -> QuotientCode {
  check_presentation(p);
  QuotientCode q;
  q.code = fg::free_code(p.rank);
  Signature sig = builtin_signature("list_z");
  sig.name = "list_z+wp";
  sig.add_predicate("wp", {"list", "list"});
  q.code.target = sig;
  q.code.E = parse("(wp x.1 y.1)", sig, {{"x.1", "list"}, {"y.1", "list"}});
  finalize(q.code);
  q.model = std::make_shared<QuotientModel>(builtin_model("list_z"), sig, oracle, p.rank);
  return q;
}

auto hom_check(const Presentation& p, const WordOracle& oracle, std::uint64_t samples, const SearchBudget& b,
               std::uint64_t seed) -> HomReport {
  QuotientCode q = quotient_code(p, oracle);
  const Model& m = *q.model;
  Budget budget = codec_budget();
  HomReport rep;
  auto fail = [&](const std::string& what) {
    if (rep.violations++ == 0) rep.first_violation = what;
  };
  auto related = [&](const Word& u, const Word& v) {
    Env env{{"x.1", fg::to_element(u)}, {"y.1", fg::to_element(v)}};
    return eval_formula(m, q.code.E, env, budget) == Truth::True;
  };

  std::mt19937_64 rng(seed);
  auto random_word = [&](int maxlen) {
    Word w;
    int len = static_cast<int>(rng() % static_cast<std::uint64_t>(maxlen + 1));
    while (static_cast<int>(w.size()) < len) {
      int a = static_cast<int>(rng() % static_cast<std::uint64_t>(p.rank)) + 1;
      if (rng() % 2) a = -a;
      if (w.empty() || w.back() != -a) w.push_back(a);
    }
    return w;
  };
  const auto& rots = ball_for(p, b).rotations;
  for (std::uint64_t s = 0; s < samples; ++s) {
    Word w1 = random_word(5), w2 = random_word(5);
    // w1 changed within its class by one relator factor.
    Word v1 = w1;
    if (!rots.empty()) {
      const Word& r = rots[rng() % rots.size()].word;
      v1.insert(v1.begin() + static_cast<std::ptrdiff_t>(rng() % (v1.size() + 1)), r.begin(), r.end());
      v1 = reduce(v1, p.rank);
    }
    Word prod = multiply(w1, w2, p.rank);
    Env env{{"x1.1", fg::to_element(w1)}, {"x2.1", fg::to_element(w2)}, {"x3.1", fg::to_element(prod)}};
    ++rep.products;
    if (eval_formula(m, q.code.Q.at("mul"), env, budget) != Truth::True)
      fail("mul graph fails at " + format_word(w1) + " * " + format_word(w2));
    else if (!related(multiply(v1, w2, p.rank), prod))
      fail("image of " + format_word(v1) + " * " + format_word(w2) + " leaves the class of the product");
  }
  for (const auto& r : p.relators) {
    ++rep.relators;
    if (!related(r, {})) fail("relator " + format_word(r) + " is not sent to the identity class");
  }
  const auto& order = ball_for(p, b).order;
  for (std::size_t i = 0; i < order.size() && i < samples; ++i) {
    ++rep.kernel;
    if (!related(order[i], {})) fail("kernel word " + format_word(order[i]) + " is not sent to the identity class");
  }
  return rep;
}

}  // namespace ik::pres
