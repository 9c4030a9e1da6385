#include "interpkit/freegroup.hpp"
#include "sentences.hpp"

#include <doctest.h>

using namespace ik;

namespace {

auto nat() -> Signature { return builtin_signature("nat"); }

// The same sentence with every bounded quantifier written as an unbounded one
// guarded by a strict inequality.
auto unbounded_variant(const Formula& f) -> Formula {
  std::vector<Formula> kids;
  for (const auto& k : f->kids) kids.push_back(unbounded_variant(k));
  switch (f->kind) {
    case FKind::Not: return neg(kids[0]);
    case FKind::And: return conj(kids[0], kids[1]);
    case FKind::Or: return disj(kids[0], kids[1]);
    case FKind::Imp: return imp(kids[0], kids[1]);
    case FKind::Iff: return iff(kids[0], kids[1]);
    case FKind::Forall: return forall(f->name, f->sort, kids[0]);
    case FKind::Exists: return exists(f->name, f->sort, kids[0]);
    case FKind::ForallLt:
    case FKind::ExistsLt: {
      auto guard = parse("(< " + f->name + " " + render(f->terms[0]) + ")", nat(), {{f->name, "nat"}});
      if (f->kind == FKind::ForallLt) return forall(f->name, f->sort, imp(guard, kids[0]));
      return exists(f->name, f->sort, conj(guard, kids[0]));
    }
    default: return f;
  }
}

}  // namespace

TEST_CASE("built-in models") {
  auto n = builtin_model("nat");
  CHECK(n->constant("0") == Element::scalar(0));
  CHECK(n->constant("1") == Element::scalar(1));

  auto ln = builtin_model("list_nat");
  Element s = Element::ints({5, 7});
  CHECK(ln->holds("t", {s, Element::scalar(5), Element::scalar(1)}));
  CHECK_FALSE(ln->holds("t", {s, Element::scalar(7), Element::scalar(1)}));
  CHECK(ln->apply("len", {s}) == Element::scalar(2));

  auto f2 = builtin_model("free", 2);
  CHECK(f2->constant("e") == fg::to_element({}));

  CHECK_THROWS(builtin_model("reals"));
  CHECK_THROWS(builtin_model("free", 0));
}

TEST_CASE("carrier enumeration orders") {
  auto lz = builtin_model("list_z");
  std::vector<Element> ints;
  lz->enumerate("int", 5, [&](const Element& e) {
    ints.push_back(e);
    return true;
  });
  CHECK(ints == std::vector<Element>{Element::scalar(0), Element::scalar(1), Element::scalar(-1), Element::scalar(2),
                                     Element::scalar(-2)});

  std::vector<Element> nats;
  builtin_model("nat")->enumerate("nat", 4, [&](const Element& e) {
    nats.push_back(e);
    return true;
  });
  CHECK(nats == std::vector<Element>{Element::scalar(0), Element::scalar(1), Element::scalar(2), Element::scalar(3)});

  std::size_t last = 0;
  int seen = 0;
  builtin_model("free", 2)->enumerate("word", 60, [&](const Element& e) {
    CHECK(e.items.size() >= last);
    last = e.items.size();
    ++seen;
    return true;
  });
  CHECK(seen == 60);
}

TEST_CASE("eval_term") {
  auto n = builtin_model("nat");
  CHECK(eval_term(*n, parse_term("(+ (+ 1 1) (+ 1 (+ 1 1)))", nat()), {}) == Element::scalar(5));

  auto ln = builtin_model("list_nat");
  Env env{{"s", Element::ints({5, 7})}};
  CHECK(eval_term(*ln, parse_term("(len s)", builtin_signature("list_nat"), {{"s", "list"}}), env) ==
        Element::scalar(2));

  // Letter 3 needs rank 3.
  auto f3 = builtin_model("free", 3);
  Env words{{"x", fg::to_element({1, 2})}, {"y", fg::to_element({-2, 3})}};
  auto prod = parse_term("(mul x y)", builtin_signature("free"), {{"x", "word"}, {"y", "word"}});
  CHECK(eval_term(*f3, prod, words) == fg::to_element(fg::multiply({1, 2}, {-2, 3}, 3)));
  CHECK(eval_term(*f3, prod, words) == fg::to_element({1, 3}));

  CHECK_THROWS(eval_term(*n, parse_term("x", nat(), {{"x", "nat"}}), {}));
}

TEST_CASE("eval_formula") {
  auto n = builtin_model("nat");
  CHECK(eval_formula(*n, parse("(exists-lt (x 10) (= (* x x) 49))", nat())) == Truth::True);
  CHECK(eval_formula(*n, parse("(forall-lt (x 5) (exists-lt (y 11) (= y (+ x x))))", nat())) == Truth::True);
  Budget big;
  big.max_witnesses = 1000000;
  CHECK(eval_formula(*n, parse("(exists (x) (= (+ x 1) 0))", nat()), big) == Truth::Unknown);
  // An unbounded universal can be refuted but never confirmed by scanning.
  CHECK(eval_formula(*n, parse("(forall (x nat) (= (+ x 0) x))", nat())) == Truth::Unknown);
  CHECK(eval_formula(*n, parse("(forall (x nat) (= (* x x) x))", nat())) == Truth::False);
  CHECK(eval_formula(*n, parse("(exists (x nat) (= (* x x) 49))", nat())) == Truth::True);
}

TEST_CASE("witness hints are consulted before the scan") {
  auto n = builtin_model("nat");
  auto f = parse("(exists (x nat) (= (* x x) 1000000))", nat());
  Budget small;
  small.max_witnesses = 10;
  CHECK(eval_formula(*n, f, small) == Truth::Unknown);
  small.hints["x"] = {Element::scalar(1000)};
  CHECK(eval_formula(*n, f, small) == Truth::True);
}

TEST_CASE("solving pins forced witnesses") {
  auto n = builtin_model("nat");
  Budget solving;
  solving.solve = true;
  CHECK(eval_formula(*n, parse("(exists (x nat) (= (+ x 1) 0))", nat()), solving) == Truth::False);
  CHECK(eval_formula(*n, parse("(exists (x nat) (= (+ x (+ 1 1)) 1000001))", nat()), solving) == Truth::True);
}

TEST_CASE("bounded sentences are decided exactly and deterministically") {
  gen::Sentences g(false, 21);
  auto n = builtin_model("nat");
  for (int i = 0; i < 200; ++i) {
    auto f = parse(g.next(), nat());
    Truth a = eval_formula(*n, f);
    CHECK(a != Truth::Unknown);
    CHECK(eval_formula(*n, f) == a);
  }
}

TEST_CASE("budgeted answers are sound and monotone in the budget") {
  gen::Sentences g(false, 22);
  auto n = builtin_model("nat");
  int settled = 0;
  for (int i = 0; i < 150; ++i) {
    auto s = g.next();
    CAPTURE(s);
    auto f = parse(s, nat());
    Truth exact = eval_formula(*n, f);
    auto u = unbounded_variant(f);
    Truth prev = Truth::Unknown;
    for (std::uint64_t budget : {3, 30, 300}) {
      Budget b;
      b.max_witnesses = budget;
      Truth t = eval_formula(*n, u, b);
      if (t != Truth::Unknown) {
        CHECK(t == exact);
        ++settled;
      }
      if (prev != Truth::Unknown) CHECK(t == prev);
      prev = t;
    }
  }
  CHECK(settled > 0);
}
