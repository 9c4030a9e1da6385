#include "interpkit/codec.hpp"
#include "interpkit/model.hpp"
#include "sentences.hpp"

#include <doctest.h>

using namespace ik;

namespace {

auto nat() -> Signature { return builtin_signature("nat"); }

auto count_exists(const Formula& f) -> int {
  int n = f->kind == FKind::Exists ? 1 : 0;
  for (const auto& k : f->kids) n += count_exists(k);
  return n;
}

}  // namespace

TEST_CASE("parse builds the expected tree") {
  auto f = parse("(exists (x nat) (= (* x x) (+ x x)))", nat());
  CHECK(f->kind == FKind::Exists);
  CHECK(f->name == "x");
  CHECK(f->kids[0]->kind == FKind::Eq);
  CHECK(f->kids[0]->terms[0]->name == "*");
  CHECK(f->kids[0]->terms[1]->name == "+");
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse("(= x)", nat()), ParseError);
  CHECK_THROWS_AS(parse("(= x y", nat()), ParseError);
  CHECK_THROWS(parse("(frob x)", nat()));
  CHECK_THROWS_AS(parse("(= (len x) 0)", nat()), ParseError);
}

TEST_CASE("parse skips comments and whitespace") {
  auto f = parse("  (= 0 ; left\n 0)  ", nat());
  CHECK(render(f) == "(= 0 0)");
}

TEST_CASE("render") {
  CHECK(render(eq(cnst("0", "nat"), cnst("0", "nat"))) == "(= 0 0)");
  CHECK(render(parse("(exists-lt (x 10) (= x x))", nat())) == "(exists-lt (x 10) (= x x))");
  auto f = parse("(= x 0)", nat());
  auto g = parse("(= x 1)", nat());
  CHECK(render(f) != render(g));
}

TEST_CASE("parse of render is the identity on emitted formulas") {
  for (const auto& k : emit_kinds()) {
    CAPTURE(k);
    Formula f = emit_formula(k);
    CHECK(equal(parse(render(f), nat(), free_var_sorts(f)), f));
  }
}

TEST_CASE("substitute") {
  auto f = parse("(= x 0)", nat());
  CHECK(render(substitute(f, {{"x", cnst("1", "nat")}})) == "(= 1 0)");
  auto g = parse("(exists (y nat) (= x y))", nat(), {{"x", "nat"}});
  CHECK(render(substitute(g, {{"x", var("y", "nat")}})) == "(exists (y' nat) (= y y'))");
  CHECK(equal(substitute(g, {}), g));
  CHECK_THROWS(substitute(f, {{"x", var("s", "list")}}));
}

TEST_CASE("substitutions with disjoint domains compose") {
  auto f = parse("(and (= x y) (exists (z nat) (= (+ x z) y)))", nat(), {{"x", "nat"}, {"y", "nat"}});
  Binding a{{"x", parse_term("(+ u 1)", nat(), {{"u", "nat"}})}};
  Binding b{{"y", parse_term("(* v v)", nat(), {{"v", "nat"}})}};
  Binding ab = a;
  ab.insert(b.begin(), b.end());
  CHECK(equal(substitute(substitute(f, a), b), substitute(f, ab)));
}

TEST_CASE("flatten") {
  auto f = parse("(= (+ (* x x) 1) y)", nat());
  CHECK(render(flatten(f)) == "(exists (z nat) (and (graph* x x z) (graph+ z 1 y)))");
  auto flat = parse("(= x y)", nat());
  CHECK(equal(flatten(flat), flat));
  auto deep = parse("(= (+ (* (+ x x) x) 1) y)", nat());
  CHECK(count_exists(flatten(deep)) == 2);
}

TEST_CASE("flatten preserves truth on random bounded sentences") {
  gen::Sentences g(false, 11);
  auto m = builtin_model("nat");
  for (int i = 0; i < 200; ++i) {
    auto s = g.next();
    CAPTURE(s);
    auto f = parse(s, nat());
    Truth a = eval_formula(*m, f);
    CHECK(a != Truth::Unknown);
    CHECK(eval_formula(*m, flatten(f), Budget{.solve = true}) == a);
  }
}

TEST_CASE("collapse_sorts") {
  auto ln = builtin_signature("list_nat");
  std::map<std::string, Int> tags{{"nat", 1}, {"list", 2}};
  auto f = collapse_sorts(parse("(forall (n nat) (= n n))", ln), tags);
  CHECK(render(f) == "(forall (n u) (forall (t u) (imp (tag_nat t) (= n n))))");
  auto g = collapse_sorts(parse("(exists-lt (s list 20) (exists-lt (n 3) (= (len s) n)))", ln), tags);
  std::string text = render(g);
  CHECK(text.find("tag_list") != std::string::npos);
  CHECK(text.find("tag_nat") != std::string::npos);
  CHECK_THROWS(collapse_sorts(parse("(forall (n nat) (= n n))", ln), {{"list", 2}}));
  CHECK_THROWS(collapse_sorts(parse("(forall (n nat) (= n n))", ln), {{"nat", 1}, {"list", 1}}));
}

TEST_CASE("collapse_sorts preserves truth on the tagged model") {
  auto ln = builtin_signature("list_nat");
  std::map<std::string, Int> tags{{"nat", 1}, {"list", 2}};
  auto native = builtin_model("list_nat");
  auto tagged = tagged_model(native, tags);
  gen::Sentences g(true, 12);
  for (int i = 0; i < 60; ++i) {
    auto s = g.next();
    CAPTURE(s);
    auto f = parse(s, ln);
    Truth a = eval_formula(*native, f);
    CHECK(eval_formula(*tagged, collapse_sorts(f, tags), Budget{.solve = true}) == a);
  }
}
