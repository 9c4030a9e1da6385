#include "interpkit/codec.hpp"
#include "interpkit/freegroup.hpp"
#include "interpkit/interp.hpp"
#include "sentences.hpp"

#include <doctest.h>

#include <random>

using namespace ik;

namespace {

auto numeral(int n) -> std::string {
  std::string s = "0";
  for (int i = 0; i < n; ++i) s = "(+ 1 " + s + ")";
  return s;
}

auto failed(const ValidationReport& rep, const std::string& name) -> const Check* {
  for (const auto& c : rep.checks)
    if (c.name == name && c.failed) return &c;
  return nullptr;
}

auto tuple(std::initializer_list<long> xs) -> NatTuple {
  NatTuple t;
  for (long x : xs) t.emplace_back(x);
  return t;
}

}  // namespace

TEST_CASE("builtin codes") {
  CHECK(builtin_code("listnat_in_nat").dim == 2);
  CHECK(builtin_code("nat_in_listnat").dim == 1);
  CHECK(builtin_code("listz_in_nat").dim == 2);
  CHECK_THROWS_AS(builtin_code("reals_in_nat"), CodeError);
  for (const auto& name : builtin_code_names()) CHECK_NOTHROW(builtin_code(name));
}

TEST_CASE("builtin codes validate at bound 100") {
  auto nat = builtin_model("nat");
  for (const auto& name : builtin_code_names()) {
    CAPTURE(name);
    auto code = builtin_code(name);
    auto target = code.target.name == "list_nat" ? builtin_model("list_nat") : nat;
    auto rep = validate(code, *target, 100, codec_budget());
    CHECK(rep.ok());
    for (const auto& c : rep.checks) CHECK(c.unknown == 0);
  }
}

TEST_CASE("validate reports a broken equivalence") {
  auto code = builtin_code("listnat_in_nat");
  code.E = parse("(not (= x.1 y.1))", code.target, {{"x.1", "nat"}, {"y.1", "nat"}});
  auto rep = validate(code, *builtin_model("nat"), 10, codec_budget());
  CHECK_FALSE(rep.ok());
  const Check* refl = failed(rep, "E reflexive");
  REQUIRE(refl != nullptr);
  CHECK_FALSE(refl->counterexample.empty());
}

TEST_CASE("validate rejects a mismatched target") {
  CHECK_THROWS_AS(validate(builtin_code("listnat_in_nat"), *builtin_model("list_nat"), 5), CodeError);
}

TEST_CASE("the free group code validates") {
  auto lz = builtin_model("list_z");
  CHECK(validate(fg::free_code(2), *lz, 50).ok());
  auto composed = compose(fg::free_code(2), builtin_code("listz_in_nat"));
  CHECK(composed.dim == 2);
  CHECK(validate(composed, *builtin_model("nat"), 30, codec_budget()).ok());
}

TEST_CASE("translate along the identity code preserves truth") {
  auto sig = builtin_signature("nat");
  auto id = identity_code(sig);
  auto m = builtin_model("nat");
  gen::Sentences g(false, 31);
  std::vector<Formula> fs;
  for (int i = 0; i < 50; ++i) fs.push_back(parse(g.next(), sig));
  Budget solving;
  solving.solve = true;
  auto rep = transfer_check(id, *m, *m, fs, {}, solving);
  CHECK(rep.total == 50);
  CHECK(rep.ok());
}

TEST_CASE("translate a list sentence into arithmetic") {
  auto code = builtin_code("listnat_in_nat");
  auto f = parse("(exists (s list) (and (= (len s) " + numeral(2) + ") (and (t s " + numeral(5) + " 1) (t s " +
                     numeral(7) + " " + numeral(2) + "))))",
                 code.source);
  CHECK(eval_formula(*builtin_model("list_nat"), f, Budget{.hints = {{"s", {Element::ints({5, 7})}}}}) ==
        Truth::True);
  auto b = codec_budget();
  b.hints["s.1"] = {Element::scalar(encode_tuple(tuple({5, 7})))};
  CHECK(eval_formula(*builtin_model("nat"), translate(code, f), b) == Truth::True);
}

TEST_CASE("translate keeps false sentences false") {
  auto code = builtin_code("listnat_in_nat");
  auto f = parse("(exists-lt (s list 60) (and (t s 1 1) (t s 0 1)))", code.source);
  CHECK(eval_formula(*builtin_model("list_nat"), f) == Truth::False);
  CHECK(eval_formula(*builtin_model("nat"), translate(code, f), codec_budget()) == Truth::False);
}

TEST_CASE("translate distributes over connectives") {
  auto code = builtin_code("listnat_in_nat");
  auto a = parse("(exists-lt (s list 9) (= (len s) 1))", code.source);
  auto b = parse("(forall-lt (n 4) (= n n))", code.source);
  CHECK(equal(translate(code, conj(a, b)), conj(translate(code, a), translate(code, b))));
  CHECK(equal(translate(code, neg(a)), neg(translate(code, a))));
}

TEST_CASE("translate needs every symbol") {
  auto code = builtin_code("listnat_in_nat");
  code.Q.erase("len");
  CHECK_THROWS_AS(translate(code, parse("(exists-lt (s list 9) (= (len s) 1))", code.source)), CodeError);
}

TEST_CASE("nat_in_listnat") {
  auto code = builtin_code("nat_in_listnat");
  auto f = parse("(not (= 0 1))", code.source);
  CHECK(eval_formula(*builtin_model("list_nat"), translate(code, f), Budget{.solve = true}) == Truth::True);
}

TEST_CASE("compose") {
  auto code = compose(builtin_code("nat_in_listnat"), builtin_code("listnat_in_nat"));
  CHECK(code.dim == 2);
  CHECK(code.source.name == builtin_code("nat_in_listnat").source.name);
  auto f = parse("(exists (x nat) (= (+ x 1) (+ 1 x)))", code.source);
  CHECK(eval_formula(*builtin_model("nat"), translate(code, f), codec_budget()) == Truth::True);
  CHECK_THROWS_AS(compose(builtin_code("listnat_in_nat"), builtin_code("listnat_in_nat")), CodeError);
}

TEST_CASE("transfer over list sentences") {
  auto code = builtin_code("listnat_in_nat");
  gen::Sentences g(true, 32);
  std::vector<Formula> fs;
  for (int i = 0; i < 25; ++i) fs.push_back(parse(g.next(), code.source));
  auto rep = transfer_check(code, *builtin_model("list_nat"), *builtin_model("nat"), fs, {}, codec_budget());
  CHECK(rep.agree == 25);
  CHECK(rep.ok());
}

TEST_CASE("transfer of the two-entry tuple existence") {
  auto code = builtin_code("listnat_in_nat");
  auto f = parse(
      "(forall-lt (a 3) (forall-lt (b 3) (exists-lt (s list 110) (and (= (len s) (+ 1 1)) (and (t s a 1) "
      "(t s b (+ 1 1)))))))",
      code.source);
  auto rep = transfer_check(code, *builtin_model("list_nat"), *builtin_model("nat"), {f}, {}, codec_budget());
  CHECK(rep.ok());
  CHECK(eval_formula(*builtin_model("list_nat"), f) == Truth::True);
}

TEST_CASE("coordinate maps") {
  auto nat = builtin_model("nat");
  auto lz = builtin_code("listz_in_nat");
  auto lzmap = builtin_coordinate_map("listz_in_nat");
  CHECK(fold_int(-3) == 5);
  CHECK(apply_coordinate(lz, lzmap, *nat, "int", {Element::scalar(5), Element::scalar(2)}, codec_budget()) ==
        Element::scalar(-3));

  auto ln = builtin_code("listnat_in_nat");
  auto lnmap = builtin_coordinate_map("listnat_in_nat");
  for (long n : {0L, 53L, 3799144L})
    CHECK(apply_coordinate(ln, lnmap, *nat, "list", {Element::scalar(n), Element::scalar(2)}, codec_budget()) ==
          Element::ints(decode_tuple(n)));
  CHECK_THROWS_AS(apply_coordinate(ln, lnmap, *nat, "list", {Element::scalar(4), Element::scalar(7)}, codec_budget()),
                  CodeError);
  CHECK_THROWS_AS(apply_coordinate(ln, lnmap, *nat, "list", {Element::scalar(4)}, codec_budget()), CodeError);
  CHECK_THROWS(builtin_coordinate_map("frob"));
}

TEST_CASE("the composed map is the composition of maps") {
  auto nat = builtin_model("nat");
  auto free = fg::free_code(2);
  auto lz = builtin_code("listz_in_nat");
  auto composed = compose(free, lz);
  auto fmap = fg::free_coordinate_map();
  auto lzmap = builtin_coordinate_map("listz_in_nat");
  auto cmap = compose_maps(fmap, lzmap, free, lz.dim);
  for (const auto& w : fg::words_up_to(2, 3)) {
    NatTuple folded;
    for (int a : w) folded.emplace_back(fold_int(a));
    std::vector<Element> tuple{Element::scalar(encode_word_code(folded)), Element::scalar(3)};
    Element word = apply_coordinate(composed, cmap, *nat, "word", tuple, codec_budget());
    CHECK(word == fg::to_element(w));
    CHECK(word == fmap.map("word", {lzmap.map("list", tuple)}));
  }
}

TEST_CASE("code files round-trip") {
  std::vector<InterpretationCode> codes;
  for (const auto& name : builtin_code_names()) codes.push_back(builtin_code(name));
  codes.push_back(fg::free_code(2));
  codes.push_back(compose(builtin_code("nat_in_listnat"), builtin_code("listnat_in_nat")));
  for (const auto& c : codes) {
    std::string text = write_code(c);
    auto back = read_code(text);
    CHECK(write_code(back) == text);
    CHECK(back.dim == c.dim);
    CHECK(equal(back.U, c.U));
    CHECK(equal(back.E, c.E));
    CHECK(back.Q.size() == c.Q.size());
  }
  CHECK_THROWS(read_code("(code (dim 1)"));
}
