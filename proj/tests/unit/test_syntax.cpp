#include <doctest.h>

#include <random>

#include "hdpl/syntax.hpp"

using namespace hdpl;

namespace {

Signature klp() { return Signature::make({"k"}, {"l"}, {"p"}); }

std::vector<FragmentConfig> fragments() {
  using O = Op;
  using C = ActionCtor;
  return {FragmentConfig{},
          FragmentConfig({O::Diamond}),
          FragmentConfig({O::Diamond}, {C::Union, C::Comp, C::Star}),
          FragmentConfig({O::Diamond, O::Store}),
          FragmentConfig({O::Diamond, O::At, O::Store}),
          FragmentConfig({O::At, O::Store, O::Exists}),
          FragmentConfig::full()};
}

const char* kChainFormula =
    "((exists x . (@k1 <l>x & forall y . (~@k1 <l>y | @x y))) & (forall y . ~@y <l>k1)) & "
    "((exists x . (@x <l>k2 & forall y . (~@y <l>k2 | @x y))) & (forall y . ~@k2 <l>y)) & "
    "(forall x . ((@x k1 | @x k2) | ((exists y . (@y <l>x & forall z . (~@z <l>x | @y z))) & "
    "(exists z . (@x <l>z & forall w . (~@x <l>w | @z w)))))) & "
    "(forall x . forall y . (@x <l*>y | @y <l*>x))";

std::size_t count_kind(const Sentence& s, Sentence::Kind k) {
  std::size_t n = s.kind() == k;
  if (s.kind() == Sentence::Kind::And) {
    for (const auto& c : s.conjuncts()) n += count_kind(c, k);
  } else if (s.kind() != Sentence::Kind::Prop && s.kind() != Sentence::Kind::Nom) {
    n += count_kind(s.body(), k);
  }
  return n;
}

}  // namespace

TEST_CASE("parse builds the expected terms") {
  auto sig = klp();
  auto full = FragmentConfig::full();
  Sentence s = parse_sentence("<l>(p & ~k)", sig, full);
  CHECK(s == Sentence::dia(Action::rel("l"),
                           Sentence::conj({Sentence::prop("p"), Sentence::neg(Sentence::nom("k"))})));
  CHECK(parse_sentence("true", sig, full) == Sentence::conj({}));
  CHECK(parse_sentence("true", sig, full).conjuncts().empty());
  CHECK(parse_sentence("false", sig, full) == Sentence::neg(Sentence::conj({})));
  CHECK(parse_sentence("[l]p", sig, full) == parse_sentence("~<l>~p", sig, full));
  CHECK(parse_sentence("forall y . p", sig, full) == parse_sentence("~exists y . ~p", sig, full));
  CHECK(parse_sentence("p | k", sig, full) == parse_sentence("~(~p & ~k)", sig, full));
}

TEST_CASE("prefix operators bind tighter than connectives") {
  auto sig = klp();
  auto full = FragmentConfig::full();
  Sentence s = parse_sentence("~p & k", sig, full);
  REQUIRE(s.kind() == Sentence::Kind::And);
  CHECK(s.conjuncts().size() == 2);
  Sentence t = parse_sentence("p | k & p", sig, full);
  CHECK(t == Sentence::disj({Sentence::prop("p"), Sentence::conj({Sentence::nom("k"), Sentence::prop("p")})}));
}

TEST_CASE("action precedence") {
  auto sig = Signature::make({}, {"a", "b"}, {"p"});
  auto full = FragmentConfig::full();
  Action a = parse_action("a + b ; a*", sig, full);
  CHECK(a == Action::union_of(Action::rel("a"),
                              Action::comp(Action::rel("b"), Action::star(Action::rel("a")))));
  CHECK(print_action(a) == "a + b ; a*");
  Action b = parse_action("(a + b)*", sig, full);
  CHECK(print_action(b) == "(a + b)*");
  CHECK(print_action(parse_action("a ; (b ; a)", sig, full)) == "a ; (b ; a)");
  CHECK(print_action(parse_action("(a ; b) ; a", sig, full)) == "a ; b ; a");
}

TEST_CASE("binders are renamed to depth-indexed variables") {
  auto sig = klp();
  auto full = FragmentConfig::full();
  Sentence s = parse_sentence("down y . exists z . @y z", sig, full);
  CHECK(s == Sentence::store("x0", Sentence::exists("x1", Sentence::at("x0", Sentence::nom("x1")))));
  CHECK(print_sentence(s) == "down x0 . exists x1 . @x0 x1");
  // Binder names cannot capture signature symbols.
  CHECK_THROWS_AS(parse_sentence("down p . p", sig, full), SymbolError);
  // Variables are not visible outside their scope.
  CHECK_THROWS_AS(parse_sentence("(down y . y) & y", sig, full), SymbolError);
}

TEST_CASE("parse errors") {
  auto sig = klp();
  auto full = FragmentConfig::full();
  CHECK_THROWS_AS(parse_sentence("p &", sig, full), ParseError);
  CHECK_THROWS_AS(parse_sentence("q", sig, full), SymbolError);
  CHECK_THROWS_AS(parse_sentence("l", sig, full), SymbolError);
  CHECK_THROWS_AS(parse_sentence("<p>k", sig, full), SymbolError);
  CHECK_THROWS_AS(parse_sentence("p $ k", sig, full), ParseError);
  try {
    parse_sentence("p & (k", sig, full);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 6);
  }
}

TEST_CASE("fragment gating in the parser") {
  auto sig = klp();
  CHECK_THROWS_AS(parse_sentence("exists x . p", sig, FragmentConfig({Op::Diamond})), FragmentError);
  CHECK_THROWS_AS(parse_sentence("<l*>p", sig, FragmentConfig({Op::Diamond})), FragmentError);
  CHECK_THROWS_AS(parse_sentence("@k p", sig, FragmentConfig({Op::Diamond})), FragmentError);
  CHECK_THROWS_AS(parse_sentence("[l]p", sig, FragmentConfig({Op::At})), FragmentError);
  CHECK_NOTHROW(parse_sentence("~(p & k) | true", sig, FragmentConfig{}));
}

TEST_CASE("printer") {
  CHECK(print_sentence(Sentence::dia(Action::star(Action::rel("l")), Sentence::prop("p"))) == "<l*>p");
  CHECK(print_sentence(Sentence::conj({})) == "true");
  CHECK(print_sentence(Sentence::store("x", Sentence::at("x", Sentence::prop("p")))) ==
        "down x . @x p");
  CHECK(print_sentence(Sentence::falsity()) == "false");
  CHECK(print_sentence(Sentence::box(Action::rel("l"), Sentence::prop("p"))) == "[l]p");
  CHECK(print_sentence(Sentence::forall("x", Sentence::nom("x"))) == "forall x . x");
}

TEST_CASE("signature extension") {
  auto sig = klp();
  auto [s1, v1] = extend_signature(sig);
  CHECK(v1 == "x0");
  auto [s2, v2] = extend_signature(s1);
  CHECK(v2 == "x1");
  CHECK(s2.bound_vars == std::vector<std::string>{"x0", "x1"});
  CHECK(s2.base() == sig);

  auto clash = Signature::make({"x0"}, {}, {"x1"});
  Signature cur = clash;
  for (int i = 0; i < 6; ++i) cur = extend_signature(cur).first;
  CHECK(cur.bound_vars.size() == 6);
  for (std::size_t i = 0; i < cur.bound_vars.size(); ++i) {
    CHECK(!clash.declares(cur.bound_vars[i]));
    for (std::size_t j = 0; j < i; ++j) CHECK(cur.bound_vars[i] != cur.bound_vars[j]);
  }
  CHECK(cur.bound_vars[0] == "x0_");
  CHECK(cur.bound_vars[1] == "x1_");

  CHECK_THROWS_AS(Signature::make({"a"}, {"a"}, {}), SymbolError);
}

TEST_CASE("basic sentence order") {
  auto sig = extend_signature(Signature::make({"k1", "k2"}, {"l"}, {"p", "q"})).first;
  CHECK(basic_sentences(sig) == std::vector<std::string>{"k1", "k2", "x0", "p", "q"});
}

TEST_CASE("fragment configuration") {
  auto f = FragmentConfig::parse("diamond, store,star");
  CHECK(f.has(Op::Diamond));
  CHECK(f.has(Op::Store));
  CHECK(!f.has(Op::At));
  CHECK(f.has(ActionCtor::Star));
  CHECK(f.to_string() == "diamond,store,star");
  CHECK(FragmentConfig::parse("") == FragmentConfig{});
  CHECK(FragmentConfig::parse("all") == FragmentConfig::full());
  CHECK_THROWS_AS(FragmentConfig::parse("star"), FragmentError);
  CHECK_THROWS_AS(FragmentConfig::parse("diamond,loop"), FragmentError);
  CHECK(f.subset_of(FragmentConfig::full()));
  CHECK(!FragmentConfig::full().subset_of(f));
  CHECK(f.without(Op::Diamond).to_string() == "store");
}

TEST_CASE("fragment validation reports") {
  auto sig = Signature::make({"k1", "k2"}, {"l"}, {});
  Sentence phi = parse_sentence(kChainFormula, sig, FragmentConfig::full());
  CHECK(validate_in_fragment(phi, FragmentConfig::full()).accepted);

  auto rep = validate_in_fragment(phi, FragmentConfig({Op::Diamond, Op::At}));
  CHECK(!rep.accepted);
  std::size_t exists = 0, star = 0;
  for (const auto& v : rep.violations) {
    if (v.construct == "exists") ++exists;
    else if (v.construct == "star") ++star;
    else FAIL("unexpected violation " << v.construct);
  }
  CHECK(exists == count_kind(phi, Sentence::Kind::Exists));
  CHECK(exists == 13);
  CHECK(star == 2);

  CHECK(validate_in_fragment(Sentence::prop("p"), FragmentConfig{}).accepted);
  auto r2 = validate_in_fragment(Sentence::neg(Sentence::store("x", Sentence::nom("x"))),
                                 FragmentConfig({Op::Diamond}));
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0].path == "0");
  CHECK(r2.violations[0].construct == "store");
}

TEST_CASE("well-formedness") {
  auto sig = klp();
  CHECK_NOTHROW(check_well_formed(Sentence::store("x", Sentence::nom("x")), sig));
  CHECK_THROWS_AS(check_well_formed(Sentence::nom("x"), sig), SymbolError);
  CHECK_THROWS_AS(check_well_formed(Sentence::store("p", Sentence::nom("p")), sig), SymbolError);
  CHECK_THROWS_AS(check_well_formed(Sentence::dia(Action::rel("m"), Sentence::truth()), sig),
                  SymbolError);
}

TEST_CASE("canonicalize and translate") {
  auto sig = klp();
  Sentence hand = Sentence::store("y", Sentence::exists("z", Sentence::at("y", Sentence::nom("z"))));
  CHECK(canonicalize(hand, sig) ==
        parse_sentence("down a . exists b . @a b", sig, FragmentConfig::full()));

  Renaming r;
  r.props["p"] = "x0";
  r.nominals["k"] = "c";
  Sentence s = parse_sentence("down y . (p & @k y)", sig, FragmentConfig::full());
  Sentence t = translate(s, sig, r);
  CHECK(print_sentence(t) == "down x0_ . (x0 & @c x0_)");
  CHECK_NOTHROW(check_well_formed(t, r.apply(sig)));
}

TEST_CASE("conjunction canonical form") {
  auto p = Sentence::prop("p");
  auto k = Sentence::nom("k");
  CHECK(Sentence::conj({p, k}) == Sentence::conj({k, p, p}));
  CHECK(Sentence::conj({p}) == p);
  CHECK(Sentence::conj({p, k}).hash() == Sentence::conj({k, p}).hash());
}

TEST_CASE("round trip on random sentences") {
  auto sig = Signature::make({"k1", "k2"}, {"a", "b"}, {"p", "q"});
  std::mt19937_64 rng(7);
  for (const auto& frag : fragments()) {
    CAPTURE(frag.to_string());
    for (int i = 0; i < 1000; ++i) {
      Sentence s = random_sentence(rng, sig, frag, {4, 3, 2});
      std::string text = print_sentence(s);
      CAPTURE(text);
      Sentence back = parse_sentence(text, sig, frag);
      REQUIRE(back == s);
      REQUIRE(validate_in_fragment(s, frag).accepted);
      REQUIRE_NOTHROW(check_well_formed(s, sig));
    }
  }
}
