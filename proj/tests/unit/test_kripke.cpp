#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "hdpl/kripke.hpp"
#include "oracles.hpp"

using namespace hdpl;

namespace {

oracle::PairSet to_pairs(const Relation& r) {
  auto v = r.pairs();
  return {v.begin(), v.end()};
}

Signature two_rel() { return Signature::make({"k"}, {"a", "b"}, {"p", "q"}); }

// Exhaustive permutation search.
bool brute_isomorphic(const PointedModel& m, const PointedModel& n) {
  if (m.model.size() != n.model.size()) return false;
  std::vector<StateId> perm(m.model.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    if (is_isomorphism(m, n, perm)) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace

TEST_CASE("action interpretation on the loop model") {
  KripkeModel m = fixtures::loop_left();
  auto full = FragmentConfig::full();
  Relation ll = interpret_action(m, parse_action("l;l", m.signature(), full));
  StateId s0 = m.state("0"), s1 = m.state("1"), a = m.state("a"), b = m.state("b");
  oracle::PairSet expected{{s0, s0}, {s0, b}, {s1, s1}, {s1, a}};
  CHECK(to_pairs(ll) == expected);
  CHECK(to_pairs(ll) == oracle::action_pairs(m, parse_action("l;l", m.signature(), full)));
  Relation star = interpret_action(m, parse_action("l*", m.signature(), full));
  CHECK(Relation::identity(m.size()).subset_of(star));
}

TEST_CASE("action algebra on random models") {
  auto sig = two_rel();
  auto full = FragmentConfig::full();
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    KripkeModel m = generate_random_model(seed, 1 + seed % 6, 0.3, sig);
    Action a = random_action(rng, sig, full, 2);
    Action b = random_action(rng, sig, full, 2);
    Relation ra = interpret_action(m, a);
    CHECK(interpret_action(m, Action::union_of(a, b)) == interpret_action(m, Action::union_of(b, a)));
    Relation st = interpret_action(m, Action::star(a));
    CHECK(interpret_action(m, Action::star(Action::star(a))) == st);
    CHECK(interpret_action(m, Action::comp(a, Action::star(a))).subset_of(st));
    CHECK(to_pairs(interpret_action(m, Action::comp(a, b))) ==
          oracle::action_pairs(m, Action::comp(a, b)));
    CHECK(to_pairs(st) == oracle::action_pairs(m, Action::star(a)));
    CHECK(ra.subset_of(st));
  }
}

TEST_CASE("expansion and reduct") {
  auto sig = two_rel();
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    KripkeModel m = generate_random_model(seed, 1 + seed % 5, 0.4, sig);
    StateId w = seed % m.size();
    KripkeModel e = m.expand("x0", w);
    CHECK(e.denotation("x0") == w);
    CHECK(e.signature().bound_vars == std::vector<std::string>{"x0"});
    CHECK(e.reduct(sig) == m);
    KripkeModel e2 = e.expand(0);
    CHECK(e2.reduct(e.signature()) == e);
    CHECK(e2.reduct(sig) == m);
  }
  KripkeModel m = generate_random_model(1, 3, 0.5, sig);
  CHECK_THROWS_AS(m.expand("x1", 0), SymbolError);
  CHECK_THROWS_AS(m.expand("x0", 7), Error);
  Signature smaller = Signature::make({"k"}, {"a"}, {"q"});
  KripkeModel r = m.reduct(smaller);
  CHECK(r.relation("a") == m.relation("a"));
  CHECK(r.prop_states(0) == m.prop_states(1));
}

TEST_CASE("isomorphism search") {
  auto sig = two_rel();
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    std::size_t n = 1 + seed % 5;
    KripkeModel m = generate_random_model(seed, n, 0.35, sig);
    std::vector<StateId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    KripkeModel c = permute_states(m, perm);
    StateId w = seed % n;
    auto h = find_isomorphism({m, w}, {c, perm[w]});
    REQUIRE(h.has_value());
    CHECK(is_isomorphism({m, w}, {c, perm[w]}, *h));

    KripkeModel o = generate_random_model(seed + 1000, n, 0.35, sig);
    for (StateId v = 0; v < n; ++v) {
      auto found = find_isomorphism({m, w}, {o, v});
      CHECK(found.has_value() == brute_isomorphic({m, w}, {o, v}));
      if (found) CHECK(is_isomorphism({m, w}, {o, v}, *found));
    }
  }
  auto [ma, na] = fixtures::branching_pair();
  CHECK(!find_isomorphism({ma, 0}, {na, 0}));
  KripkeModel left = fixtures::loop_left();
  for (std::size_t d : {2u, 3u, 4u}) {
    KripkeModel right = fixtures::loop_right(d);
    for (StateId v = 0; v < right.size(); ++v) {
      CHECK(!find_isomorphism({left, 0}, {right, v}));
      CHECK(!brute_isomorphic({left, 0}, {right, v}));
    }
  }
}

TEST_CASE("rootedness") {
  auto sig = Signature::make({}, {"l"}, {});
  KripkeModel single = ModelBuilder(sig).state("s").build();
  CHECK(is_rooted({single, 0}));
  auto [mb, nb] = fixtures::disconnected_pair();
  CHECK(!is_rooted({mb, mb.state("0")}));
  CHECK(!is_rooted({nb, nb.state("0")}));
  KripkeModel left = fixtures::loop_left();
  CHECK(is_rooted({left, left.state("0")}));
  CHECK(!is_rooted({left, left.state("a")}));
  CHECK(is_image_finite(left));
}

TEST_CASE("random model generation") {
  auto sig = two_rel();
  CHECK(generate_random_model(42, 4, 0.5, sig) == generate_random_model(42, 4, 0.5, sig));
  KripkeModel empty = generate_random_model(3, 5, 0.0, sig);
  for (std::size_t r = 0; r < 2; ++r) CHECK(empty.relation(r).pair_count() == 0);
  KripkeModel full = generate_random_model(3, 5, 1.0, sig);
  for (std::size_t r = 0; r < 2; ++r) CHECK(full.relation(r) == Relation::full(5));
}

TEST_CASE("cloned states are modally indistinguishable") {
  auto sig = Signature::make({}, {"a", "b"}, {"p", "q"});
  FragmentConfig frag({Op::Diamond}, {ActionCtor::Union, ActionCtor::Star});
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    KripkeModel m = generate_random_model(seed, 1 + seed % 4, 0.4, sig);
    StateId s = seed % m.size();
    KripkeModel c = clone_state(m, s);
    REQUIRE(c.size() == m.size() + 1);
    CHECK(c.state_name(m.size()) == m.state_name(s) + "'");
    for (int i = 0; i < 10; ++i) {
      Sentence phi = random_sentence(rng, sig, frag);
      CHECK(oracle::satisfies(c, s, phi) == oracle::satisfies(c, m.size(), phi));
      CHECK(oracle::satisfies(c, s, phi) == oracle::satisfies(m, s, phi));
    }
  }
  // Storing a state on a cycle tells it apart from its twin.
  auto one = Signature::make({}, {"a"}, {});
  KripkeModel cyc = ModelBuilder(one).edge("a", "p", "s").edge("a", "s", "p").build();
  KripkeModel twin = clone_state(cyc, cyc.state("s"));
  Sentence back = parse_sentence("<a> down x . <a><a> ~x", one, FragmentConfig({Op::Diamond, Op::Store}));
  CHECK_FALSE(oracle::satisfies(cyc, cyc.state("p"), back));
  CHECK(oracle::satisfies(twin, twin.state("p"), back));

  auto named = Signature::make({"k"}, {"a"}, {});
  KripkeModel k = generate_random_model(1, 3, 0.5, named);
  CHECK(clone_state(k, 0).named_interp() == k.named_interp());
  CHECK_THROWS_AS(clone_state(k, 3), Error);
}

TEST_CASE("random pairs") {
  auto sig = two_rel();
  std::size_t independent = 0, permuted = 0, cloned = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto [m, n] = generate_random_pair(seed, 4, 0.4, sig);
    CHECK(m.signature() == n.signature());
    auto again = generate_random_pair(seed, 4, 0.4, sig);
    CHECK((again.first == m && again.second == n));
    if (n.size() == m.size() + 1 && n.state_name(m.size()).back() == '\'')
      ++cloned;
    else if (n.size() == m.size() && find_isomorphism({m, 0}, {n, n.state(m.state_name(0))}))
      ++permuted;
    else
      ++independent;
  }
  CHECK(independent > 5);
  CHECK(permuted > 5);
  CHECK(cloned > 5);
}

TEST_CASE("fixture shapes") {
  KripkeModel right = fixtures::loop_right(4);
  CHECK(right.size() == 8);
  CHECK(right.relation("l").pair_count() == 7);
  KripkeModel chain = fixtures::named_chain(3);
  CHECK(chain.denotation("k1") == chain.state("s0"));
  CHECK(chain.denotation("k2") == chain.state("s2"));
  CHECK_THROWS_AS(ModelBuilder(fixtures::chain_signature()).state("s").build(), Error);
}
