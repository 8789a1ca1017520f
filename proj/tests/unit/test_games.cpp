#include <doctest.h>

#include "hdpl/checker.hpp"
#include "hdpl/games.hpp"

using namespace hdpl;

namespace {

Signature small_sig() { return Signature::make({"k"}, {"l"}, {"p"}); }

std::vector<FragmentConfig> fragments() {
  return {FragmentConfig({Op::Diamond}), FragmentConfig({Op::Diamond, Op::Store}),
          FragmentConfig({Op::Diamond, Op::At, Op::Store}),
          FragmentConfig({Op::Diamond, Op::Store, Op::Exists}), FragmentConfig({Op::At, Op::Exists})};
}

TreePtr small_random_tree(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                          std::uint64_t cap) {
  for (int tries = 0;; ++tries) {
    auto t = random_tree(rng, sig, frag, 2, base_actions(sig), 0.5);
    auto n = theta_size(t);
    if (n && *n <= cap) return t;
  }
}

}  // namespace

TEST_CASE("theta sizes") {
  auto sig = Signature::make({}, {"l"}, {"p"});
  auto full = FragmentConfig::full();
  // Leaf: two signs; the root adds its own sign to the 2^2 subsets below.
  CHECK(*theta_size(parse_tree("leaf", sig, full)) == 2);
  CHECK(*theta_size(parse_tree("(dia l leaf)", sig, full)) == 8);
  CHECK(*theta_size(parse_tree("(idle leaf)", sig, full)) == 4);
  CHECK(*theta_size(parse_tree("(down leaf)", sig, full)) == 2 * 4);
  CHECK(!theta_size(complete_tree(sig, full, 3, base_actions(sig))));

  GamePool pool;
  auto t = parse_tree("(branch (idle leaf) (dia l leaf))", sig, full);
  auto all = enumerate_game_sentences(t, 100, pool);
  CHECK(all.size() == *theta_size(t));
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(!same_sentence(all[i], all[j]));
  CHECK_THROWS_AS(enumerate_game_sentences(t, 10, pool), Error);
}

TEST_CASE("lowering") {
  auto sig = Signature::make({}, {"l"}, {"p"});
  auto full = FragmentConfig::full();
  GamePool pool;
  auto leaf = GameboardTree::leaf(sig);
  StateSet pos(1);
  pos.set(0);
  auto g = GameSentence::make(pool, leaf, pos, {});
  CHECK(lower_game_sentence(g) == Sentence::prop("p"));
  CHECK(print_game_sentence(g) == "[+p]");

  auto t = GameboardTree::node(sig, {{EdgeLabel::dia(Action::rel("l")), leaf}});
  auto empty = GameSentence::make(pool, t, pos, {{}});
  CHECK(print_sentence(lower_game_sentence(empty)) == print_sentence(parse_sentence("p & [l]false", sig, full)));

  auto neg = GameSentence::make(pool, leaf, StateSet(1), {});
  auto both = GameSentence::make(pool, t, StateSet(1), {{g, neg}});
  CHECK(lower_game_sentence(both) ==
        parse_sentence("~p & <l>p & <l>~p & [l](p | ~p)", sig, full));
  CHECK_THROWS_AS(GameSentence::make(pool, t, pos, {{g}, {g}}), Error);
  CHECK_THROWS_AS(GameSentence::make(pool, t, pos, {{both}}), Error);
}

TEST_CASE("exactly one game sentence holds and it is the characteristic one") {
  auto sig = small_sig();
  std::mt19937_64 rng(5);
  for (const auto& frag : fragments()) {
    for (int i = 0; i < 25; ++i) {
      auto tr = small_random_tree(rng, sig, frag, 256);
      GamePool pool;
      auto all = enumerate_game_sentences(tr, 256, pool);
      KripkeModel m = generate_random_model(rng(), 1 + i % 3, 0.4, sig);
      for (StateId w = 0; w < m.size(); ++w) {
        auto ch = char_formula(tr, {m, w}, pool);
        std::size_t hits = 0;
        for (const auto& g : all)
          if (satisfies({m, w}, lower_game_sentence(g))) {
            ++hits;
            CHECK(g == ch);
          }
        CHECK(hits == 1);
      }
    }
  }
}

TEST_CASE("game verdict matches characteristic formulas") {
  auto sig = small_sig();
  std::mt19937_64 rng(17);
  std::size_t wins = 0, losses = 0;
  for (const auto& frag : fragments()) {
    for (int i = 0; i < 60; ++i) {
      auto tr = random_tree(rng, sig, frag, 3, base_actions(sig), 0.5);
      KripkeModel a = generate_random_model(rng(), 2 + i % 3, 0.4, sig);
      KripkeModel b = generate_random_model(rng(), 2 + i % 2, 0.4, sig);
      GamePool pool;
      auto ca = char_formula(tr, {a, 0}, pool);
      auto cb = char_formula(tr, {b, 0}, pool);
      auto r = ef_solve(tr, {a, 0}, {b, 0});
      CHECK(r.eloise_wins == (ca == cb));
      CHECK(r.eloise_wins == same_sentence(ca, cb));
      (r.eloise_wins ? wins : losses)++;
      if (!r.eloise_wins) {
        CHECK(r.trace.size() == r.rounds);
        CHECK(replay_trace(tr, {a, 0}, {b, 0}, r.trace));
      }
    }
  }
  CHECK(wins > 20);
  CHECK(losses > 20);
}

TEST_CASE("basic agreement is checked at inner nodes") {
  auto sig = Signature::make({}, {"l"}, {"p"});
  auto full = FragmentConfig::full();
  auto tr = parse_tree("(dia l leaf)", sig, full);
  auto m = ModelBuilder(sig).edge("l", "w", "u").label("p", "w").build();
  auto n = ModelBuilder(sig).edge("l", "v", "u").build();
  auto r = ef_solve(tr, {m, 0}, {n, 0});
  CHECK(!r.eloise_wins);
  CHECK(r.rounds == 0);
  CHECK(!same_sentence(char_formula(tr, {m, 0}), char_formula(tr, {n, 0})));
}

TEST_CASE("loop example") {
  auto sig = fixtures::loop_signature();
  auto full = FragmentConfig::full();
  auto tr = parse_tree("(down (dia l (dia l leaf)))", sig, full);
  KripkeModel m = fixtures::loop_left();
  KripkeModel n = fixtures::loop_right(6);
  auto r = ef_solve(tr, {m, m.state("0")}, {n, n.state("0")});
  REQUIRE(!r.eloise_wins);
  CHECK(r.rounds == 3);
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace[0].label == EdgeLabel::store());
  CHECK(r.trace[1].side == Side::Left);
  CHECK(replay_trace(tr, {m, 0}, {n, 0}, r.trace));
  // Without the store edge Eloise survives.
  auto plain = parse_tree("(dia l (dia l leaf))", sig, full);
  CHECK(ef_solve(plain, {m, 0}, {n, 0}).eloise_wins);
}

TEST_CASE("interactive game state") {
  auto sig = fixtures::loop_signature();
  auto full = FragmentConfig::full();
  auto tr = parse_tree("(down (dia l (dia l leaf)))", sig, full);
  EfGame g(tr, fixtures::loop_left(), fixtures::loop_right(5));
  GameState s = g.initial(0, 0);
  CHECK(s.status == GameStatus::Ongoing);
  CHECK(g.to_move(s) == Player::Abelard);
  auto moves = g.legal_moves(s);
  REQUIRE(moves.size() == 1);
  CHECK_THROWS_AS(g.step(s, {0, Side::Left, StateId{1}}), IllegalMove);
  s = g.step(s, moves[0]);
  CHECK(s.round == 1);
  CHECK(s.named_left.size() == 1);

  // Abelard moves on the left to 1; Eloise answers with the chain successor.
  s = g.step(s, {0, Side::Left, g.left().state("1")});
  CHECK(g.to_move(s) == Player::Eloise);
  CHECK_THROWS_AS(g.step(s, {0, Side::Left, StateId{0}}), IllegalMove);
  s = g.step(s, {0, Side::Right, g.right().state("1")});
  CHECK(s.status == GameStatus::Ongoing);
  CHECK(g.abelard_rounds(s) == std::optional<std::size_t>(1));
  GameMove best = g.best_move(s);
  s = g.step(s, best);
  s = g.step(s, g.best_move(s));
  CHECK(s.status == GameStatus::AbelardWon);
  CHECK(!s.reason.empty());
  CHECK(g.legal_moves(s).empty());

  // A play where Eloise has no answer.
  auto sig2 = Signature::make({}, {"l"}, {});
  auto t2 = parse_tree("(dia l leaf)", sig2, full);
  EfGame g2(t2, ModelBuilder(sig2).edge("l", "a", "b").build(), ModelBuilder(sig2).state("c").build());
  GameState u = g2.step(g2.initial(0, 0), {0, Side::Left, StateId{1}});
  CHECK(u.status == GameStatus::AbelardWon);
  CHECK(u.reason == "Eloise has no answer");
  GameState v = g2.initial(0, 0);
  CHECK(g2.legal_moves(v).size() == 1);

  GameState w = EfGame(t2, ModelBuilder(sig2).state("a").build(), ModelBuilder(sig2).state("c").build())
                    .initial(0, 0);
  CHECK(w.status == GameStatus::EloiseWon);
}

TEST_CASE("normal forms") {
  auto sig = small_sig();
  std::mt19937_64 rng(23);
  RandomSentenceOptions opts;
  opts.max_depth = 3;
  opts.max_conjuncts = 2;
  for (const auto& frag : fragments()) {
    for (int i = 0; i < 40; ++i) {
      Sentence s = random_sentence(rng, sig, frag, opts);
      NormalForm nf = normal_form(s, sig, frag);
      CHECK(validate_tree(nf.tree(), frag).valid);
      for (int j = 0; j < 10; ++j) {
        KripkeModel m = generate_random_model(rng(), 1 + j % 4, 0.4, sig);
        for (StateId w = 0; w < m.size(); ++w)
          CHECK(nf.contains(char_formula(nf.tree(), {m, w})) == satisfies({m, w}, s));
      }
    }
  }
  auto full = FragmentConfig::full();
  Sentence s = parse_sentence("~p & <l>p", sig, full);
  NormalForm nf = normal_form(s, sig, full);
  CHECK(print_tree(nf.tree()) == "(idle (dia l leaf))");
  GamePool pool;
  auto all = enumerate_game_sentences(nf.tree(), 1 << 12, pool);
  std::vector<Sentence> members;
  for (const auto& g : all)
    if (nf.contains(g)) members.push_back(lower_game_sentence(g));
  Sentence big = Sentence::disj(members);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    KripkeModel m = generate_random_model(seed, 3, 0.4, sig);
    for (StateId w = 0; w < m.size(); ++w) CHECK(satisfies({m, w}, big) == satisfies({m, w}, s));
  }
  CHECK_THROWS_AS(normal_form(s, sig, FragmentConfig({Op::At})), FragmentError);
}
