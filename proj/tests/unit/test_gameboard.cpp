#include <doctest.h>

#include "hdpl/gameboard.hpp"

using namespace hdpl;

namespace {

Signature named_sig() { return Signature::make({"k"}, {"l"}, {"p"}); }

std::size_t count_label(const TreePtr& t, EdgeLabel::Kind k) {
  std::size_t n = 0;
  for (const auto& e : t->children()) n += (e.label.kind() == k) + count_label(e.child, k);
  return n;
}

}  // namespace

TEST_CASE("validation") {
  auto sig = named_sig();
  auto full = FragmentConfig::full();
  CHECK(validate_tree(GameboardTree::leaf(sig), full).valid);

  auto dup = GameboardTree::node(sig, {{EdgeLabel::idle(), GameboardTree::leaf(sig)},
                                       {EdgeLabel::idle(), GameboardTree::leaf(sig)}});
  auto r = validate_tree(dup, full);
  CHECK(!r.valid);
  REQUIRE(r.problems.size() == 1);
  CHECK(r.problems[0].find("duplicate") != std::string::npos);

  // A store edge whose child keeps the parent signature.
  auto bad_store = GameboardTree::node(sig, {{EdgeLabel::store(), GameboardTree::leaf(sig)}});
  CHECK(!validate_tree(bad_store, full).valid);
  auto good_store = GameboardTree::node(
      sig, {{EdgeLabel::store(), GameboardTree::leaf(extend_signature(sig).first)}});
  CHECK(validate_tree(good_store, full).valid);
  CHECK(!validate_tree(good_store, FragmentConfig({Op::Diamond})).valid);

  // An idle child over an extended signature.
  auto bad_idle = GameboardTree::node(
      sig, {{EdgeLabel::idle(), GameboardTree::leaf(extend_signature(sig).first)}});
  CHECK(!validate_tree(bad_idle, full).valid);

  auto unknown_at = GameboardTree::node(sig, {{EdgeLabel::at("x0"), GameboardTree::leaf(sig)}});
  CHECK(!validate_tree(unknown_at, full).valid);

  auto star = GameboardTree::node(
      sig, {{EdgeLabel::dia(Action::star(Action::rel("l"))), GameboardTree::leaf(sig)}});
  CHECK(validate_tree(star, full).valid);
  CHECK(!validate_tree(star, FragmentConfig({Op::Diamond})).valid);
}

TEST_CASE("complete trees") {
  auto sig = Signature::make({}, {"l"}, {"p"});
  auto t = complete_tree(sig, FragmentConfig({Op::Diamond}), 2, base_actions(sig));
  // Each internal node has idle and dia l: 1 + 2 + 4.
  CHECK(t->node_count() == 7);
  CHECK(t->height() == 2);
  CHECK(validate_tree(t, FragmentConfig({Op::Diamond})).valid);

  auto s = complete_tree(named_sig(), FragmentConfig({Op::Store}), 3, {});
  CHECK(count_label(s, EdgeLabel::Kind::At) == 0);
  CHECK(count_label(s, EdgeLabel::Kind::Store) > 0);
  CHECK(validate_tree(s, FragmentConfig({Op::Store})).valid);

  auto a = complete_tree(named_sig(), FragmentConfig({Op::At, Op::Store}), 2, {});
  // Root: idle, down, at k. The store child also has at x0.
  CHECK(a->children().size() == 3);
  CHECK(a->child(EdgeLabel::store())->children().size() == 4);
  CHECK(validate_tree(a, FragmentConfig({Op::At, Op::Store})).valid);

  CHECK_THROWS_AS(complete_tree(sig, FragmentConfig({Op::Diamond}), 1, {}), Error);
  CHECK_THROWS_AS(complete_tree(sig, FragmentConfig({Op::Diamond}), 1,
                                {Action::star(Action::rel("l"))}),
                  FragmentError);
}

TEST_CASE("text format") {
  auto sig = Signature::make({}, {"l"}, {"p"});
  auto full = FragmentConfig::full();
  auto t = parse_tree("(down (dia l (dia l leaf)))", sig, full);
  CHECK(t->height() == 3);
  CHECK(t->children()[0].child->signature().bound_vars == std::vector<std::string>{"x0"});
  CHECK(print_tree(t) == "(down (dia l (dia l leaf)))");

  CHECK(parse_tree("leaf", sig, full)->is_leaf());

  auto nsig = named_sig();
  auto b = parse_tree("(branch (idle leaf) (at k leaf))", nsig, full);
  CHECK(b->children().size() == 2);
  CHECK(print_tree(b) == "(branch (idle leaf) (at k leaf))");

  auto c = parse_tree("(branch (dia (l;l)* + l leaf) (down (at x0 leaf)))", sig, full);
  CHECK(same_tree(parse_tree(print_tree(c), sig, full), c));

  CHECK_THROWS_AS(parse_tree("(dia l)", sig, full), ParseError);
  CHECK_THROWS_AS(parse_tree("(hop leaf)", sig, full), ParseError);
  CHECK_THROWS_AS(parse_tree("(dia r leaf)", sig, full), SymbolError);
  CHECK_THROWS_AS(parse_tree("(branch (idle leaf) (idle leaf))", sig, full), Error);
  CHECK_THROWS_AS(parse_tree("(down leaf)", sig, FragmentConfig({Op::Diamond})), Error);
  CHECK_THROWS_AS(parse_tree("(at x0 leaf)", sig, full), Error);
}

TEST_CASE("random trees round trip and prune") {
  auto sig = named_sig();
  auto full = FragmentConfig::full();
  std::mt19937_64 rng(11);
  std::vector<Action> acts = {Action::rel("l"), Action::star(Action::rel("l"))};
  for (int i = 0; i < 200; ++i) {
    auto t = random_tree(rng, sig, full, 3, acts, 0.4);
    CHECK(validate_tree(t, full).valid);
    auto back = parse_tree(print_tree(t), sig, full);
    CHECK(same_tree(back, t));
    auto p = random_prune(rng, t, 0.3);
    CHECK(tree_includes(t, p));
    CHECK(validate_tree(p, full).valid);
    auto u = truncate(t, 1);
    CHECK(u->height() <= 1);
    CHECK(tree_includes(t, u));
    auto m = merge_trees(p, u);
    CHECK(tree_includes(t, m));
    CHECK(tree_includes(m, p));
    CHECK(tree_includes(m, u));
  }
}

TEST_CASE("inclusion respects signatures") {
  auto sig = named_sig();
  auto ext = extend_signature(sig).first;
  CHECK(!tree_includes(GameboardTree::leaf(sig), GameboardTree::leaf(ext)));
  auto full = FragmentConfig::full();
  auto t = parse_tree("(branch (idle (dia l leaf)) (dia l leaf))", sig, full);
  CHECK(tree_includes(t, parse_tree("(idle leaf)", sig, full)));
  CHECK(!tree_includes(t, parse_tree("(at k leaf)", sig, full)));
  CHECK(!tree_includes(t, parse_tree("(dia l (dia l leaf))", sig, full)));
}
