#pragma once

// Gameboard trees: nodes carry signatures, edges carry the move allowed in
// that round of an Ehrenfeucht-Fraisse game. Trees are immutable and may
// share subtrees.

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hdpl/syntax.hpp"

namespace hdpl {

class EdgeLabel {
 public:
  /// Declaration order is the canonical sibling order.
  enum class Kind : std::uint8_t { Idle, Store, Exists, At, Dia };

  static EdgeLabel idle() { return EdgeLabel(Kind::Idle, {}, std::nullopt); }
  static EdgeLabel store() { return EdgeLabel(Kind::Store, {}, std::nullopt); }
  static EdgeLabel exists() { return EdgeLabel(Kind::Exists, {}, std::nullopt); }
  static EdgeLabel at(std::string name) { return EdgeLabel(Kind::At, std::move(name), std::nullopt); }
  static EdgeLabel dia(Action a) { return EdgeLabel(Kind::Dia, {}, std::move(a)); }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }  ///< At
  const Action& action() const { return *action_; }  ///< Dia
  /// Store and Exists extend the signature of the child.
  bool extends() const { return kind_ == Kind::Store || kind_ == Kind::Exists; }

  std::string to_string() const;
  friend bool operator==(const EdgeLabel& a, const EdgeLabel& b) {
    return a.kind_ == b.kind_ && a.name_ == b.name_ && a.action_ == b.action_;
  }

 private:
  EdgeLabel(Kind k, std::string n, std::optional<Action> a)
      : kind_(k), name_(std::move(n)), action_(std::move(a)) {}
  Kind kind_;
  std::string name_;
  std::optional<Action> action_;
};

class GameboardTree;
using TreePtr = std::shared_ptr<const GameboardTree>;

struct TreeEdge {
  EdgeLabel label;
  TreePtr child;
};

class GameboardTree {
 public:
  static TreePtr leaf(Signature sig);
  /// No checks; see `validate_tree`.
  static TreePtr node(Signature sig, std::vector<TreeEdge> children);

  const Signature& signature() const { return sig_; }
  const std::vector<TreeEdge>& children() const { return children_; }
  bool is_leaf() const { return children_.empty(); }
  std::size_t height() const { return height_; }
  /// Node count of the unfolded tree.
  std::size_t node_count() const { return nodes_; }
  /// Child under `label`, if any.
  TreePtr child(const EdgeLabel& label) const;

  GameboardTree(Signature sig, std::vector<TreeEdge> children);

 private:
  Signature sig_;
  std::vector<TreeEdge> children_;
  std::size_t height_ = 0;
  std::size_t nodes_ = 1;
};

struct TreeReport {
  bool valid = true;
  std::vector<std::string> problems;  ///< "path: message"
};

/// Checks child signatures, sibling label uniqueness, symbol validity and
/// fragment gating at every node.
TreeReport validate_tree(const TreePtr& tr, const FragmentConfig& frag);

/// Every node above `height` gets one child per enabled move: idle, store,
/// exists, one @ per nominal and variable, one diamond per supplied action.
/// Equal subtrees are shared.
TreePtr complete_tree(const Signature& sig, const FragmentConfig& frag, std::size_t height,
                      const std::vector<Action>& actions);

/// The base relations as actions.
std::vector<Action> base_actions(const Signature& sig);

/// Text format:
///   tree ::= "leaf" | "(" edge ")" | "(branch" ("(" edge ")")+ ")"
///   edge ::= "idle" tree | "down" tree | "exists" tree | "at" IDENT tree
///          | "dia" ACT tree
/// Throws ParseError, SymbolError, FragmentError, or Error on invalid trees.
TreePtr parse_tree(std::string_view text, const Signature& sig, const FragmentConfig& frag);
std::string print_tree(const TreePtr& tr);

/// `sub` is obtained from `tr` by deleting edges (with their subtrees).
bool tree_includes(const TreePtr& tr, const TreePtr& sub);

/// Deletes each edge independently with probability `drop`.
TreePtr random_prune(std::mt19937_64& rng, const TreePtr& tr, double drop);

/// Cuts every branch at depth `height`.
TreePtr truncate(const TreePtr& tr, std::size_t height);

/// Union of two trees over the same root signature, matching edges by label.
TreePtr merge_trees(const TreePtr& a, const TreePtr& b);

/// A random valid tree of height at most `height`; each enabled move is kept
/// with probability `density`.
TreePtr random_tree(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                    std::size_t height, const std::vector<Action>& actions, double density);

/// Structural equality of unfolded trees.
bool same_tree(const TreePtr& a, const TreePtr& b);

}  // namespace hdpl
