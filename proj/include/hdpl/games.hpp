#pragma once

// Game sentences over gameboard trees, characteristic formulas, the finite
// Ehrenfeucht-Fraisse game and normal forms.
//
// A game sentence over a tree node records the signs of the node's basic
// sentences and one component per child edge: a set of child sentences for
// diamond and exists edges, a single child sentence for the others.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hdpl/gameboard.hpp"
#include "hdpl/kripke.hpp"

namespace hdpl {

class GameSentence;
using GamePtr = std::shared_ptr<const GameSentence>;

class GamePool;

class GameSentence {
 public:
  /// `signs` is indexed like `basic_sentences(tree->signature())`;
  /// `components[i]` belongs to `tree->children()[i]`. Sets are sorted and
  /// deduplicated; single-child components must have exactly one member.
  static GamePtr make(GamePool& pool, TreePtr tree, StateSet signs,
                      std::vector<std::vector<GamePtr>> components);

  const TreePtr& tree() const { return tree_; }
  const StateSet& signs() const { return signs_; }
  const std::vector<std::vector<GamePtr>>& components() const { return components_; }
  /// Component under `label`, or nullptr.
  const std::vector<GamePtr>* component(const EdgeLabel& label) const;
  std::size_t hash() const { return hash_; }

  /// Total order among sentences over the same tree node.
  friend int compare(const GameSentence& a, const GameSentence& b);
  friend bool operator==(const GameSentence& a, const GameSentence& b) {
    return compare(a, b) == 0;
  }

  GameSentence(TreePtr tree, StateSet signs, std::vector<std::vector<GamePtr>> components);

 private:
  TreePtr tree_;
  StateSet signs_;
  std::vector<std::vector<GamePtr>> components_;
  std::size_t hash_;
};

bool same_sentence(const GamePtr& a, const GamePtr& b);

/// Interns game sentences so that structurally equal sentences built in the
/// same pool share one node.
class GamePool {
 public:
  GamePtr intern(GameSentence g);
  std::size_t size() const { return set_.size(); }

 private:
  struct Hash {
    std::size_t operator()(const GamePtr& g) const { return g->hash(); }
  };
  struct Eq {
    bool operator()(const GamePtr& a, const GamePtr& b) const;
  };
  std::unordered_set<GamePtr, Hash, Eq> set_;
};

/// The unique game sentence over `tr` satisfied by `pm`. The model's
/// signature must be the root signature of `tr`.
GamePtr char_formula(const TreePtr& tr, const PointedModel& pm, GamePool& pool);
GamePtr char_formula(const TreePtr& tr, const PointedModel& pm);

/// The sentence a game sentence stands for. Diamond and exists components
/// with set S become the conjunction of one existential per member and a
/// universal over the disjunction of S.
Sentence lower_game_sentence(const GamePtr& g);

/// Compact text rendering: "[+p -q | dia l {...} | down [...]]".
std::string print_game_sentence(const GamePtr& g);

/// Number of game sentences over `tr`; nullopt when it exceeds 2^62.
std::optional<std::uint64_t> theta_size(const TreePtr& tr);

/// All game sentences over `tr`. Throws Error if there are more than `cap`.
std::vector<GamePtr> enumerate_game_sentences(const TreePtr& tr, std::size_t cap,
                                              GamePool& pool);

// ---------------------------------------------------------------------------
// The finite game

enum class Side : std::uint8_t { Left, Right };
enum class Player : std::uint8_t { Abelard, Eloise };
enum class GameStatus : std::uint8_t { Ongoing, AbelardWon, EloiseWon };

/// A half-move. Abelard names a child edge, the side he plays on and, for
/// diamond and exists edges, his target state there. Eloise answers with a
/// target on the other side. Deterministic edges (idle, down, at) carry no
/// target and complete the round at once.
struct GameMove {
  std::size_t edge = 0;
  Side side = Side::Left;
  std::optional<StateId> target;

  friend bool operator==(const GameMove&, const GameMove&) = default;
};

struct GameState {
  TreePtr node;
  StateId left = 0;
  StateId right = 0;
  /// Interpretations of the node's named symbols on both sides.
  std::vector<StateId> named_left, named_right;
  std::optional<GameMove> pending;  ///< Abelard's half-move awaiting an answer
  GameStatus status = GameStatus::Ongoing;
  std::size_t round = 0;
  std::string reason;  ///< why the game ended
};

class IllegalMove : public Error {
 public:
  using Error::Error;
};

/// One completed round of a play.
struct TraceStep {
  EdgeLabel label;
  Side side;
  std::optional<StateId> abelard;  ///< diamond / exists target
  std::optional<StateId> eloise;   ///< answer; empty when none existed
};

struct EfResult {
  bool eloise_wins = false;
  /// Rounds Abelard needs to win; 0 when the game property fails at the start.
  std::size_t rounds = 0;
  /// Abelard's fastest win against Eloise's longest defence, ending in a
  /// game property violation or an unanswerable move. Empty if she wins.
  std::vector<TraceStep> trace;
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::size_t>& v) const;
};

/// The game over a tree between two models over its root signature. The game
/// property is checked at the start and after every round; Eloise also
/// loses when she has no answer. She wins once Abelard has no move left.
class EfGame {
 public:
  EfGame(TreePtr tree, KripkeModel left, KripkeModel right);

  const TreePtr& tree() const { return tree_; }
  const KripkeModel& left() const { return left_; }
  const KripkeModel& right() const { return right_; }

  GameState initial(StateId w, StateId v) const;
  Player to_move(const GameState& s) const {
    return s.pending ? Player::Eloise : Player::Abelard;
  }
  /// Moves for the player to move; empty once the game is over.
  std::vector<GameMove> legal_moves(const GameState& s) const;
  /// Throws IllegalMove if `m` is not among `legal_moves(s)`.
  GameState step(const GameState& s, const GameMove& m) const;

  /// Rounds Abelard needs from a state where he is to move; nullopt if
  /// Eloise wins.
  std::optional<std::size_t> abelard_rounds(const GameState& s) const;
  /// An optimal move for the player to move: Abelard wins fastest, Eloise
  /// survives longest.
  GameMove best_move(const GameState& s) const;

  EfResult solve(StateId w, StateId v) const;
  std::string describe(const GameMove& m, const GameState& s) const;

 private:
  struct Pos {
    const GameboardTree* node;
    StateId w, v;
    std::vector<StateId> nl, nr;
  };
  static constexpr std::size_t kNever = static_cast<std::size_t>(-1);

  Pos pos_of(const GameState& s) const;
  bool agree(const Pos& p) const;
  std::string disagreement(const Pos& p) const;
  const Relation& relation(const Action& a, Side side) const;
  StateSet targets(const EdgeLabel& label, Side side, const Pos& p) const;
  bool abelard_can_move(const Pos& p) const;
  Pos next(const Pos& p, std::size_t edge, Side side, std::optional<StateId> a,
           std::optional<StateId> e) const;
  std::size_t value(const Pos& p) const;
  /// Eloise's best answer to Abelard's target `t`; rounds until Abelard wins.
  std::size_t answer_value(const Pos& p, std::size_t edge, Side side, StateId t,
                           std::optional<StateId>* answer) const;
  std::size_t move_value(const Pos& p, const GameMove& m) const;
  GameState after_round(const GameState& s, std::size_t edge, Side side,
                        std::optional<StateId> a, std::optional<StateId> e) const;

  TreePtr tree_;
  KripkeModel left_, right_;
  mutable std::unordered_map<Action, std::pair<Relation, Relation>> actions_;
  mutable std::unordered_map<std::vector<std::size_t>, std::size_t, KeyHash> memo_;
};

EfResult ef_solve(const TreePtr& tr, const PointedModel& left, const PointedModel& right);

/// Replays a trace; true if every step is legal and Eloise has lost at the end.
bool replay_trace(const TreePtr& tr, const PointedModel& left, const PointedModel& right,
                  const std::vector<TraceStep>& trace);

// ---------------------------------------------------------------------------
// Normal forms

/// A tree `tree()` and the set of game sentences over it whose disjunction
/// is equivalent to the source sentence.
class NormalForm {
 public:
  struct Test;
  NormalForm(TreePtr tree, std::shared_ptr<const Test> test)
      : tree_(std::move(tree)), test_(std::move(test)) {}

  const TreePtr& tree() const { return tree_; }
  /// Membership for sentences over `tree()` or over any tree including it.
  bool contains(const GamePtr& g) const;

 private:
  TreePtr tree_;
  std::shared_ptr<const Test> test_;
};

/// Throws FragmentError if `s` is outside `frag`, SymbolError if it is not a
/// sentence over `sig`.
NormalForm normal_form(const Sentence& s, const Signature& sig, const FragmentConfig& frag);

}  // namespace hdpl
