#pragma once

// The countable game as a finite safety game, omega-bisimulation families,
// back-and-forth systems, and the Hennessy-Milner and rooted-isomorphism
// harnesses.
//
// Arena positions abstract the named-state sequences of a play into the set
// of pairs they relate plus the current pair; order and duplicates never
// affect legal moves or the game property.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdpl/gameboard.hpp"
#include "hdpl/kripke.hpp"

namespace hdpl {

/// A representative action and its denotations in both models.
struct ActionPair {
  Action witness;
  Relation left, right;
};

/// Least set of denotation pairs containing the base relations and closed
/// under the enabled constructors, applied pointwise. Witnesses are the
/// smallest terms found by breadth-first combination.
std::vector<ActionPair> action_pair_closure(const KripkeModel& left, const KripkeModel& right,
                                            const FragmentConfig& frag);

struct OmegaResult {
  bool eloise_wins = false;
  /// Rounds Abelard needs to win from the start; empty if Eloise wins.
  std::optional<std::size_t> rank;
  /// Largest finite rank over the explored arena (0 when nothing is lost):
  /// the number of refinement rounds before the fixpoint stabilised.
  std::size_t iterations = 0;
  std::size_t positions = 0;
};

/// The arena for one pair of models under one fragment. Positions are
/// explored on demand; the fixpoint is recomputed when new ones appear.
class OmegaArena {
 public:
  OmegaArena(FragmentConfig frag, KripkeModel left, KripkeModel right);

  const FragmentConfig& fragment() const { return frag_; }
  const KripkeModel& left() const { return left_; }
  const KripkeModel& right() const { return right_; }
  const std::vector<ActionPair>& actions() const { return actions_; }

  OmegaResult solve(StateId w, StateId v);
  /// Eloise wins from the position with these named pairs and current pair.
  bool safe(const std::vector<std::pair<StateId, StateId>>& pairs, StateId w, StateId v);
  /// Rounds Abelard needs from that position; nullopt if Eloise wins.
  std::optional<std::size_t> rank(const std::vector<std::pair<StateId, StateId>>& pairs,
                                  StateId w, StateId v);

 private:
  struct Key {
    StateSet pairs;
    StateId w, v;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  struct Position {
    Key key;
    bool property = false;
    /// One entry per Abelard move: the positions Eloise may answer with.
    std::vector<std::vector<std::size_t>> moves;
    std::size_t rank = 0;
    bool lost = false;
  };

  Key make_key(const std::vector<std::pair<StateId, StateId>>& pairs, StateId w, StateId v) const;
  std::size_t intern(const Key& k);
  bool property(const Key& k) const;
  void expand(std::size_t id);
  std::size_t explore(const Key& root);
  void refine();

  FragmentConfig frag_;
  KripkeModel left_, right_;
  std::vector<ActionPair> actions_;
  std::vector<Position> positions_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
  std::size_t solved_upto_ = 0;
  std::size_t iterations_ = 0;
};

/// Decides whether Eloise wins the countable game from (left, right).
OmegaResult omega_solve(const FragmentConfig& frag, const PointedModel& left,
                        const PointedModel& right);

// ---------------------------------------------------------------------------
// Omega-bisimulation families

struct BisimEntry {
  std::vector<StateId> left_tuple;
  StateId left = 0;
  std::vector<StateId> right_tuple;
  StateId right = 0;

  friend auto operator<=>(const BisimEntry&, const BisimEntry&) = default;
};

std::string to_string(const BisimEntry& e, const KripkeModel& left, const KripkeModel& right);

/// Relations B_0 .. B_max_level; entries at level l have tuples of length l.
struct LBisimFamily {
  std::size_t max_level = 0;
  std::vector<std::set<BisimEntry>> levels;

  explicit LBisimFamily(std::size_t max_level = 0) : max_level(max_level), levels(max_level + 1) {}
  bool contains(const BisimEntry& e) const;
  void add(BisimEntry e);
  std::size_t size() const;
};

struct BisimReport {
  bool valid = true;
  bool empty = false;
  /// Store and exists clauses are checked for levels below this bound.
  std::size_t extension_checked_below = 0;
  std::vector<std::string> violations;  ///< "(clause) at level l: ..."
};

/// Checks every enabled clause literally on the supplied entries. Throws
/// Error on malformed tuples.
BisimReport validate_bisim_family(const LBisimFamily& fam, const FragmentConfig& frag,
                                  const KripkeModel& left, const KripkeModel& right);

/// Entries reachable from the start along moves that keep Eloise winning,
/// up to tuples of length `max_level`. Throws Error if Eloise loses.
LBisimFamily extract_bisim_witness(const FragmentConfig& frag, const PointedModel& left,
                                   const PointedModel& right, std::size_t max_level);

/// Level l of the result holds (w, v) with tuples t, u whenever level l+1 of
/// `fam` holds (mu t, w) and (nu u, v); it relates the expansions naming mu
/// and nu. The anchor must be a level-1 entry. Throws Error otherwise.
LBisimFamily shift_family(const LBisimFamily& fam, const BisimEntry& anchor);

struct PartialIsoReport {
  std::vector<std::pair<StateId, StateId>> map;  ///< sorted by left state
  bool well_defined = true;  ///< functional and injective
  bool basic_preserving = true;
  bool relation_preserving = true;
  std::vector<std::string> problems;
  bool ok() const { return well_defined && basic_preserving && relation_preserving; }
};

/// The map sending the i-th left tuple element to the i-th right one, with
/// all three partial-isomorphism conditions re-checked.
PartialIsoReport partial_iso_from_tuple(const BisimEntry& e, const KripkeModel& left,
                                        const KripkeModel& right);

// ---------------------------------------------------------------------------
// Back-and-forth systems

/// Injective partial map between states, sorted by left state.
struct PartialMap {
  std::vector<std::pair<StateId, StateId>> pairs;

  std::optional<StateId> image(StateId w) const;
  std::optional<StateId> preimage(StateId v) const;
  bool maps(StateId w, StateId v) const { return image(w) == v; }
  friend auto operator<=>(const PartialMap&, const PartialMap&) = default;
};

struct BackAndForthSystem {
  std::vector<PartialMap> maps;

  bool empty() const { return maps.empty(); }
  bool related(StateId w, StateId v) const;
};

/// All injective partial maps whose pairs agree on basic sentences.
std::vector<PartialMap> basic_partial_isos(const KripkeModel& left, const KripkeModel& right);

/// The greatest back-and-forth system: every basic partial isomorphism,
/// minus those lacking a required extension, until stable. Extensions are
/// searched among one-point extensions, which gives the same fixpoint as
/// searching all extensions because the surviving family is closed under
/// restriction.
BackAndForthSystem max_back_and_forth(const FragmentConfig& frag, const KripkeModel& left,
                                      const KripkeModel& right);

bool bf_related(const FragmentConfig& frag, const PointedModel& left, const PointedModel& right);

/// Store is enabled, and retrieve is enabled whenever diamond or exists is.
bool bf_coincidence_hypotheses(const FragmentConfig& frag);

// ---------------------------------------------------------------------------
// Harnesses

struct HmReport {
  std::size_t height = 0;         ///< heights 1..height were compared
  bool formulas_agree = false;    ///< characteristic formulas on complete trees
  bool omega_wins = false;
  bool bf = false;
  bool hypotheses = false;        ///< back-and-forth coincidence expected
  bool games_agree() const { return formulas_agree == omega_wins; }
  bool all_agree() const { return games_agree() && omega_wins == bf; }
};

/// Throws FragmentError if exists is enabled or Error on signature mismatch.
HmReport hennessy_milner_check(const FragmentConfig& frag, const PointedModel& left,
                               const PointedModel& right);

struct RootedIsoReport {
  bool isomorphic = false;
  bool omega_wins = false;
  bool agree() const { return isomorphic == omega_wins; }
};

/// Throws FragmentError unless diamond, at and store are enabled, and Error
/// if either side is not rooted.
RootedIsoReport rooted_iso_check(const FragmentConfig& frag, const PointedModel& left,
                                 const PointedModel& right);

}  // namespace hdpl
