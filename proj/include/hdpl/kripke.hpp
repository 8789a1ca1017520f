#pragma once

// Finite Kripke structures over a signature: the frame (states, relations,
// valuation) is shared between a model and its expansions, which differ only
// in how nominals and variables are interpreted.

#include <boost/dynamic_bitset.hpp>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "hdpl/syntax.hpp"

namespace hdpl {

using StateId = std::size_t;
using StateSet = boost::dynamic_bitset<>;

/// Binary relation on {0..n-1}, stored as successor rows.
class Relation {
 public:
  explicit Relation(std::size_t n = 0) : rows_(n, StateSet(n)) {}
  static Relation identity(std::size_t n);
  static Relation full(std::size_t n);

  std::size_t universe() const { return rows_.size(); }
  void add(StateId a, StateId b) { rows_[a].set(b); }
  bool has(StateId a, StateId b) const { return rows_[a].test(b); }
  const StateSet& successors(StateId a) const { return rows_[a]; }
  StateSet predecessors(StateId b) const;
  StateSet image(const StateSet& from) const;
  std::size_t pair_count() const;
  std::vector<std::pair<StateId, StateId>> pairs() const;

  Relation unite(const Relation& other) const;
  /// Diagrammatic composition: first this, then `other`.
  Relation compose(const Relation& other) const;
  /// Least reflexive and transitive superset, by iterated squaring.
  Relation closure() const;
  bool subset_of(const Relation& other) const;

  std::size_t hash() const;
  friend bool operator==(const Relation&, const Relation&) = default;
  friend bool operator<(const Relation& a, const Relation& b) { return a.rows_ < b.rows_; }

 private:
  std::vector<StateSet> rows_;
};

class KripkeModel {
 public:
  /// `named[i]` interprets `sig.named(i)`; `relations` and `props` follow the
  /// signature order, `props[j]` being the set of states where prop j holds.
  KripkeModel(Signature sig, std::vector<std::string> state_names, std::vector<StateId> named,
              std::vector<Relation> relations, std::vector<StateSet> props);

  const Signature& signature() const { return sig_; }
  std::size_t size() const { return frame_->state_names.size(); }
  const std::string& state_name(StateId s) const { return frame_->state_names.at(s); }
  std::optional<StateId> state_index(std::string_view name) const;
  /// Throws Error for unknown names.
  StateId state(std::string_view name) const;

  /// Interpretation of `sig.named(i)`.
  StateId named(std::size_t i) const { return named_[i]; }
  const std::vector<StateId>& named_interp() const { return named_; }
  /// Interpretation of a nominal or variable by name.
  StateId denotation(std::string_view name) const;

  const Relation& relation(std::size_t i) const { return frame_->relations[i]; }
  const Relation& relation(std::string_view name) const;
  const StateSet& prop_states(std::size_t i) const { return frame_->props[i]; }
  bool holds(std::size_t prop, StateId s) const { return frame_->props[prop].test(s); }

  /// M[x <- w]; `var` must be the next fresh variable of the signature.
  KripkeModel expand(const std::string& var, StateId w) const;
  /// M[x <- w] for the variable `extend_signature` issues.
  KripkeModel expand(StateId w) const;
  /// Restriction to a signature whose pools are included in ours and whose
  /// variables are a prefix of ours.
  KripkeModel reduct(const Signature& target) const;

  /// Same frame and named interpretation; true also for reducts/expansions
  /// that happen to coincide.
  friend bool operator==(const KripkeModel& a, const KripkeModel& b);

 private:
  struct Frame {
    std::vector<std::string> state_names;
    std::vector<Relation> relations;
    std::vector<StateSet> props;
  };
  KripkeModel(Signature sig, std::shared_ptr<const Frame> frame, std::vector<StateId> named)
      : sig_(std::move(sig)), frame_(std::move(frame)), named_(std::move(named)) {}

  Signature sig_;
  std::shared_ptr<const Frame> frame_;
  std::vector<StateId> named_;
};

struct PointedModel {
  KripkeModel model;
  StateId current;

  PointedModel(KripkeModel m, StateId w);
};

/// Incremental construction by state names.
class ModelBuilder {
 public:
  explicit ModelBuilder(Signature sig) : sig_(std::move(sig)) {}

  ModelBuilder& state(const std::string& name);
  ModelBuilder& states(const std::vector<std::string>& names);
  ModelBuilder& edge(const std::string& rel, const std::string& from, const std::string& to);
  ModelBuilder& label(const std::string& prop, const std::string& state);
  ModelBuilder& name(const std::string& nominal, const std::string& state);
  KripkeModel build() const;

 private:
  StateId ensure(const std::string& name);
  Signature sig_;
  std::vector<std::string> names_;
  std::vector<std::tuple<std::string, StateId, StateId>> edges_;
  std::vector<std::pair<std::string, StateId>> labels_;
  std::vector<std::pair<std::string, StateId>> nominal_;
};

Relation interpret_action(const KripkeModel& m, const Action& a);

/// Bijection h (indexed by left states) with h(current) = current that
/// preserves nominal and variable interpretations, relations in both
/// directions and valuations, if one exists.
std::optional<std::vector<StateId>> find_isomorphism(const PointedModel& m, const PointedModel& n);

/// Re-checks every preservation clause for a candidate map.
bool is_isomorphism(const PointedModel& m, const PointedModel& n, const std::vector<StateId>& h);

/// Every state reachable from the current one along the union of relations.
bool is_rooted(const PointedModel& pm);

/// Finite models are image-finite.
inline bool is_image_finite(const KripkeModel&) { return true; }

/// Deterministic in the seed; nominals and variables are assigned uniformly,
/// each edge is present with probability `edge_density` and each (prop,
/// state) pair with probability `prop_density`.
KripkeModel generate_random_model(std::uint64_t seed, std::size_t n_states, double edge_density,
                                  const Signature& sig, double prop_density = 0.5);

/// Copy of `m` with states permuted: state i becomes perm[i].
KripkeModel permute_states(const KripkeModel& m, const std::vector<StateId>& perm);

/// Copy of `m` with one extra state: a twin of `s` with the same labels,
/// successors and predecessors, named by no nominal. The result is modally
/// bisimilar to `m`; binders can still separate the twins through a cycle.
KripkeModel clone_state(const KripkeModel& m, StateId s);

/// Two models over `sig` with 1..max_states states each (a clone can add
/// one more). In roughly equal shares the right model is independent of the
/// left, a permutation of it, or a copy with one state cloned.
std::pair<KripkeModel, KripkeModel> generate_random_pair(std::uint64_t seed, std::size_t max_states,
                                                         double edge_density, const Signature& sig);

/// Built-in models from the worked examples.
namespace fixtures {

/// Signature: no nominals, relation l, prop p.
Signature loop_signature();
/// Left: two states on an l-cycle, each with a p-labelled dead end.
KripkeModel loop_left();
/// Right: an l-chain 0..depth-1 where every chain state has a p-labelled dead
/// end; the first `depth` chain states of an infinite model.
KripkeModel loop_right(std::size_t depth);

/// Left: 0 with two p-children. Right: 0 with one p-child.
std::pair<KripkeModel, KripkeModel> branching_pair();
/// Left: 0 with two p-children plus an isolated state. Right: 0 with two
/// p-children plus a q-labelled edge 3 -> 4.
std::pair<KripkeModel, KripkeModel> disconnected_pair();

/// Signature: nominals k1 k2, relation l, no props.
Signature chain_signature();
/// l-chain of n states with k1 on the first and k2 on the last.
KripkeModel named_chain(std::size_t n);
/// Two states on an l-cycle, k1 and k2 on different states.
KripkeModel named_cycle();
/// The `loop_left` frame over the chain signature with the given placement
/// of k1 and k2 (states are 0, 1, a, b in index order).
KripkeModel named_loop(StateId k1, StateId k2);
/// A sentence true exactly in finite end-nominated chains.
std::string finite_chain_formula();

}  // namespace fixtures

}  // namespace hdpl
