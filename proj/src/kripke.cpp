#include "hdpl/kripke.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

namespace hdpl {

// ---------------------------------------------------------------------------
// Relation

Relation Relation::identity(std::size_t n) {
  Relation r(n);
  for (StateId i = 0; i < n; ++i) r.add(i, i);
  return r;
}

Relation Relation::full(std::size_t n) {
  Relation r(n);
  for (auto& row : r.rows_) row.set();
  return r;
}

StateSet Relation::predecessors(StateId b) const {
  StateSet out(universe());
  for (StateId a = 0; a < universe(); ++a)
    if (rows_[a].test(b)) out.set(a);
  return out;
}

StateSet Relation::image(const StateSet& from) const {
  StateSet out(universe());
  for (auto a = from.find_first(); a != StateSet::npos; a = from.find_next(a)) out |= rows_[a];
  return out;
}

std::size_t Relation::pair_count() const {
  std::size_t n = 0;
  for (const auto& row : rows_) n += row.count();
  return n;
}

std::vector<std::pair<StateId, StateId>> Relation::pairs() const {
  std::vector<std::pair<StateId, StateId>> out;
  for (StateId a = 0; a < universe(); ++a)
    for (auto b = rows_[a].find_first(); b != StateSet::npos; b = rows_[a].find_next(b))
      out.emplace_back(a, b);
  return out;
}

Relation Relation::unite(const Relation& other) const {
  Relation r = *this;
  for (StateId a = 0; a < universe(); ++a) r.rows_[a] |= other.rows_[a];
  return r;
}

Relation Relation::compose(const Relation& other) const {
  Relation r(universe());
  for (StateId a = 0; a < universe(); ++a) r.rows_[a] = other.image(rows_[a]);
  return r;
}

Relation Relation::closure() const {
  Relation r = unite(identity(universe()));
  while (true) {
    Relation sq = r.compose(r);
    if (sq == r) return r;
    r = std::move(sq);
  }
}

bool Relation::subset_of(const Relation& other) const {
  for (StateId a = 0; a < universe(); ++a)
    if (!rows_[a].is_subset_of(other.rows_[a])) return false;
  return true;
}

std::size_t Relation::hash() const {
  std::size_t h = universe();
  for (const auto& row : rows_) h = h * 1000003u ^ boost::hash_value(row);
  return h;
}

// ---------------------------------------------------------------------------
// KripkeModel

KripkeModel::KripkeModel(Signature sig, std::vector<std::string> state_names,
                         std::vector<StateId> named, std::vector<Relation> relations,
                         std::vector<StateSet> props)
    : sig_(std::move(sig)), named_(std::move(named)) {
  const std::size_t n = state_names.size();
  if (n == 0) throw Error("a model needs at least one state");
  if (named_.size() != sig_.named_count())
    throw Error("nominal interpretation is not total on the signature");
  for (StateId s : named_)
    if (s >= n) throw Error("nominal interpreted outside the state set");
  if (relations.size() != sig_.relations.size()) throw Error("relation count mismatch");
  for (const auto& r : relations)
    if (r.universe() != n) throw Error("relation over the wrong state set");
  if (props.size() != sig_.props.size()) throw Error("proposition count mismatch");
  for (const auto& p : props)
    if (p.size() != n) throw Error("valuation over the wrong state set");
  std::vector<std::string> sorted = state_names;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error("duplicate state name");
  frame_ = std::make_shared<const Frame>(
      Frame{std::move(state_names), std::move(relations), std::move(props)});
}

std::optional<StateId> KripkeModel::state_index(std::string_view name) const {
  const auto& names = frame_->state_names;
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<StateId>(it - names.begin());
}

StateId KripkeModel::state(std::string_view name) const {
  if (auto s = state_index(name)) return *s;
  throw Error("unknown state '" + std::string(name) + "'");
}

StateId KripkeModel::denotation(std::string_view name) const {
  auto i = sig_.named_index(name);
  if (!i) throw SymbolError("'" + std::string(name) + "' is not a nominal or variable");
  return named_[*i];
}

const Relation& KripkeModel::relation(std::string_view name) const {
  auto i = sig_.relation_index(name);
  if (!i) throw SymbolError("undeclared relation '" + std::string(name) + "'");
  return frame_->relations[*i];
}

KripkeModel KripkeModel::expand(const std::string& var, StateId w) const {
  if (var != next_variable(sig_))
    throw SymbolError("variable '" + var + "' is stale or collides; expected '" +
                      next_variable(sig_) + "'");
  return expand(w);
}

KripkeModel KripkeModel::expand(StateId w) const {
  if (w >= size()) throw Error("expansion witness outside the state set");
  auto [ext, var] = extend_signature(sig_);
  std::vector<StateId> named = named_;
  named.push_back(w);
  return KripkeModel(std::move(ext), frame_, std::move(named));
}

KripkeModel KripkeModel::reduct(const Signature& target) const {
  auto sub = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return std::all_of(a.begin(), a.end(), [&](const std::string& x) {
      return std::find(b.begin(), b.end(), x) != b.end();
    });
  };
  if (!sub(target.nominals, sig_.nominals) || !sub(target.relations, sig_.relations) ||
      !sub(target.props, sig_.props) || target.bound_vars.size() > sig_.bound_vars.size() ||
      !std::equal(target.bound_vars.begin(), target.bound_vars.end(), sig_.bound_vars.begin()))
    throw SymbolError("reduct target is not a sub-signature");
  std::vector<StateId> named;
  for (std::size_t i = 0; i < target.named_count(); ++i)
    named.push_back(denotation(target.named(i)));
  if (target.relations == sig_.relations && target.props == sig_.props)
    return KripkeModel(target, frame_, std::move(named));
  std::vector<Relation> rels;
  for (const auto& r : target.relations) rels.push_back(relation(r));
  std::vector<StateSet> props;
  for (const auto& p : target.props) props.push_back(frame_->props[*sig_.prop_index(p)]);
  return KripkeModel(target, frame_->state_names, std::move(named), std::move(rels),
                     std::move(props));
}

bool operator==(const KripkeModel& a, const KripkeModel& b) {
  if (!(a.sig_ == b.sig_) || a.named_ != b.named_) return false;
  if (a.frame_ == b.frame_) return true;
  return a.frame_->state_names == b.frame_->state_names &&
         a.frame_->relations == b.frame_->relations && a.frame_->props == b.frame_->props;
}

PointedModel::PointedModel(KripkeModel m, StateId w) : model(std::move(m)), current(w) {
  if (current >= model.size()) throw Error("current state outside the state set");
}

// ---------------------------------------------------------------------------
// ModelBuilder

StateId ModelBuilder::ensure(const std::string& name) {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it != names_.end()) return static_cast<StateId>(it - names_.begin());
  names_.push_back(name);
  return names_.size() - 1;
}

ModelBuilder& ModelBuilder::state(const std::string& name) {
  ensure(name);
  return *this;
}

ModelBuilder& ModelBuilder::states(const std::vector<std::string>& names) {
  for (const auto& n : names) ensure(n);
  return *this;
}

ModelBuilder& ModelBuilder::edge(const std::string& rel, const std::string& from,
                                 const std::string& to) {
  if (!sig_.is_relation(rel)) throw SymbolError("undeclared relation '" + rel + "'");
  StateId a = ensure(from);
  StateId b = ensure(to);
  edges_.emplace_back(rel, a, b);
  return *this;
}

ModelBuilder& ModelBuilder::label(const std::string& prop, const std::string& state) {
  if (!sig_.is_prop(prop)) throw SymbolError("undeclared proposition '" + prop + "'");
  labels_.emplace_back(prop, ensure(state));
  return *this;
}

ModelBuilder& ModelBuilder::name(const std::string& nominal, const std::string& state) {
  if (!sig_.named_index(nominal)) throw SymbolError("undeclared nominal '" + nominal + "'");
  nominal_.emplace_back(nominal, ensure(state));
  return *this;
}

KripkeModel ModelBuilder::build() const {
  const std::size_t n = names_.size();
  std::vector<Relation> rels(sig_.relations.size(), Relation(n));
  for (const auto& [r, a, b] : edges_) rels[*sig_.relation_index(r)].add(a, b);
  std::vector<StateSet> props(sig_.props.size(), StateSet(n));
  for (const auto& [p, s] : labels_) props[*sig_.prop_index(p)].set(s);
  std::vector<std::optional<StateId>> named(sig_.named_count());
  for (const auto& [k, s] : nominal_) {
    auto i = *sig_.named_index(k);
    if (named[i] && *named[i] != s) throw Error("nominal '" + k + "' assigned twice");
    named[i] = s;
  }
  std::vector<StateId> interp;
  for (std::size_t i = 0; i < named.size(); ++i) {
    if (!named[i]) throw Error("nominal '" + sig_.named(i) + "' is not interpreted");
    interp.push_back(*named[i]);
  }
  return KripkeModel(sig_, names_, std::move(interp), std::move(rels), std::move(props));
}

// ---------------------------------------------------------------------------
// Actions

Relation interpret_action(const KripkeModel& m, const Action& a) {
  switch (a.kind()) {
    case Action::Kind::Rel: return m.relation(a.name());
    case Action::Kind::Union: return interpret_action(m, a.lhs()).unite(interpret_action(m, a.rhs()));
    case Action::Kind::Comp: return interpret_action(m, a.lhs()).compose(interpret_action(m, a.rhs()));
    case Action::Kind::Star: return interpret_action(m, a.operand()).closure();
  }
  throw Error("unknown action");
}

// ---------------------------------------------------------------------------
// Isomorphism

bool is_isomorphism(const PointedModel& m, const PointedModel& n, const std::vector<StateId>& h) {
  const KripkeModel& a = m.model;
  const KripkeModel& b = n.model;
  if (!(a.signature() == b.signature()) || a.size() != b.size() || h.size() != a.size())
    return false;
  std::vector<bool> hit(b.size(), false);
  for (StateId s : h) {
    if (s >= b.size() || hit[s]) return false;
    hit[s] = true;
  }
  if (h[m.current] != n.current) return false;
  for (std::size_t i = 0; i < a.signature().named_count(); ++i)
    if (h[a.named(i)] != b.named(i)) return false;
  for (std::size_t p = 0; p < a.signature().props.size(); ++p)
    for (StateId s = 0; s < a.size(); ++s)
      if (a.holds(p, s) != b.holds(p, h[s])) return false;
  for (std::size_t r = 0; r < a.signature().relations.size(); ++r)
    for (StateId s = 0; s < a.size(); ++s)
      for (StateId t = 0; t < a.size(); ++t)
        if (a.relation(r).has(s, t) != b.relation(r).has(h[s], h[t])) return false;
  return true;
}

namespace {

// Per-state invariant used to prune candidate images.
std::vector<std::size_t> state_profile(const KripkeModel& m, StateId s) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < m.signature().props.size(); ++p) out.push_back(m.holds(p, s));
  for (std::size_t r = 0; r < m.signature().relations.size(); ++r) {
    out.push_back(m.relation(r).successors(s).count());
    out.push_back(m.relation(r).predecessors(s).count());
    out.push_back(m.relation(r).has(s, s));
  }
  return out;
}

}  // namespace

std::optional<std::vector<StateId>> find_isomorphism(const PointedModel& m, const PointedModel& n) {
  const KripkeModel& a = m.model;
  const KripkeModel& b = n.model;
  if (!(a.signature() == b.signature()) || a.size() != b.size()) return std::nullopt;
  const std::size_t size = a.size();
  const std::size_t rels = a.signature().relations.size();

  std::vector<std::vector<std::size_t>> pa(size), pb(size);
  for (StateId s = 0; s < size; ++s) {
    pa[s] = state_profile(a, s);
    pb[s] = state_profile(b, s);
  }

  constexpr StateId kUnset = static_cast<StateId>(-1);
  std::vector<StateId> h(size, kUnset), inv(size, kUnset);
  auto fix = [&](StateId s, StateId t) {
    if (h[s] == kUnset && inv[t] == kUnset && pa[s] == pb[t]) {
      h[s] = t;
      inv[t] = s;
      return true;
    }
    return h[s] == t;
  };
  if (!fix(m.current, n.current)) return std::nullopt;
  for (std::size_t i = 0; i < a.signature().named_count(); ++i)
    if (!fix(a.named(i), b.named(i))) return std::nullopt;

  // Order the remaining states by breadth-first distance from the fixed ones
  // so edge constraints prune early.
  std::vector<StateId> order;
  std::vector<bool> queued(size, false);
  for (StateId s = 0; s < size; ++s)
    if (h[s] != kUnset) queued[s] = true, order.push_back(s);
  for (std::size_t head = 0; order.size() < size; ++head) {
    if (head == order.size()) {
      for (StateId s = 0; s < size; ++s)
        if (!queued[s]) {
          queued[s] = true;
          order.push_back(s);
          break;
        }
      continue;
    }
    StateId s = order[head];
    for (std::size_t r = 0; r < rels; ++r) {
      StateSet nb = a.relation(r).successors(s) | a.relation(r).predecessors(s);
      for (auto t = nb.find_first(); t != StateSet::npos; t = nb.find_next(t))
        if (!queued[t]) queued[t] = true, order.push_back(t);
    }
  }

  auto consistent = [&](StateId s) {
    for (StateId t = 0; t < size; ++t) {
      if (h[t] == kUnset) continue;
      for (std::size_t r = 0; r < rels; ++r) {
        if (a.relation(r).has(s, t) != b.relation(r).has(h[s], h[t])) return false;
        if (a.relation(r).has(t, s) != b.relation(r).has(h[t], h[s])) return false;
      }
    }
    return true;
  };
  for (StateId s = 0; s < size; ++s)
    if (h[s] != kUnset && !consistent(s)) return std::nullopt;

  std::function<bool(std::size_t)> search = [&](std::size_t i) {
    if (i == order.size()) return true;
    StateId s = order[i];
    if (h[s] != kUnset) return search(i + 1);
    for (StateId t = 0; t < size; ++t) {
      if (inv[t] != kUnset || pa[s] != pb[t]) continue;
      h[s] = t;
      inv[t] = s;
      if (consistent(s) && search(i + 1)) return true;
      h[s] = kUnset;
      inv[t] = kUnset;
    }
    return false;
  };
  if (!search(0)) return std::nullopt;
  return h;
}

bool is_rooted(const PointedModel& pm) {
  const KripkeModel& m = pm.model;
  StateSet seen(m.size());
  seen.set(pm.current);
  std::vector<StateId> todo{pm.current};
  while (!todo.empty()) {
    StateId s = todo.back();
    todo.pop_back();
    for (std::size_t r = 0; r < m.signature().relations.size(); ++r) {
      StateSet fresh = m.relation(r).successors(s) - seen;
      seen |= fresh;
      for (auto t = fresh.find_first(); t != StateSet::npos; t = fresh.find_next(t))
        todo.push_back(t);
    }
  }
  return seen.all();
}

// ---------------------------------------------------------------------------
// Generation

KripkeModel generate_random_model(std::uint64_t seed, std::size_t n_states, double edge_density,
                                  const Signature& sig, double prop_density) {
  if (n_states == 0) throw Error("a model needs at least one state");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(std::clamp(edge_density, 0.0, 1.0));
  std::bernoulli_distribution prop(std::clamp(prop_density, 0.0, 1.0));
  std::uniform_int_distribution<StateId> pick(0, n_states - 1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_states; ++i) names.push_back(std::to_string(i));
  std::vector<StateId> named;
  for (std::size_t i = 0; i < sig.named_count(); ++i) named.push_back(pick(rng));
  std::vector<Relation> rels;
  for (std::size_t r = 0; r < sig.relations.size(); ++r) {
    Relation rel(n_states);
    for (StateId a = 0; a < n_states; ++a)
      for (StateId b = 0; b < n_states; ++b)
        if (edge(rng)) rel.add(a, b);
    rels.push_back(std::move(rel));
  }
  std::vector<StateSet> props;
  for (std::size_t p = 0; p < sig.props.size(); ++p) {
    StateSet set(n_states);
    for (StateId s = 0; s < n_states; ++s)
      if (prop(rng)) set.set(s);
    props.push_back(std::move(set));
  }
  return KripkeModel(sig, std::move(names), std::move(named), std::move(rels), std::move(props));
}

KripkeModel permute_states(const KripkeModel& m, const std::vector<StateId>& perm) {
  const std::size_t n = m.size();
  std::vector<std::string> names(n);
  for (StateId s = 0; s < n; ++s) names[perm[s]] = m.state_name(s);
  std::vector<StateId> named;
  for (StateId s : m.named_interp()) named.push_back(perm[s]);
  std::vector<Relation> rels;
  for (std::size_t r = 0; r < m.signature().relations.size(); ++r) {
    Relation rel(n);
    for (auto [a, b] : m.relation(r).pairs()) rel.add(perm[a], perm[b]);
    rels.push_back(std::move(rel));
  }
  std::vector<StateSet> props;
  for (std::size_t p = 0; p < m.signature().props.size(); ++p) {
    StateSet set(n);
    for (StateId s = 0; s < n; ++s)
      if (m.holds(p, s)) set.set(perm[s]);
    props.push_back(std::move(set));
  }
  return KripkeModel(m.signature(), std::move(names), std::move(named), std::move(rels),
                     std::move(props));
}

KripkeModel clone_state(const KripkeModel& m, StateId s) {
  const std::size_t n = m.size();
  if (s >= n) throw Error("no such state");
  std::vector<std::string> names;
  for (StateId i = 0; i < n; ++i) names.push_back(m.state_name(i));
  std::string twin = m.state_name(s) + "'";
  while (m.state_index(twin)) twin += "'";
  names.push_back(twin);
  auto copy = [&](StateId i) { return i == n ? s : i; };
  std::vector<Relation> rels;
  for (std::size_t r = 0; r < m.signature().relations.size(); ++r) {
    Relation rel(n + 1);
    for (StateId a = 0; a <= n; ++a)
      for (StateId b = 0; b <= n; ++b)
        if (m.relation(r).has(copy(a), copy(b))) rel.add(a, b);
    rels.push_back(std::move(rel));
  }
  std::vector<StateSet> props;
  for (std::size_t p = 0; p < m.signature().props.size(); ++p) {
    StateSet set(n + 1);
    for (StateId i = 0; i <= n; ++i)
      if (m.holds(p, copy(i))) set.set(i);
    props.push_back(std::move(set));
  }
  return KripkeModel(m.signature(), std::move(names), m.named_interp(), std::move(rels),
                     std::move(props));
}

std::pair<KripkeModel, KripkeModel> generate_random_pair(std::uint64_t seed, std::size_t max_states,
                                                         double edge_density, const Signature& sig) {
  if (max_states == 0) throw Error("a model needs at least one state");
  std::mt19937_64 rng(seed);
  auto size = [&] { return 1 + static_cast<std::size_t>(rng() % max_states); };
  KripkeModel left = generate_random_model(rng(), size(), edge_density, sig);
  switch (rng() % 3) {
    case 0:
      return {left, generate_random_model(rng(), size(), edge_density, sig)};
    case 1: {
      std::vector<StateId> perm(left.size());
      std::iota(perm.begin(), perm.end(), StateId{0});
      std::shuffle(perm.begin(), perm.end(), rng);
      return {left, permute_states(left, perm)};
    }
    default:
      return {left, clone_state(left, static_cast<StateId>(rng() % left.size()))};
  }
}

// ---------------------------------------------------------------------------
// Fixtures

namespace fixtures {

Signature loop_signature() { return Signature::make({}, {"l"}, {"p"}); }

KripkeModel loop_left() {
  return ModelBuilder(loop_signature())
      .states({"0", "1", "a", "b"})
      .edge("l", "0", "1")
      .edge("l", "1", "0")
      .edge("l", "0", "a")
      .edge("l", "1", "b")
      .label("p", "a")
      .label("p", "b")
      .build();
}

KripkeModel loop_right(std::size_t depth) {
  if (depth == 0) throw Error("truncation depth must be positive");
  ModelBuilder b(loop_signature());
  for (std::size_t i = 0; i < depth; ++i) b.state(std::to_string(i));
  for (std::size_t i = 0; i < depth; ++i) {
    std::string leaf = (i % 2 == 0 ? "a" : "b") + std::to_string(i);
    b.edge("l", std::to_string(i), leaf).label("p", leaf);
    if (i + 1 < depth) b.edge("l", std::to_string(i), std::to_string(i + 1));
  }
  return b.build();
}

std::pair<KripkeModel, KripkeModel> branching_pair() {
  auto sig = loop_signature();
  auto m = ModelBuilder(sig)
               .state("0")
               .edge("l", "0", "1")
               .edge("l", "0", "2")
               .label("p", "1")
               .label("p", "2")
               .build();
  auto n = ModelBuilder(sig).state("0").edge("l", "0", "1").label("p", "1").build();
  return {m, n};
}

std::pair<KripkeModel, KripkeModel> disconnected_pair() {
  auto sig = Signature::make({}, {"l"}, {"p", "q"});
  auto m = ModelBuilder(sig)
               .states({"0", "1", "2", "3"})
               .edge("l", "0", "1")
               .edge("l", "0", "2")
               .label("p", "1")
               .label("p", "2")
               .build();
  auto n = ModelBuilder(sig)
               .states({"0", "1", "2", "3", "4"})
               .edge("l", "0", "1")
               .edge("l", "0", "2")
               .edge("l", "3", "4")
               .label("p", "1")
               .label("p", "2")
               .label("q", "3")
               .label("q", "4")
               .build();
  return {m, n};
}

Signature chain_signature() { return Signature::make({"k1", "k2"}, {"l"}, {}); }

KripkeModel named_chain(std::size_t n) {
  if (n == 0) throw Error("chain length must be positive");
  ModelBuilder b(chain_signature());
  for (std::size_t i = 0; i < n; ++i) b.state("s" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < n; ++i)
    b.edge("l", "s" + std::to_string(i), "s" + std::to_string(i + 1));
  b.name("k1", "s0").name("k2", "s" + std::to_string(n - 1));
  return b.build();
}

KripkeModel named_cycle() {
  return ModelBuilder(chain_signature())
      .states({"s0", "s1"})
      .edge("l", "s0", "s1")
      .edge("l", "s1", "s0")
      .name("k1", "s0")
      .name("k2", "s1")
      .build();
}

KripkeModel named_loop(StateId k1, StateId k2) {
  const std::vector<std::string> names{"0", "1", "a", "b"};
  return ModelBuilder(chain_signature())
      .states(names)
      .edge("l", "0", "1")
      .edge("l", "1", "0")
      .edge("l", "0", "a")
      .edge("l", "1", "b")
      .name("k1", names.at(k1))
      .name("k2", names.at(k2))
      .build();
}

std::string finite_chain_formula() {
  // Unique successor of k1 and no predecessor; unique predecessor of k2 and
  // no successor; every other state has a unique predecessor and successor;
  // any two states are connected along l*.
  return "((exists x . (@k1 <l>x & forall y . (~@k1 <l>y | @x y))) & "
         "(forall y . ~@y <l>k1)) & "
         "((exists x . (@x <l>k2 & forall y . (~@y <l>k2 | @x y))) & "
         "(forall y . ~@k2 <l>y)) & "
         "(forall x . ((@x k1 | @x k2) | "
         "((exists y . (@y <l>x & forall z . (~@z <l>x | @y z))) & "
         "(exists z . (@x <l>z & forall w . (~@x <l>w | @z w)))))) & "
         "(forall x . forall y . (@x <l*>y | @y <l*>x))";
}

}  // namespace fixtures

}  // namespace hdpl
