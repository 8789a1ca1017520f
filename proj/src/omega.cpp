#include "hdpl/omega.hpp"

#include <algorithm>
#include <boost/container_hash/hash.hpp>
#include <cstdint>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

#include "hdpl/checker.hpp"
#include "hdpl/games.hpp"

namespace hdpl {

namespace {

void require_same_signature(const KripkeModel& a, const KripkeModel& b) {
  if (!(a.signature() == b.signature()))
    throw Error("both models must be over the same signature");
}

std::vector<StateId> members(const StateSet& s) {
  std::vector<StateId> out;
  for (auto i = s.find_first(); i != StateSet::npos; i = s.find_next(i)) out.push_back(i);
  return out;
}

/// Props and named symbols agree at (w, v).
bool basic_agree(const KripkeModel& m, StateId w, const KripkeModel& n, StateId v) {
  return basic_agreement(m, w, m.named_interp(), n, v, n.named_interp());
}

/// Relations on at most eight states as 8x8 bit matrices, row a in byte a.
namespace packed {

constexpr std::size_t kMax = 8;

std::uint64_t pack(const Relation& r) {
  std::uint64_t out = 0;
  for (auto [a, b] : r.pairs()) out |= std::uint64_t{1} << (a * kMax + b);
  return out;
}

Relation unpack(std::uint64_t x, std::size_t n) {
  Relation r(n);
  for (StateId a = 0; a < n; ++a)
    for (StateId b = 0; b < n; ++b)
      if (x >> (a * kMax + b) & 1) r.add(a, b);
  return r;
}

std::uint64_t compose(std::uint64_t x, std::uint64_t y) {
  std::uint64_t out = 0;
  for (std::size_t a = 0; a < kMax; ++a) {
    std::uint64_t row = x >> (a * kMax) & 0xff, acc = 0;
    for (std::size_t b = 0; row; ++b, row >>= 1)
      if (row & 1) acc |= y >> (b * kMax) & 0xff;
    out |= acc << (a * kMax);
  }
  return out;
}

std::uint64_t star(std::uint64_t x, std::size_t n) {
  std::uint64_t r = 0;
  for (std::size_t a = 0; a < n; ++a) r |= std::uint64_t{1} << (a * kMax + a);
  for (std::uint64_t prev = ~r; prev != r;) {
    prev = r;
    r |= compose(r, x);
  }
  return r;
}

struct PairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    std::size_t h = boost::hash_value(p.first);
    boost::hash_combine(h, p.second);
    return h;
  }
};

std::vector<ActionPair> closure(const KripkeModel& left, const KripkeModel& right,
                                const FragmentConfig& frag) {
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  std::vector<Key> rels;
  std::vector<Action> witness;
  std::unordered_set<Key, PairHash> seen;
  auto add = [&](Key k, auto make) {
    if (seen.insert(k).second) {
      rels.push_back(k);
      witness.push_back(make());
    }
  };
  std::size_t nl = left.size(), nr = right.size();
  for (std::size_t i = 0; i < left.signature().relations.size(); ++i)
    add({pack(left.relation(i)), pack(right.relation(i))},
        [&] { return Action::rel(left.signature().relations[i]); });
  for (std::size_t i = 0; i < rels.size(); ++i) {
    if (frag.has(ActionCtor::Star))
      add({star(rels[i].first, nl), star(rels[i].second, nr)},
          [&] { return Action::star(witness[i]); });
    for (std::size_t j = 0; j <= i; ++j) {
      Key x = rels[i], y = rels[j];
      if (frag.has(ActionCtor::Union))
        add({y.first | x.first, y.second | x.second},
            [&] { return Action::union_of(witness[j], witness[i]); });
      if (frag.has(ActionCtor::Comp)) {
        add({compose(y.first, x.first), compose(y.second, x.second)},
            [&] { return Action::comp(witness[j], witness[i]); });
        add({compose(x.first, y.first), compose(x.second, y.second)},
            [&] { return Action::comp(witness[i], witness[j]); });
      }
    }
  }
  std::vector<ActionPair> out;
  for (std::size_t i = 0; i < rels.size(); ++i)
    out.push_back({witness[i], unpack(rels[i].first, nl), unpack(rels[i].second, nr)});
  return out;
}

}  // namespace packed

}  // namespace

// ---------------------------------------------------------------------------
// Action closure

std::vector<ActionPair> action_pair_closure(const KripkeModel& left, const KripkeModel& right,
                                            const FragmentConfig& frag) {
  require_same_signature(left, right);
  if (left.size() <= packed::kMax && right.size() <= packed::kMax)
    return packed::closure(left, right, frag);
  std::vector<ActionPair> out;
  struct PairHash {
    std::size_t operator()(const std::pair<Relation, Relation>& p) const {
      std::size_t h = p.first.hash();
      boost::hash_combine(h, p.second.hash());
      return h;
    }
  };
  std::unordered_set<std::pair<Relation, Relation>, PairHash> seen;
  auto add = [&](Relation l, Relation r, auto witness) {
    if (seen.emplace(l, r).second) out.push_back({witness(), std::move(l), std::move(r)});
  };
  for (std::size_t i = 0; i < left.signature().relations.size(); ++i)
    add(left.relation(i), right.relation(i),
        [&] { return Action::rel(left.signature().relations[i]); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (frag.has(ActionCtor::Star))
      add(out[i].left.closure(), out[i].right.closure(), [&] { return Action::star(out[i].witness); });
    for (std::size_t j = 0; j <= i; ++j) {
      // Copies: `add` may reallocate `out`.
      const Action x = out[i].witness, y = out[j].witness;
      if (frag.has(ActionCtor::Union))
        add(out[j].left.unite(out[i].left), out[j].right.unite(out[i].right),
            [&] { return Action::union_of(y, x); });
      if (frag.has(ActionCtor::Comp)) {
        add(out[j].left.compose(out[i].left), out[j].right.compose(out[i].right),
            [&] { return Action::comp(y, x); });
        add(out[i].left.compose(out[j].left), out[i].right.compose(out[j].right),
            [&] { return Action::comp(x, y); });
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arena

std::size_t OmegaArena::KeyHash::operator()(const Key& k) const {
  std::size_t h = boost::hash_value(k.pairs);
  boost::hash_combine(h, k.w);
  boost::hash_combine(h, k.v);
  return h;
}

OmegaArena::OmegaArena(FragmentConfig frag, KripkeModel left, KripkeModel right)
    : frag_(frag), left_(std::move(left)), right_(std::move(right)) {
  require_same_signature(left_, right_);
  if (frag_.has(Op::Diamond)) actions_ = action_pair_closure(left_, right_, frag_);
}

OmegaArena::Key OmegaArena::make_key(const std::vector<std::pair<StateId, StateId>>& pairs,
                                     StateId w, StateId v) const {
  if (w >= left_.size() || v >= right_.size()) throw Error("no such state");
  Key k{StateSet(left_.size() * right_.size()), w, v};
  for (auto [a, b] : pairs) {
    if (a >= left_.size() || b >= right_.size()) throw Error("no such state");
    k.pairs.set(a * right_.size() + b);
  }
  return k;
}

std::size_t OmegaArena::intern(const Key& k) {
  auto [it, fresh] = index_.emplace(k, positions_.size());
  if (fresh) positions_.push_back({k, property(k), {}, 0, false});
  return it->second;
}

bool OmegaArena::property(const Key& k) const {
  if (!basic_agree(left_, k.w, right_, k.v)) return false;
  std::size_t nr = right_.size();
  for (auto i = k.pairs.find_first(); i != StateSet::npos; i = k.pairs.find_next(i))
    if ((i / nr == k.w) != (i % nr == k.v)) return false;
  return true;
}

void OmegaArena::expand(std::size_t id) {
  if (!positions_[id].property) return;
  const Key k = positions_[id].key;
  std::size_t nr = right_.size();
  std::vector<std::vector<std::size_t>> moves;
  auto with_pair = [&](StateId a, StateId b) {
    Key c = k;
    c.pairs.set(a * nr + b);
    return c;
  };
  if (frag_.has(Op::Diamond)) {
    for (const auto& ap : actions_) {
      auto ls = members(ap.left.successors(k.w));
      auto rs = members(ap.right.successors(k.v));
      for (StateId w2 : ls) {
        std::vector<std::size_t> ans;
        for (StateId v2 : rs) ans.push_back(intern({k.pairs, w2, v2}));
        moves.push_back(std::move(ans));
      }
      for (StateId v2 : rs) {
        std::vector<std::size_t> ans;
        for (StateId w2 : ls) ans.push_back(intern({k.pairs, w2, v2}));
        moves.push_back(std::move(ans));
      }
    }
  }
  if (frag_.has(Op::At)) {
    for (std::size_t i = 0; i < left_.signature().named_count(); ++i)
      moves.push_back({intern({k.pairs, left_.named(i), right_.named(i)})});
    for (auto i = k.pairs.find_first(); i != StateSet::npos; i = k.pairs.find_next(i))
      moves.push_back({intern({k.pairs, i / nr, i % nr})});
  }
  if (frag_.has(Op::Store)) moves.push_back({intern(with_pair(k.w, k.v))});
  if (frag_.has(Op::Exists)) {
    for (StateId a = 0; a < left_.size(); ++a) {
      std::vector<std::size_t> ans;
      for (StateId b = 0; b < nr; ++b) ans.push_back(intern(with_pair(a, b)));
      moves.push_back(std::move(ans));
    }
    for (StateId b = 0; b < nr; ++b) {
      std::vector<std::size_t> ans;
      for (StateId a = 0; a < left_.size(); ++a) ans.push_back(intern(with_pair(a, b)));
      moves.push_back(std::move(ans));
    }
  }
  for (auto& ans : moves) {
    std::sort(ans.begin(), ans.end());
    ans.erase(std::unique(ans.begin(), ans.end()), ans.end());
  }
  std::sort(moves.begin(), moves.end());
  moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
  positions_[id].moves = std::move(moves);
}

std::size_t OmegaArena::explore(const Key& root) {
  std::size_t before = positions_.size();
  std::size_t id = intern(root);
  if (positions_.size() == before) return id;
  for (std::size_t i = before; i < positions_.size(); ++i) expand(i);
  refine();
  return id;
}

void OmegaArena::refine() {
  // Layered attractor: a move dies when its last live answer dies; a
  // position dies in the layer after its first move dies.
  std::size_t n = positions_.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> watchers(n);
  std::vector<std::vector<std::size_t>> live(n);
  std::vector<std::size_t> layer;
  for (std::size_t i = 0; i < n; ++i) {
    Position& p = positions_[i];
    p.rank = 0;
    p.lost = !p.property;
    if (p.lost) {
      layer.push_back(i);
      continue;
    }
    live[i].resize(p.moves.size());
    for (std::size_t m = 0; m < p.moves.size(); ++m) {
      live[i][m] = p.moves[m].size();
      for (std::size_t a : p.moves[m]) watchers[a].emplace_back(i, m);
    }
  }
  // Moves with no answer at all die in the first layer.
  std::vector<std::size_t> next;
  for (std::size_t i = 0; i < n; ++i)
    if (!positions_[i].lost && std::find(live[i].begin(), live[i].end(), 0) != live[i].end())
      next.push_back(i);
  std::size_t round = 0;
  for (std::size_t r = 1;; ++r) {
    for (std::size_t i : layer)
      for (auto [pred, m] : watchers[i])
        if (!positions_[pred].lost && --live[pred][m] == 0) next.push_back(pred);
    layer.clear();
    for (std::size_t i : next)
      if (!positions_[i].lost) {
        positions_[i].lost = true;
        positions_[i].rank = r;
        layer.push_back(i);
      }
    next.clear();
    if (layer.empty()) break;
    round = r;
  }
  iterations_ = round;
}

OmegaResult OmegaArena::solve(StateId w, StateId v) {
  std::size_t id = explore(make_key({}, w, v));
  OmegaResult r;
  r.eloise_wins = !positions_[id].lost;
  if (!r.eloise_wins) r.rank = positions_[id].rank;
  r.iterations = iterations_;
  r.positions = positions_.size();
  return r;
}

bool OmegaArena::safe(const std::vector<std::pair<StateId, StateId>>& pairs, StateId w,
                      StateId v) {
  return !positions_[explore(make_key(pairs, w, v))].lost;
}

std::optional<std::size_t> OmegaArena::rank(const std::vector<std::pair<StateId, StateId>>& pairs,
                                            StateId w, StateId v) {
  const Position& p = positions_[explore(make_key(pairs, w, v))];
  if (!p.lost) return std::nullopt;
  return p.rank;
}

OmegaResult omega_solve(const FragmentConfig& frag, const PointedModel& left,
                        const PointedModel& right) {
  OmegaArena arena(frag, left.model, right.model);
  return arena.solve(left.current, right.current);
}

// ---------------------------------------------------------------------------
// Families

namespace {

std::string tuple_string(const std::vector<StateId>& t, StateId cur, const KripkeModel& m) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + m.state_name(t[i]);
  return s + "; " + m.state_name(cur) + ")";
}

std::vector<std::pair<StateId, StateId>> zip(const BisimEntry& e) {
  std::vector<std::pair<StateId, StateId>> out;
  for (std::size_t i = 0; i < e.left_tuple.size(); ++i)
    out.emplace_back(e.left_tuple[i], e.right_tuple[i]);
  return out;
}

}  // namespace

std::string to_string(const BisimEntry& e, const KripkeModel& left, const KripkeModel& right) {
  return tuple_string(e.left_tuple, e.left, left) + " ~ " +
         tuple_string(e.right_tuple, e.right, right);
}

bool LBisimFamily::contains(const BisimEntry& e) const {
  std::size_t l = e.left_tuple.size();
  return l < levels.size() && levels[l].count(e) > 0;
}

void LBisimFamily::add(BisimEntry e) {
  std::size_t l = e.left_tuple.size();
  if (l > max_level || e.right_tuple.size() != l) throw Error("entry does not fit the family");
  levels[l].insert(std::move(e));
}

std::size_t LBisimFamily::size() const {
  std::size_t n = 0;
  for (const auto& l : levels) n += l.size();
  return n;
}

BisimReport validate_bisim_family(const LBisimFamily& fam, const FragmentConfig& frag,
                                  const KripkeModel& left, const KripkeModel& right) {
  require_same_signature(left, right);
  if (fam.levels.size() != fam.max_level + 1) throw Error("family has the wrong number of levels");
  BisimReport rep;
  rep.empty = fam.size() == 0;
  rep.extension_checked_below = fam.max_level;
  std::vector<ActionPair> actions;
  if (frag.has(Op::Diamond)) actions = action_pair_closure(left, right, frag);
  const Signature& sig = left.signature();

  for (std::size_t l = 0; l <= fam.max_level; ++l) {
    for (const auto& e : fam.levels[l]) {
      if (e.left_tuple.size() != l || e.right_tuple.size() != l)
        throw Error("malformed entry at level " + std::to_string(l));
      if (e.left >= left.size() || e.right >= right.size())
        throw Error("entry mentions a state outside the models");
      for (std::size_t j = 0; j < l; ++j)
        if (e.left_tuple[j] >= left.size() || e.right_tuple[j] >= right.size())
          throw Error("entry mentions a state outside the models");

      std::string where = " at level " + std::to_string(l) + ": " + to_string(e, left, right);
      auto violation = [&](const std::string& clause, const std::string& detail) {
        rep.violations.push_back("(" + clause + ")" + where + (detail.empty() ? "" : ": " + detail));
      };
      auto has = [&](const std::vector<StateId>& t, StateId w, const std::vector<StateId>& u,
                     StateId v) { return fam.contains({t, w, u, v}); };

      for (std::size_t p = 0; p < sig.props.size(); ++p)
        if (left.holds(p, e.left) != right.holds(p, e.right)) violation("prop", sig.props[p]);
      for (std::size_t k = 0; k < sig.named_count(); ++k)
        if ((left.named(k) == e.left) != (right.named(k) == e.right)) violation("nom", sig.named(k));
      for (std::size_t j = 0; j < l; ++j)
        if ((e.left_tuple[j] == e.left) != (e.right_tuple[j] == e.right))
          violation("wvar", "position " + std::to_string(j + 1));

      for (const auto& ap : actions) {
        auto ls = members(ap.left.successors(e.left));
        auto rs = members(ap.right.successors(e.right));
        for (StateId w2 : ls)
          if (std::none_of(rs.begin(), rs.end(), [&](StateId v2) {
                return has(e.left_tuple, w2, e.right_tuple, v2);
              }))
            violation("forth", "action " + print_action(ap.witness) + ", target " +
                                   left.state_name(w2) + " unmatched");
        for (StateId v2 : rs)
          if (std::none_of(ls.begin(), ls.end(), [&](StateId w2) {
                return has(e.left_tuple, w2, e.right_tuple, v2);
              }))
            violation("back", "action " + print_action(ap.witness) + ", target " +
                                  right.state_name(v2) + " unmatched");
      }
      if (frag.has(Op::At)) {
        for (std::size_t j = 0; j < l; ++j)
          if (!has(e.left_tuple, e.left_tuple[j], e.right_tuple, e.right_tuple[j]))
            violation("atv", "position " + std::to_string(j + 1));
        for (std::size_t k = 0; k < sig.named_count(); ++k)
          if (!has(e.left_tuple, left.named(k), e.right_tuple, right.named(k)))
            violation("atn", sig.named(k));
      }
      if (l >= fam.max_level) continue;
      auto lt = e.left_tuple, rt = e.right_tuple;
      lt.push_back(0);
      rt.push_back(0);
      if (frag.has(Op::Store)) {
        lt.back() = e.left;
        rt.back() = e.right;
        if (!has(lt, e.left, rt, e.right)) violation("st", "");
      }
      if (frag.has(Op::Exists)) {
        for (StateId a = 0; a < left.size(); ++a) {
          lt.back() = a;
          bool found = false;
          for (StateId b = 0; b < right.size() && !found; ++b) {
            rt.back() = b;
            found = has(lt, e.left, rt, e.right);
          }
          if (!found) violation("ex-f", "witness " + left.state_name(a) + " unmatched");
        }
        for (StateId b = 0; b < right.size(); ++b) {
          rt.back() = b;
          bool found = false;
          for (StateId a = 0; a < left.size() && !found; ++a) {
            lt.back() = a;
            found = has(lt, e.left, rt, e.right);
          }
          if (!found) violation("ex-b", "witness " + right.state_name(b) + " unmatched");
        }
      }
    }
  }
  rep.valid = rep.violations.empty();
  return rep;
}

LBisimFamily extract_bisim_witness(const FragmentConfig& frag, const PointedModel& left,
                                   const PointedModel& right, std::size_t max_level) {
  OmegaArena arena(frag, left.model, right.model);
  if (!arena.solve(left.current, right.current).eloise_wins)
    throw Error("Abelard wins; there is no bisimulation to extract");
  const KripkeModel& m = arena.left();
  const KripkeModel& n = arena.right();
  LBisimFamily fam(max_level);
  std::deque<BisimEntry> queue;
  auto offer = [&](BisimEntry e) {
    if (fam.contains(e) || !arena.safe(zip(e), e.left, e.right)) return;
    fam.add(e);
    queue.push_back(std::move(e));
  };
  offer({{}, left.current, {}, right.current});
  while (!queue.empty()) {
    BisimEntry e = std::move(queue.front());
    queue.pop_front();
    std::size_t l = e.left_tuple.size();
    for (const auto& ap : arena.actions())
      for (StateId w2 : members(ap.left.successors(e.left)))
        for (StateId v2 : members(ap.right.successors(e.right)))
          offer({e.left_tuple, w2, e.right_tuple, v2});
    if (frag.has(Op::At)) {
      for (std::size_t j = 0; j < l; ++j)
        offer({e.left_tuple, e.left_tuple[j], e.right_tuple, e.right_tuple[j]});
      for (std::size_t k = 0; k < m.signature().named_count(); ++k)
        offer({e.left_tuple, m.named(k), e.right_tuple, n.named(k)});
    }
    if (l >= max_level) continue;
    if (frag.has(Op::Store)) {
      auto lt = e.left_tuple, rt = e.right_tuple;
      lt.push_back(e.left);
      rt.push_back(e.right);
      offer({lt, e.left, rt, e.right});
    }
    if (frag.has(Op::Exists))
      for (StateId a = 0; a < m.size(); ++a)
        for (StateId b = 0; b < n.size(); ++b) {
          auto lt = e.left_tuple, rt = e.right_tuple;
          lt.push_back(a);
          rt.push_back(b);
          offer({lt, e.left, rt, e.right});
        }
  }
  return fam;
}

LBisimFamily shift_family(const LBisimFamily& fam, const BisimEntry& anchor) {
  if (anchor.left_tuple.size() != 1 || !fam.contains(anchor))
    throw Error("the anchor must be an entry of the family at level 1");
  LBisimFamily out(fam.max_level - 1);
  for (std::size_t l = 1; l <= fam.max_level; ++l)
    for (const auto& e : fam.levels[l])
      if (e.left_tuple[0] == anchor.left_tuple[0] && e.right_tuple[0] == anchor.right_tuple[0])
        out.add({std::vector<StateId>(e.left_tuple.begin() + 1, e.left_tuple.end()), e.left,
                 std::vector<StateId>(e.right_tuple.begin() + 1, e.right_tuple.end()), e.right});
  return out;
}

PartialIsoReport partial_iso_from_tuple(const BisimEntry& e, const KripkeModel& left,
                                        const KripkeModel& right) {
  require_same_signature(left, right);
  if (e.left_tuple.size() != e.right_tuple.size()) throw Error("tuples of different lengths");
  PartialIsoReport r;
  std::map<StateId, StateId> fwd, bwd;
  for (std::size_t i = 0; i < e.left_tuple.size(); ++i) {
    StateId a = e.left_tuple[i], b = e.right_tuple[i];
    auto [f, fnew] = fwd.emplace(a, b);
    auto [g, gnew] = bwd.emplace(b, a);
    if ((!fnew && f->second != b) || (!gnew && g->second != a)) {
      r.well_defined = false;
      r.problems.push_back("position " + std::to_string(i + 1) + " breaks functionality or injectivity");
    }
  }
  r.map.assign(fwd.begin(), fwd.end());
  for (auto [a, b] : r.map)
    if (!basic_agree(left, a, right, b)) {
      r.basic_preserving = false;
      r.problems.push_back(left.state_name(a) + " and " + right.state_name(b) +
                           " disagree on a basic sentence");
    }
  const Signature& sig = left.signature();
  for (std::size_t rel = 0; rel < sig.relations.size(); ++rel)
    for (auto [a1, b1] : r.map)
      for (auto [a2, b2] : r.map)
        if (left.relation(rel).has(a1, a2) != right.relation(rel).has(b1, b2)) {
          r.relation_preserving = false;
          r.problems.push_back(sig.relations[rel] + " differs on " + left.state_name(a1) + "," +
                               left.state_name(a2) + " vs " + right.state_name(b1) + "," +
                               right.state_name(b2));
        }
  return r;
}

// ---------------------------------------------------------------------------
// Back-and-forth systems

std::optional<StateId> PartialMap::image(StateId w) const {
  auto it = std::lower_bound(pairs.begin(), pairs.end(), std::make_pair(w, StateId{0}));
  if (it != pairs.end() && it->first == w) return it->second;
  return std::nullopt;
}

std::optional<StateId> PartialMap::preimage(StateId v) const {
  for (auto [a, b] : pairs)
    if (b == v) return a;
  return std::nullopt;
}

bool BackAndForthSystem::related(StateId w, StateId v) const {
  return std::any_of(maps.begin(), maps.end(), [&](const PartialMap& h) { return h.maps(w, v); });
}

std::vector<PartialMap> basic_partial_isos(const KripkeModel& left, const KripkeModel& right) {
  require_same_signature(left, right);
  std::vector<PartialMap> out;
  std::vector<bool> used(right.size(), false);
  PartialMap cur;
  auto rec = [&](auto& self, StateId w) -> void {
    if (w == left.size()) {
      out.push_back(cur);
      return;
    }
    self(self, w + 1);
    for (StateId v = 0; v < right.size(); ++v) {
      if (used[v] || !basic_agree(left, w, right, v)) continue;
      used[v] = true;
      cur.pairs.emplace_back(w, v);
      self(self, w + 1);
      cur.pairs.pop_back();
      used[v] = false;
    }
  };
  rec(rec, 0);
  return out;
}

BackAndForthSystem max_back_and_forth(const FragmentConfig& frag, const KripkeModel& left,
                                      const KripkeModel& right) {
  auto all = basic_partial_isos(left, right);
  std::map<PartialMap, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) index.emplace(all[i], i);
  std::vector<ActionPair> actions;
  if (frag.has(Op::Diamond)) actions = action_pair_closure(left, right, frag);

  auto extend = [&](const PartialMap& h, StateId w, StateId v) -> std::optional<std::size_t> {
    PartialMap g = h;
    g.pairs.insert(std::lower_bound(g.pairs.begin(), g.pairs.end(), std::make_pair(w, v)), {w, v});
    auto it = index.find(g);
    if (it == index.end()) return std::nullopt;
    return it->second;
  };

  // For each map, the requirements it must meet; each lists candidate
  // extensions, any surviving one of which suffices.
  std::vector<std::vector<std::vector<std::size_t>>> reqs(all.size());
  for (std::size_t id = 0; id < all.size(); ++id) {
    const PartialMap& h = all[id];
    auto& rq = reqs[id];
    auto forth_any = [&](StateId w) {
      if (h.image(w)) return;
      std::vector<std::size_t> c;
      for (StateId v = 0; v < right.size(); ++v)
        if (auto g = extend(h, w, v)) c.push_back(*g);
      rq.push_back(std::move(c));
    };
    auto back_any = [&](StateId v) {
      if (h.preimage(v)) return;
      std::vector<std::size_t> c;
      for (StateId w = 0; w < left.size(); ++w)
        if (auto g = extend(h, w, v)) c.push_back(*g);
      rq.push_back(std::move(c));
    };
    if (frag.has(Op::At))
      for (std::size_t k = 0; k < left.signature().named_count(); ++k) forth_any(left.named(k));
    for (const auto& ap : actions) {
      for (auto [w1, v1] : h.pairs) {
        for (StateId w2 : members(ap.left.successors(w1))) {
          if (auto v2 = h.image(w2)) {
            if (!ap.right.has(v1, *v2)) rq.push_back({});
            continue;
          }
          std::vector<std::size_t> c;
          for (StateId v2 : members(ap.right.successors(v1)))
            if (auto g = extend(h, w2, v2)) c.push_back(*g);
          rq.push_back(std::move(c));
        }
        for (StateId v2 : members(ap.right.successors(v1))) {
          if (auto w2 = h.preimage(v2)) {
            if (!ap.left.has(w1, *w2)) rq.push_back({});
            continue;
          }
          std::vector<std::size_t> c;
          for (StateId w2 : members(ap.left.successors(w1)))
            if (auto g = extend(h, w2, v2)) c.push_back(*g);
          rq.push_back(std::move(c));
        }
      }
    }
    if (frag.has(Op::Exists)) {
      for (StateId w = 0; w < left.size(); ++w) forth_any(w);
      for (StateId v = 0; v < right.size(); ++v) back_any(v);
    }
  }

  std::vector<bool> alive(all.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t id = 0; id < all.size(); ++id) {
      if (!alive[id]) continue;
      for (const auto& c : reqs[id])
        if (std::none_of(c.begin(), c.end(), [&](std::size_t g) { return alive[g]; })) {
          alive[id] = false;
          changed = true;
          break;
        }
    }
  }
  BackAndForthSystem sys;
  for (std::size_t id = 0; id < all.size(); ++id)
    if (alive[id]) sys.maps.push_back(all[id]);
  return sys;
}

bool bf_related(const FragmentConfig& frag, const PointedModel& left, const PointedModel& right) {
  return max_back_and_forth(frag, left.model, right.model).related(left.current, right.current);
}

bool bf_coincidence_hypotheses(const FragmentConfig& frag) {
  bool needs_at = frag.has(Op::Diamond) || frag.has(Op::Exists);
  return frag.has(Op::Store) && (!needs_at || frag.has(Op::At));
}

// ---------------------------------------------------------------------------
// Harnesses

HmReport hennessy_milner_check(const FragmentConfig& frag, const PointedModel& left,
                               const PointedModel& right) {
  if (frag.has(Op::Exists)) throw FragmentError("the Hennessy-Milner check excludes exists");
  require_same_signature(left.model, right.model);
  OmegaArena arena(frag, left.model, right.model);
  OmegaResult res = arena.solve(left.current, right.current);
  HmReport r;
  r.omega_wins = res.eloise_wins;
  r.height = std::max<std::size_t>(1, res.iterations);
  std::vector<Action> acts;
  for (const auto& ap : arena.actions()) acts.push_back(ap.witness);
  FragmentConfig tree_frag = acts.empty() ? frag.without(Op::Diamond) : frag;
  r.formulas_agree = true;
  for (std::size_t h = 1; h <= r.height && r.formulas_agree; ++h) {
    TreePtr t = complete_tree(left.model.signature(), tree_frag, h, acts);
    GamePool pool;
    r.formulas_agree = char_formula(t, left, pool) == char_formula(t, right, pool);
  }
  r.bf = bf_related(frag, left, right);
  r.hypotheses = bf_coincidence_hypotheses(frag);
  return r;
}

RootedIsoReport rooted_iso_check(const FragmentConfig& frag, const PointedModel& left,
                                 const PointedModel& right) {
  if (!frag.has(Op::Diamond) || !frag.has(Op::At) || !frag.has(Op::Store))
    throw FragmentError("the rooted isomorphism check needs diamond, at and store");
  require_same_signature(left.model, right.model);
  if (!is_rooted(left) || !is_rooted(right)) throw Error("both pointed models must be rooted");
  RootedIsoReport r;
  r.isomorphic = find_isomorphism(left, right).has_value();
  r.omega_wins = omega_solve(frag, left, right).eloise_wins;
  return r;
}

}  // namespace hdpl
