#include <algorithm>
#include <tuple>

#include "oracles.hpp"

namespace hdpl::oracle {

namespace {

bool agree(const KripkeModel& m, StateId w, const KripkeModel& n, StateId v) {
  const Signature& sig = m.signature();
  for (const auto& p : sig.props)
    if (m.holds(*sig.prop_index(p), w) != n.holds(*sig.prop_index(p), v)) return false;
  for (std::size_t i = 0; i < sig.named_count(); ++i)
    if ((m.denotation(sig.named(i)) == w) != (n.denotation(sig.named(i)) == v)) return false;
  return true;
}

}  // namespace

namespace {

PairSet compose(const PairSet& a, const PairSet& b) {
  PairSet out;
  for (auto [x, y] : a)
    for (auto [y2, z] : b)
      if (y == y2) out.emplace(x, z);
  return out;
}

PairSet star(const PairSet& a, std::size_t n) {
  PairSet out;
  for (StateId x = 0; x < n; ++x) out.emplace(x, x);
  for (std::size_t size = 0; size != out.size();) {
    size = out.size();
    PairSet step = compose(out, a);
    out.insert(step.begin(), step.end());
  }
  return out;
}

}  // namespace

std::vector<std::pair<PairSet, PairSet>> action_closure(const KripkeModel& m, const KripkeModel& n,
                                                        const FragmentConfig& frag) {
  using D = std::pair<PairSet, PairSet>;
  std::set<D> known;
  for (const auto& r : m.signature().relations) {
    Action a = Action::rel(r);
    known.emplace(action_pairs(m, a), action_pairs(n, a));
  }
  // Rounds combining every known denotation pair with every other; stop once
  // a whole round adds nothing.
  for (bool grew = true; grew;) {
    grew = false;
    std::vector<D> now(known.begin(), known.end());
    for (const auto& a : now) {
      if (frag.has(ActionCtor::Star))
        grew |= known.emplace(star(a.first, m.size()), star(a.second, n.size())).second;
      for (const auto& b : now) {
        if (frag.has(ActionCtor::Union)) {
          D u = a;
          u.first.insert(b.first.begin(), b.first.end());
          u.second.insert(b.second.begin(), b.second.end());
          grew |= known.insert(std::move(u)).second;
        }
        if (frag.has(ActionCtor::Comp))
          grew |= known.emplace(compose(a.first, b.first), compose(a.second, b.second)).second;
      }
    }
  }
  return {known.begin(), known.end()};
}

bool explicit_survives(const FragmentConfig& frag, const KripkeModel& m, StateId w,
                       const KripkeModel& n, StateId v, std::size_t depth) {
  std::vector<std::pair<PairSet, PairSet>> acts;
  if (frag.has(Op::Diamond)) acts = action_closure(m, n, frag);
  const Signature& sig = m.signature();
  using Seq = std::vector<StateId>;
  std::map<std::tuple<Seq, StateId, Seq, StateId, std::size_t>, bool> memo;

  auto run = [&](auto& self, const Seq& t, StateId x, const Seq& u, StateId y,
                 std::size_t d) -> bool {
    if (!agree(m, x, n, y)) return false;
    for (std::size_t j = 0; j < t.size(); ++j)
      if ((t[j] == x) != (u[j] == y)) return false;
    if (d == 0) return true;
    auto key = std::make_tuple(t, x, u, y, d);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool ok = true;
    for (const auto& [pm, pn] : acts) {
      for (auto [a, x2] : pm) {
        if (a != x || !ok) continue;
        bool answered = false;
        for (auto [b, y2] : pn)
          if (b == y && self(self, t, x2, u, y2, d - 1)) answered = true;
        ok = answered;
      }
      for (auto [b, y2] : pn) {
        if (b != y || !ok) continue;
        bool answered = false;
        for (auto [a, x2] : pm)
          if (a == x && self(self, t, x2, u, y2, d - 1)) answered = true;
        ok = answered;
      }
    }
    if (ok && frag.has(Op::At)) {
      for (std::size_t i = 0; i < sig.named_count() && ok; ++i)
        ok = self(self, t, m.denotation(sig.named(i)), u, n.denotation(sig.named(i)), d - 1);
      for (std::size_t j = 0; j < t.size() && ok; ++j) ok = self(self, t, t[j], u, u[j], d - 1);
    }
    if (ok && frag.has(Op::Store)) {
      Seq t2 = t, u2 = u;
      t2.push_back(x);
      u2.push_back(y);
      ok = self(self, t2, x, u2, y, d - 1);
    }
    if (ok && frag.has(Op::Exists)) {
      for (StateId a = 0; a < m.size() && ok; ++a) {
        bool answered = false;
        for (StateId b = 0; b < n.size() && !answered; ++b) {
          Seq t2 = t, u2 = u;
          t2.push_back(a);
          u2.push_back(b);
          answered = self(self, t2, x, u2, y, d - 1);
        }
        ok = answered;
      }
      for (StateId b = 0; b < n.size() && ok; ++b) {
        bool answered = false;
        for (StateId a = 0; a < m.size() && !answered; ++a) {
          Seq t2 = t, u2 = u;
          t2.push_back(a);
          u2.push_back(b);
          answered = self(self, t2, x, u2, y, d - 1);
        }
        ok = answered;
      }
    }
    memo.emplace(std::move(key), ok);
    return ok;
  };
  return run(run, {}, w, {}, v, depth);
}

std::set<std::pair<StateId, StateId>> bf_pairs(const FragmentConfig& frag, const KripkeModel& m,
                                               const KripkeModel& n) {
  using Map = std::map<StateId, StateId>;
  std::vector<Map> family;
  // Every injective partial map, then the basic-sentence filter.
  std::vector<int> img(m.size(), -1);
  auto gen = [&](auto& self, StateId w) -> void {
    if (w == m.size()) {
      Map h;
      for (StateId a = 0; a < m.size(); ++a)
        if (img[a] >= 0) h[a] = static_cast<StateId>(img[a]);
      std::set<StateId> rng;
      for (auto [a, b] : h) rng.insert(b);
      if (rng.size() != h.size()) return;
      for (auto [a, b] : h)
        if (!agree(m, a, n, b)) return;
      family.push_back(h);
      return;
    }
    for (int b = -1; b < static_cast<int>(n.size()); ++b) {
      img[w] = b;
      self(self, w + 1);
    }
  };
  gen(gen, 0);

  std::vector<std::pair<PairSet, PairSet>> acts;
  if (frag.has(Op::Diamond)) acts = action_closure(m, n, frag);
  const Signature& sig = m.signature();
  auto extends = [](const Map& h, const Map& g) {
    return std::all_of(h.begin(), h.end(), [&](const auto& p) {
      auto it = g.find(p.first);
      return it != g.end() && it->second == p.second;
    });
  };
  auto pre = [](const Map& g, StateId v) -> std::optional<StateId> {
    for (auto [a, b] : g)
      if (b == v) return a;
    return std::nullopt;
  };

  std::vector<bool> alive(family.size(), true);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (!alive[i]) continue;
      const Map& h = family[i];
      auto some = [&](auto pred) {
        for (std::size_t j = 0; j < family.size(); ++j)
          if (alive[j] && extends(h, family[j]) && pred(family[j])) return true;
        return false;
      };
      bool ok = true;
      if (frag.has(Op::At))
        for (std::size_t k = 0; k < sig.named_count() && ok; ++k) {
          StateId km = m.denotation(sig.named(k));
          ok = some([&](const Map& g) { return g.count(km) > 0; });
        }
      for (const auto& [pm, pn] : acts) {
        for (auto [w1, v1] : h) {
          for (auto [a, w2] : pm) {
            if (a != w1 || !ok) continue;
            ok = some([&](const Map& g) { return g.count(w2) && pn.count({v1, g.at(w2)}); });
          }
          for (auto [b, v2] : pn) {
            if (b != v1 || !ok) continue;
            ok = some([&](const Map& g) {
              auto w2 = pre(g, v2);
              return w2 && pm.count({w1, *w2});
            });
          }
        }
      }
      if (frag.has(Op::Exists)) {
        for (StateId a = 0; a < m.size() && ok; ++a)
          ok = some([&](const Map& g) { return g.count(a) > 0; });
        for (StateId b = 0; b < n.size() && ok; ++b)
          ok = some([&](const Map& g) { return pre(g, b).has_value(); });
      }
      if (!ok) {
        alive[i] = false;
        changed = true;
      }
    }
  }
  std::set<std::pair<StateId, StateId>> out;
  for (std::size_t i = 0; i < family.size(); ++i)
    if (alive[i])
      for (auto p : family[i]) out.insert(p);
  return out;
}

}  // namespace hdpl::oracle
