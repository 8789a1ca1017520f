#include "hdpl/games.hpp"

#include <algorithm>
#include <boost/container_hash/hash.hpp>
#include <map>
#include <sstream>

#include "hdpl/checker.hpp"

namespace hdpl {

namespace {

bool is_set_edge(const EdgeLabel& l) {
  return l.kind() == EdgeLabel::Kind::Dia || l.kind() == EdgeLabel::Kind::Exists;
}

bool less_ptr(const GamePtr& a, const GamePtr& b) {
  if (a == b) return false;
  if (a->hash() != b->hash()) return a->hash() < b->hash();
  return compare(*a, *b) < 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Game sentences

GameSentence::GameSentence(TreePtr tree, StateSet signs,
                           std::vector<std::vector<GamePtr>> components)
    : tree_(std::move(tree)), signs_(std::move(signs)), components_(std::move(components)) {
  if (!tree_) throw Error("game sentence without a tree");
  const auto& kids = tree_->children();
  if (components_.size() != kids.size())
    throw Error("game sentence needs one component per child edge");
  if (signs_.size() != basic_sentences(tree_->signature()).size())
    throw Error("game sentence needs one sign per basic sentence");
  for (std::size_t i = 0; i < kids.size(); ++i) {
    auto& c = components_[i];
    std::sort(c.begin(), c.end(), less_ptr);
    c.erase(std::unique(c.begin(), c.end(), same_sentence), c.end());
    if (!is_set_edge(kids[i].label) && c.size() != 1)
      throw Error("component under '" + kids[i].label.to_string() + "' must be a single sentence");
    for (const auto& g : c)
      if (g->tree() != kids[i].child) throw Error("component sentence over the wrong subtree");
  }
  std::size_t h = boost::hash_value(signs_);
  for (const auto& c : components_) {
    boost::hash_combine(h, c.size());
    for (const auto& g : c) boost::hash_combine(h, g->hash());
  }
  hash_ = h;
}

GamePtr GameSentence::make(GamePool& pool, TreePtr tree, StateSet signs,
                           std::vector<std::vector<GamePtr>> components) {
  return pool.intern(GameSentence(std::move(tree), std::move(signs), std::move(components)));
}

const std::vector<GamePtr>* GameSentence::component(const EdgeLabel& label) const {
  const auto& kids = tree_->children();
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (kids[i].label == label) return &components_[i];
  return nullptr;
}

int compare(const GameSentence& a, const GameSentence& b) {
  if (&a == &b) return 0;
  if (a.tree_ != b.tree_) return std::less<>()(a.tree_.get(), b.tree_.get()) ? -1 : 1;
  if (a.signs_ != b.signs_) return a.signs_ < b.signs_ ? -1 : 1;
  for (std::size_t i = 0; i < a.components_.size(); ++i) {
    const auto& x = a.components_[i];
    const auto& y = b.components_[i];
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == y[j]) continue;
      if (int c = compare(*x[j], *y[j])) return c;
    }
  }
  return 0;
}

bool same_sentence(const GamePtr& a, const GamePtr& b) { return a == b || *a == *b; }

bool GamePool::Eq::operator()(const GamePtr& a, const GamePtr& b) const {
  return same_sentence(a, b);
}

GamePtr GamePool::intern(GameSentence g) {
  auto p = std::make_shared<const GameSentence>(std::move(g));
  return *set_.insert(std::move(p)).first;
}

// ---------------------------------------------------------------------------
// Characteristic formulas

GamePtr char_formula(const TreePtr& tr, const PointedModel& pm, GamePool& pool) {
  const KripkeModel& m = pm.model;
  if (!(m.signature() == tr->signature()))
    throw Error("characteristic formula needs a model over the root signature of the tree");
  std::unordered_map<Action, Relation> rels;
  std::unordered_map<std::vector<std::size_t>, GamePtr, KeyHash> memo;
  StateSet all(m.size());
  all.set();

  auto rec = [&](auto& self, const TreePtr& node, StateId w,
                 const std::vector<StateId>& named) -> GamePtr {
    std::vector<std::size_t> key{reinterpret_cast<std::size_t>(node.get()), w};
    key.insert(key.end(), named.begin(), named.end());
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    std::size_t np = m.signature().props.size();
    StateSet signs(named.size() + np);
    for (std::size_t i = 0; i < named.size(); ++i) signs[i] = named[i] == w;
    for (std::size_t j = 0; j < np; ++j) signs[named.size() + j] = m.holds(j, w);

    std::vector<std::vector<GamePtr>> comps;
    for (const auto& e : node->children()) {
      std::vector<GamePtr> c;
      switch (e.label.kind()) {
        case EdgeLabel::Kind::Idle: c.push_back(self(self, e.child, w, named)); break;
        case EdgeLabel::Kind::Store: {
          auto ext = named;
          ext.push_back(w);
          c.push_back(self(self, e.child, w, ext));
          break;
        }
        case EdgeLabel::Kind::At: {
          auto k = node->signature().named_index(e.label.name());
          c.push_back(self(self, e.child, named[*k], named));
          break;
        }
        case EdgeLabel::Kind::Dia: {
          auto it = rels.find(e.label.action());
          if (it == rels.end())
            it = rels.emplace(e.label.action(), interpret_action(m, e.label.action())).first;
          const StateSet& succ = it->second.successors(w);
          for (auto u = succ.find_first(); u != StateSet::npos; u = succ.find_next(u))
            c.push_back(self(self, e.child, u, named));
          break;
        }
        case EdgeLabel::Kind::Exists: {
          auto ext = named;
          ext.push_back(0);
          for (StateId u = 0; u < m.size(); ++u) {
            ext.back() = u;
            c.push_back(self(self, e.child, w, ext));
          }
          break;
        }
      }
      comps.push_back(std::move(c));
    }
    GamePtr g = GameSentence::make(pool, node, std::move(signs), std::move(comps));
    memo.emplace(std::move(key), g);
    return g;
  };
  return rec(rec, tr, pm.current, m.named_interp());
}

GamePtr char_formula(const TreePtr& tr, const PointedModel& pm) {
  GamePool pool;
  return char_formula(tr, pm, pool);
}

// ---------------------------------------------------------------------------
// Lowering and printing

Sentence lower_game_sentence(const GamePtr& root) {
  std::unordered_map<const GameSentence*, Sentence> memo;
  auto rec = [&](auto& self, const GamePtr& g) -> Sentence {
    if (auto it = memo.find(g.get()); it != memo.end()) return it->second;
    const Signature& sig = g->tree()->signature();
    auto basics = basic_sentences(sig);
    std::vector<Sentence> parts;
    for (std::size_t i = 0; i < basics.size(); ++i) {
      Sentence b = i < sig.named_count() ? Sentence::nom(basics[i]) : Sentence::prop(basics[i]);
      parts.push_back(g->signs()[i] ? b : Sentence::neg(b));
    }
    const auto& kids = g->tree()->children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const EdgeLabel& lab = kids[i].label;
      const auto& comp = g->components()[i];
      std::vector<Sentence> members;
      for (const auto& c : comp) members.push_back(self(self, c));
      switch (lab.kind()) {
        case EdgeLabel::Kind::Idle: parts.push_back(members[0]); break;
        case EdgeLabel::Kind::Store:
          parts.push_back(Sentence::store(kids[i].child->signature().bound_vars.back(), members[0]));
          break;
        case EdgeLabel::Kind::At: parts.push_back(Sentence::at(lab.name(), members[0])); break;
        case EdgeLabel::Kind::Dia:
          for (const auto& s : members) parts.push_back(Sentence::dia(lab.action(), s));
          parts.push_back(Sentence::box(lab.action(), Sentence::disj(members)));
          break;
        case EdgeLabel::Kind::Exists: {
          const std::string& x = kids[i].child->signature().bound_vars.back();
          for (const auto& s : members) parts.push_back(Sentence::exists(x, s));
          parts.push_back(Sentence::forall(x, Sentence::disj(members)));
          break;
        }
      }
    }
    Sentence out = Sentence::conj(std::move(parts));
    memo.emplace(g.get(), out);
    return out;
  };
  return rec(rec, root);
}

namespace {

void print_rec(std::ostream& os, const GamePtr& g) {
  auto basics = basic_sentences(g->tree()->signature());
  os << '[';
  for (std::size_t i = 0; i < basics.size(); ++i)
    os << (i ? " " : "") << (g->signs()[i] ? '+' : '-') << basics[i];
  const auto& kids = g->tree()->children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    os << " | " << kids[i].label.to_string() << ' ';
    const auto& comp = g->components()[i];
    if (is_set_edge(kids[i].label)) {
      os << '{';
      for (std::size_t j = 0; j < comp.size(); ++j) {
        if (j) os << ", ";
        print_rec(os, comp[j]);
      }
      os << '}';
    } else {
      print_rec(os, comp[0]);
    }
  }
  os << ']';
}

constexpr std::uint64_t kSizeLimit = std::uint64_t{1} << 62;

std::optional<std::uint64_t> pow2(std::uint64_t k) {
  if (k >= 62) return std::nullopt;
  return std::uint64_t{1} << k;
}

std::optional<std::uint64_t> mul(std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
  if (!a || !b) return std::nullopt;
  if (*a == 0 || *b == 0) return 0;
  if (*a > kSizeLimit / *b) return std::nullopt;
  return *a * *b;
}

}  // namespace

std::string print_game_sentence(const GamePtr& g) {
  std::ostringstream os;
  print_rec(os, g);
  return os.str();
}

std::optional<std::uint64_t> theta_size(const TreePtr& tr) {
  std::map<const GameboardTree*, std::optional<std::uint64_t>> memo;
  auto rec = [&](auto& self, const TreePtr& t) -> std::optional<std::uint64_t> {
    if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
    auto n = pow2(basic_sentences(t->signature()).size());
    for (const auto& e : t->children()) {
      auto c = self(self, e.child);
      n = mul(n, is_set_edge(e.label) ? (c ? pow2(*c) : std::nullopt) : c);
    }
    memo.emplace(t.get(), n);
    return n;
  };
  return rec(rec, tr);
}

std::vector<GamePtr> enumerate_game_sentences(const TreePtr& tr, std::size_t cap,
                                              GamePool& pool) {
  auto n = theta_size(tr);
  if (!n || *n > cap)
    throw Error("tree has " + (n ? std::to_string(*n) : std::string("more than 2^62")) +
                " game sentences, above the cap of " + std::to_string(cap));
  std::map<const GameboardTree*, std::vector<GamePtr>> memo;
  auto rec = [&](auto& self, const TreePtr& t) -> const std::vector<GamePtr>& {
    if (auto it = memo.find(t.get()); it != memo.end()) return it->second;
    // Options for each component, then the product with every sign vector.
    std::vector<std::vector<std::vector<GamePtr>>> options;
    for (const auto& e : t->children()) {
      const auto& sub = self(self, e.child);
      std::vector<std::vector<GamePtr>> opts;
      if (is_set_edge(e.label)) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << sub.size()); ++mask) {
          std::vector<GamePtr> gamma;
          for (std::size_t j = 0; j < sub.size(); ++j)
            if (mask >> j & 1) gamma.push_back(sub[j]);
          opts.push_back(std::move(gamma));
        }
      } else {
        for (const auto& g : sub) opts.push_back({g});
      }
      options.push_back(std::move(opts));
    }
    std::size_t nb = basic_sentences(t->signature()).size();
    std::vector<GamePtr> out;
    std::vector<std::size_t> pick(options.size(), 0);
    for (std::uint64_t sm = 0; sm < (std::uint64_t{1} << nb); ++sm) {
      StateSet signs(nb, sm);
      std::fill(pick.begin(), pick.end(), 0);
      while (true) {
        std::vector<std::vector<GamePtr>> comps;
        for (std::size_t i = 0; i < options.size(); ++i) comps.push_back(options[i][pick[i]]);
        out.push_back(GameSentence::make(pool, t, signs, std::move(comps)));
        std::size_t i = 0;
        while (i < pick.size() && ++pick[i] == options[i].size()) pick[i++] = 0;
        if (i == pick.size()) break;
      }
    }
    return memo.emplace(t.get(), std::move(out)).first->second;
  };
  return rec(rec, tr);
}

// ---------------------------------------------------------------------------
// The finite game

std::size_t KeyHash::operator()(const std::vector<std::size_t>& v) const {
  return boost::hash_range(v.begin(), v.end());
}

EfGame::EfGame(TreePtr tree, KripkeModel left, KripkeModel right)
    : tree_(std::move(tree)), left_(std::move(left)), right_(std::move(right)) {
  if (!(left_.signature() == tree_->signature()) || !(right_.signature() == tree_->signature()))
    throw Error("both models must be over the root signature of the tree");
}

EfGame::Pos EfGame::pos_of(const GameState& s) const {
  return {s.node.get(), s.left, s.right, s.named_left, s.named_right};
}

bool EfGame::agree(const Pos& p) const {
  return basic_agreement(left_, p.w, p.nl, right_, p.v, p.nr);
}

std::string EfGame::disagreement(const Pos& p) const {
  const Signature& sig = p.node->signature();
  for (std::size_t i = 0; i < p.nl.size(); ++i)
    if ((p.nl[i] == p.w) != (p.nr[i] == p.v)) return sig.named(i);
  for (std::size_t j = 0; j < sig.props.size(); ++j)
    if (left_.holds(j, p.w) != right_.holds(j, p.v)) return sig.props[j];
  return {};
}

const Relation& EfGame::relation(const Action& a, Side side) const {
  auto it = actions_.find(a);
  if (it == actions_.end())
    it = actions_.emplace(a, std::make_pair(interpret_action(left_, a), interpret_action(right_, a)))
             .first;
  return side == Side::Left ? it->second.first : it->second.second;
}

StateSet EfGame::targets(const EdgeLabel& label, Side side, const Pos& p) const {
  const KripkeModel& m = side == Side::Left ? left_ : right_;
  if (label.kind() == EdgeLabel::Kind::Dia)
    return relation(label.action(), side).successors(side == Side::Left ? p.w : p.v);
  StateSet all(m.size());
  all.set();
  return all;
}

bool EfGame::abelard_can_move(const Pos& p) const {
  for (const auto& e : p.node->children()) {
    if (!is_set_edge(e.label)) return true;
    if (targets(e.label, Side::Left, p).any() || targets(e.label, Side::Right, p).any())
      return true;
  }
  return false;
}

EfGame::Pos EfGame::next(const Pos& p, std::size_t edge, Side side, std::optional<StateId> a,
                         std::optional<StateId> e) const {
  const TreeEdge& te = p.node->children()[edge];
  Pos c{te.child.get(), p.w, p.v, p.nl, p.nr};
  std::optional<StateId> l = side == Side::Left ? a : e;
  std::optional<StateId> r = side == Side::Left ? e : a;
  switch (te.label.kind()) {
    case EdgeLabel::Kind::Idle: break;
    case EdgeLabel::Kind::Store:
      c.nl.push_back(p.w);
      c.nr.push_back(p.v);
      break;
    case EdgeLabel::Kind::At: {
      auto k = *p.node->signature().named_index(te.label.name());
      c.w = p.nl[k];
      c.v = p.nr[k];
      break;
    }
    case EdgeLabel::Kind::Dia:
      c.w = *l;
      c.v = *r;
      break;
    case EdgeLabel::Kind::Exists:
      c.nl.push_back(*l);
      c.nr.push_back(*r);
      break;
  }
  return c;
}

std::size_t EfGame::value(const Pos& p) const {
  std::vector<std::size_t> key{reinterpret_cast<std::size_t>(p.node), p.w, p.v};
  key.insert(key.end(), p.nl.begin(), p.nl.end());
  key.insert(key.end(), p.nr.begin(), p.nr.end());
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  std::size_t best = kNever;
  if (!agree(p)) {
    best = 0;
  } else {
    const auto& kids = p.node->children();
    for (std::size_t i = 0; i < kids.size() && best > 1; ++i) {
      if (!is_set_edge(kids[i].label)) {
        best = std::min(best, move_value(p, {i, Side::Left, std::nullopt}));
        continue;
      }
      for (Side side : {Side::Left, Side::Right}) {
        StateSet ts = targets(kids[i].label, side, p);
        for (auto t = ts.find_first(); t != StateSet::npos; t = ts.find_next(t))
          best = std::min(best, answer_value(p, i, side, t, nullptr));
      }
    }
  }
  memo_.emplace(std::move(key), best);
  return best;
}

std::size_t EfGame::answer_value(const Pos& p, std::size_t edge, Side side, StateId t,
                                 std::optional<StateId>* answer) const {
  Side other = side == Side::Left ? Side::Right : Side::Left;
  StateSet as = targets(p.node->children()[edge].label, other, p);
  if (answer) answer->reset();
  std::size_t worst = 0;
  for (auto u = as.find_first(); u != StateSet::npos; u = as.find_next(u)) {
    std::size_t r = value(next(p, edge, side, t, u));
    r = r == kNever ? kNever : r + 1;
    if (r > worst || (answer && !*answer)) {
      worst = std::max(worst, r);
      if (answer) *answer = u;
    }
    if (worst == kNever) break;
  }
  return as.none() ? 1 : worst;
}

std::size_t EfGame::move_value(const Pos& p, const GameMove& m) const {
  if (m.target) return answer_value(p, m.edge, m.side, *m.target, nullptr);
  std::size_t r = value(next(p, m.edge, m.side, std::nullopt, std::nullopt));
  return r == kNever ? kNever : r + 1;
}

GameState EfGame::initial(StateId w, StateId v) const {
  if (w >= left_.size() || v >= right_.size()) throw Error("no such state");
  GameState s{tree_, w, v, left_.named_interp(), right_.named_interp(), std::nullopt,
              GameStatus::Ongoing, 0, {}};
  Pos p = pos_of(s);
  if (!agree(p)) {
    s.status = GameStatus::AbelardWon;
    s.reason = "the current states disagree on " + disagreement(p);
  } else if (!abelard_can_move(p)) {
    s.status = GameStatus::EloiseWon;
    s.reason = "Abelard has no move";
  }
  return s;
}

std::vector<GameMove> EfGame::legal_moves(const GameState& s) const {
  std::vector<GameMove> out;
  if (s.status != GameStatus::Ongoing) return out;
  Pos p = pos_of(s);
  const auto& kids = s.node->children();
  if (s.pending) {
    Side other = s.pending->side == Side::Left ? Side::Right : Side::Left;
    StateSet as = targets(kids[s.pending->edge].label, other, p);
    for (auto u = as.find_first(); u != StateSet::npos; u = as.find_next(u))
      out.push_back({s.pending->edge, other, u});
    return out;
  }
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (!is_set_edge(kids[i].label)) {
      out.push_back({i, Side::Left, std::nullopt});
      continue;
    }
    for (Side side : {Side::Left, Side::Right}) {
      StateSet ts = targets(kids[i].label, side, p);
      for (auto t = ts.find_first(); t != StateSet::npos; t = ts.find_next(t))
        out.push_back({i, side, t});
    }
  }
  return out;
}

GameState EfGame::after_round(const GameState& s, std::size_t edge, Side side,
                              std::optional<StateId> a, std::optional<StateId> e) const {
  Pos c = next(pos_of(s), edge, side, a, e);
  GameState t{s.node->children()[edge].child, c.w, c.v, c.nl, c.nr, std::nullopt,
              GameStatus::Ongoing, s.round + 1, {}};
  if (!agree(c)) {
    t.status = GameStatus::AbelardWon;
    t.reason = "the current states disagree on " + disagreement(c);
  } else if (!abelard_can_move(c)) {
    t.status = GameStatus::EloiseWon;
    t.reason = "Abelard has no move";
  }
  return t;
}

GameState EfGame::step(const GameState& s, const GameMove& m) const {
  auto legal = legal_moves(s);
  if (std::find(legal.begin(), legal.end(), m) == legal.end()) {
    std::string msg = "illegal move " + describe(m, s) + "; legal moves:";
    if (legal.empty()) msg += " none";
    for (const auto& l : legal) msg += " [" + describe(l, s) + "]";
    throw IllegalMove(msg);
  }
  if (s.pending) return after_round(s, s.pending->edge, s.pending->side, s.pending->target, m.target);
  if (!m.target) return after_round(s, m.edge, m.side, std::nullopt, std::nullopt);
  GameState t = s;
  t.pending = m;
  if (legal_moves(t).empty()) {
    t.status = GameStatus::AbelardWon;
    t.reason = "Eloise has no answer";
  }
  return t;
}

std::optional<std::size_t> EfGame::abelard_rounds(const GameState& s) const {
  std::size_t r = value(pos_of(s));
  if (r == kNever) return std::nullopt;
  return r;
}

GameMove EfGame::best_move(const GameState& s) const {
  auto legal = legal_moves(s);
  if (legal.empty()) throw Error("the game is over");
  Pos p = pos_of(s);
  if (s.pending) {
    std::optional<StateId> ans;
    answer_value(p, s.pending->edge, s.pending->side, *s.pending->target, &ans);
    Side other = s.pending->side == Side::Left ? Side::Right : Side::Left;
    return {s.pending->edge, other, ans};
  }
  GameMove best = legal.front();
  std::size_t bv = kNever;
  for (const auto& m : legal) {
    std::size_t v = move_value(p, m);
    if (v < bv) {
      bv = v;
      best = m;
    }
  }
  return best;
}

EfResult EfGame::solve(StateId w, StateId v) const {
  EfResult res;
  GameState s = initial(w, v);
  std::size_t r = value(pos_of(s));
  if (r == kNever) {
    res.eloise_wins = true;
    return res;
  }
  res.rounds = r;
  while (s.status == GameStatus::Ongoing) {
    GameMove m = best_move(s);
    const EdgeLabel& lab = s.node->children()[m.edge].label;
    s = step(s, m);
    if (!m.target) {
      res.trace.push_back({lab, Side::Left, std::nullopt, std::nullopt});
      continue;
    }
    std::optional<StateId> answer;
    if (s.status == GameStatus::Ongoing) {
      GameMove e = best_move(s);
      answer = e.target;
      s = step(s, e);
    }
    res.trace.push_back({lab, m.side, m.target, answer});
  }
  if (s.status != GameStatus::AbelardWon || res.trace.size() != r)
    throw Error("internal error: game trace disagrees with the solved value");
  return res;
}

std::string EfGame::describe(const GameMove& m, const GameState& s) const {
  if (m.edge >= s.node->children().size()) return "edge " + std::to_string(m.edge) + " (no such edge)";
  std::string out = s.node->children()[m.edge].label.to_string();
  if (m.target) {
    const KripkeModel& mod = m.side == Side::Left ? left_ : right_;
    out += std::string(m.side == Side::Left ? " left " : " right ") +
           (*m.target < mod.size() ? mod.state_name(*m.target) : std::to_string(*m.target));
  }
  return out;
}

EfResult ef_solve(const TreePtr& tr, const PointedModel& left, const PointedModel& right) {
  return EfGame(tr, left.model, right.model).solve(left.current, right.current);
}

bool replay_trace(const TreePtr& tr, const PointedModel& left, const PointedModel& right,
                  const std::vector<TraceStep>& trace) {
  EfGame g(tr, left.model, right.model);
  GameState s = g.initial(left.current, right.current);
  try {
    for (const auto& st : trace) {
      if (s.status != GameStatus::Ongoing) return false;
      const auto& kids = s.node->children();
      auto it = std::find_if(kids.begin(), kids.end(),
                             [&](const TreeEdge& e) { return e.label == st.label; });
      if (it == kids.end()) return false;
      std::size_t edge = static_cast<std::size_t>(it - kids.begin());
      s = g.step(s, {edge, st.side, st.abelard});
      if (st.eloise) {
        Side other = st.side == Side::Left ? Side::Right : Side::Left;
        s = g.step(s, {edge, other, st.eloise});
      }
    }
  } catch (const IllegalMove&) {
    return false;
  }
  return s.status == GameStatus::AbelardWon;
}

// ---------------------------------------------------------------------------
// Normal forms

struct NormalForm::Test {
  enum class Kind { Sign, Not, All, One, Some } kind;
  std::size_t index = 0;
  std::optional<EdgeLabel> label;
  std::vector<std::shared_ptr<const Test>> kids;
};

namespace {

using TestPtr = std::shared_ptr<const NormalForm::Test>;
using T = NormalForm::Test;

TestPtr make_test(T::Kind k, std::size_t index, std::optional<EdgeLabel> label,
                  std::vector<TestPtr> kids) {
  return std::make_shared<const T>(T{k, index, std::move(label), std::move(kids)});
}

bool eval(const T& t, const GameSentence& g) {
  switch (t.kind) {
    case T::Kind::Sign: return g.signs()[t.index];
    case T::Kind::Not: return !eval(*t.kids[0], g);
    case T::Kind::All:
      return std::all_of(t.kids.begin(), t.kids.end(), [&](const TestPtr& k) { return eval(*k, g); });
    case T::Kind::One:
    case T::Kind::Some: {
      const auto* comp = g.component(*t.label);
      if (!comp) throw Error("game sentence lacks an edge '" + t.label->to_string() + "'");
      return std::any_of(comp->begin(), comp->end(),
                         [&](const GamePtr& c) { return eval(*t.kids[0], *c); });
    }
  }
  return false;
}

std::pair<TreePtr, TestPtr> nf_rec(const Sentence& s, const Signature& sig) {
  using K = Sentence::Kind;
  auto unary = [&](EdgeLabel label, T::Kind tk, const Signature& child_sig) {
    auto [tr, t] = nf_rec(s.body(), child_sig);
    return std::make_pair(GameboardTree::node(sig, {{label, tr}}),
                          make_test(tk, 0, label, {t}));
  };
  switch (s.kind()) {
    case K::Prop:
      return {GameboardTree::leaf(sig),
              make_test(T::Kind::Sign, sig.named_count() + *sig.prop_index(s.name()), {}, {})};
    case K::Nom:
      return {GameboardTree::leaf(sig),
              make_test(T::Kind::Sign, *sig.named_index(s.name()), {}, {})};
    case K::And: {
      if (s.conjuncts().empty())
        return {GameboardTree::leaf(sig), make_test(T::Kind::All, 0, {}, {})};
      TreePtr merged;
      std::vector<TestPtr> tests;
      for (const auto& c : s.conjuncts()) {
        auto [tr, t] = nf_rec(c, sig);
        merged = merged ? merge_trees(merged, tr) : tr;
        tests.push_back(t);
      }
      auto all = make_test(T::Kind::All, 0, {}, std::move(tests));
      return {GameboardTree::node(sig, {{EdgeLabel::idle(), merged}}),
              make_test(T::Kind::One, 0, EdgeLabel::idle(), {all})};
    }
    case K::Neg: {
      auto [tr, t] = nf_rec(s.body(), sig);
      return {tr, make_test(T::Kind::Not, 0, {}, {t})};
    }
    case K::Dia: return unary(EdgeLabel::dia(s.action()), T::Kind::Some, sig);
    case K::At: return unary(EdgeLabel::at(s.name()), T::Kind::One, sig);
    case K::Store: return unary(EdgeLabel::store(), T::Kind::One, extend_signature(sig).first);
    case K::Exists: return unary(EdgeLabel::exists(), T::Kind::Some, extend_signature(sig).first);
  }
  throw Error("unknown sentence kind");
}

}  // namespace

bool NormalForm::contains(const GamePtr& g) const { return eval(*test_, *g); }

NormalForm normal_form(const Sentence& s, const Signature& sig, const FragmentConfig& frag) {
  check_well_formed(s, sig);
  auto rep = validate_in_fragment(s, frag);
  if (!rep.accepted)
    throw FragmentError("'" + rep.violations.front().construct + "' is outside the fragment " +
                        frag.to_string());
  auto [tr, t] = nf_rec(canonicalize(s, sig), sig);
  return NormalForm(tr, t);
}

}  // namespace hdpl
