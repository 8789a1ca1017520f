#include "hdpl/checker.hpp"

#include <unordered_map>

namespace hdpl {

namespace {

class Evaluator {
 public:
  explicit Evaluator(const KripkeModel& m) : m_(m) {}

  StateSet eval(const Sentence& s) {
    using K = Sentence::Kind;
    const std::size_t n = m_.size();
    switch (s.kind()) {
      case K::Prop: {
        auto p = m_.signature().prop_index(s.name());
        if (!p) throw SymbolError("undeclared proposition '" + s.name() + "'");
        return m_.prop_states(*p);
      }
      case K::Nom: {
        StateSet out(n);
        out.set(lookup(s.name()));
        return out;
      }
      case K::And: {
        StateSet out(n);
        out.set();
        for (const auto& c : s.conjuncts()) {
          out &= eval(c);
          if (out.none()) break;
        }
        return out;
      }
      case K::Neg: return ~eval(s.body());
      case K::Dia: {
        const Relation& r = relation(s.action());
        StateSet target = eval(s.body());
        StateSet out(n);
        for (StateId w = 0; w < n; ++w)
          if (r.successors(w).intersects(target)) out.set(w);
        return out;
      }
      case K::At: {
        StateId k = lookup(s.name());
        StateSet out(n);
        if (eval(s.body()).test(k)) out.set();
        return out;
      }
      case K::Store: {
        StateSet out(n);
        for (StateId w = 0; w < n; ++w) {
          env_.emplace_back(s.name(), w);
          bool hit = eval(s.body()).test(w);
          env_.pop_back();
          if (hit) out.set(w);
        }
        return out;
      }
      case K::Exists: {
        StateSet out(n);
        for (StateId w = 0; w < n && !out.all(); ++w) {
          env_.emplace_back(s.name(), w);
          out |= eval(s.body());
          env_.pop_back();
        }
        return out;
      }
    }
    throw Error("unknown sentence kind");
  }

 private:
  StateId lookup(const std::string& name) const {
    for (std::size_t i = env_.size(); i-- > 0;)
      if (env_[i].first == name) return env_[i].second;
    return m_.denotation(name);
  }

  const Relation& relation(const Action& a) {
    auto it = actions_.find(a);
    if (it == actions_.end()) it = actions_.emplace(a, interpret_action(m_, a)).first;
    return it->second;
  }

  const KripkeModel& m_;
  std::vector<std::pair<std::string, StateId>> env_;
  std::unordered_map<Action, Relation> actions_;
};

}  // namespace

StateSet extension(const KripkeModel& m, const Sentence& s) { return Evaluator(m).eval(s); }

bool satisfies(const PointedModel& pm, const Sentence& s) {
  return extension(pm.model, s).test(pm.current);
}

bool basic_agreement(const KripkeModel& m, StateId w, std::span<const StateId> named_m,
                     const KripkeModel& n, StateId v, std::span<const StateId> named_n) {
  for (std::size_t p = 0; p < m.signature().props.size(); ++p)
    if (m.holds(p, w) != n.holds(p, v)) return false;
  for (std::size_t i = 0; i < named_m.size(); ++i)
    if ((named_m[i] == w) != (named_n[i] == v)) return false;
  return true;
}

bool game_property(const PointedModel& left, const PointedModel& right) {
  if (!(left.model.signature() == right.model.signature()))
    throw Error("game property needs models over the same signature");
  return basic_agreement(left.model, left.current, left.model.named_interp(), right.model,
                         right.current, right.model.named_interp());
}

}  // namespace hdpl
