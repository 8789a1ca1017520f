#include "hdpl/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <unordered_set>

namespace hdpl {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

template <class C>
bool contains(const C& c, std::string_view name) {
  return std::find(c.begin(), c.end(), name) != c.end();
}

template <class C>
std::optional<std::size_t> index_of(const C& c, std::string_view name) {
  auto it = std::find(c.begin(), c.end(), name);
  if (it == c.end()) return std::nullopt;
  return static_cast<std::size_t>(it - c.begin());
}

}  // namespace

// ---------------------------------------------------------------------------
// Signature

Signature Signature::make(std::vector<std::string> nominals,
                          std::vector<std::string> relations,
                          std::vector<std::string> props) {
  std::unordered_set<std::string> seen;
  for (const auto* pool : {&nominals, &relations, &props}) {
    for (const auto& n : *pool) {
      if (n.empty()) throw SymbolError("empty symbol name");
      if (!seen.insert(n).second) throw SymbolError("symbol '" + n + "' declared twice");
    }
  }
  Signature s;
  s.nominals = std::move(nominals);
  s.relations = std::move(relations);
  s.props = std::move(props);
  return s;
}

bool Signature::declares(std::string_view name) const {
  return contains(nominals, name) || contains(relations, name) ||
         contains(props, name) || contains(bound_vars, name);
}

bool Signature::is_relation(std::string_view name) const { return contains(relations, name); }
bool Signature::is_prop(std::string_view name) const { return contains(props, name); }

std::optional<std::size_t> Signature::named_index(std::string_view name) const {
  // Later variables shadow earlier ones of the same name.
  for (std::size_t i = bound_vars.size(); i-- > 0;)
    if (bound_vars[i] == name) return nominals.size() + i;
  return index_of(nominals, name);
}

std::optional<std::size_t> Signature::relation_index(std::string_view name) const {
  return index_of(relations, name);
}

std::optional<std::size_t> Signature::prop_index(std::string_view name) const {
  return index_of(props, name);
}

const std::string& Signature::named(std::size_t i) const {
  if (i < nominals.size()) return nominals[i];
  return bound_vars.at(i - nominals.size());
}

Signature Signature::base() const {
  Signature s = *this;
  s.bound_vars.clear();
  return s;
}

std::string next_variable(const Signature& sig) {
  std::string name = "x" + std::to_string(sig.bound_vars.size());
  while (sig.declares(name)) name += '_';
  return name;
}

std::pair<Signature, std::string> extend_signature(const Signature& sig) {
  std::string var = next_variable(sig);
  Signature ext = sig;
  ext.bound_vars.push_back(var);
  return {std::move(ext), std::move(var)};
}

std::vector<std::string> basic_sentences(const Signature& sig) {
  std::vector<std::string> out;
  out.reserve(sig.named_count() + sig.props.size());
  out.insert(out.end(), sig.nominals.begin(), sig.nominals.end());
  out.insert(out.end(), sig.bound_vars.begin(), sig.bound_vars.end());
  out.insert(out.end(), sig.props.begin(), sig.props.end());
  return out;
}

// ---------------------------------------------------------------------------
// FragmentConfig

namespace {
constexpr std::string_view kOpNames[] = {"diamond", "at", "store", "exists"};
constexpr std::string_view kCtorNames[] = {"union", "comp", "star"};
}  // namespace

FragmentConfig::FragmentConfig(std::initializer_list<Op> ops,
                               std::initializer_list<ActionCtor> ctors) {
  for (Op o : ops) ops_.set(static_cast<std::size_t>(o));
  for (ActionCtor c : ctors) ctors_.set(static_cast<std::size_t>(c));
  check();
}

FragmentConfig FragmentConfig::full() {
  return FragmentConfig({Op::Diamond, Op::At, Op::Store, Op::Exists},
                        {ActionCtor::Union, ActionCtor::Comp, ActionCtor::Star});
}

void FragmentConfig::check() const {
  if (ctors_.any() && !has(Op::Diamond))
    throw FragmentError("action constructors require diamond");
}

FragmentConfig FragmentConfig::parse(std::string_view text) {
  FragmentConfig f;
  std::size_t i = 0;
  while (i <= text.size()) {
    std::size_t j = text.find(',', i);
    if (j == std::string_view::npos) j = text.size();
    std::string item;
    for (char c : text.substr(i, j - i))
      if (!std::isspace(static_cast<unsigned char>(c)))
        item += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    i = j + 1;
    if (item.empty()) continue;
    if (item == "all" || item == "full") {
      f = full();
      continue;
    }
    bool found = false;
    for (std::size_t k = 0; k < 4; ++k)
      if (item == kOpNames[k]) f.ops_.set(k), found = true;
    for (std::size_t k = 0; k < 3; ++k)
      if (item == kCtorNames[k]) f.ctors_.set(k), found = true;
    if (!found) throw FragmentError("unknown fragment item '" + item + "'");
  }
  f.check();
  return f;
}

FragmentConfig FragmentConfig::with(Op op) const {
  FragmentConfig f = *this;
  f.ops_.set(static_cast<std::size_t>(op));
  return f;
}

FragmentConfig FragmentConfig::without(Op op) const {
  FragmentConfig f = *this;
  f.ops_.reset(static_cast<std::size_t>(op));
  if (op == Op::Diamond) f.ctors_.reset();
  return f;
}

FragmentConfig FragmentConfig::with(ActionCtor c) const {
  FragmentConfig f = *this;
  f.ctors_.set(static_cast<std::size_t>(c));
  f.check();
  return f;
}

FragmentConfig FragmentConfig::without_ctors() const {
  FragmentConfig f = *this;
  f.ctors_.reset();
  return f;
}

bool FragmentConfig::subset_of(const FragmentConfig& other) const {
  return (ops_ & ~other.ops_).none() && (ctors_ & ~other.ctors_).none();
}

std::string FragmentConfig::to_string() const {
  std::string out;
  auto add = [&](std::string_view n) {
    if (!out.empty()) out += ',';
    out += n;
  };
  for (std::size_t k = 0; k < 4; ++k)
    if (ops_.test(k)) add(kOpNames[k]);
  for (std::size_t k = 0; k < 3; ++k)
    if (ctors_.test(k)) add(kCtorNames[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Action

struct Action::Node {
  Kind kind;
  std::string name;
  std::vector<Action> kids;
  std::size_t hash;
};

Action Action::rel(std::string name) {
  std::size_t h = mix(0x51, std::hash<std::string>{}(name));
  return Action(std::make_shared<const Node>(Node{Kind::Rel, std::move(name), {}, h}));
}

Action Action::union_of(Action a, Action b) {
  std::size_t h = mix(mix(0x52, a.hash()), b.hash());
  return Action(std::make_shared<const Node>(Node{Kind::Union, {}, {std::move(a), std::move(b)}, h}));
}

Action Action::comp(Action a, Action b) {
  std::size_t h = mix(mix(0x53, a.hash()), b.hash());
  return Action(std::make_shared<const Node>(Node{Kind::Comp, {}, {std::move(a), std::move(b)}, h}));
}

Action Action::star(Action a) {
  std::size_t h = mix(0x54, a.hash());
  return Action(std::make_shared<const Node>(Node{Kind::Star, {}, {std::move(a)}, h}));
}

Action::Kind Action::kind() const { return node_->kind; }
const std::string& Action::name() const { return node_->name; }
const Action& Action::lhs() const { return node_->kids.at(0); }
const Action& Action::rhs() const { return node_->kids.at(1); }
const Action& Action::operand() const { return node_->kids.at(0); }
std::size_t Action::hash() const { return node_->hash; }

std::strong_ordering operator<=>(const Action& a, const Action& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->kids.begin(), a.node_->kids.end(),
                                                b.node_->kids.begin(), b.node_->kids.end());
}

// ---------------------------------------------------------------------------
// Sentence

struct Sentence::Node {
  Kind kind;
  std::string name;
  std::optional<Action> action;
  std::vector<Sentence> kids;
  std::size_t hash;
  std::size_t size;
};

namespace {

std::size_t node_hash(Sentence::Kind k, const std::string& name, const Action* a,
                      const std::vector<Sentence>& kids) {
  std::size_t h = mix(0x61, static_cast<std::size_t>(k));
  if (!name.empty()) h = mix(h, std::hash<std::string>{}(name));
  if (a) h = mix(h, a->hash());
  for (const auto& s : kids) h = mix(h, s.hash());
  return h;
}

}  // namespace

Sentence Sentence::make(Kind kind, std::string name, std::optional<Action> action,
                        std::vector<Sentence> kids) {
  std::size_t size = 1;
  for (const auto& k : kids) size += k.size();
  std::size_t h = node_hash(kind, name, action ? &*action : nullptr, kids);
  return Sentence(std::make_shared<const Node>(
      Node{kind, std::move(name), std::move(action), std::move(kids), h, size}));
}

Sentence Sentence::prop(std::string name) { return make(Kind::Prop, std::move(name), {}, {}); }

Sentence Sentence::nom(std::string name) { return make(Kind::Nom, std::move(name), {}, {}); }

Sentence Sentence::conj(std::vector<Sentence> parts) {
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  if (parts.size() == 1) return parts.front();
  return make(Kind::And, {}, {}, std::move(parts));
}

Sentence Sentence::neg(Sentence s) { return make(Kind::Neg, {}, {}, {std::move(s)}); }

Sentence Sentence::dia(Action a, Sentence s) {
  return make(Kind::Dia, {}, std::move(a), {std::move(s)});
}

Sentence Sentence::at(std::string name, Sentence s) {
  return make(Kind::At, std::move(name), {}, {std::move(s)});
}

Sentence Sentence::store(std::string var, Sentence s) {
  return make(Kind::Store, std::move(var), {}, {std::move(s)});
}

Sentence Sentence::exists(std::string var, Sentence s) {
  return make(Kind::Exists, std::move(var), {}, {std::move(s)});
}

Sentence Sentence::disj(std::vector<Sentence> parts) {
  for (auto& p : parts) p = neg(std::move(p));
  return neg(conj(std::move(parts)));
}

Sentence Sentence::box(Action a, Sentence s) { return neg(dia(std::move(a), neg(std::move(s)))); }

Sentence Sentence::forall(std::string var, Sentence s) {
  return neg(exists(std::move(var), neg(std::move(s))));
}

Sentence Sentence::implies(Sentence a, Sentence b) { return disj({neg(std::move(a)), std::move(b)}); }

Sentence::Kind Sentence::kind() const { return node_->kind; }
const std::string& Sentence::name() const { return node_->name; }
const Action& Sentence::action() const { return node_->action.value(); }
const Sentence& Sentence::body() const {
  if (node_->kind == Kind::And || node_->kids.empty())
    throw std::logic_error("sentence has no body");
  return node_->kids.front();
}
const std::vector<Sentence>& Sentence::conjuncts() const { return node_->kids; }
std::size_t Sentence::size() const { return node_->size; }
std::size_t Sentence::hash() const { return node_->hash; }

std::strong_ordering operator<=>(const Sentence& a, const Sentence& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  if (a.node_->action && b.node_->action)
    if (auto c = *a.node_->action <=> *b.node_->action; c != 0) return c;
  if (auto c = a.node_->kids.size() <=> b.node_->kids.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(a.node_->kids.begin(), a.node_->kids.end(),
                                                b.node_->kids.begin(), b.node_->kids.end());
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { Ident, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(std::string_view in) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < in.size() && (std::isalnum(static_cast<unsigned char>(in[j])) ||
                               in[j] == '_' || in[j] == '\''))
        ++j;
      out.push_back({Tok::Ident, std::string(in.substr(i, j - i)), i});
      i = j;
    } else if (std::string_view("~&|<>[]@.()+;*").find(static_cast<char>(c)) !=
               std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, static_cast<char>(c)), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
    }
  }
  out.push_back({Tok::End, "", in.size()});
  return out;
}

bool is_keyword(const std::string& s) {
  return s == "true" || s == "false" || s == "down" || s == "exists" || s == "forall";
}

class Parser {
 public:
  Parser(std::string_view text, const Signature& sig, const FragmentConfig& frag)
      : toks_(lex(text)), base_(sig), cur_(sig), frag_(frag) {}

  Sentence sentence() {
    Sentence s = parse_or();
    expect_end();
    return s;
  }

  Action action() {
    Action a = parse_union();
    expect_end();
    return a;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_word(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  Token take() { return toks_[pos_++]; }

  void expect_sym(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail("unexpected trailing input");
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, t.pos);
  }

  void gate(Op op, std::string_view name, std::size_t pos) const {
    if (!frag_.has(op))
      throw FragmentError("constructor '" + std::string(name) +
                          "' is not enabled in the fragment (position " +
                          std::to_string(pos) + ")");
  }

  void gate(ActionCtor c, std::string_view name, std::size_t pos) const {
    if (!frag_.has(c))
      throw FragmentError("action constructor '" + std::string(name) +
                          "' is not enabled in the fragment (position " +
                          std::to_string(pos) + ")");
  }

  Token ident(std::string_view what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected " + std::string(what));
    return take();
  }

  std::optional<std::string> resolve_named(const std::string& name) const {
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i].first == name) return scope_[i].second;
    if (base_.named_index(name)) return name;
    return std::nullopt;
  }

  Sentence parse_or() {
    std::vector<Sentence> parts{parse_and()};
    while (at_sym("|")) {
      ++pos_;
      parts.push_back(parse_and());
    }
    if (parts.size() == 1) return parts.front();
    return Sentence::disj(std::move(parts));
  }

  Sentence parse_and() {
    std::vector<Sentence> parts{parse_unary()};
    while (at_sym("&")) {
      ++pos_;
      parts.push_back(parse_unary());
    }
    if (parts.size() == 1) return parts.front();
    return Sentence::conj(std::move(parts));
  }

  Sentence bind(Op op, bool universal) {
    Token kw = take();
    gate(op, kw.text, kw.pos);
    Token v = ident("variable name");
    if (base_.is_prop(v.text) || base_.is_relation(v.text) ||
        std::find(base_.nominals.begin(), base_.nominals.end(), v.text) != base_.nominals.end())
      throw SymbolError("binder '" + v.text + "' collides with a declared symbol (position " +
                        std::to_string(v.pos) + ")");
    expect_sym(".");
    auto [ext, var] = extend_signature(cur_);
    Signature saved = cur_;
    cur_ = std::move(ext);
    scope_.emplace_back(v.text, var);
    Sentence body = parse_unary();
    scope_.pop_back();
    cur_ = std::move(saved);
    if (op == Op::Store) return Sentence::store(var, std::move(body));
    if (universal) return Sentence::forall(var, std::move(body));
    return Sentence::exists(var, std::move(body));
  }

  Sentence parse_unary() {
    const Token& t = peek();
    if (t.kind == Tok::Sym) {
      if (t.text == "~") {
        ++pos_;
        return Sentence::neg(parse_unary());
      }
      if (t.text == "<" || t.text == "[") {
        std::size_t p = t.pos;
        bool box = t.text == "[";
        ++pos_;
        gate(Op::Diamond, box ? "box" : "diamond", p);
        Action a = parse_union();
        expect_sym(box ? "]" : ">");
        Sentence body = parse_unary();
        return box ? Sentence::box(std::move(a), std::move(body))
                   : Sentence::dia(std::move(a), std::move(body));
      }
      if (t.text == "@") {
        std::size_t p = t.pos;
        ++pos_;
        gate(Op::At, "at", p);
        Token k = ident("nominal or variable");
        auto r = resolve_named(k.text);
        if (!r)
          throw SymbolError("'" + k.text + "' is not a nominal or variable in scope (position " +
                            std::to_string(k.pos) + ")");
        return Sentence::at(*r, parse_unary());
      }
      if (t.text == "(") {
        ++pos_;
        Sentence s = parse_or();
        expect_sym(")");
        return s;
      }
      fail("expected a sentence");
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true") return ++pos_, Sentence::truth();
      if (t.text == "false") return ++pos_, Sentence::falsity();
      if (t.text == "down") return bind(Op::Store, false);
      if (t.text == "exists") return bind(Op::Exists, false);
      if (t.text == "forall") return bind(Op::Exists, true);
      Token id = take();
      if (auto r = resolve_named(id.text)) return Sentence::nom(*r);
      if (base_.is_prop(id.text)) return Sentence::prop(id.text);
      if (base_.is_relation(id.text))
        throw SymbolError("relation '" + id.text + "' used as a sentence (position " +
                          std::to_string(id.pos) + ")");
      throw SymbolError("undeclared symbol '" + id.text + "' (position " +
                        std::to_string(id.pos) + ")");
    }
    fail("expected a sentence");
  }

  Action parse_union() {
    Action a = parse_comp();
    while (at_sym("+")) {
      gate(ActionCtor::Union, "union", take().pos);
      a = Action::union_of(std::move(a), parse_comp());
    }
    return a;
  }

  Action parse_comp() {
    Action a = parse_postfix();
    while (at_sym(";")) {
      gate(ActionCtor::Comp, "comp", take().pos);
      a = Action::comp(std::move(a), parse_postfix());
    }
    return a;
  }

  Action parse_postfix() {
    Action a = parse_atom();
    while (at_sym("*")) {
      gate(ActionCtor::Star, "star", take().pos);
      a = Action::star(std::move(a));
    }
    return a;
  }

  Action parse_atom() {
    if (at_sym("(")) {
      ++pos_;
      Action a = parse_union();
      expect_sym(")");
      return a;
    }
    Token id = ident("relation name");
    if (!base_.is_relation(id.text))
      throw SymbolError("undeclared relation '" + id.text + "' (position " +
                        std::to_string(id.pos) + ")");
    return Action::rel(id.text);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature& base_;
  Signature cur_;
  const FragmentConfig& frag_;
  std::vector<std::pair<std::string, std::string>> scope_;
};

}  // namespace

Sentence parse_sentence(std::string_view text, const Signature& sig, const FragmentConfig& frag) {
  return Parser(text, sig, frag).sentence();
}

Action parse_action(std::string_view text, const Signature& sig, const FragmentConfig& frag) {
  return Parser(text, sig, frag).action();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

int action_prec(const Action& a) {
  switch (a.kind()) {
    case Action::Kind::Union: return 0;
    case Action::Kind::Comp: return 1;
    default: return 2;
  }
}

void print_act(std::ostream& os, const Action& a, int min_prec) {
  bool paren = action_prec(a) < min_prec;
  if (paren) os << '(';
  switch (a.kind()) {
    case Action::Kind::Rel: os << a.name(); break;
    case Action::Kind::Union:
      print_act(os, a.lhs(), 0);
      os << " + ";
      print_act(os, a.rhs(), 1);
      break;
    case Action::Kind::Comp:
      print_act(os, a.lhs(), 1);
      os << " ; ";
      print_act(os, a.rhs(), 2);
      break;
    case Action::Kind::Star:
      print_act(os, a.operand(), 2);
      os << '*';
      break;
  }
  if (paren) os << ')';
}

// Disjunction: ~(~a1 & ... & ~an) with n >= 2.
bool as_disjunction(const Sentence& s) {
  if (s.kind() != Sentence::Kind::Neg) return false;
  const Sentence& b = s.body();
  if (b.kind() != Sentence::Kind::And || b.conjuncts().size() < 2) return false;
  return std::all_of(b.conjuncts().begin(), b.conjuncts().end(),
                     [](const Sentence& c) { return c.kind() == Sentence::Kind::Neg; });
}

bool is_binary(const Sentence& s) {
  return (s.kind() == Sentence::Kind::And && !s.conjuncts().empty()) || as_disjunction(s);
}

void print_sen(std::ostream& os, const Sentence& s);

void print_unary(std::ostream& os, const Sentence& s) {
  if (is_binary(s)) {
    os << '(';
    print_sen(os, s);
    os << ')';
  } else {
    print_sen(os, s);
  }
}

void print_sen(std::ostream& os, const Sentence& s) {
  using K = Sentence::Kind;
  switch (s.kind()) {
    case K::Prop:
    case K::Nom: os << s.name(); return;
    case K::And: {
      if (s.conjuncts().empty()) {
        os << "true";
        return;
      }
      bool first = true;
      for (const auto& c : s.conjuncts()) {
        if (!first) os << " & ";
        first = false;
        print_unary(os, c);
      }
      return;
    }
    case K::Neg: {
      const Sentence& b = s.body();
      if (b.kind() == K::And && b.conjuncts().empty()) {
        os << "false";
        return;
      }
      if (as_disjunction(s)) {
        bool first = true;
        for (const auto& c : b.conjuncts()) {
          if (!first) os << " | ";
          first = false;
          print_unary(os, c.body());
        }
        return;
      }
      if (b.kind() == K::Dia && b.body().kind() == K::Neg) {
        os << '[';
        print_act(os, b.action(), 0);
        os << ']';
        print_unary(os, b.body().body());
        return;
      }
      if (b.kind() == K::Exists && b.body().kind() == K::Neg) {
        os << "forall " << b.name() << " . ";
        print_unary(os, b.body().body());
        return;
      }
      os << '~';
      print_unary(os, b);
      return;
    }
    case K::Dia:
      os << '<';
      print_act(os, s.action(), 0);
      os << '>';
      print_unary(os, s.body());
      return;
    case K::At:
      os << '@' << s.name() << ' ';
      print_unary(os, s.body());
      return;
    case K::Store:
      os << "down " << s.name() << " . ";
      print_unary(os, s.body());
      return;
    case K::Exists:
      os << "exists " << s.name() << " . ";
      print_unary(os, s.body());
      return;
  }
}

}  // namespace

std::string print_sentence(const Sentence& s) {
  std::ostringstream os;
  print_sen(os, s);
  return os.str();
}

std::string print_action(const Action& a) {
  std::ostringstream os;
  print_act(os, a, 0);
  return os.str();
}

// ---------------------------------------------------------------------------
// Well-formedness and fragment validation

void check_well_formed(const Action& a, const Signature& sig) {
  if (a.kind() == Action::Kind::Rel) {
    if (!sig.is_relation(a.name())) throw SymbolError("undeclared relation '" + a.name() + "'");
    return;
  }
  check_well_formed(a.lhs(), sig);
  if (a.kind() != Action::Kind::Star) check_well_formed(a.rhs(), sig);
}

void check_well_formed(const Sentence& s, const Signature& sig) {
  using K = Sentence::Kind;
  switch (s.kind()) {
    case K::Prop:
      if (!sig.is_prop(s.name())) throw SymbolError("undeclared proposition '" + s.name() + "'");
      return;
    case K::Nom:
    case K::At:
      if (!sig.named_index(s.name()))
        throw SymbolError("'" + s.name() + "' is not a nominal or variable in scope");
      if (s.kind() == K::At) check_well_formed(s.body(), sig);
      return;
    case K::And:
      for (const auto& c : s.conjuncts()) check_well_formed(c, sig);
      return;
    case K::Neg: check_well_formed(s.body(), sig); return;
    case K::Dia:
      check_well_formed(s.action(), sig);
      check_well_formed(s.body(), sig);
      return;
    case K::Store:
    case K::Exists: {
      if (s.name().empty() || sig.declares(s.name()))
        throw SymbolError("binder '" + s.name() + "' is not fresh");
      Signature ext = sig;
      ext.bound_vars.push_back(s.name());
      check_well_formed(s.body(), ext);
      return;
    }
  }
}

namespace {

void collect(const Action& a, const FragmentConfig& frag, const std::string& path,
             FragmentReport& r) {
  auto flag = [&](ActionCtor c, std::string_view n) {
    if (!frag.has(c)) r.violations.push_back({path, std::string(n)});
  };
  switch (a.kind()) {
    case Action::Kind::Rel: return;
    case Action::Kind::Union: flag(ActionCtor::Union, "union"); break;
    case Action::Kind::Comp: flag(ActionCtor::Comp, "comp"); break;
    case Action::Kind::Star: flag(ActionCtor::Star, "star"); break;
  }
  collect(a.lhs(), frag, path + ".0", r);
  if (a.kind() != Action::Kind::Star) collect(a.rhs(), frag, path + ".1", r);
}

std::string child_path(const std::string& path, std::size_t i) {
  return path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
}

void collect(const Sentence& s, const FragmentConfig& frag, const std::string& path,
             FragmentReport& r) {
  using K = Sentence::Kind;
  auto flag = [&](Op op, std::string_view n) {
    if (!frag.has(op)) r.violations.push_back({path, std::string(n)});
  };
  switch (s.kind()) {
    case K::Prop:
    case K::Nom: return;
    case K::And:
      for (std::size_t i = 0; i < s.conjuncts().size(); ++i)
        collect(s.conjuncts()[i], frag, child_path(path, i), r);
      return;
    case K::Neg: break;
    case K::Dia:
      flag(Op::Diamond, "diamond");
      collect(s.action(), frag, path + ":act", r);
      break;
    case K::At: flag(Op::At, "at"); break;
    case K::Store: flag(Op::Store, "store"); break;
    case K::Exists: flag(Op::Exists, "exists"); break;
  }
  collect(s.body(), frag, child_path(path, 0), r);
}

}  // namespace

FragmentReport validate_in_fragment(const Sentence& s, const FragmentConfig& frag) {
  FragmentReport r;
  collect(s, frag, "", r);
  r.accepted = r.violations.empty();
  return r;
}

FragmentReport validate_in_fragment(const Action& a, const FragmentConfig& frag) {
  FragmentReport r;
  collect(a, frag, "act", r);
  r.accepted = r.violations.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Renaming

namespace {

std::string mapped(const std::map<std::string, std::string>& m, const std::string& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

std::vector<std::string> mapped_pool(const std::map<std::string, std::string>& m,
                                     const std::vector<std::string>& pool) {
  std::vector<std::string> out;
  for (const auto& n : pool) {
    std::string t = mapped(m, n);
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

Action rename_action(const Action& a, const Renaming& r) {
  switch (a.kind()) {
    case Action::Kind::Rel: return Action::rel(mapped(r.relations, a.name()));
    case Action::Kind::Union:
      return Action::union_of(rename_action(a.lhs(), r), rename_action(a.rhs(), r));
    case Action::Kind::Comp:
      return Action::comp(rename_action(a.lhs(), r), rename_action(a.rhs(), r));
    case Action::Kind::Star: return Action::star(rename_action(a.operand(), r));
  }
  return a;
}

// `env` maps source variables to their target names, innermost last.
Sentence rename_walk(const Sentence& s, const Renaming& r, Signature& target,
                     std::vector<std::pair<std::string, std::string>>& env) {
  using K = Sentence::Kind;
  auto named = [&](const std::string& n) {
    for (std::size_t i = env.size(); i-- > 0;)
      if (env[i].first == n) return env[i].second;
    return mapped(r.nominals, n);
  };
  switch (s.kind()) {
    case K::Prop: return Sentence::prop(mapped(r.props, s.name()));
    case K::Nom: return Sentence::nom(named(s.name()));
    case K::And: {
      std::vector<Sentence> parts;
      for (const auto& c : s.conjuncts()) parts.push_back(rename_walk(c, r, target, env));
      return Sentence::conj(std::move(parts));
    }
    case K::Neg: return Sentence::neg(rename_walk(s.body(), r, target, env));
    case K::Dia:
      return Sentence::dia(rename_action(s.action(), r), rename_walk(s.body(), r, target, env));
    case K::At: {
      std::string k = named(s.name());
      return Sentence::at(std::move(k), rename_walk(s.body(), r, target, env));
    }
    case K::Store:
    case K::Exists: {
      std::string var = next_variable(target);
      target.bound_vars.push_back(var);
      env.emplace_back(s.name(), var);
      Sentence body = rename_walk(s.body(), r, target, env);
      env.pop_back();
      target.bound_vars.pop_back();
      return s.kind() == K::Store ? Sentence::store(var, std::move(body))
                                  : Sentence::exists(var, std::move(body));
    }
  }
  return s;
}

}  // namespace

Signature Renaming::apply(const Signature& sig) const {
  Signature out;
  out.nominals = mapped_pool(nominals, sig.nominals);
  out.relations = mapped_pool(relations, sig.relations);
  out.props = mapped_pool(props, sig.props);
  out.bound_vars = sig.bound_vars;
  return out;
}

Sentence translate(const Sentence& s, const Signature& from, const Renaming& r) {
  Signature target = r.apply(from);
  std::vector<std::pair<std::string, std::string>> env;
  // Variables already in the source signature keep their names, re-issued
  // fresh if the renamed base symbols now collide with them.
  Signature fresh = target;
  fresh.bound_vars.clear();
  for (const auto& v : from.bound_vars) {
    std::string t = next_variable(fresh);
    fresh.bound_vars.push_back(t);
    env.emplace_back(v, t);
  }
  return rename_walk(s, r, fresh, env);
}

Sentence canonicalize(const Sentence& s, const Signature& sig) {
  Signature target = sig;
  std::vector<std::pair<std::string, std::string>> env;
  return rename_walk(s, Renaming{}, target, env);
}

// ---------------------------------------------------------------------------
// Random terms

Action random_action(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                     std::size_t depth) {
  if (sig.relations.empty()) throw SymbolError("signature has no relations");
  std::vector<ActionCtor> ctors;
  for (ActionCtor c : {ActionCtor::Union, ActionCtor::Comp, ActionCtor::Star})
    if (frag.has(c)) ctors.push_back(c);
  std::uniform_int_distribution<std::size_t> rel(0, sig.relations.size() - 1);
  if (depth == 0 || ctors.empty() || std::uniform_int_distribution<int>(0, 2)(rng) == 0)
    return Action::rel(sig.relations[rel(rng)]);
  ActionCtor c = ctors[std::uniform_int_distribution<std::size_t>(0, ctors.size() - 1)(rng)];
  switch (c) {
    case ActionCtor::Union: {
      Action a = random_action(rng, sig, frag, depth - 1);
      return Action::union_of(std::move(a), random_action(rng, sig, frag, depth - 1));
    }
    case ActionCtor::Comp: {
      Action a = random_action(rng, sig, frag, depth - 1);
      return Action::comp(std::move(a), random_action(rng, sig, frag, depth - 1));
    }
    case ActionCtor::Star: return Action::star(random_action(rng, sig, frag, depth - 1));
  }
  return Action::rel(sig.relations[rel(rng)]);
}

namespace {

Sentence random_leaf(std::mt19937_64& rng, const Signature& sig) {
  std::size_t n = sig.named_count() + sig.props.size();
  std::uniform_int_distribution<std::size_t> pick(0, n + 1);
  std::size_t i = pick(rng);
  if (i == n) return Sentence::truth();
  if (i == n + 1) return Sentence::falsity();
  if (i < sig.named_count()) return Sentence::nom(sig.named(i));
  return Sentence::prop(sig.props[i - sig.named_count()]);
}

Sentence random_rec(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                    const RandomSentenceOptions& o, std::size_t depth) {
  enum class C { Leaf, And, Neg, Dia, At, Store, Exists };
  std::vector<C> choices{C::Leaf, C::And, C::Neg};
  if (frag.has(Op::Diamond) && !sig.relations.empty()) choices.push_back(C::Dia);
  if (frag.has(Op::At) && sig.named_count() > 0) choices.push_back(C::At);
  if (frag.has(Op::Store)) choices.push_back(C::Store);
  if (frag.has(Op::Exists)) choices.push_back(C::Exists);
  C c = depth == 0 ? C::Leaf
                   : choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
  switch (c) {
    case C::Leaf: return random_leaf(rng, sig);
    case C::And: {
      std::size_t n =
          std::uniform_int_distribution<std::size_t>(2, std::max<std::size_t>(2, o.max_conjuncts))(rng);
      std::vector<Sentence> parts;
      for (std::size_t i = 0; i < n; ++i) parts.push_back(random_rec(rng, sig, frag, o, depth - 1));
      return Sentence::conj(std::move(parts));
    }
    case C::Neg: return Sentence::neg(random_rec(rng, sig, frag, o, depth - 1));
    case C::Dia: {
      Action a = random_action(rng, sig, frag, o.action_depth);
      return Sentence::dia(std::move(a), random_rec(rng, sig, frag, o, depth - 1));
    }
    case C::At: {
      std::size_t k = std::uniform_int_distribution<std::size_t>(0, sig.named_count() - 1)(rng);
      return Sentence::at(sig.named(k), random_rec(rng, sig, frag, o, depth - 1));
    }
    case C::Store:
    case C::Exists: {
      auto [ext, var] = extend_signature(sig);
      Sentence body = random_rec(rng, ext, frag, o, depth - 1);
      return c == C::Store ? Sentence::store(var, std::move(body))
                           : Sentence::exists(var, std::move(body));
    }
  }
  return Sentence::truth();
}

}  // namespace

Sentence random_sentence(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                         const RandomSentenceOptions& options) {
  return random_rec(rng, sig, frag, options, options.max_depth);
}

}  // namespace hdpl
