#include "hdpl/gameboard.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace hdpl {

std::string EdgeLabel::to_string() const {
  switch (kind_) {
    case Kind::Idle: return "idle";
    case Kind::Store: return "down";
    case Kind::Exists: return "exists";
    case Kind::At: return "at " + name_;
    case Kind::Dia: return "dia " + print_action(*action_);
  }
  return "?";
}

GameboardTree::GameboardTree(Signature sig, std::vector<TreeEdge> children)
    : sig_(std::move(sig)), children_(std::move(children)) {
  for (const auto& e : children_) {
    if (!e.child) throw Error("gameboard edge without a subtree");
    height_ = std::max(height_, e.child->height() + 1);
    nodes_ += e.child->node_count();
  }
}

TreePtr GameboardTree::leaf(Signature sig) {
  return std::make_shared<const GameboardTree>(std::move(sig), std::vector<TreeEdge>{});
}

TreePtr GameboardTree::node(Signature sig, std::vector<TreeEdge> children) {
  return std::make_shared<const GameboardTree>(std::move(sig), std::move(children));
}

TreePtr GameboardTree::child(const EdgeLabel& label) const {
  for (const auto& e : children_)
    if (e.label == label) return e.child;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void validate_rec(const TreePtr& tr, const FragmentConfig& frag, const std::string& path,
                  TreeReport& r) {
  auto problem = [&](const std::string& msg) {
    r.problems.push_back((path.empty() ? std::string("root") : path) + ": " + msg);
  };
  const Signature& sig = tr->signature();
  const auto& kids = tr->children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    const EdgeLabel& lab = kids[i].label;
    for (std::size_t j = 0; j < i; ++j)
      if (kids[j].label == lab) problem("duplicate sibling label '" + lab.to_string() + "'");
    switch (lab.kind()) {
      case EdgeLabel::Kind::Idle: break;
      case EdgeLabel::Kind::Store:
        if (!frag.has(Op::Store)) problem("store edges are not enabled");
        break;
      case EdgeLabel::Kind::Exists:
        if (!frag.has(Op::Exists)) problem("exists edges are not enabled");
        break;
      case EdgeLabel::Kind::At:
        if (!frag.has(Op::At)) problem("at edges are not enabled");
        if (!sig.named_index(lab.name())) problem("'" + lab.name() + "' is not named here");
        break;
      case EdgeLabel::Kind::Dia: {
        if (!frag.has(Op::Diamond)) problem("diamond edges are not enabled");
        try {
          check_well_formed(lab.action(), sig);
        } catch (const SymbolError& e) {
          problem(e.what());
        }
        for (const auto& v : validate_in_fragment(lab.action(), frag).violations)
          problem("action constructor '" + v.construct + "' is not enabled");
        break;
      }
    }
    const Signature& csig = kids[i].child->signature();
    if (lab.extends()) {
      if (!(csig == extend_signature(sig).first))
        problem("child under '" + lab.to_string() + "' must extend the signature by '" +
                next_variable(sig) + "'");
    } else if (!(csig == sig)) {
      problem("child under '" + lab.to_string() + "' must keep the signature");
    }
    std::string cpath = path.empty() ? std::to_string(i) : path + "." + std::to_string(i);
    validate_rec(kids[i].child, frag, cpath, r);
  }
}

}  // namespace

TreeReport validate_tree(const TreePtr& tr, const FragmentConfig& frag) {
  TreeReport r;
  validate_rec(tr, frag, "", r);
  r.valid = r.problems.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Complete trees

std::vector<Action> base_actions(const Signature& sig) {
  std::vector<Action> out;
  for (const auto& r : sig.relations) out.push_back(Action::rel(r));
  return out;
}

TreePtr complete_tree(const Signature& sig, const FragmentConfig& frag, std::size_t height,
                      const std::vector<Action>& actions) {
  if (frag.has(Op::Diamond) && actions.empty() && height > 0)
    throw Error("complete trees with diamond need at least one action");
  for (const auto& a : actions) {
    check_well_formed(a, sig);
    if (!validate_in_fragment(a, frag).accepted)
      throw FragmentError("action '" + print_action(a) + "' is outside the fragment");
  }
  // Nodes at the same depth below the same number of extensions coincide.
  std::map<std::pair<std::size_t, std::size_t>, TreePtr> memo;
  auto build = [&](auto& self, const Signature& s, std::size_t h) -> TreePtr {
    auto key = std::make_pair(s.bound_vars.size(), h);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::vector<TreeEdge> kids;
    if (h > 0) {
      kids.push_back({EdgeLabel::idle(), self(self, s, h - 1)});
      if (frag.has(Op::Store) || frag.has(Op::Exists)) {
        Signature ext = extend_signature(s).first;
        TreePtr sub = self(self, ext, h - 1);
        if (frag.has(Op::Store)) kids.push_back({EdgeLabel::store(), sub});
        if (frag.has(Op::Exists)) kids.push_back({EdgeLabel::exists(), sub});
      }
      if (frag.has(Op::At)) {
        TreePtr sub = self(self, s, h - 1);
        for (std::size_t i = 0; i < s.named_count(); ++i)
          kids.push_back({EdgeLabel::at(s.named(i)), sub});
      }
      if (frag.has(Op::Diamond)) {
        TreePtr sub = self(self, s, h - 1);
        for (const auto& a : actions) kids.push_back({EdgeLabel::dia(a), sub});
      }
    }
    TreePtr t = GameboardTree::node(s, std::move(kids));
    memo.emplace(key, t);
    return t;
  };
  return build(build, sig, height);
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct TreeToken {
  enum Kind { Ident, Sym, End } kind;
  std::string text;
  std::size_t pos;
};

std::vector<TreeToken> lex_tree(std::string_view in) {
  std::vector<TreeToken> out;
  std::size_t i = 0;
  while (i < in.size()) {
    unsigned char c = static_cast<unsigned char>(in[i]);
    if (std::isspace(c)) {
      ++i;
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < in.size() &&
             (std::isalnum(static_cast<unsigned char>(in[j])) || in[j] == '_' || in[j] == '\''))
        ++j;
      out.push_back({TreeToken::Ident, std::string(in.substr(i, j - i)), i});
      i = j;
    } else if (std::string_view("()+;*").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({TreeToken::Sym, std::string(1, static_cast<char>(c)), i});
      ++i;
    } else {
      throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", i);
    }
  }
  out.push_back({TreeToken::End, "", in.size()});
  return out;
}

class TreeParser {
 public:
  TreeParser(std::string_view text, const FragmentConfig& frag)
      : text_(text), toks_(lex_tree(text)), frag_(frag) {}

  TreePtr parse(const Signature& sig) {
    TreePtr t = tree(sig);
    if (peek().kind != TreeToken::End) fail("unexpected trailing input");
    return t;
  }

 private:
  const TreeToken& peek() const { return toks_[pos_]; }
  bool at_sym(std::string_view s) const {
    return peek().kind == TreeToken::Sym && peek().text == s;
  }
  [[noreturn]] void fail(const std::string& what) const {
    const auto& t = peek();
    throw ParseError(what + ", found " + (t.kind == TreeToken::End ? "end of input" : "'" + t.text + "'"),
                     t.pos);
  }
  void expect(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }

  TreePtr tree(const Signature& sig) {
    if (peek().kind == TreeToken::Ident && peek().text == "leaf") {
      ++pos_;
      return GameboardTree::leaf(sig);
    }
    expect("(");
    std::vector<TreeEdge> kids;
    if (peek().kind == TreeToken::Ident && peek().text == "branch") {
      ++pos_;
      do {
        expect("(");
        kids.push_back(edge(sig));
        expect(")");
      } while (at_sym("("));
    } else {
      kids.push_back(edge(sig));
    }
    expect(")");
    return GameboardTree::node(sig, std::move(kids));
  }

  // The action ends where an operator could follow but none does.
  Action action(const Signature& sig) {
    std::size_t start = peek().pos;
    bool want_atom = true;
    std::size_t end = start;
    while (true) {
      const auto& t = peek();
      if (want_atom) {
        if (t.kind == TreeToken::Ident) {
          ++pos_;
        } else if (at_sym("(")) {
          int depth = 0;
          do {
            if (peek().kind == TreeToken::End) fail("unbalanced parentheses in action");
            if (at_sym("(")) ++depth;
            if (at_sym(")")) --depth;
            ++pos_;
          } while (depth > 0);
        } else {
          fail("expected an action");
        }
        want_atom = false;
      } else if (at_sym("*")) {
        ++pos_;
      } else if (at_sym(";") || at_sym("+")) {
        ++pos_;
        want_atom = true;
      } else {
        break;
      }
      end = toks_[pos_ - 1].pos + toks_[pos_ - 1].text.size();
    }
    try {
      return parse_action(text_.substr(start, end - start), sig, frag_);
    } catch (const ParseError& e) {
      throw ParseError(std::string("in action: ") + e.what(), start + e.position());
    }
  }

  TreeEdge edge(const Signature& sig) {
    if (peek().kind != TreeToken::Ident) fail("expected an edge label");
    std::string kw = peek().text;
    ++pos_;
    if (kw == "idle") return {EdgeLabel::idle(), tree(sig)};
    if (kw == "down" || kw == "exists") {
      Signature ext = extend_signature(sig).first;
      return {kw == "down" ? EdgeLabel::store() : EdgeLabel::exists(), tree(ext)};
    }
    if (kw == "at") {
      if (peek().kind != TreeToken::Ident) fail("expected a nominal or variable");
      std::string name = peek().text;
      ++pos_;
      return {EdgeLabel::at(name), tree(sig)};
    }
    if (kw == "dia") {
      Action a = action(sig);
      return {EdgeLabel::dia(std::move(a)), tree(sig)};
    }
    --pos_;
    fail("unknown edge label");
  }

  std::string_view text_;
  std::vector<TreeToken> toks_;
  std::size_t pos_ = 0;
  const FragmentConfig& frag_;
};

void print_rec(std::ostream& os, const TreePtr& tr) {
  if (tr->is_leaf()) {
    os << "leaf";
    return;
  }
  auto edge = [&](const TreeEdge& e) {
    os << e.label.to_string() << ' ';
    print_rec(os, e.child);
  };
  if (tr->children().size() == 1) {
    os << '(';
    edge(tr->children().front());
    os << ')';
    return;
  }
  os << "(branch";
  for (const auto& e : tr->children()) {
    os << " (";
    edge(e);
    os << ')';
  }
  os << ')';
}

}  // namespace

TreePtr parse_tree(std::string_view text, const Signature& sig, const FragmentConfig& frag) {
  TreePtr t = TreeParser(text, frag).parse(sig);
  TreeReport r = validate_tree(t, frag);
  if (!r.valid) {
    std::string msg = "invalid gameboard tree";
    for (const auto& p : r.problems) msg += "; " + p;
    throw Error(msg);
  }
  return t;
}

std::string print_tree(const TreePtr& tr) {
  std::ostringstream os;
  print_rec(os, tr);
  return os.str();
}

// ---------------------------------------------------------------------------
// Inclusion, pruning, merging

bool tree_includes(const TreePtr& tr, const TreePtr& sub) {
  if (tr == sub) return true;
  if (!(tr->signature() == sub->signature())) return false;
  for (const auto& e : sub->children()) {
    TreePtr c = tr->child(e.label);
    if (!c || !tree_includes(c, e.child)) return false;
  }
  return true;
}

bool same_tree(const TreePtr& a, const TreePtr& b) {
  return tree_includes(a, b) && tree_includes(b, a) &&
         a->children().size() == b->children().size();
}

TreePtr random_prune(std::mt19937_64& rng, const TreePtr& tr, double drop) {
  std::bernoulli_distribution del(drop);
  std::vector<TreeEdge> kids;
  for (const auto& e : tr->children())
    if (!del(rng)) kids.push_back({e.label, random_prune(rng, e.child, drop)});
  return GameboardTree::node(tr->signature(), std::move(kids));
}

TreePtr truncate(const TreePtr& tr, std::size_t height) {
  if (height == 0) return GameboardTree::leaf(tr->signature());
  if (tr->height() <= height) return tr;
  std::vector<TreeEdge> kids;
  for (const auto& e : tr->children()) kids.push_back({e.label, truncate(e.child, height - 1)});
  return GameboardTree::node(tr->signature(), std::move(kids));
}

TreePtr merge_trees(const TreePtr& a, const TreePtr& b) {
  if (a == b) return a;
  if (!(a->signature() == b->signature()))
    throw Error("merging trees over different signatures");
  std::vector<TreeEdge> kids = a->children();
  for (const auto& e : b->children()) {
    auto it = std::find_if(kids.begin(), kids.end(),
                           [&](const TreeEdge& k) { return k.label == e.label; });
    if (it == kids.end())
      kids.push_back(e);
    else
      it->child = merge_trees(it->child, e.child);
  }
  return GameboardTree::node(a->signature(), std::move(kids));
}

TreePtr random_tree(std::mt19937_64& rng, const Signature& sig, const FragmentConfig& frag,
                    std::size_t height, const std::vector<Action>& actions, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<TreeEdge> kids;
  if (height > 0) {
    auto sub = [&](const Signature& s) {
      return random_tree(rng, s, frag, height - 1, actions, density);
    };
    if (keep(rng)) kids.push_back({EdgeLabel::idle(), sub(sig)});
    if (frag.has(Op::Store) && keep(rng))
      kids.push_back({EdgeLabel::store(), sub(extend_signature(sig).first)});
    if (frag.has(Op::Exists) && keep(rng))
      kids.push_back({EdgeLabel::exists(), sub(extend_signature(sig).first)});
    if (frag.has(Op::At))
      for (std::size_t i = 0; i < sig.named_count(); ++i)
        if (keep(rng)) kids.push_back({EdgeLabel::at(sig.named(i)), sub(sig)});
    if (frag.has(Op::Diamond))
      for (const auto& a : actions)
        if (keep(rng)) kids.push_back({EdgeLabel::dia(a), sub(sig)});
  }
  return GameboardTree::node(sig, std::move(kids));
}

}  // namespace hdpl
