#pragma once

// Signatures, fragment configuration and the term language of hybrid-dynamic
// propositional logic: actions, sentences, parsing and printing.

#include <bitset>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hdpl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lexing or parsing failure; `position` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Undeclared, stale or colliding symbol.
class SymbolError : public Error {
 public:
  using Error::Error;
};

/// A constructor that the active fragment does not enable.
class FragmentError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Signatures

/// Nominals, binary relations and propositional symbols, plus the variables
/// appended by extensions. Variables behave as nominals of the extended
/// signature; their order records the extension history.
struct Signature {
  std::vector<std::string> nominals;
  std::vector<std::string> relations;
  std::vector<std::string> props;
  std::vector<std::string> bound_vars;

  /// Builds a signature and checks that the three pools are pairwise disjoint.
  static Signature make(std::vector<std::string> nominals,
                        std::vector<std::string> relations,
                        std::vector<std::string> props);

  bool declares(std::string_view name) const;
  bool is_relation(std::string_view name) const;
  bool is_prop(std::string_view name) const;
  /// Index into nominals ++ bound_vars, if `name` names a state.
  std::optional<std::size_t> named_index(std::string_view name) const;
  std::optional<std::size_t> relation_index(std::string_view name) const;
  std::optional<std::size_t> prop_index(std::string_view name) const;

  /// Number of state names: nominals plus variables.
  std::size_t named_count() const { return nominals.size() + bound_vars.size(); }
  const std::string& named(std::size_t i) const;

  /// Signature with the variables dropped.
  Signature base() const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// Δ ↦ (Δ[x], x) with x = "x<depth>", suffixed with '_' until it is fresh.
std::pair<Signature, std::string> extend_signature(const Signature& sig);

/// The variable `extend_signature` would introduce.
std::string next_variable(const Signature& sig);

/// The basic sentences of a signature in canonical order: nominals, variables,
/// then propositional symbols.
std::vector<std::string> basic_sentences(const Signature& sig);

// ---------------------------------------------------------------------------
// Fragments

enum class Op : std::uint8_t { Diamond, At, Store, Exists };
enum class ActionCtor : std::uint8_t { Union, Comp, Star };

/// The enabled sentence operators and action constructors. The Boolean core
/// is always present.
class FragmentConfig {
 public:
  FragmentConfig() = default;
  FragmentConfig(std::initializer_list<Op> ops,
                 std::initializer_list<ActionCtor> ctors = {});

  static FragmentConfig full();
  /// Comma list over diamond,at,store,exists,union,comp,star. "all" enables
  /// everything; an empty string is the Boolean core.
  static FragmentConfig parse(std::string_view text);

  bool has(Op op) const { return ops_.test(static_cast<std::size_t>(op)); }
  bool has(ActionCtor c) const { return ctors_.test(static_cast<std::size_t>(c)); }
  bool has_any_ctor() const { return ctors_.any(); }

  FragmentConfig with(Op op) const;
  FragmentConfig without(Op op) const;
  FragmentConfig with(ActionCtor c) const;
  FragmentConfig without_ctors() const;

  /// Both the operator and constructor sets are included in `other`'s.
  bool subset_of(const FragmentConfig& other) const;
  std::string to_string() const;

  friend bool operator==(const FragmentConfig&, const FragmentConfig&) = default;

 private:
  void check() const;
  std::bitset<4> ops_;
  std::bitset<3> ctors_;
};

// ---------------------------------------------------------------------------
// Terms

class Action {
 public:
  enum class Kind : std::uint8_t { Rel, Union, Comp, Star };

  static Action rel(std::string name);
  static Action union_of(Action a, Action b);
  static Action comp(Action a, Action b);
  static Action star(Action a);

  Kind kind() const;
  const std::string& name() const;  ///< Rel only
  const Action& lhs() const;        ///< Union / Comp
  const Action& rhs() const;        ///< Union / Comp
  const Action& operand() const;    ///< Star
  std::size_t hash() const;

  friend std::strong_ordering operator<=>(const Action& a, const Action& b);
  friend bool operator==(const Action& a, const Action& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  struct Node;
  explicit Action(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Sentence terms. Derived forms (false, ∨, [a], ∀) are expanded by their
/// factories; conjunctions are kept sorted and duplicate-free, and a
/// one-element conjunction collapses to its member.
class Sentence {
 public:
  enum class Kind : std::uint8_t { Prop, Nom, And, Neg, Dia, At, Store, Exists };

  static Sentence prop(std::string name);
  static Sentence nom(std::string name);
  static Sentence conj(std::vector<Sentence> parts);
  static Sentence neg(Sentence s);
  static Sentence dia(Action a, Sentence s);
  static Sentence at(std::string name, Sentence s);
  static Sentence store(std::string var, Sentence s);
  static Sentence exists(std::string var, Sentence s);

  static Sentence truth() { return conj({}); }
  static Sentence falsity() { return neg(truth()); }
  static Sentence disj(std::vector<Sentence> parts);
  static Sentence box(Action a, Sentence s);
  static Sentence forall(std::string var, Sentence s);
  static Sentence implies(Sentence a, Sentence b);

  Kind kind() const;
  /// Prop/Nom symbol, @ target, or the variable bound by Store/Exists.
  const std::string& name() const;
  const Action& action() const;                  ///< Dia
  const Sentence& body() const;                  ///< Neg/Dia/At/Store/Exists
  const std::vector<Sentence>& conjuncts() const;  ///< And

  /// Number of term nodes (actions excluded).
  std::size_t size() const;
  std::size_t hash() const;
  /// Identity of the shared node; stable while the term is alive.
  const void* id() const { return node_.get(); }

  friend std::strong_ordering operator<=>(const Sentence& a, const Sentence& b);
  friend bool operator==(const Sentence& a, const Sentence& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  struct Node;
  explicit Sentence(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Sentence make(Kind kind, std::string name, std::optional<Action> action,
                       std::vector<Sentence> kids);
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Parsing, printing, validation

/// Parses the ASCII grammar. Binder names are renamed to the depth-indexed
/// variables produced by `extend_signature`, so the result is canonical.
Sentence parse_sentence(std::string_view text, const Signature& sig,
                        const FragmentConfig& frag);
Action parse_action(std::string_view text, const Signature& sig,
                    const FragmentConfig& frag);

std::string print_sentence(const Sentence& s);
std::string print_action(const Action& a);

/// Throws SymbolError unless every symbol is declared in the signature of its
/// scope and no binder reuses a name already declared there.
void check_well_formed(const Sentence& s, const Signature& sig);
void check_well_formed(const Action& a, const Signature& sig);

/// Renames every binder to the variable `extend_signature` issues at its depth.
Sentence canonicalize(const Sentence& s, const Signature& sig);

struct FragmentViolation {
  std::string path;       ///< dot-separated child indices from the root
  std::string construct;  ///< "diamond", "at", "store", "exists", "union", ...
};

struct FragmentReport {
  bool accepted = true;
  std::vector<FragmentViolation> violations;
};

FragmentReport validate_in_fragment(const Sentence& s, const FragmentConfig& frag);
FragmentReport validate_in_fragment(const Action& a, const FragmentConfig& frag);

// ---------------------------------------------------------------------------
// Symbol renaming

/// A signature morphism restricted to symbol renamings; unmapped symbols are
/// kept. Not required to be injective.
struct Renaming {
  std::map<std::string, std::string> nominals;
  std::map<std::string, std::string> relations;
  std::map<std::string, std::string> props;

  Signature apply(const Signature& sig) const;
};

/// Translates a sentence over `from` along the renaming; binders are re-issued
/// as the fresh variables of the translated signature.
Sentence translate(const Sentence& s, const Signature& from, const Renaming& r);

// ---------------------------------------------------------------------------
// Random terms

struct RandomSentenceOptions {
  std::size_t max_depth = 3;
  std::size_t max_conjuncts = 3;
  std::size_t action_depth = 1;
};

Action random_action(std::mt19937_64& rng, const Signature& sig,
                     const FragmentConfig& frag, std::size_t depth);
Sentence random_sentence(std::mt19937_64& rng, const Signature& sig,
                         const FragmentConfig& frag,
                         const RandomSentenceOptions& options = {});

}  // namespace hdpl

template <>
struct std::hash<hdpl::Sentence> {
  std::size_t operator()(const hdpl::Sentence& s) const noexcept { return s.hash(); }
};
template <>
struct std::hash<hdpl::Action> {
  std::size_t operator()(const hdpl::Action& a) const noexcept { return a.hash(); }
};
