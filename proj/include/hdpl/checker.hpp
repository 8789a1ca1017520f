#pragma once

// Local satisfaction and agreement on basic sentences.

#include <span>

#include "hdpl/kripke.hpp"
#include "hdpl/syntax.hpp"

namespace hdpl {

/// (M, w) |= s. Binders may use any fresh name; a bound name shadows the
/// signature's nominals and variables inside its scope.
bool satisfies(const PointedModel& pm, const Sentence& s);

/// The set of states where `s` holds.
StateSet extension(const KripkeModel& m, const Sentence& s);

/// Agreement of two pointed models on every basic sentence: each proposition
/// at the current state and each equation "current = k" for the named
/// symbols. Throws Error if the signatures differ.
bool game_property(const PointedModel& left, const PointedModel& right);

/// Same check with the named symbols interpreted by `named_m` / `named_n`
/// (indexed like `Signature::named`) instead of the models' own maps.
bool basic_agreement(const KripkeModel& m, StateId w, std::span<const StateId> named_m,
                     const KripkeModel& n, StateId v, std::span<const StateId> named_n);

}  // namespace hdpl
