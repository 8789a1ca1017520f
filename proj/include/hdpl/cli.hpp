#pragma once

// The hdpl command-line front end.
//
// Exit codes: 0 on a positive verdict or plain output, 1 on a negative
// verdict or a counterexample, 2 on usage, parse or input errors.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdpl/kripke.hpp"

namespace hdpl::cli {

/// Runs one command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in);

/// Built-in models, addressed as "fixture:NAME" wherever a model path is
/// accepted: A-left, A-right, B-left, B-right, C-left, C-right<N>,
/// D<N> (end-named chain), D-cycle, D-loop<k1><k2>.
std::optional<KripkeModel> builtin_model(const std::string& name);
std::vector<std::string> builtin_model_names();

}  // namespace hdpl::cli
