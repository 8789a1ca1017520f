#pragma once

// Shared plumbing for the subcommands.

#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <string>
#include <utility>

#include "hdpl/cli.hpp"
#include "hdpl/gameboard.hpp"
#include "hdpl/games.hpp"
#include "hdpl/kripke.hpp"
#include "hdpl/syntax.hpp"

namespace hdpl::cli {

using nlohmann::json;

struct Io {
  std::ostream& out;
  std::ostream& err;
  std::istream& in;
};

/// Raised for bad command-line input; reported with exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Text given inline, or read from FILE when given as @FILE and FILE exists;
/// otherwise a leading '@' is the at operator.
std::string text_arg(const std::string& value);
/// Tree text inline ("leaf", "(...)") or from a file path.
std::string tree_text(const std::string& value);

KripkeModel load_any_model(const std::string& path);
PointedModel load_pointed(const std::string& ref);
/// Two pointed models over one signature; relation and proposition pools are
/// unified when they differ.
std::pair<PointedModel, PointedModel> load_pointed_pair(const std::string& left,
                                                        const std::string& right);

/// Signature from, in order of preference: a signature file, a model file or
/// the comma-separated symbol lists.
struct SignatureArgs {
  std::string signature_file, model_file, nominals, relations, props;
  void add_to(CLI::App* app);
  Signature resolve() const;
};

std::vector<std::string> split_list(const std::string& text);

FragmentConfig fragment_arg(const std::string& text);

std::string side_name(Side s);
json trace_json(const std::vector<TraceStep>& trace, const KripkeModel& left,
                const KripkeModel& right);
std::string trace_line(const TraceStep& step, const KripkeModel& left, const KripkeModel& right);

/// Registration of each subcommand; the callback stores the exit code.
void add_fuzz(CLI::App& app, Io& io, int& code);
void add_paper(CLI::App& app, Io& io, int& code);

}  // namespace hdpl::cli
