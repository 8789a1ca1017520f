#include "common.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdpl/io.hpp"

namespace hdpl::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

/// Trailing decimal of `name` after `prefix`, if the rest is all digits.
std::optional<std::size_t> suffix_number(const std::string& name, const std::string& prefix) {
  if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) return std::nullopt;
  std::string rest = name.substr(prefix.size());
  if (rest.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
  return std::stoul(rest);
}

}  // namespace

std::optional<KripkeModel> builtin_model(const std::string& name) {
  if (name == "A-left") return fixtures::branching_pair().first;
  if (name == "A-right") return fixtures::branching_pair().second;
  if (name == "B-left") return fixtures::disconnected_pair().first;
  if (name == "B-right") return fixtures::disconnected_pair().second;
  if (name == "C-left") return fixtures::loop_left();
  if (auto n = suffix_number(name, "C-right"); n && *n >= 1) return fixtures::loop_right(*n);
  if (name == "D-cycle") return fixtures::named_cycle();
  if (auto n = suffix_number(name, "D-loop"); n && name.size() == 8) {
    StateId k1 = static_cast<StateId>(name[6] - '0'), k2 = static_cast<StateId>(name[7] - '0');
    if (k1 < 4 && k2 < 4) return fixtures::named_loop(k1, k2);
  }
  if (auto n = suffix_number(name, "D"); n && *n >= 1) return fixtures::named_chain(*n);
  return std::nullopt;
}

std::vector<std::string> builtin_model_names() {
  return {"A-left", "A-right", "B-left", "B-right", "C-left", "C-right<N>",
          "D<N>",   "D-cycle", "D-loop<k1><k2>"};
}

std::string text_arg(const std::string& value) {
  if (!value.empty() && value[0] == '@' && std::filesystem::is_regular_file(value.substr(1)))
    return trim(read_file(value.substr(1)));
  return value;
}

std::string tree_text(const std::string& value) {
  std::string t = trim(value);
  if (t == "leaf" || (!t.empty() && t[0] == '(')) return t;
  return trim(read_file(t[0] == '@' ? t.substr(1) : t));
}

KripkeModel load_any_model(const std::string& path) {
  const std::string prefix = "fixture:";
  if (path.rfind(prefix, 0) == 0) {
    auto m = builtin_model(path.substr(prefix.size()));
    if (!m) throw UsageError("unknown fixture " + path.substr(prefix.size()));
    return *m;
  }
  return load_model(path);
}

PointedModel load_pointed(const std::string& ref) {
  auto [path, state] = split_pointed_ref(ref);
  KripkeModel m = load_any_model(path);
  StateId w = m.state(state);
  return {std::move(m), w};
}

std::pair<PointedModel, PointedModel> load_pointed_pair(const std::string& left,
                                                        const std::string& right) {
  PointedModel l = load_pointed(left), r = load_pointed(right);
  if (l.model.signature() == r.model.signature()) return {std::move(l), std::move(r)};
  auto [a, b] = unify_models(l.model, r.model);
  return {{std::move(a), l.current}, {std::move(b), r.current}};
}

void SignatureArgs::add_to(CLI::App* app) {
  app->add_option("--signature", signature_file, "signature JSON file");
  app->add_option("--model", model_file, "take the signature of this model");
  app->add_option("--nominals", nominals, "comma-separated nominals");
  app->add_option("--relations", relations, "comma-separated relation symbols");
  app->add_option("--props", props, "comma-separated propositional symbols");
}

Signature SignatureArgs::resolve() const {
  if (!signature_file.empty()) return load_signature(signature_file);
  if (!model_file.empty()) return load_any_model(model_file).signature();
  if (nominals.empty() && relations.empty() && props.empty())
    throw UsageError("a signature is needed: --signature, --model or symbol lists");
  return Signature::make(split_list(nominals), split_list(relations), split_list(props));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string item; std::getline(s, item, ',');)
    if (auto t = trim(item); !t.empty()) out.push_back(t);
  return out;
}

FragmentConfig fragment_arg(const std::string& text) {
  try {
    return FragmentConfig::parse(text);
  } catch (const Error& e) {
    throw UsageError(std::string("bad --fragment: ") + e.what());
  }
}

std::string side_name(Side s) { return s == Side::Left ? "left" : "right"; }

namespace {

std::string name_on(const KripkeModel& left, const KripkeModel& right, Side side, StateId s) {
  return (side == Side::Left ? left : right).state_name(s);
}

Side other(Side s) { return s == Side::Left ? Side::Right : Side::Left; }

}  // namespace

json trace_json(const std::vector<TraceStep>& trace, const KripkeModel& left,
                const KripkeModel& right) {
  json out = json::array();
  for (const auto& st : trace) {
    json j{{"edge", st.label.to_string()}, {"side", side_name(st.side)}};
    j["abelard"] = st.abelard ? json(name_on(left, right, st.side, *st.abelard)) : json(nullptr);
    j["eloise"] = st.eloise ? json(name_on(left, right, other(st.side), *st.eloise)) : json(nullptr);
    out.push_back(std::move(j));
  }
  return out;
}

std::string trace_line(const TraceStep& st, const KripkeModel& left, const KripkeModel& right) {
  std::string s = st.label.to_string();
  if (!st.abelard) return s;
  s += " on " + side_name(st.side) + " to " + name_on(left, right, st.side, *st.abelard);
  s += st.eloise ? ", answered with " + name_on(left, right, other(st.side), *st.eloise)
                 : ", no answer";
  return s;
}

}  // namespace hdpl::cli
