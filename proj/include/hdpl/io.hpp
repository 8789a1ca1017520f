#pragma once

// JSON model and signature files.

#include <json.hpp>
#include <string>
#include <utility>

#include "hdpl/kripke.hpp"

namespace hdpl {

Signature signature_from_json(const nlohmann::json& j);
nlohmann::json signature_to_json(const Signature& sig);

/// Reads {states, nominals, relations, props}. Without `sig` the signature is
/// the keys of the three maps; with it, every declared symbol must be listed
/// or is taken as empty (relations, props) and nominals must all be present.
KripkeModel model_from_json(const nlohmann::json& j, const Signature* sig = nullptr);
nlohmann::json model_to_json(const KripkeModel& m);

nlohmann::json read_json_file(const std::string& path);
KripkeModel load_model(const std::string& path, const Signature* sig = nullptr);
Signature load_signature(const std::string& path);
void save_model(const KripkeModel& m, const std::string& path);

/// Splits "path.json:state" at the last colon.
std::pair<std::string, std::string> split_pointed_ref(const std::string& ref);

/// Re-expresses both models over the union of their relation and proposition
/// pools (absent symbols read as empty). Nominals must coincide.
std::pair<KripkeModel, KripkeModel> unify_models(const KripkeModel& a, const KripkeModel& b);

}  // namespace hdpl
