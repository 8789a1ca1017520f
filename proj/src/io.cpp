#include "hdpl/io.hpp"

#include <algorithm>
#include <fstream>

namespace hdpl {

using nlohmann::json;

namespace {

std::vector<std::string> names(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::string>());
  return out;
}

std::vector<std::string> keys(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_object()) throw Error(std::string("'") + key + "' must be an object");
  for (const auto& [k, v] : j.at(key).items()) out.push_back(k);
  return out;
}

}  // namespace

Signature signature_from_json(const json& j) {
  if (!j.is_object()) throw Error("signature must be a JSON object");
  return Signature::make(names(j, "nominals"), names(j, "relations"), names(j, "props"));
}

json signature_to_json(const Signature& sig) {
  return json{{"nominals", sig.nominals}, {"relations", sig.relations}, {"props", sig.props}};
}

KripkeModel model_from_json(const json& j, const Signature* sig) {
  if (!j.is_object()) throw Error("model must be a JSON object");
  if (!j.contains("states") || !j.at("states").is_array() || j.at("states").empty())
    throw Error("model needs a nonempty 'states' array");
  Signature s = sig ? *sig
                    : Signature::make(keys(j, "nominals"), keys(j, "relations"), keys(j, "props"));
  ModelBuilder b(s);
  for (const auto& st : j.at("states")) b.state(st.get<std::string>());
  auto known = [&](const std::string& st) {
    const auto& arr = j.at("states");
    if (std::find(arr.begin(), arr.end(), st) == arr.end())
      throw Error("unknown state '" + st + "'");
    return st;
  };
  if (j.contains("nominals"))
    for (const auto& [k, v] : j.at("nominals").items()) b.name(k, known(v.get<std::string>()));
  if (j.contains("relations"))
    for (const auto& [r, pairs] : j.at("relations").items())
      for (const auto& p : pairs) {
        if (!p.is_array() || p.size() != 2) throw Error("relation '" + r + "' needs pairs");
        b.edge(r, known(p[0].get<std::string>()), known(p[1].get<std::string>()));
      }
  if (j.contains("props"))
    for (const auto& [p, states] : j.at("props").items())
      for (const auto& st : states) b.label(p, known(st.get<std::string>()));
  return b.build();
}

json model_to_json(const KripkeModel& m) {
  const Signature& sig = m.signature();
  json states = json::array();
  for (StateId s = 0; s < m.size(); ++s) states.push_back(m.state_name(s));
  json noms = json::object();
  for (std::size_t i = 0; i < sig.named_count(); ++i)
    noms[sig.named(i)] = m.state_name(m.named(i));
  json rels = json::object();
  for (std::size_t r = 0; r < sig.relations.size(); ++r) {
    json pairs = json::array();
    for (auto [a, b] : m.relation(r).pairs())
      pairs.push_back({m.state_name(a), m.state_name(b)});
    rels[sig.relations[r]] = pairs;
  }
  json props = json::object();
  for (std::size_t p = 0; p < sig.props.size(); ++p) {
    json sts = json::array();
    for (StateId s = 0; s < m.size(); ++s)
      if (m.holds(p, s)) sts.push_back(m.state_name(s));
    props[sig.props[p]] = sts;
  }
  return json{{"states", states}, {"nominals", noms}, {"relations", rels}, {"props", props}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
}

KripkeModel load_model(const std::string& path, const Signature* sig) {
  try {
    return model_from_json(read_json_file(path), sig);
  } catch (const json::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
}

Signature load_signature(const std::string& path) {
  try {
    return signature_from_json(read_json_file(path));
  } catch (const json::exception& e) {
    throw Error("'" + path + "': " + e.what());
  }
}

void save_model(const KripkeModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << model_to_json(m).dump(2) << '\n';
}

std::pair<std::string, std::string> split_pointed_ref(const std::string& ref) {
  auto pos = ref.rfind(':');
  if (pos == std::string::npos || pos == 0 || pos + 1 == ref.size())
    throw Error("expected 'file.json:state', got '" + ref + "'");
  return {ref.substr(0, pos), ref.substr(pos + 1)};
}

std::pair<KripkeModel, KripkeModel> unify_models(const KripkeModel& a, const KripkeModel& b) {
  const Signature& sa = a.signature();
  const Signature& sb = b.signature();
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(sa.nominals) != sorted(sb.nominals) || sa.bound_vars != sb.bound_vars)
    throw Error("models must declare the same nominals");
  auto merge = [](std::vector<std::string> x, const std::vector<std::string>& y) {
    for (const auto& s : y)
      if (std::find(x.begin(), x.end(), s) == x.end()) x.push_back(s);
    return x;
  };
  Signature u = Signature::make(sa.nominals, merge(sa.relations, sb.relations),
                                merge(sa.props, sb.props));
  u.bound_vars = sa.bound_vars;
  auto lift = [&](const KripkeModel& m) {
    const Signature& s = m.signature();
    std::vector<StateId> named;
    for (std::size_t i = 0; i < u.named_count(); ++i) named.push_back(m.denotation(u.named(i)));
    std::vector<Relation> rels;
    for (const auto& r : u.relations)
      rels.push_back(s.is_relation(r) ? m.relation(r) : Relation(m.size()));
    std::vector<StateSet> props;
    for (const auto& p : u.props)
      props.push_back(s.is_prop(p) ? m.prop_states(*s.prop_index(p)) : StateSet(m.size()));
    std::vector<std::string> names;
    for (StateId i = 0; i < m.size(); ++i) names.push_back(m.state_name(i));
    return KripkeModel(u, std::move(names), std::move(named), std::move(rels), std::move(props));
  };
  return {lift(a), lift(b)};
}

}  // namespace hdpl
