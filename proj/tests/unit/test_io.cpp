#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hdpl/io.hpp"

using namespace hdpl;

TEST_CASE("model JSON round trip") {
  KripkeModel m = fixtures::named_chain(4);
  nlohmann::json j = model_to_json(m);
  CHECK(j["nominals"]["k2"] == "s3");
  KripkeModel back = model_from_json(j, &m.signature());
  CHECK(back == m);
  KripkeModel inferred = model_from_json(j);
  CHECK(inferred.signature().nominals == std::vector<std::string>{"k1", "k2"});
  CHECK(model_to_json(inferred) == j);

  auto path = (std::filesystem::temp_directory_path() / "hdpl_io_test.json").string();
  save_model(m, path);
  CHECK(load_model(path, &m.signature()) == m);
  std::remove(path.c_str());
}

TEST_CASE("model JSON errors") {
  using nlohmann::json;
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"states": []})")), Error);
  CHECK_THROWS_AS(
      model_from_json(json::parse(R"({"states": ["a"], "relations": {"l": [["a", "z"]]}})")),
      Error);
  CHECK_THROWS_AS(load_model("/nonexistent/model.json"), Error);
  Signature sig = Signature::make({"k"}, {}, {});
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"states": ["a"]})"), &sig), Error);
}

TEST_CASE("signature JSON") {
  auto j = nlohmann::json::parse(R"({"nominals": ["k"], "relations": ["l"], "props": ["p", "q"]})");
  Signature s = signature_from_json(j);
  CHECK(s.props == std::vector<std::string>{"p", "q"});
  CHECK(signature_to_json(s) == j);
}

TEST_CASE("pointed references") {
  auto [path, state] = split_pointed_ref("dir/m.json:s0");
  CHECK(path == "dir/m.json");
  CHECK(state == "s0");
  CHECK(split_pointed_ref("C:/x.json:w").first == "C:/x.json");
  CHECK_THROWS_AS(split_pointed_ref("m.json"), Error);
}

TEST_CASE("unifying signatures") {
  auto [mb, nb] = fixtures::disconnected_pair();
  KripkeModel left = mb.reduct(Signature::make({}, {"l"}, {"p"}));
  auto [u, v] = unify_models(left, nb);
  CHECK(u.signature() == v.signature());
  CHECK(u.prop_states(*u.signature().prop_index("q")).none());
  CHECK_THROWS_AS(unify_models(fixtures::named_chain(2), left), Error);
}
