#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hdpl/cli.hpp"
#include "hdpl/io.hpp"

using namespace hdpl;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run hdpl_run(std::vector<std::string> args, const std::string& input = "") {
  std::ostringstream out, err;
  std::istringstream in(input);
  int code = cli::run(args, out, err, in);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  args.push_back("--json");
  Run r = hdpl_run(args);
  INFO("stderr: ", r.err);
  REQUIRE(r.code != 2);
  return json::parse(r.out);
}

std::string fixture_path(const std::string& name) {
  return std::string(HDPL_SOURCE_DIR) + "/fixtures/" + name;
}

}  // namespace

TEST_CASE("cli check verdicts and exit codes") {
  Run t = hdpl_run({"check", "--model", fixture_path("chain3.json"), "--state", "s0", "--formula",
                    "@" + fixture_path("finite_chain.txt")});
  CHECK(t.code == 0);
  CHECK(t.out == "true\n");
  Run f = hdpl_run({"check", "--model", "fixture:D-cycle", "--state", "s0", "--formula",
                    "@" + fixture_path("finite_chain.txt")});
  CHECK(f.code == 1);
  CHECK(f.out == "false\n");
  CHECK(hdpl_run({"check", "--model", "fixture:D3", "--state", "s0", "--formula", "<l>"}).code == 2);
  CHECK(hdpl_run({"check", "--model", "fixture:D3", "--state", "s0", "--formula", "exists x . x",
                  "--fragment", "diamond"})
            .code == 2);
  CHECK(hdpl_run({"check", "--model", "fixture:nothing", "--state", "0", "--formula", "p"}).code == 2);
  CHECK(hdpl_run({"check", "--model", "fixture:D-loop01", "--state", "a", "--formula", "@k1 <l> k2"}).code == 0);
  CHECK(hdpl_run({"nonsense"}).code == 2);
  CHECK(hdpl_run({"check"}).code == 2);
  CHECK(hdpl_run({"--help"}).code == 0);
}

TEST_CASE("cli json outputs") {
  json c = run_json({"check", "--model", "fixture:C-left", "--state", "0", "--formula", "<l><l>p"});
  CHECK(c.at("command") == "check");
  CHECK(c.at("verdict") == true);

  json g = run_json({"game", "--tree", fixture_path("loop_tree.txt"), "--left", "fixture:C-left:0",
                     "--right", "fixture:C-right6:0"});
  CHECK(g.at("eloise_wins") == false);
  CHECK(g.at("rounds") == 3);
  REQUIRE(g.at("trace").size() == 3);
  CHECK(g["trace"][0].at("edge") == "down");
  CHECK(g["trace"][1].at("side") == "left");
  CHECK(g["trace"][1].at("abelard") == "1");

  json o = run_json({"omega", "--fragment", "diamond,store", "--left", fixture_path("fix_a_left.json") + ":0",
                     "--right", fixture_path("fix_a_right.json") + ":0", "--witness", "1"});
  CHECK(o.at("eloise_wins") == true);
  CHECK(o.at("rank").is_null());
  CHECK(o.at("witness").size() == 2);

  json b = run_json({"bf", "--fragment", "diamond,store", "--modelL", "fixture:A-left", "--modelR",
                     "fixture:A-right", "--pair", "0", "0"});
  CHECK(b.at("verdict") == false);
  CHECK(b.at("maps").get<int>() > 0);

  json h = run_json({"hm", "--fragment", "diamond,store", "--left", "fixture:A-left:0", "--right",
                     "fixture:A-right:0"});
  CHECK(h.at("omega_wins") == true);
  CHECK(h.at("bf") == false);
  CHECK(h.at("hypotheses") == false);
  CHECK(h.at("consistent") == true);

  json r = run_json({"rootediso", "--left", "fixture:A-left:0", "--right", "fixture:A-left:0"});
  CHECK(r.at("isomorphic") == true);
  CHECK(r.at("agree") == true);

  json i = run_json({"iso", "--left", "fixture:D4:s0", "--right", "fixture:D4:s0"});
  CHECK(i.at("map").at("s3") == "s3");

  json t = run_json({"tree", "--complete", "--height", "2", "--relations", "l", "--props", "p",
                     "--fragment", "diamond,store,star", "--actions", "l,l*"});
  CHECK(t.at("height") == 2);
  CHECK(t.at("tree").get<std::string>().find("dia l*") != std::string::npos);
  json v = run_json({"tree", "--validate", "(at k leaf)", "--relations", "l", "--props", "p"});
  CHECK(v.at("valid") == false);

  json n = run_json({"normalform", "--formula", "~p & <l>p", "--relations", "l", "--props", "p",
                     "--enumerate", "64"});
  CHECK(n.at("tree") == "(idle (dia l leaf))");
  CHECK(n.at("members").size() > 0);

  json ch = run_json({"charform", "--tree", "(dia l leaf)", "--model", "fixture:A-left:0"});
  json cr = run_json({"charform", "--tree", "(dia l leaf)", "--model", "fixture:A-right:0"});
  CHECK(ch.at("game_sentence") == cr.at("game_sentence"));
}

TEST_CASE("cli paper examples") {
  for (const char* ex : {"loop", "pos", "quant", "finite-orders"}) {
    json p = run_json({"paper", "--example", ex});
    CHECK(p.at("ok") == true);
    for (const auto& c : p.at("checks")) CHECK_MESSAGE(c.at("ok") == true, c.at("name"));
  }
  CHECK(hdpl_run({"paper", "--example", "nope"}).code == 2);
  CHECK(hdpl_run({"paper", "--example", "loop", "--depth", "2"}).code == 2);
}

TEST_CASE("cli play") {
  std::vector<std::string> args = {"play", "--tree", "(dia l leaf)", "--left", "fixture:A-left:0",
                                   "--right", "fixture:A-right:0", "--as", "abelard"};
  Run r = hdpl_run(args, "7\n0\n");
  CHECK(r.code == 0);
  CHECK(r.out.find("pick a listed number") != std::string::npos);
  CHECK(r.out.find("eloise wins") != std::string::npos);
  Run cut = hdpl_run(args, "");
  CHECK(cut.code == 2);
}

TEST_CASE("cli fuzz and replay") {
  for (const char* suite : {"omega", "bf", "hm", "fh"}) {
    json f = run_json({"fuzz", "--suite", suite, "--cases", "40", "--seed", "9"});
    CHECK(f.at("failures") == 0);
    CHECK(f.at("counterexample").is_null());
  }
  // A hand-written case file replays through the same checks.
  std::string path = "cli_replay_case.json";
  json c{{"suite", "omega"},
         {"fragment", "diamond,store"},
         {"left", model_to_json(fixtures::branching_pair().first)},
         {"right", model_to_json(fixtures::branching_pair().second)},
         {"left_state", "0"},
         {"right_state", "0"}};
  std::ofstream(path) << c.dump();
  Run r = hdpl_run({"fuzz", "--replay", path});
  CHECK(r.code == 0);
  CHECK(r.out == "passes\n");
  std::remove(path.c_str());
}
