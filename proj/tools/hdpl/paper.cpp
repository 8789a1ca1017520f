#include <sstream>

#include "common.hpp"
#include "hdpl/checker.hpp"
#include "hdpl/omega.hpp"

namespace hdpl::cli {

namespace {

struct Checks {
  json list = json::array();
  std::ostringstream text;
  bool ok = true;

  void add(const std::string& name, bool passed, const std::string& detail = "") {
    list.push_back({{"name", name}, {"ok", passed}, {"detail", detail}});
    text << (passed ? "ok   " : "FAIL ") << name;
    if (!detail.empty()) text << " (" << detail << ")";
    text << "\n";
    ok = ok && passed;
  }
};

std::string omega_detail(const OmegaResult& r) {
  return r.eloise_wins ? "eloise wins" : "abelard wins in " + std::to_string(*r.rank);
}

void loop_example(Checks& c, std::size_t depth) {
  Signature sig = fixtures::loop_signature();
  KripkeModel m = fixtures::loop_left(), n = fixtures::loop_right(depth);
  TreePtr tr = parse_tree("(down (dia l (dia l leaf)))", sig, FragmentConfig::full());
  PointedModel l{m, m.state("0")}, r{n, n.state("0")};
  EfResult res = ef_solve(tr, l, r);
  c.add("abelard wins the store-then-two-diamonds game", !res.eloise_wins);
  c.add("in three rounds", res.rounds == 3, std::to_string(res.rounds));
  bool shape = res.trace.size() == 3 && res.trace[0].label == EdgeLabel::store() &&
               res.trace[1].label.kind() == EdgeLabel::Kind::Dia &&
               res.trace[2].label.kind() == EdgeLabel::Kind::Dia;
  std::string moves;
  for (const auto& st : res.trace) moves += (moves.empty() ? "" : "; ") + trace_line(st, m, n);
  c.add("trace is store, diamond, diamond", shape, moves);
  c.add("trace replays", replay_trace(tr, l, r, res.trace));
  c.add("characteristic sentences differ",
        !same_sentence(char_formula(tr, l), char_formula(tr, r)));
  TreePtr plain = parse_tree("(dia l (dia l leaf))", sig, FragmentConfig::full());
  c.add("without the store edge eloise wins", ef_solve(plain, l, r).eloise_wins);
  OmegaResult om = omega_solve(FragmentConfig({Op::Diamond, Op::Store}), l, r);
  c.add("countable game under diamond and store is lost", !om.eloise_wins, omega_detail(om));
}

void pos_example(Checks& c) {
  auto [m, n] = fixtures::branching_pair();
  PointedModel l{m, 0}, r{n, 0};
  FragmentConfig frag({Op::Diamond, Op::Store});
  OmegaResult om = omega_solve(frag, l, r);
  c.add("eloise wins the countable game under diamond and store", om.eloise_wins, omega_detail(om));
  c.add("no back-and-forth system relates the two roots", !bf_related(frag, l, r));
  TreePtr tr = complete_tree(m.signature(), frag, 2, base_actions(m.signature()));
  c.add("eloise wins on the complete tree of height 2", ef_solve(tr, l, r).eloise_wins);
  LBisimFamily fam = extract_bisim_witness(frag, l, r, 3);
  c.add("the extracted bisimulation family validates",
        validate_bisim_family(fam, frag, m, n).valid, std::to_string(fam.size()) + " entries");
  OmegaResult at = omega_solve(frag.with(Op::At), l, r);
  c.add("adding at lets abelard win", !at.eloise_wins, omega_detail(at));
}

void quant_example(Checks& c) {
  auto [m, n] = fixtures::disconnected_pair();
  PointedModel l{m, 0}, r{n, 0};
  FragmentConfig frag({Op::Diamond, Op::Store, Op::Exists});
  OmegaResult om = omega_solve(frag, l, r);
  c.add("eloise wins the countable game under diamond, store and exists", om.eloise_wins,
        omega_detail(om));
  c.add("no back-and-forth system relates the two roots", !bf_related(frag, l, r));
  LBisimFamily fam = extract_bisim_witness(frag, l, r, 2);
  c.add("the extracted bisimulation family validates",
        validate_bisim_family(fam, frag, m, n).valid, std::to_string(fam.size()) + " entries");
  OmegaResult at = omega_solve(frag.with(Op::At), l, r);
  c.add("adding at lets abelard win", !at.eloise_wins, omega_detail(at));
}

void finite_orders_example(Checks& c) {
  Signature sig = fixtures::chain_signature();
  Sentence phi = parse_sentence(fixtures::finite_chain_formula(), sig, FragmentConfig::full());
  for (std::size_t n = 2; n <= 6; ++n) {
    KripkeModel chain = fixtures::named_chain(n);
    c.add("holds on the end-named chain of " + std::to_string(n) + " states",
          satisfies({chain, 0}, phi));
  }
  c.add("fails on the named two-cycle", !satisfies({fixtures::named_cycle(), 0}, phi));
  bool all = true;
  for (StateId k1 = 0; k1 < 4; ++k1)
    for (StateId k2 = 0; k2 < 4; ++k2) all = all && !satisfies({fixtures::named_loop(k1, k2), 0}, phi);
  c.add("fails on the loop model for every placement of the nominals", all);
}

}  // namespace

void add_paper(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string example;
    std::size_t depth = 6;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("paper", "replay a worked example and check its verdicts");
  sub->add_option("--example", o->example)
      ->required()
      ->check(CLI::IsMember({"loop", "pos", "quant", "finite-orders"}));
  sub->add_option("--depth", o->depth, "chain truncation for the loop example")
      ->check(CLI::Range(4, 64));
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    Checks c;
    if (o->example == "loop")
      loop_example(c, o->depth);
    else if (o->example == "pos")
      pos_example(c);
    else if (o->example == "quant")
      quant_example(c);
    else
      finite_orders_example(c);
    if (o->json)
      io.out << json{{"command", "paper"}, {"example", o->example}, {"checks", c.list}, {"ok", c.ok}}
                    .dump(2)
             << "\n";
    else
      io.out << c.text.str();
    code = c.ok ? 0 : 1;
  });
}

}  // namespace hdpl::cli
