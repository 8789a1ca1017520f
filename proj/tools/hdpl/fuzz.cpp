#include <fstream>
#include <random>

#include "common.hpp"
#include "hdpl/checker.hpp"
#include "hdpl/io.hpp"
#include "hdpl/omega.hpp"

namespace hdpl::cli {

namespace {

struct Case {
  std::string suite;
  FragmentConfig frag;
  KripkeModel left, right;
  StateId w = 0, v = 0;
  std::string tree;  ///< fh only
};

json case_json(const Case& c, std::uint64_t seed, std::size_t index, const std::string& problem) {
  return {{"suite", c.suite},
          {"seed", seed},
          {"case", index},
          {"problem", problem},
          {"fragment", c.frag.to_string()},
          {"left", model_to_json(c.left)},
          {"right", model_to_json(c.right)},
          {"left_state", c.left.state_name(c.w)},
          {"right_state", c.right.state_name(c.v)},
          {"tree", c.tree}};
}

Case case_from_json(const json& j) {
  KripkeModel l = model_from_json(j.at("left"));
  KripkeModel r = model_from_json(j.at("right"), &l.signature());
  Case c{j.at("suite").get<std::string>(), fragment_arg(j.at("fragment").get<std::string>()),
         l, r, 0, 0, j.value("tree", "")};
  c.w = c.left.state(j.at("left_state").get<std::string>());
  c.v = c.right.state(j.at("right_state").get<std::string>());
  return c;
}

std::vector<FragmentConfig> fragment_pool(const std::string& suite) {
  std::vector<FragmentConfig> all = {
      FragmentConfig({Op::Diamond}),
      FragmentConfig({Op::Diamond}, {ActionCtor::Union, ActionCtor::Comp, ActionCtor::Star}),
      FragmentConfig({Op::Diamond, Op::Store}),
      FragmentConfig({Op::Diamond, Op::At}),
      FragmentConfig({Op::Diamond, Op::At, Op::Store}),
      FragmentConfig({Op::Diamond, Op::At, Op::Store}, {ActionCtor::Star}),
      FragmentConfig({Op::Diamond, Op::Store, Op::Exists}),
      FragmentConfig({Op::Diamond, Op::At, Op::Store, Op::Exists}),
      FragmentConfig({Op::At, Op::Store, Op::Exists}),
      FragmentConfig({Op::Exists})};
  if (suite != "hm") return all;
  std::vector<FragmentConfig> out;
  for (const auto& f : all)
    if (!f.has(Op::Exists)) out.push_back(f);
  return out;
}

std::vector<Action> witnesses(const FragmentConfig& frag, const KripkeModel& l, const KripkeModel& r) {
  std::vector<Action> out;
  if (!frag.has(Op::Diamond)) return out;
  for (const auto& ap : action_pair_closure(l, r, frag)) out.push_back(ap.witness);
  return out;
}

/// Empty when the case passes. `positive` reports whether Eloise won at the
/// chosen pair (fh: whether the two sides share a characteristic sentence).
std::string check_case(const Case& c, bool& positive) {
  positive = false;
  PointedModel l{c.left, c.w}, r{c.right, c.v};
  if (c.suite == "omega") {
    OmegaResult res = omega_solve(c.frag, l, r);
    positive = res.eloise_wins;
    auto acts = witnesses(c.frag, c.left, c.right);
    auto ef = [&](std::size_t h) {
      return ef_solve(complete_tree(c.left.signature(), c.frag, h, acts), l, r).eloise_wins;
    };
    if (res.eloise_wins) {
      if (!ef(std::min<std::size_t>(res.iterations + 1, 3)))
        return "countable game won but a finite complete-tree game is lost";
      LBisimFamily fam = extract_bisim_witness(c.frag, l, r, 2);
      if (!validate_bisim_family(fam, c.frag, c.left, c.right).valid)
        return "extracted bisimulation family fails validation";
    } else if (*res.rank <= 3) {
      if (ef(*res.rank)) return "countable game lost but the complete tree of its rank is won";
      if (*res.rank > 0 && !ef(*res.rank - 1)) return "rank is not the shortest win";
    }
    return "";
  }
  if (c.suite == "bf") {
    BackAndForthSystem sys = max_back_and_forth(c.frag, c.left, c.right);
    bool exact = bf_coincidence_hypotheses(c.frag);
    positive = sys.related(c.w, c.v);
    for (StateId a = 0; a < c.left.size(); ++a)
      for (StateId b = 0; b < c.right.size(); ++b) {
        bool bf = sys.related(a, b);
        bool win = omega_solve(c.frag, {c.left, a}, {c.right, b}).eloise_wins;
        if (bf && !win) return "back-and-forth related but the countable game is lost";
        if (exact && bf != win) return "verdicts differ although the hypotheses hold";
      }
    return "";
  }
  if (c.suite == "hm") {
    HmReport rep = hennessy_milner_check(c.frag, l, r);
    positive = rep.omega_wins;
    if (!rep.games_agree()) return "characteristic formulas disagree with the countable game";
    if (rep.hypotheses && !rep.all_agree()) return "back-and-forth disagrees under the hypotheses";
    return "";
  }
  // fh
  TreePtr tr = parse_tree(c.tree, c.left.signature(), FragmentConfig::full());
  GamePool pool;
  auto all = enumerate_game_sentences(tr, 512, pool);
  for (const PointedModel* pm : {&l, &r}) {
    GamePtr ch = char_formula(tr, *pm, pool);
    std::size_t hits = 0;
    for (const auto& g : all)
      if (satisfies(*pm, lower_game_sentence(g))) {
        ++hits;
        if (!same_sentence(g, ch)) return "a satisfied game sentence is not the characteristic one";
      }
    if (hits != 1) return std::to_string(hits) + " game sentences hold instead of one";
  }
  bool same = same_sentence(char_formula(tr, l, pool), char_formula(tr, r, pool));
  positive = same;
  if (ef_solve(tr, l, r).eloise_wins != same)
    return "game verdict differs from characteristic formula equality";
  return "";
}

Case make_case(const std::string& suite, std::mt19937_64& rng,
               const std::optional<FragmentConfig>& fixed) {
  Signature sig = suite == "fh" ? Signature::make({"k"}, {"l"}, {"p"})
                                : Signature::make({"k"}, {"a"}, {"p"});
  auto pool = fragment_pool(suite);
  FragmentConfig frag = fixed ? *fixed : pool[rng() % pool.size()];
  auto [l, r] = generate_random_pair(rng(), suite == "fh" ? 4 : 3, 0.35, sig);
  StateId w = static_cast<StateId>(rng() % l.size());
  // Prefer a right state that agrees with w on basic sentences.
  std::vector<StateId> agreeing;
  for (StateId v = 0; v < r.size(); ++v)
    if (basic_agreement(l, w, l.named_interp(), r, v, r.named_interp())) agreeing.push_back(v);
  StateId v = agreeing.empty() ? static_cast<StateId>(rng() % r.size())
                               : agreeing[rng() % agreeing.size()];
  Case c{suite, frag, l, r, w, v, ""};
  if (suite == "fh") {
    for (;;) {
      TreePtr t = random_tree(rng, sig, frag, 2, base_actions(sig), 0.5);
      auto n = theta_size(t);
      if (n && *n <= 512) {
        c.tree = print_tree(t);
        break;
      }
    }
  }
  return c;
}

}  // namespace

void add_fuzz(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string suite, fragment, out = "hdpl-counterexample.json", replay;
    std::size_t cases = 100;
    std::uint64_t seed = 1;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("fuzz", "differential property suites on random cases");
  sub->add_option("--suite", o->suite)->check(CLI::IsMember({"omega", "bf", "hm", "fh"}));
  sub->add_option("--cases", o->cases);
  sub->add_option("--seed", o->seed);
  sub->add_option("--fragment", o->fragment, "fix the fragment instead of sampling one");
  sub->add_option("--out", o->out, "where a counterexample is written");
  sub->add_option("--replay", o->replay, "re-run a dumped counterexample");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    if (!o->replay.empty()) {
      Case c = case_from_json(read_json_file(o->replay));
      bool positive = false;
      std::string problem = check_case(c, positive);
      if (o->json)
        io.out << json{{"command", "fuzz"}, {"replay", o->replay}, {"problem", problem}}.dump(2) << "\n";
      else
        io.out << (problem.empty() ? "passes" : problem) << "\n";
      code = problem.empty() ? 0 : 1;
      return;
    }
    if (o->suite.empty()) throw UsageError("give --suite or --replay");
    std::optional<FragmentConfig> fixed;
    if (!o->fragment.empty()) fixed = fragment_arg(o->fragment);
    std::mt19937_64 rng(o->seed);
    std::size_t failures = 0, positives = 0;
    json dumped = nullptr;
    for (std::size_t i = 0; i < o->cases; ++i) {
      Case c = make_case(o->suite, rng, fixed);
      bool positive = false;
      std::string problem = check_case(c, positive);
      positives += positive;
      if (problem.empty()) continue;
      ++failures;
      if (dumped.is_null()) {
        std::ofstream f(o->out);
        f << case_json(c, o->seed, i, problem).dump(2) << "\n";
        dumped = o->out;
        io.err << "case " << i << ": " << problem << " (written to " << o->out << ")\n";
      }
    }
    if (o->json)
      io.out << json{{"command", "fuzz"},  {"suite", o->suite},       {"cases", o->cases},
                     {"seed", o->seed},    {"failures", failures}, {"positive", positives},   {"counterexample", dumped}}
                    .dump(2)
             << "\n";
    else
      io.out << o->suite << ": " << o->cases << " cases, seed " << o->seed << ", " << positives
             << " positive, " << failures << " failing\n";
    code = failures == 0 ? 0 : 1;
  });
}

}  // namespace hdpl::cli
