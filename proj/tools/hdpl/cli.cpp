#include <new>
#include <algorithm>
#include <sstream>

#include "common.hpp"
#include "hdpl/checker.hpp"
#include "hdpl/io.hpp"
#include "hdpl/omega.hpp"

namespace hdpl::cli {

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

json optional_json(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

void emit(Io& io, bool as_json, const json& j, const std::string& text) {
  if (as_json)
    io.out << j.dump(2) << "\n";
  else
    io.out << text;
}

// ---------------------------------------------------------------------------

void add_check(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string model, state, formula, fragment = "all";
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("check", "evaluate a sentence at a state");
  sub->add_option("--model", o->model, "model JSON file or fixture:NAME")->required();
  sub->add_option("--state", o->state, "state name")->required();
  sub->add_option("--formula", o->formula, "sentence, or @file")->required();
  sub->add_option("--fragment", o->fragment, "enabled constructors");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    KripkeModel m = load_any_model(o->model);
    StateId w = m.state(o->state);
    Sentence s = parse_sentence(text_arg(o->formula), m.signature(), fragment_arg(o->fragment));
    bool v = satisfies({m, w}, s);
    emit(io, o->json, {{"command", "check"}, {"verdict", v}, {"formula", print_sentence(s)}},
         v ? "true\n" : "false\n");
    code = v ? 0 : 1;
  });
}

void add_game(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string tree, left, right, fragment = "all";
    bool trace = false, json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("game", "solve the game over a gameboard tree");
  sub->add_option("--tree", o->tree, "tree text or file")->required();
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_option("--fragment", o->fragment);
  sub->add_flag("--trace", o->trace, "print Abelard's winning play");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    TreePtr tr = parse_tree(tree_text(o->tree), l.model.signature(), fragment_arg(o->fragment));
    EfResult res = ef_solve(tr, l, r);
    std::ostringstream text;
    if (res.eloise_wins) {
      text << "eloise wins\n";
    } else {
      text << "abelard wins in " << res.rounds << " round" << (res.rounds == 1 ? "" : "s") << "\n";
      if (o->trace)
        for (std::size_t i = 0; i < res.trace.size(); ++i)
          text << "  " << i + 1 << ". " << trace_line(res.trace[i], l.model, r.model) << "\n";
    }
    json j{{"command", "game"}, {"eloise_wins", res.eloise_wins}, {"rounds", res.rounds}};
    j["trace"] = trace_json(res.trace, l.model, r.model);
    emit(io, o->json, j, text.str());
    code = res.eloise_wins ? 0 : 1;
  });
}

void add_charform(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string tree, model, fragment = "all";
    bool lower = false, json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("charform", "characteristic game sentence of a pointed model");
  sub->add_option("--tree", o->tree, "tree text or file")->required();
  sub->add_option("--model", o->model, "path.json:state")->required();
  sub->add_option("--fragment", o->fragment);
  sub->add_flag("--lower", o->lower, "print the sentence it stands for");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    PointedModel pm = load_pointed(o->model);
    TreePtr tr = parse_tree(tree_text(o->tree), pm.model.signature(), fragment_arg(o->fragment));
    GamePtr g = char_formula(tr, pm);
    std::string lowered = print_sentence(lower_game_sentence(g));
    emit(io, o->json,
         {{"command", "charform"}, {"game_sentence", print_game_sentence(g)}, {"lowered", lowered}},
         (o->lower ? lowered : print_game_sentence(g)) + "\n");
    code = 0;
  });
}

void add_normalform(CLI::App& app, Io& io, int& code) {
  struct Opts {
    SignatureArgs sig;
    std::string formula, fragment = "all";
    std::size_t enumerate = 0;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("normalform", "gameboard tree and game-sentence disjunction");
  sub->add_option("--formula", o->formula, "sentence, or @file")->required();
  o->sig.add_to(sub);
  sub->add_option("--fragment", o->fragment);
  sub->add_option("--enumerate", o->enumerate,
                  "list the member sentences when there are at most this many candidates");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    Signature sig = o->sig.resolve();
    FragmentConfig frag = fragment_arg(o->fragment);
    Sentence s = parse_sentence(text_arg(o->formula), sig, frag);
    NormalForm nf = normal_form(s, sig, frag);
    auto theta = theta_size(nf.tree());
    std::ostringstream text;
    text << "tree: " << print_tree(nf.tree()) << "\n";
    text << "game sentences: " << (theta ? std::to_string(*theta) : "more than 2^62") << "\n";
    json j{{"command", "normalform"}, {"tree", print_tree(nf.tree())}, {"theta_size", optional_json(theta)}};
    if (o->enumerate > 0) {
      GamePool pool;
      json members = json::array();
      for (const auto& g : enumerate_game_sentences(nf.tree(), o->enumerate, pool))
        if (nf.contains(g)) {
          members.push_back(print_game_sentence(g));
          text << "  " << print_game_sentence(g) << "\n";
        }
      j["members"] = members;
    }
    emit(io, o->json, j, text.str());
    code = 0;
  });
}

void add_tree(CLI::App& app, Io& io, int& code) {
  struct Opts {
    SignatureArgs sig;
    std::string validate, actions, fragment = "all";
    bool complete = false, json = false;
    std::size_t height = 0;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("tree", "validate or build gameboard trees");
  auto* v = sub->add_option("--validate", o->validate, "tree text or file to check");
  auto* c = sub->add_flag("--complete", o->complete, "print the complete tree");
  v->excludes(c);
  sub->add_option("--height", o->height, "height of the complete tree");
  sub->add_option("--actions", o->actions, "comma-separated diamond actions (default: relations)");
  o->sig.add_to(sub);
  sub->add_option("--fragment", o->fragment);
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    Signature sig = o->sig.resolve();
    FragmentConfig frag = fragment_arg(o->fragment);
    if (!o->complete && o->validate.empty()) throw UsageError("give --validate or --complete");
    if (o->complete) {
      std::vector<Action> acts;
      for (const auto& a : split_list(o->actions)) acts.push_back(parse_action(a, sig, frag));
      if (o->actions.empty()) acts = base_actions(sig);
      TreePtr tr = complete_tree(sig, frag, o->height, acts);
      json j{{"command", "tree"},       {"tree", print_tree(tr)},
             {"height", tr->height()},  {"nodes", tr->node_count()},
             {"theta_size", optional_json(theta_size(tr))}};
      emit(io, o->json, j, print_tree(tr) + "\n");
      code = 0;
      return;
    }
    // Syntax errors are reported as problems rather than usage errors.
    TreeReport rep;
    std::string printed;
    try {
      TreePtr tr = parse_tree(tree_text(o->validate), sig, FragmentConfig::full());
      rep = validate_tree(tr, frag);
      printed = print_tree(tr);
    } catch (const UsageError&) {
      throw;
    } catch (const Error& e) {
      rep.valid = false;
      rep.problems.push_back(e.what());
    }
    std::string text = rep.valid ? "valid\n" : "invalid\n";
    for (const auto& p : rep.problems) text += "  " + p + "\n";
    emit(io, o->json,
         {{"command", "tree"}, {"valid", rep.valid}, {"problems", rep.problems}, {"tree", printed}},
         text);
    code = rep.valid ? 0 : 1;
  });
}

json entry_json(const BisimEntry& e, const KripkeModel& l, const KripkeModel& r) {
  auto names = [](const std::vector<StateId>& t, const KripkeModel& m) {
    json a = json::array();
    for (StateId s : t) a.push_back(m.state_name(s));
    return a;
  };
  return {{"left_tuple", names(e.left_tuple, l)}, {"left", l.state_name(e.left)},
          {"right_tuple", names(e.right_tuple, r)}, {"right", r.state_name(e.right)}};
}

void add_omega(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string left, right, fragment = "all";
    std::optional<std::size_t> witness;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("omega", "solve the countable game");
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_option("--fragment", o->fragment);
  sub->add_option("--witness", o->witness, "print a bisimulation family up to this level");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    FragmentConfig frag = fragment_arg(o->fragment);
    OmegaResult res = omega_solve(frag, l, r);
    std::ostringstream text;
    json j{{"command", "omega"},
           {"eloise_wins", res.eloise_wins},
           {"rank", res.rank ? json(*res.rank) : json(nullptr)},
           {"iterations", res.iterations},
           {"positions", res.positions}};
    if (res.eloise_wins)
      text << "eloise wins\n";
    else
      text << "abelard wins in " << *res.rank << " round" << (*res.rank == 1 ? "" : "s") << "\n";
    if (o->witness && res.eloise_wins) {
      LBisimFamily fam = extract_bisim_witness(frag, l, r, *o->witness);
      json levels = json::array();
      for (std::size_t lv = 0; lv <= fam.max_level; ++lv) {
        json lvl = json::array();
        text << "level " << lv << ":\n";
        for (const auto& e : fam.levels[lv]) {
          lvl.push_back(entry_json(e, l.model, r.model));
          text << "  " << to_string(e, l.model, r.model) << "\n";
        }
        levels.push_back(lvl);
      }
      j["witness"] = levels;
    }
    emit(io, o->json, j, text.str());
    code = res.eloise_wins ? 0 : 1;
  });
}

void add_bf(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string left, right, fragment = "all";
    std::vector<std::string> pair;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("bf", "greatest back-and-forth system");
  sub->add_option("--modelL", o->left, "left model")->required();
  sub->add_option("--modelR", o->right, "right model")->required();
  sub->add_option("--pair", o->pair, "left and right state to test")->expected(2);
  sub->add_option("--fragment", o->fragment);
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    KripkeModel a = load_any_model(o->left), b = load_any_model(o->right);
    if (!(a.signature() == b.signature())) std::tie(a, b) = unify_models(a, b);
    BackAndForthSystem sys = max_back_and_forth(fragment_arg(o->fragment), a, b);
    std::ostringstream text;
    json related = json::array();
    text << sys.maps.size() << " partial isomorphisms survive\n";
    for (StateId w = 0; w < a.size(); ++w)
      for (StateId v = 0; v < b.size(); ++v)
        if (sys.related(w, v)) {
          related.push_back({a.state_name(w), b.state_name(v)});
          text << "  " << a.state_name(w) << " ~ " << b.state_name(v) << "\n";
        }
    json j{{"command", "bf"}, {"maps", sys.maps.size()}, {"related", related}};
    bool verdict = !sys.empty();
    if (!o->pair.empty()) {
      verdict = sys.related(a.state(o->pair[0]), b.state(o->pair[1]));
      text << o->pair[0] << " and " << o->pair[1] << (verdict ? " are" : " are not") << " related\n";
      j["pair"] = o->pair;
    }
    j["verdict"] = verdict;
    emit(io, o->json, j, text.str());
    code = verdict ? 0 : 1;
  });
}

void add_hm(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string left, right, fragment = "diamond,at,store,union,comp,star";
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand(
      "hm", "compare characteristic formulas, the countable game and back-and-forth");
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_option("--fragment", o->fragment, "must not enable exists");
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    HmReport rep = hennessy_milner_check(fragment_arg(o->fragment), l, r);
    bool expected = rep.games_agree() && (!rep.hypotheses || rep.all_agree());
    std::ostringstream text;
    text << "heights compared: 1.." << rep.height << "\n"
         << "characteristic formulas agree: " << yes_no(rep.formulas_agree) << "\n"
         << "countable game won by eloise: " << yes_no(rep.omega_wins) << "\n"
         << "back-and-forth related: " << yes_no(rep.bf) << "\n"
         << "back-and-forth hypotheses hold: " << yes_no(rep.hypotheses) << "\n";
    if (!rep.hypotheses && rep.omega_wins != rep.bf)
      text << "back-and-forth diverges from the game (hypotheses unmet)\n";
    json j{{"command", "hm"},          {"height", rep.height},
           {"formulas_agree", rep.formulas_agree}, {"omega_wins", rep.omega_wins},
           {"bf", rep.bf},             {"hypotheses", rep.hypotheses},
           {"consistent", expected}};
    emit(io, o->json, j, text.str());
    code = expected ? 0 : 1;
  });
}

void add_rootediso(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string left, right, fragment = "diamond,at,store";
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("rootediso", "isomorphism versus the countable game on rooted models");
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_option("--fragment", o->fragment);
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    RootedIsoReport rep = rooted_iso_check(fragment_arg(o->fragment), l, r);
    std::ostringstream text;
    text << "isomorphic: " << yes_no(rep.isomorphic) << "\n"
         << "countable game won by eloise: " << yes_no(rep.omega_wins) << "\n";
    emit(io, o->json,
         {{"command", "rootediso"},
          {"isomorphic", rep.isomorphic},
          {"omega_wins", rep.omega_wins},
          {"agree", rep.agree()}},
         text.str());
    code = rep.agree() ? 0 : 1;
  });
}

void add_iso(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string left, right;
    bool json = false;
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("iso", "find an isomorphism of pointed models");
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_flag("--json", o->json);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    auto h = find_isomorphism(l, r);
    std::ostringstream text;
    json map = json::object();
    if (h) {
      for (StateId w = 0; w < l.model.size(); ++w) {
        map[l.model.state_name(w)] = r.model.state_name((*h)[w]);
        text << l.model.state_name(w) << " -> " << r.model.state_name((*h)[w]) << "\n";
      }
    } else {
      text << "no isomorphism\n";
    }
    emit(io, o->json,
         {{"command", "iso"}, {"isomorphic", h.has_value()}, {"map", h ? map : json(nullptr)}},
         text.str());
    code = h ? 0 : 1;
  });
}

void add_play(CLI::App& app, Io& io, int& code) {
  struct Opts {
    std::string tree, left, right, as = "abelard", fragment = "all";
  };
  auto o = std::make_shared<Opts>();
  auto* sub = app.add_subcommand("play", "play the game against the solver");
  sub->add_option("--tree", o->tree, "tree text or file")->required();
  sub->add_option("--left", o->left, "path.json:state")->required();
  sub->add_option("--right", o->right, "path.json:state")->required();
  sub->add_option("--as", o->as, "your side")->check(CLI::IsMember({"abelard", "eloise"}));
  sub->add_option("--fragment", o->fragment);
  sub->callback([o, &io, &code] {
    auto [l, r] = load_pointed_pair(o->left, o->right);
    TreePtr tr = parse_tree(tree_text(o->tree), l.model.signature(), fragment_arg(o->fragment));
    EfGame game(tr, l.model, r.model);
    GameState s = game.initial(l.current, r.current);
    Player human = o->as == "abelard" ? Player::Abelard : Player::Eloise;
    while (s.status == GameStatus::Ongoing) {
      Player p = game.to_move(s);
      auto moves = game.legal_moves(s);
      io.out << "round " << s.round + 1 << ": left at " << l.model.state_name(s.left)
             << ", right at " << r.model.state_name(s.right) << "; "
             << (p == Player::Abelard ? "abelard" : "eloise") << " to move\n";
      GameMove m;
      if (p == human) {
        for (std::size_t i = 0; i < moves.size(); ++i)
          io.out << "  [" << i << "] " << game.describe(moves[i], s) << "\n";
        io.out << "> " << std::flush;
        std::string line;
        if (!std::getline(io.in, line)) throw UsageError("input ended before the game did");
        std::size_t pick = moves.size();
        try {
          pick = std::stoul(line);
        } catch (const std::exception&) {
        }
        if (pick >= moves.size()) {
          io.out << "pick a listed number\n";
          continue;
        }
        m = moves[pick];
      } else {
        m = game.best_move(s);
        io.out << "solver plays " << game.describe(m, s) << "\n";
      }
      s = game.step(s, m);
    }
    bool eloise = s.status == GameStatus::EloiseWon;
    io.out << (eloise ? "eloise wins" : "abelard wins");
    if (!s.reason.empty()) io.out << ": " << s.reason;
    io.out << "\n";
    code = 0;
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::istream& in) {
  Io io{out, err, in};
  int code = 0;
  CLI::App app{"hybrid-dynamic propositional logic toolkit", "hdpl"};
  app.require_subcommand(1);
  add_check(app, io, code);
  add_game(app, io, code);
  add_charform(app, io, code);
  add_normalform(app, io, code);
  add_tree(app, io, code);
  add_omega(app, io, code);
  add_bf(app, io, code);
  add_hm(app, io, code);
  add_rootediso(app, io, code);
  add_iso(app, io, code);
  add_play(app, io, code);
  add_fuzz(app, io, code);
  add_paper(app, io, code);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory; the game arena is too large for these models\n";
    return 2;
  }
  return code;
}

}  // namespace hdpl::cli
