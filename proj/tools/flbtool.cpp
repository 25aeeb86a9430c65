// Command-line front end over knowledge files.
// Exit codes: 0 true/SAT/valid/ok, 1 false/UNSAT/invalid, 2 usage or parse error, 3 budget.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flb/circumscription.hpp"
#include "flb/deduction.hpp"
#include "flb/knowledge.hpp"
#include "flb/minimal_models.hpp"
#include "flb/normalize.hpp"
#include "flb/solver.hpp"

using namespace flb;

namespace {

constexpr int kOk = 0, kFalse = 1, kUsage = 2, kBudget = 3;

KnowledgeFile load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_knowledge(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

const Transition& get_model(const KnowledgeFile& kf, const std::string& name) {
  const Transition* t = kf.model(name);
  if (!t) throw UsageError("no model named '" + name + "'");
  return *t;
}

Assignment parse_assign(const Transition& t, const std::vector<std::string>& items) {
  Assignment mu;
  for (const auto& it : items) {
    auto eq = it.find('=');
    if (eq == std::string::npos) throw UsageError("--assign expects VAR=NODE, got '" + it + "'");
    std::string var = it.substr(0, eq), node = it.substr(eq + 1);
    int x = t.index_of(node);
    if (x < 0) throw UsageError("unknown node '" + node + "'");
    mu[var] = x;
  }
  return mu;
}

void require_assigned(const FormulaPtr& f, const Assignment& mu) {
  for (const auto& v : free_variables(*f))
    if (!mu.count(v)) throw UsageError("free variable '" + v + "' needs --assign");
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur), cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string assignment_text(const Transition& t, const Assignment& mu) {
  std::string out;
  for (const auto& [v, x] : mu) out += v + " = " + t.node_names[x] + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning over transitions of forests of linked bounded trees"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for randomized commands")->capture_default_str();

  std::string file, model, formula, derivation, kernel, target = "ea", vars;
  std::vector<std::string> assign;
  int radius = 0, max_nodes = 3, trials = 100;
  std::optional<int> max_trees;
  bool project = false;

  auto with_file = [&](CLI::App* c) { c->add_option("FILE", file, "Knowledge file")->required(); };

  auto* check = app.add_subcommand("check", "Validate every model: FLB conditions, support, theory agreement");
  with_file(check);

  auto* evalc = app.add_subcommand("eval", "Evaluate a formula on a model");
  with_file(evalc);
  evalc->add_option("--model", model)->required();
  evalc->add_option("--formula", formula)->required();
  evalc->add_option("--assign", assign, "VAR=NODE");

  auto* derive = app.add_subcommand("derive", "Check a stored derivation");
  with_file(derive);
  derive->add_option("--derivation", derivation)->required();

  auto* infer = app.add_subcommand("infer", "Search a derivation for a formula");
  with_file(infer);
  infer->add_option("--formula", formula)->required();

  auto* subs = app.add_subcommand("subs", "List the (K,d)-subs of a model");
  with_file(subs);
  subs->add_option("--model", model)->required();
  subs->add_option("--kernel", kernel, "Comma-separated nodes")->required();
  subs->add_option("--radius", radius)->capture_default_str();

  auto* minimal = app.add_subcommand("minimal", "Minimality of a model, or all minimal models up to a size");
  with_file(minimal);
  minimal->add_option("--model", model);
  minimal->add_option("--formula", formula)->required();
  minimal->add_option("--assign", assign, "VAR=NODE");
  minimal->add_option("--vars", vars, "Comma-separated template variables (without --model)");
  minimal->add_option("--max-nodes", max_nodes)->capture_default_str();
  minimal->add_flag("--project", project, "Enumerate only the fact families the formula mentions");

  auto* enumerate = app.add_subcommand("enumerate", "All models of a closed formula up to isomorphism");
  with_file(enumerate);
  enumerate->add_option("--formula", formula)->required();
  enumerate->add_option("--max-nodes", max_nodes)->capture_default_str();
  enumerate->add_flag("--project", project, "Enumerate only the fact families the formula mentions");

  auto* satc = app.add_subcommand("sat", "Satisfiability modulo the supported-FLB theory");
  with_file(satc);
  satc->add_option("--formula", formula)->required();
  satc->add_option("--max-trees", max_trees);

  auto* validc = app.add_subcommand("valid", "Validity modulo the supported-FLB theory");
  with_file(validc);
  validc->add_option("--formula", formula)->required();
  validc->add_option("--max-trees", max_trees);

  auto* normalize = app.add_subcommand("normalize", "Prenex form in a target fragment");
  with_file(normalize);
  normalize->add_option("--formula", formula)->required();
  normalize->add_option("--target", target)->check(CLI::IsMember({"ea", "ae"}))->capture_default_str();

  auto* preserve = app.add_subcommand("preserve", "Randomized preservation check of a formula under V;d");
  with_file(preserve);
  preserve->add_option("--formula", formula)->required();
  preserve->add_option("--vars", vars, "Comma-separated context variables");
  preserve->add_option("--radius", radius)->capture_default_str();
  preserve->add_option("--trials", trials)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  std::ostringstream out;
  int code = kOk;
  try {
    KnowledgeFile kf = load_file(file);
    const auto& sig = kf.sig;

    if (*check) {
      auto theory = theory_formula(*sig);
      for (const auto& m : kf.models) {
        auto violations = validate_flb(m.t);
        bool supported = is_supported(m.t);
        bool agree = violations.empty() == eval(m.t, {}, theory);
        out << m.name << ": " << (violations.empty() ? "valid" : "invalid") << ", "
            << (supported ? "supported" : "unsupported") << ", theory " << (agree ? "agrees" : "DISAGREES") << "\n";
        for (const auto& v : violations) {
          out << "  " << to_string(v.kind) << ":";
          for (int x : v.nodes) out << " " << m.t.node_names[x];
          out << "\n";
        }
        if (!violations.empty() || !supported || !agree) code = kFalse;
      }
      for (const auto& d : kf.derivations) {
        try {
          out << d.name << ": " << to_string(check_derivation(d.dv, *sig)) << "\n";
        } catch (const DerivationError& e) {
          out << d.name << ": rejected: " << e.what() << "\n";
        }
      }
    } else if (*evalc) {
      const Transition& t = get_model(kf, model);
      auto f = kf.formula(formula);
      Assignment mu = parse_assign(t, assign);
      require_assigned(f, mu);
      bool v = eval(t, mu, f);
      out << (v ? "true" : "false") << "\n";
      code = v ? kOk : kFalse;
    } else if (*derive) {
      const Derivation* dv = kf.derivation(derivation);
      if (!dv) throw UsageError("no derivation named '" + derivation + "'");
      try {
        out << to_string(check_derivation(*dv, *sig)) << "\n";
      } catch (const DerivationError& e) {
        out << "rejected: " << e.what() << "\n";
        code = kFalse;
      }
    } else if (*infer) {
      auto f = kf.formula(formula);
      if (auto dv = infer_derivation(f, *sig)) {
        out << to_string(check_derivation(*dv, *sig)) << "\n" << to_string(*dv) << "\n";
      } else {
        out << "no derivation found\n";
        code = kFalse;
      }
    } else if (*subs) {
      const Transition& t = get_model(kf, model);
      if (!is_valid_flb(t)) throw UsageError("model '" + model + "' is not a valid FLB");
      NodeSet k;
      for (const auto& n : split_list(kernel)) {
        int x = t.index_of(n);
        if (x < 0) throw UsageError("unknown node '" + n + "'");
        k.set(x);
      }
      if (radius < 0) throw UsageError("--radius must be non-negative");
      auto result = enumerate_subs(t, k, radius);
      out << result.size() << " subs\n";
      for (size_t i = 0; i < result.size(); ++i) out << save_model(result[i], "sub" + std::to_string(i + 1));
    } else if (*minimal) {
      auto f = with_supported_theory(kf.formula(formula), *sig);
      if (!model.empty()) {
        const Transition& t = get_model(kf, model);
        Assignment mu = parse_assign(t, assign);
        require_assigned(f, mu);
        if (!is_valid_flb(t)) throw UsageError("model '" + model + "' is not a valid FLB");
        if (!eval(t, mu, f)) {
          out << "false\nnot a model\n";
          code = kFalse;
        } else if (auto smaller = find_smaller_model(t, mu, f, {})) {
          out << "false\n" << save_model(*smaller, "smaller");
          code = kFalse;
        } else {
          out << "true\n";
        }
      } else {
        auto vs = split_list(vars);
        Projection proj = project ? Projection::of(*f, *sig) : Projection::full(*sig);
        auto res = minimal_models(f, sig, vs, max_nodes, proj);
        out << res.models.size() << " minimal models\n";
        for (size_t i = 0; i < res.models.size(); ++i) {
          out << save_model(res.models[i].t, "min" + std::to_string(i + 1));
          out << assignment_text(res.models[i].t, res.models[i].mu);
        }
      }
    } else if (*enumerate) {
      auto f = kf.formula(formula);
      Projection proj = project ? Projection::of(*f, *sig) : Projection::full(*sig);
      auto models = enumerate_models(sig, max_nodes, f, proj);
      out << models.size() << " models\n";
      for (size_t i = 0; i < models.size(); ++i) out << save_model(models[i], "m" + std::to_string(i + 1));
      code = models.empty() ? kFalse : kOk;
    } else if (*satc) {
      SolverOptions opts;
      opts.max_trees = max_trees;
      auto r = sat(kf.formula(formula), sig, opts);
      if (r.sat) {
        out << "SAT\n" << save_model(*r.witness, "witness") << assignment_text(*r.witness, r.assignment);
      } else {
        out << "UNSAT\n";
        code = kFalse;
      }
    } else if (*validc) {
      SolverOptions opts;
      opts.max_trees = max_trees;
      auto r = valid(kf.formula(formula), sig, opts);
      if (r.valid) {
        out << "valid\n";
      } else {
        out << "invalid\n" << save_model(*r.counter_model, "counter") << assignment_text(*r.counter_model, r.assignment);
        code = kFalse;
      }
    } else if (*normalize) {
      auto f = kf.formula(formula);
      auto r = fragment_normalize(f, target == "ea" ? Fragment::EA : Fragment::AE);
      if (r) {
        out << to_string(classify(r->prefix)) << "\n" << to_string(*r->to_formula()) << "\n";
      } else {
        out << "not found within bound\n";
        code = kFalse;
      }
    } else if (*preserve) {
      auto f = kf.formula(formula);
      auto vs = split_list(vars);
      if (radius < 0 || trials < 0) throw UsageError("--radius and --trials must be non-negative");
      auto rep = preservation_check(f, {vs.begin(), vs.end()}, radius, sig, trials, seed);
      out << (rep.pass ? "preserved" : "violated") << " (" << rep.trials << " trials, " << rep.checks << " checks, "
          << rep.subs << " subs)\n";
      if (!rep.pass) {
        Assignment all = rep.mu;
        all.insert(rep.nu.begin(), rep.nu.end());
        out << save_model(*rep.a, "a") << save_model(*rep.b, "b") << assignment_text(*rep.b, all);
        code = kFalse;
      }
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kBudget;
  }
  std::cout << out.str();
  return code;
}
