// Command line front end: simulate, test, discover, eval.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "jci/acid.hpp"
#include "jci/dataset.hpp"
#include "jci/design.hpp"
#include "jci/errors.hpp"
#include "jci/eval.hpp"
#include "jci/independence.hpp"
#include "jci/scm.hpp"

namespace fs = std::filesystem;
using namespace jci;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

bool is_intervention_name(const std::string& n) {
  return n.size() > 1 && n[0] == 'I' && n.find_first_not_of("0123456789", 1) == std::string::npos;
}

/// Deterministic relations from a design whose columns are named like the
/// intervention variables in `names`.
DetRelationSet relations_from_design(const ExperimentalDesign& design, const std::vector<std::string>& names) {
  auto id_of = [&](const std::string& n) {
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == n) return static_cast<VarId>(k);
    }
    throw InputError("design column '" + n + "' is not a variable");
  };
  const VarId r = id_of("R");
  std::vector<VarId> iv;
  for (const auto& n : design.names) iv.push_back(id_of(n));
  const DesignReport report = validate_design(design);
  for (const auto& issue : report.issues) std::cerr << "design: " << issue.message << '\n';
  if (!report.valid()) throw InputError("design violates the JCI assumptions; normalise it first");
  return design_relations(report, r, iv);
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  int p = 4;
  int i = 1;
  int latents = -1;
  int n = 500;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

void run_simulate(const SimulateArgs& a) {
  const std::optional<int> latents = a.latents < 0 ? std::nullopt : std::optional<int>(a.latents);
  const JciScm model = random_jci_model(a.p, a.i, latents, a.seed);
  const PooledDataset data = sample(model, a.n, {}, a.seed + 1);
  fs::create_directories(a.out_dir);
  auto d = open_out(fs::path(a.out_dir) / "data.csv");
  write_dataset_csv(d, data);
  auto m = open_out(fs::path(a.out_dir) / "model.json");
  write_model_json(m, model);
  auto s = open_out(fs::path(a.out_dir) / "design.csv");
  write_design_csv(s, model.design);
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "wrote " << data.rows() << " rows over " << data.cols() << " columns to " << a.out_dir << '\n';
}

struct TestArgs {
  std::string data;
  int max_order = -1;
  double alpha = kDefaultAlpha;
  std::string design;
  std::string out;
};

void run_test(const TestArgs& a) {
  auto in = open_in(a.data);
  const PooledDataset data = read_dataset_csv(in);
  const int max_order = a.max_order < 0 ? std::max(0, data.cols() - 2) : a.max_order;
  const TestRun run = run_all_tests(data, VarSet::first(data.cols()), max_order, {a.alpha, kDefaultMaxWeight});
  std::map<std::string, int> reasons;
  for (const auto& s : run.skipped) ++reasons[s.reason];
  for (const auto& [reason, count] : reasons) std::cerr << "skipped " << count << " tests: " << reason << '\n';
  DetRelationSet d;
  if (!a.design.empty()) {
    auto din = open_in(a.design);
    d = relations_from_design(read_design_csv(din), data.names);
  }
  const Conversion conv = statements_to_dstatements(run.statements, d);
  std::cerr << run.statements.size() << " tests, " << run.skipped.size() << " skipped, " << conv.dropped
            << " independences dropped by determinism\n";
  if (a.out.empty() || a.out == "-") {
    write_statements(std::cout, conv.statements, data.names);
  } else {
    auto out = open_out(a.out);
    write_statements(out, conv.statements, data.names);
  }
}

struct DiscoverArgs {
  std::string statements;
  bool jci = false;
  std::string design;
  std::string background;
  int max_order = -1;
  std::string score_pairs = "all";
  std::string out;
};

void run_discover(const DiscoverArgs& a) {
  auto in = open_in(a.statements);
  const StatementFile file = read_statements(in);
  std::vector<std::string> intervention_names;
  if (!a.design.empty()) {
    auto din = open_in(a.design);
    const ExperimentalDesign design = read_design_csv(din);
    relations_from_design(design, file.names);  // validates names and assumptions
    intervention_names = design.names;
  }
  std::vector<ProblemVariable> vars;
  for (const auto& n : file.names) {
    VarKind k = VarKind::System;
    if (a.jci && n == "R") {
      k = VarKind::Regime;
    } else if (a.jci && (a.design.empty() ? is_intervention_name(n)
                                           : std::find(intervention_names.begin(), intervention_names.end(), n) !=
                                                 intervention_names.end())) {
      k = VarKind::Intervention;
    }
    vars.push_back({n, k});
  }
  int max_order = a.max_order;
  if (max_order < 0) max_order = std::max(0, static_cast<int>(vars.size()) - 2);

  std::vector<BackgroundFact> facts;
  if (!a.background.empty()) {
    auto bin = open_in(a.background);
    facts = read_background(bin, file.names);
  }
  const GroundedProblem problem = ground_rules(vars, {max_order, a.jci}, file.statements, facts);

  std::vector<std::pair<VarId, VarId>> pairs;
  if (a.score_pairs == "all") {
    for (VarId x = 0; x < problem.n_vars(); ++x) {
      for (VarId y = 0; y < problem.n_vars(); ++y) {
        if (x == y) continue;
        if (a.jci && (vars[x].kind != VarKind::System || vars[y].kind != VarKind::System)) continue;
        pairs.push_back({x, y});
      }
    }
  } else {
    auto pin = open_in(a.score_pairs);
    auto id_of = [&](const std::string& n) {
      for (std::size_t k = 0; k < file.names.size(); ++k) {
        if (file.names[k] == n) return static_cast<VarId>(k);
      }
      throw InputError("pair names unknown variable '" + n + "'");
    };
    std::string line;
    while (std::getline(pin, line)) {
      std::istringstream ls(line);
      std::string x;
      std::string y;
      if (!(ls >> x) || x[0] == '#') continue;
      if (!(ls >> y)) throw InputError("pair line needs two names: " + line);
      const VarId xi = id_of(x);
      const VarId yi = id_of(y);
      if (xi == yi) throw InputError("pair relates a variable to itself: " + line);
      pairs.push_back({xi, yi});
    }
  }

  const Solution best = minimize_loss(problem);
  std::cerr << problem.n_atoms() << " atoms, " << problem.clauses().size() << " clauses, optimal loss "
            << format_weight(best.loss) << '\n';
  const auto scores = score_predictions(problem, pairs);

  auto write = [&](std::ostream& out) {
    out << "X,Y,feature,confidence\n";
    for (const auto& s : scores) {
      out << file.names[s.x] << ',' << file.names[s.y] << ',' << (s.ancestral ? "ancestral" : "nonancestral") << ','
          << (std::isinf(s.confidence) ? (s.confidence > 0 ? "inf" : "-inf") : format_weight(s.confidence)) << '\n';
    }
  };
  if (a.out.empty() || a.out == "-") {
    write(std::cout);
  } else {
    auto out = open_out(a.out);
    write(out);
  }
}

struct EvalArgs {
  ExperimentConfig cfg;
  int latents = -1;
  std::string methods = "acid_jci,merged_aci";
  std::string out_dir = "eval_out";
};

void run_eval(EvalArgs a) {
  a.cfg.methods.clear();
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');) {
    if (!m.empty()) a.cfg.methods.push_back(parse_method(m));
  }
  if (a.latents >= 0) a.cfg.latents = a.latents;
  const ExperimentResult res = run_experiment(a.cfg, [](int done, int total) {
    std::cerr << "\rmodel " << done << '/' << total << std::flush;
    if (done == total) std::cerr << '\n';
  });
  std::vector<PrCurve> anc;
  std::vector<PrCurve> non;
  for (Method m : a.cfg.methods) {
    anc.push_back(pr_curve(res.records, m, FeatureClass::Ancestral));
    non.push_back(pr_curve(res.records, m, FeatureClass::NonAncestral));
  }
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  auto p = open_out(dir / "predictions.csv");
  write_predictions_csv(p, res.records);
  auto pa = open_out(dir / "pr_ancestral.csv");
  write_pr_csv(pa, anc);
  auto pn = open_out(dir / "pr_nonancestral.csv");
  write_pr_csv(pn, non);
  std::vector<PrCurve> all = anc;
  all.insert(all.end(), non.begin(), non.end());
  auto r = open_out(dir / "report.json");
  write_report_json(r, res, all);
  for (const auto& m : res.methods) {
    std::cerr << to_string(m.method) << ": " << m.models_ok << " models, " << m.models_failed << " failed, "
              << m.seconds << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint causal inference over pooled observational and interventional data"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a random JCI model and sample pooled data");
  s->add_option("--p", sim.p, "Observed system variables")->check(CLI::PositiveNumber);
  s->add_option("--i", sim.i, "Interventions")->check(CLI::NonNegativeNumber);
  s->add_option("--latents", sim.latents, "Latent confounders (default p/2)");
  s->add_option("--n", sim.n, "Total samples")->check(CLI::PositiveNumber);
  s->add_option("--seed", sim.seed, "Random seed");
  s->add_option("--out-dir", sim.out_dir, "Output directory");

  TestArgs tst;
  auto* t = app.add_subcommand("test", "Run partial-correlation tests and write weighted statements");
  t->add_option("--data", tst.data, "Pooled data CSV")->required();
  t->add_option("--max-order", tst.max_order, "Largest conditioning set (default: variables - 2)");
  t->add_option("--alpha", tst.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  t->add_option("--det-from-design", tst.design, "Design CSV; converts tests to sound d-statements");
  t->add_option("--out", tst.out, "Statement file (default stdout)");

  DiscoverArgs dis;
  auto* d = app.add_subcommand("discover", "Minimise the loss over ancestral structures and score features");
  d->add_option("--statements", dis.statements, "Statement file")->required();
  d->add_flag("--jci", dis.jci, "Treat R and the intervention variables as JCI dummies");
  d->add_option("--design", dis.design, "Design CSV naming the intervention variables");
  d->add_option("--background", dis.background, "Background knowledge file");
  d->add_option("--max-order", dis.max_order, "Largest grounded conditioning set (default: variables - 2)");
  d->add_option("--score-pairs", dis.score_pairs, "'all' or a file of 'X Y' lines");
  d->add_option("--out", dis.out, "Predictions CSV (default stdout)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Simulation study comparing ACID-JCI with Merged-ACI");
  e->add_option("--p", ev.cfg.p, "Observed system variables");
  e->add_option("--i", ev.cfg.i, "Interventions");
  e->add_option("--latents", ev.latents, "Latent confounders (default p/2)");
  e->add_option("--n-models", ev.cfg.n_models, "Random models");
  e->add_option("--n-samples", ev.cfg.n_samples, "Samples per model");
  e->add_option("--alpha", ev.cfg.alpha, "Significance level");
  e->add_option("--max-order", ev.cfg.max_order, "Largest conditioning set");
  e->add_option("--seed", ev.cfg.seed, "Experiment seed");
  e->add_option("--methods", ev.methods, "Comma separated: acid_jci,merged_aci");
  e->add_option("--out-dir", ev.out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) run_simulate(sim);
    if (t->parsed()) run_test(tst);
    if (d->parsed()) run_discover(dis);
    if (e->parsed()) run_eval(ev);
  } catch (const Infeasible& ex) {
    std::cerr << "infeasible: " << ex.what() << '\n';
    return 3;
  } catch (const Contradiction& ex) {
    std::cerr << "contradiction: " << ex.what() << '\n';
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
