#include "jci/eval.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "jci/design.hpp"
#include "jci/errors.hpp"

namespace jci {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<ProblemVariable> problem_variables(const PooledDataset& d) {
  std::vector<ProblemVariable> out;
  for (int c = 0; c < d.cols(); ++c) out.push_back({d.names[c], d.kinds[c]});
  return out;
}

std::string_view feature_name(FeatureClass c) {
  return c == FeatureClass::Ancestral ? "ancestral" : "nonancestral";
}

}  // namespace

std::string_view to_string(Method m) {
  return m == Method::AcidJci ? "acid_jci" : "merged_aci";
}

Method parse_method(std::string_view s) {
  if (s == "acid_jci") return Method::AcidJci;
  if (s == "merged_aci") return Method::MergedAci;
  throw InputError("unknown method '" + std::string(s) + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.p < 2) throw InputError("p must be at least 2");
  if (c.i < 0) throw InputError("i must be nonnegative");
  if (c.n_models <= 0 || c.n_samples <= 0) throw InputError("model and sample counts must be positive");
  if (!(c.alpha > 0 && c.alpha < 1)) throw InputError("alpha must lie in (0, 1)");
  if (c.max_order < 0) throw InputError("max_order must be nonnegative");
  if (c.methods.empty()) throw InputError("no methods selected");
  if (c.latents && *c.latents < 0) throw InputError("latent count must be nonnegative");
}

std::uint64_t model_seed(std::uint64_t seed, int index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(index));
}

std::vector<ScoredPrediction> merged_aci_baseline(const PooledDataset& data, int max_order,
                                                  const TestOptions& opts,
                                                  const std::vector<std::pair<VarId, VarId>>& pairs,
                                                  BaselineInfo* info) {
  BaselineInfo local;
  std::vector<double> sum(pairs.size(), 0.0);
  for (int r = 0; r < data.n_regimes; ++r) {
    const PooledDataset sub = data.filter_regime(r, true);
    // Even an unconditional test needs four rows.
    if (sub.rows() < 4) {
      ++local.regimes_skipped;
      continue;
    }
    const auto tests = run_all_tests(sub, VarSet::first(sub.cols()), max_order, opts);
    std::vector<DStatement> inputs;
    for (const auto& s : tests.statements) {
      inputs.push_back({s.independent() ? DStatement::Kind::DSeparated : DStatement::Kind::DConnected, s.x, s.y, s.w,
                        s.weight});
    }
    const auto problem = ground_rules(problem_variables(sub), {max_order, false}, inputs);
    const auto scores = score_predictions(problem, pairs);
    for (std::size_t k = 0; k < pairs.size(); ++k) sum[k] += scores[2 * k].confidence;
    ++local.regimes_used;
  }
  if (info) *info = local;
  if (local.regimes_used == 0) throw DegenerateInput("no regime has enough samples to test");
  std::vector<ScoredPrediction> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double c = sum[k] / local.regimes_used;
    out.push_back({pairs[k].first, pairs[k].second, true, c});
    out.push_back({pairs[k].first, pairs[k].second, false, c == 0 ? 0.0 : -c});
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Progress& progress) {
  validate(cfg);
  const auto t_start = Clock::now();
  ExperimentResult res;
  res.config = cfg;
  for (Method m : cfg.methods) res.methods.push_back({m, 0, 0, 0.0});
  const TestOptions opts{cfg.alpha, kDefaultMaxWeight};

  for (int index = 0; index < cfg.n_models; ++index) {
    const std::uint64_t seed = model_seed(cfg.seed, index);
    const JciScm model = random_jci_model(cfg.p, cfg.i, cfg.latents, seed, cfg.generator);
    const PooledDataset data = sample(model, cfg.n_samples, {}, splitmix64(seed));

    // Ordered pairs of observed system variables, as graph ids and as
    // positions among the system columns.
    const std::vector<VarId> sys = model.system().to_vector();
    std::vector<std::pair<VarId, VarId>> pairs;
    std::vector<std::pair<VarId, VarId>> local_pairs;
    for (std::size_t a = 0; a < sys.size(); ++a) {
      for (std::size_t b = 0; b < sys.size(); ++b) {
        if (a == b) continue;
        pairs.push_back({sys[a], sys[b]});
        local_pairs.push_back({static_cast<VarId>(a), static_cast<VarId>(b)});
      }
    }
    std::vector<bool> truth;
    for (const auto& [x, y] : pairs) truth.push_back(ancestors(model.graph, VarSet::single(y)).contains(x));

    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const Method method = cfg.methods[mi];
      const auto t0 = Clock::now();
      std::vector<ScoredPrediction> scores;
      try {
        if (method == Method::AcidJci) {
          const auto tests = run_all_tests(data, VarSet::first(data.cols()), cfg.max_order, opts);
          res.skipped_tests += static_cast<long long>(tests.skipped.size());
          const auto conv = statements_to_dstatements(tests.statements, model.det_relations());
          res.dropped_statements += conv.dropped;
          const auto problem = ground_rules(problem_variables(data), {cfg.max_order, true}, conv.statements);
          scores = score_predictions(problem, pairs);
        } else {
          BaselineInfo info;
          scores = merged_aci_baseline(data, cfg.max_order, opts, local_pairs, &info);
          res.baseline_regimes_skipped += info.regimes_skipped;
        }
      } catch (const std::exception& e) {
        res.failures.push_back({index, method, e.what()});
        ++res.methods[mi].models_failed;
        res.methods[mi].seconds += seconds_since(t0);
        continue;
      }
      res.methods[mi].seconds += seconds_since(t0);
      ++res.methods[mi].models_ok;
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        for (int f = 0; f < 2; ++f) {
          const ScoredPrediction& s = scores[2 * k + f];
          res.records.push_back({index, method, data.names[pairs[k].first], data.names[pairs[k].second],
                                 s.ancestral, s.confidence, s.ancestral == truth[k]});
        }
      }
    }
    if (progress) progress(index + 1, cfg.n_models);
  }
  res.seconds = seconds_since(t_start);
  return res;
}

PrCurve pr_curve(const std::vector<PredictionRecord>& records, Method method, FeatureClass cls) {
  PrCurve c;
  c.feature_class = cls;
  c.method = method;
  const bool want = cls == FeatureClass::Ancestral;
  std::vector<std::pair<double, bool>> items;
  for (const auto& r : records) {
    if (r.method != method || r.ancestral != want) continue;
    items.push_back({r.confidence, r.truth});
    c.positives += r.truth;
  }
  c.total = static_cast<int>(items.size());
  if (c.positives == 0) {
    c.recall_undefined = true;
    return c;
  }
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  int tp = 0;
  int fp = 0;
  for (std::size_t k = 0; k < items.size(); ++k) {
    (items[k].second ? tp : fp) += 1;
    if (k + 1 < items.size() && items[k + 1].first == items[k].first) continue;
    c.points.push_back({static_cast<double>(tp) / c.positives, static_cast<double>(tp) / (tp + fp), items[k].first});
  }
  return c;
}

std::optional<double> interpolated_precision(const PrCurve& c, double r) {
  std::optional<double> best;
  for (const auto& p : c.points) {
    if (p.recall >= r - 1e-12) best = std::max(best.value_or(0.0), p.precision);
  }
  return best;
}

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRecord>& records) {
  out << "model,method,X,Y,feature,confidence,truth\n";
  for (const auto& r : records) {
    out << r.model << ',' << to_string(r.method) << ',' << r.x << ',' << r.y << ','
        << (r.ancestral ? "ancestral" : "nonancestral") << ',' << fmt(r.confidence) << ',' << (r.truth ? 1 : 0)
        << '\n';
  }
}

void write_pr_csv(std::ostream& out, const std::vector<PrCurve>& curves) {
  out << "method,feature,recall,precision,threshold\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << to_string(c.method) << ',' << feature_name(c.feature_class) << ',' << fmt(p.recall) << ','
          << fmt(p.precision) << ',' << fmt(p.threshold) << '\n';
    }
  }
}

void write_report_json(std::ostream& out, const ExperimentResult& res, const std::vector<PrCurve>& curves) {
  using nlohmann::json;
  const auto& c = res.config;
  json j;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["config"] = {{"p", c.p},
                 {"i", c.i},
                 {"n_models", c.n_models},
                 {"n_samples", c.n_samples},
                 {"alpha", c.alpha},
                 {"max_order", c.max_order},
                 {"seed", c.seed},
                 {"latents", c.latents ? json(*c.latents) : json(nullptr)},
                 {"methods", methods}};
  json summaries = json::array();
  for (const auto& m : res.methods) {
    summaries.push_back({{"method", std::string(to_string(m.method))},
                         {"models_ok", m.models_ok},
                         {"models_failed", m.models_failed},
                         {"seconds", m.seconds}});
  }
  j["methods"] = summaries;
  json failures = json::array();
  for (const auto& f : res.failures) {
    failures.push_back({{"model", f.model}, {"method", std::string(to_string(f.method))}, {"reason", f.reason}});
  }
  j["failures"] = failures;
  j["skipped_tests"] = res.skipped_tests;
  j["dropped_statements"] = res.dropped_statements;
  j["baseline_regimes_skipped"] = res.baseline_regimes_skipped;
  json jc = json::array();
  for (const auto& pc : curves) {
    jc.push_back({{"method", std::string(to_string(pc.method))},
                  {"feature", std::string(feature_name(pc.feature_class))},
                  {"positives", pc.positives},
                  {"records", pc.total},
                  {"points", pc.points.size()},
                  {"recall_undefined", pc.recall_undefined}});
  }
  j["curves"] = jc;
  j["seconds"] = res.seconds;
  out << j.dump(2) << '\n';
}

}  // namespace jci
