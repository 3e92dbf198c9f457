#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jci/acid.hpp"
#include "jci/dataset.hpp"
#include "jci/independence.hpp"
#include "jci/scm.hpp"

namespace jci {

enum class Method { AcidJci, MergedAci };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct ExperimentConfig {
  int p = 4;  // observed system variables
  int i = 3;  // interventions
  int n_models = 100;
  int n_samples = 500;
  double alpha = 0.05;
  int max_order = 2;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::AcidJci, Method::MergedAci};
  /// std::nullopt gives floor(p / 2) latent confounders.
  std::optional<int> latents;
  GeneratorConfig generator;
};

/// Throws InputError on nonpositive counts, alpha outside (0, 1), a negative
/// max_order or an empty method list.
void validate(const ExperimentConfig& cfg);

/// Seed of model `index` derived from the experiment seed.
std::uint64_t model_seed(std::uint64_t seed, int index);

/// One scored feature for an ordered pair of system variables.
struct PredictionRecord {
  int model = 0;
  Method method = Method::AcidJci;
  std::string x;
  std::string y;
  bool ancestral = true;  // feature "x causes y" or "x does not cause y"
  double confidence = 0.0;
  bool truth = false;     // whether the feature holds in the true graph
};

struct MethodFailure {
  int model = 0;
  Method method = Method::AcidJci;
  std::string reason;
};

struct MethodSummary {
  Method method = Method::AcidJci;
  int models_ok = 0;
  int models_failed = 0;
  double seconds = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<PredictionRecord> records;  // ordered by model, method, pair
  std::vector<MethodFailure> failures;
  std::vector<MethodSummary> methods;
  long long skipped_tests = 0;   // degenerate tests over all models
  long long dropped_statements = 0;  // independences lost to determinism
  long long baseline_regimes_skipped = 0;  // regimes too small to test
  double seconds = 0.0;
};

using Progress = std::function<void(int done, int total)>;

/// Simulates, tests and scores every model of the experiment.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Progress& progress = {});

struct BaselineInfo {
  int regimes_used = 0;
  int regimes_skipped = 0;
};

/// Per-regime discovery on the system variables alone, confidences averaged
/// over the regimes that could be tested. Pairs are positions among the
/// system columns of `data`.
std::vector<ScoredPrediction> merged_aci_baseline(const PooledDataset& data, int max_order,
                                                  const TestOptions& opts,
                                                  const std::vector<std::pair<VarId, VarId>>& pairs,
                                                  BaselineInfo* info = nullptr);

enum class FeatureClass { Ancestral, NonAncestral };

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double threshold = 0.0;
};

struct PrCurve {
  FeatureClass feature_class = FeatureClass::Ancestral;
  Method method = Method::AcidJci;
  std::vector<PrPoint> points;  // thresholds in decreasing order
  int positives = 0;
  int total = 0;
  /// No positive instance: recall is undefined and the curve is empty.
  bool recall_undefined = false;
};

/// Sweeps the threshold over the distinct confidences of the class; all
/// records at or above the threshold are predictions.
PrCurve pr_curve(const std::vector<PredictionRecord>& records, Method method, FeatureClass cls);

/// Highest precision at recall >= r, or std::nullopt beyond the curve.
std::optional<double> interpolated_precision(const PrCurve& c, double r);

void write_predictions_csv(std::ostream& out, const std::vector<PredictionRecord>& records);
void write_pr_csv(std::ostream& out, const std::vector<PrCurve>& curves);
void write_report_json(std::ostream& out, const ExperimentResult& result, const std::vector<PrCurve>& curves);

}  // namespace jci
