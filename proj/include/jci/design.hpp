#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jci/graph.hpp"

namespace jci {

/// Maps each regime to the values of the intervention variables, together
/// with the regime probabilities.
struct ExperimentalDesign {
  std::vector<std::string> names;           // intervention column names
  std::vector<std::vector<double>> values;  // values[regime][column]
  std::vector<double> regime_probs;

  int n_regimes() const { return static_cast<int>(values.size()); }
  int n_interventions() const { return static_cast<int>(names.size()); }

  /// Probabilities proportional to per-regime sample counts.
  static ExperimentalDesign from_counts(std::vector<std::string> names,
                                        std::vector<std::vector<double>> values,
                                        const std::vector<int>& counts);
};

struct DesignIssue {
  enum class Kind {
    BadProbabilities,   // negative, or not summing to one
    ConstantColumn,     // determined by the empty set
    DeterminedColumn,   // determined by other intervention columns
    IndependentPair,    // two intervention columns independent given `given`
  };
  Kind kind;
  std::vector<int> columns;  // subject column(s)
  std::vector<int> given;    // determiners or conditioning columns
  std::string message;
};

struct DesignReport {
  /// Nonnegative and summing to one within 1e-12.
  bool probabilities_ok = true;
  /// Only regime -> intervention determinism (plus optionally all
  /// interventions -> regime) holds.
  bool restricted_determinism = true;
  /// Intervention columns are pairwise dependent given every subset of the rest.
  bool pairwise_dependent = true;
  /// The intervention columns jointly determine the regime.
  bool interventions_determine_regime = false;
  std::vector<DesignIssue> issues;

  bool valid() const { return probabilities_ok && restricted_determinism && pairwise_dependent; }
};

/// Throws InputError on an empty or ragged matrix.
DesignReport validate_design(const ExperimentalDesign& design);

struct NormalizedDesign {
  ExperimentalDesign design;
  /// mapping[k] lists the original columns merged into output column k.
  std::vector<std::vector<int>> mapping;
  std::vector<int> dropped;  // constant columns
};

/// Merges intervention columns that determine one another (or are determined
/// by a group of others) into single multi-valued columns and drops constants.
NormalizedDesign normalize_design(const ExperimentalDesign& design);

/// Deterministic relations implied by a design: regime -> each intervention,
/// plus interventions -> regime when the report says so.
DetRelationSet design_relations(const DesignReport& report, VarId regime,
                                const std::vector<VarId>& interventions);

/// CSV: header `R,<names...>,p`, one row per regime.
void write_design_csv(std::ostream& out, const ExperimentalDesign& design);
ExperimentalDesign read_design_csv(std::istream& in);

}  // namespace jci
