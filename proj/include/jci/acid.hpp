#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jci/graph.hpp"
#include "jci/statement.hpp"

namespace jci {

/// Reflexive, transitive, antisymmetric ancestry relation over variables 0..n-1.
class AncestralStructure {
 public:
  AncestralStructure() = default;
  explicit AncestralStructure(int n);

  int size() const { return static_cast<int>(rows_.size()); }
  bool causes(VarId x, VarId y) const { return x == y || rows_.at(x).contains(y); }
  void set(VarId x, VarId y, bool v);
  /// Strict descendants of x.
  VarSet effects(VarId x) const { return rows_.at(x); }
  /// Checks transitivity and antisymmetry.
  bool valid() const;

  bool operator==(const AncestralStructure&) const = default;

 private:
  std::vector<VarSet> rows_;
};

/// Ancestral relation of a graph restricted to the variables in `scope`,
/// reindexed so that scope's k-th smallest id becomes k.
AncestralStructure ancestral_structure(const CausalGraph& g, VarSet scope);

// ---------------------------------------------------------------------------
// Background knowledge file: one hard fact per line.
//
//   cause X Y          X is an ancestor of Y
//   noncause X Y       X is not an ancestor of Y
//   oneof X: Y1 Y2 ... X is an ancestor of exactly one of the Y's
//
// Blank lines and lines starting with '#' are ignored.
// ---------------------------------------------------------------------------

struct BackgroundFact {
  enum class Kind { Cause, NonCause, OneOf };
  Kind kind = Kind::Cause;
  VarId x = 0;
  std::vector<VarId> ys;
  std::string text;
};

std::vector<BackgroundFact> read_background(std::istream& in, const std::vector<std::string>& names);

// ---------------------------------------------------------------------------
// Grounding
// ---------------------------------------------------------------------------

/// Literal over problem atoms: 2 * atom for "true", 2 * atom + 1 for "false".
using Lit = int;
inline Lit pos(int atom) { return 2 * atom; }
inline Lit neg(int atom) { return 2 * atom + 1; }

enum class ClauseOrigin {
  Transitivity,
  Antisymmetry,
  Rule1,
  Rule2,
  Rule3,
  Rule4,
  Rule5,
  Jci1,
  Jci2,
  Jci3,
  Jci4,
  Jci5,
  Jci6,
  Jci7,
  Jci8,
  DistinctInterventions,  // no intervention variable causes another
  Background,
  HardInput,  // input statement with infinite weight
};

std::string_view to_string(ClauseOrigin o);

struct ProblemVariable {
  std::string name;
  VarKind kind = VarKind::System;
};

struct GroundingOptions {
  int max_order = 0;
  bool jci = false;
};

/// Ancestry atoms a(X,Y) for ordered distinct pairs and separation atoms
/// s(X,Y|W) for X < Y, grounded together with every rule instance whose
/// atoms exist. Soft inputs become per-atom costs.
class GroundedProblem {
 public:
  struct Clause {
    std::vector<Lit> lits;
    ClauseOrigin origin;
    int source = -1;  // background fact or input index
  };

  int n_vars() const { return static_cast<int>(vars_.size()); }
  const std::vector<ProblemVariable>& variables() const { return vars_; }
  std::vector<std::string> names() const;
  bool jci() const { return jci_; }
  int max_order() const { return max_order_; }

  int n_atoms() const { return static_cast<int>(atom_keys_.size()); }
  /// Atom for x causes y; requires x != y.
  int ancestry_atom(VarId x, VarId y) const;
  /// Atom for x and y d-separated given w, if grounded.
  std::optional<int> separation_atom(VarId x, VarId y, VarSet w) const;
  bool is_ancestry(int atom) const { return atom < n_vars() * (n_vars() - 1); }
  /// Key of a separation atom.
  StatementKey key(int atom) const { return atom_keys_.at(atom); }

  const std::vector<Clause>& clauses() const { return clauses_; }
  /// Penalty paid when the atom is true / false.
  double cost_if_true(int atom) const { return cost_true_[atom]; }
  double cost_if_false(int atom) const { return cost_false_[atom]; }
  const std::vector<DStatement>& inputs() const { return inputs_; }
  const std::vector<BackgroundFact>& background() const { return background_; }

  std::string describe(Lit l) const;
  std::string describe(const Clause& c) const;

 private:
  friend GroundedProblem ground_rules(const std::vector<ProblemVariable>&, const GroundingOptions&,
                                      const std::vector<DStatement>&, const std::vector<BackgroundFact>&);

  int add_separation_atom(StatementKey k);
  void add_clause(std::vector<Lit> lits, ClauseOrigin origin, int source = -1);

  std::vector<ProblemVariable> vars_;
  bool jci_ = false;
  int max_order_ = 0;
  std::vector<StatementKey> atom_keys_;  // ancestry atoms first (placeholder keys)
  std::vector<std::unordered_map<std::uint64_t, int>> sep_index_;  // per pair
  std::vector<Clause> clauses_;
  std::vector<double> cost_true_;
  std::vector<double> cost_false_;
  std::vector<DStatement> inputs_;
  std::vector<BackgroundFact> background_;
};

/// Throws InputError on inputs naming unknown variables, JCI without a
/// regime, or a negative max_order. Without intervention variables the
/// regime plays the role of the single intervention.
GroundedProblem ground_rules(const std::vector<ProblemVariable>& variables, const GroundingOptions& opts,
                             const std::vector<DStatement>& inputs,
                             const std::vector<BackgroundFact>& background = {});

// ---------------------------------------------------------------------------
// Optimisation
// ---------------------------------------------------------------------------

struct SolveOptions {
  /// Count optimal ancestral structures instead of stopping at the first optimum.
  bool count_optima = false;
  /// Tighten pruning with disjoint conflicts found by unit propagation.
  bool conflict_bound = true;
};

struct Solution {
  AncestralStructure structure;
  std::vector<bool> assignment;  // per atom
  double loss = 0.0;
  /// Distinct optimal ancestral structures (count mode only; 1 otherwise).
  std::int64_t optimum_count = 1;
  std::int64_t nodes = 0;
};

/// Exact branch and bound. `assumptions` are extra hard literals. Among equal
/// optima the first one in the deterministic search order is reported.
/// Throws Infeasible when the hard clauses cannot be satisfied.
Solution minimize_loss(const GroundedProblem& problem, std::span<const Lit> assumptions = {},
                       const SolveOptions& opts = {});

/// Sum of the weights of inputs violated by an assignment.
double loss_of(const GroundedProblem& problem, const std::vector<bool>& assignment);

struct ScoredPrediction {
  VarId x = 0;
  VarId y = 0;
  bool ancestral = true;  // X causes Y, or X does not cause Y
  double confidence = 0.0;
};

/// For each ordered pair, confidence(X causes Y) = loss(not f) - loss(f) and
/// the opposite feature with negated confidence. Throws Contradiction when
/// both sides are infeasible.
std::vector<ScoredPrediction> score_predictions(const GroundedProblem& problem,
                                                const std::vector<std::pair<VarId, VarId>>& pairs,
                                                const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// Special cases and refinement
// ---------------------------------------------------------------------------

/// Pairs (X, Y) with R dependent on X, X dependent on Y and R separated from
/// Y given {X}. Missing statements give no finding.
std::vector<std::pair<VarId, VarId>> lcd_scan(const std::vector<DStatement>& dstmts, VarId regime,
                                              VarSet scope);

/// Intersection of the sets S in scope separating the regime from the target.
/// std::nullopt when no separating set is listed.
std::optional<VarSet> icp_intersection(const std::vector<DStatement>& dstmts, VarId regime, VarId target,
                                       VarSet scope);

/// Mixed graph from an optimal structure and oracle statements. Pairs are
/// adjacent unless some statement separates them; adjacent pairs get a
/// directed edge along the ancestry or a bidirected edge when neither causes
/// the other. With `jci`, bidirected edges touching a dummy are removed and,
/// when intervention variables exist, the regime is adjacent only to them.
Admg refine_to_admg(const AncestralStructure& structure, const std::vector<DStatement>& dstmts,
                    const std::vector<ProblemVariable>& variables, bool jci);

}  // namespace jci
