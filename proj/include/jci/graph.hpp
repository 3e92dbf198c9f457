#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jci/statement.hpp"
#include "jci/varset.hpp"

namespace jci {

enum class VarKind { System, Regime, Intervention, Latent };

std::string_view to_string(VarKind k);
VarKind parse_var_kind(std::string_view s);

struct Variable {
  VarId id = 0;
  std::string name;
  VarKind kind = VarKind::System;
};

/// Directed acyclic graph over typed variables. Ids are dense: variable i has id i.
///
/// When constructed as a JCI graph, edges must respect the dummy-variable
/// structure: nothing points into the regime, the regime only points into
/// intervention variables, and intervention variables only have the regime as
/// a parent.
class CausalGraph {
 public:
  CausalGraph() = default;
  explicit CausalGraph(bool jci) : jci_(jci) {}
  CausalGraph(std::vector<Variable> variables, bool jci);

  VarId add_variable(std::string name, VarKind kind);
  /// Throws InputError on unknown ids, self loops, cycles and JCI violations.
  void add_edge(VarId parent, VarId child);
  bool has_edge(VarId parent, VarId child) const;

  int size() const { return static_cast<int>(variables_.size()); }
  bool is_jci() const { return jci_; }
  const Variable& variable(VarId v) const;
  const std::vector<Variable>& variables() const { return variables_; }
  std::vector<std::string> names() const;
  std::optional<VarId> find(std::string_view name) const;

  VarSet all() const { return VarSet::first(size()); }
  VarSet of_kind(VarKind k) const;
  /// Every variable that is not Latent.
  VarSet observed() const;
  std::optional<VarId> regime() const;

  VarSet parents(VarId v) const { return parents_.at(v); }
  VarSet children(VarId v) const { return children_.at(v); }
  std::vector<std::pair<VarId, VarId>> edges() const;
  std::vector<VarId> topological_order() const;

  /// Throws InputError when `s` names an id outside the graph.
  void check_ids(VarSet s) const;

 private:
  void check_jci_edge(VarId parent, VarId child) const;

  std::vector<Variable> variables_;
  std::vector<VarSet> parents_;
  std::vector<VarSet> children_;
  bool jci_ = false;
};

/// One deterministic relation: `determined` is a function of `determiners`.
struct DetRelation {
  VarSet determiners;
  VarId determined = 0;

  auto operator<=>(const DetRelation&) const = default;
};

/// The complete set of deterministic relations. Entries must be minimal: no
/// two entries share a determined variable with one determiner set a strict
/// subset of the other. Violations are rejected.
class DetRelationSet {
 public:
  DetRelationSet() = default;
  DetRelationSet(std::initializer_list<DetRelation> rels);
  explicit DetRelationSet(const std::vector<DetRelation>& rels);

  void add(DetRelation r);
  bool remove(const DetRelation& r);
  const std::vector<DetRelation>& relations() const { return relations_; }
  bool empty() const { return relations_.empty(); }

 private:
  std::vector<DetRelation> relations_;
};

/// Acyclic directed mixed graph over the non-latent variables of a graph.
struct Admg {
  std::vector<VarId> nodes;
  std::set<std::pair<VarId, VarId>> directed;    // (from, to)
  std::set<std::pair<VarId, VarId>> bidirected;  // (a, b) with a < b

  bool operator==(const Admg&) const = default;
};

/// All variables with a directed path into `targets`, targets included.
VarSet ancestors(const CausalGraph& g, VarSet targets);

/// Generalised separation by reachability over trails. A trail is active when
/// every collider is in `collider_ok` and every non-collider, end nodes
/// included, is outside `blocked`.
bool is_separated_by_reachability(const CausalGraph& g, VarSet x, VarSet y, VarSet blocked,
                                  VarSet collider_ok);

/// d-separation of X and Y given W.
bool is_d_separated(const CausalGraph& g, VarSet x, VarSet y, VarSet w);

/// Least fixpoint of W under the deterministic relations.
VarSet det_closure(const DetRelationSet& d, VarSet w);

/// D-separation: d-separation with non-colliders blocked by det_closure(D, W).
bool is_D_separated(const CausalGraph& g, const DetRelationSet& d, VarSet x, VarSet y, VarSet w);

/// `noiseless` marks variables whose structural equation has no exogenous term.
bool functionally_determined(const CausalGraph& g, VarId x, VarSet w, VarSet noiseless);

Admg latent_project(const CausalGraph& g);

/// Every D-separation / D-connection between pairs of `scope` given subsets of
/// the remaining scope with at most `max_order` elements, weighted as oracle
/// (infinite) statements.
std::vector<DStatement> enumerate_d_statements(const CausalGraph& g, const DetRelationSet& d,
                                               VarSet scope, int max_order);

}  // namespace jci
