#pragma once

// Small models from the identifiability examples, with their oracle inputs.

#include <vector>

#include "jci/acid.hpp"
#include "jci/graph.hpp"
#include "jci/independence.hpp"

namespace jci::testing {

struct Example {
  CausalGraph graph;
  DetRelationSet det;
  std::vector<ProblemVariable> variables;  // observed variables in id order
  bool jci = true;
};

inline std::vector<ProblemVariable> observed_variables(const CausalGraph& g) {
  std::vector<ProblemVariable> out;
  g.observed().for_each([&](VarId v) { out.push_back({g.variable(v).name, g.variable(v).kind}); });
  return out;
}

inline Example finish(CausalGraph g, DetRelationSet d = {}) {
  Example e{std::move(g), std::move(d), {}, true};
  e.variables = observed_variables(e.graph);
  return e;
}

/// I1 -> X1 -> X2, with the single intervention standing in for the regime.
inline Example single_target_chain() {
  CausalGraph g;
  g.add_variable("I1", VarKind::Regime);
  g.add_variable("X1", VarKind::System);
  g.add_variable("X2", VarKind::System);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return finish(std::move(g));
}

/// I1 -> X1, I1 -> X3, X1 -> X2 -> X3.
inline Example two_target_graph() {
  CausalGraph g;
  g.add_variable("I1", VarKind::Regime);
  g.add_variable("X1", VarKind::System);
  g.add_variable("X2", VarKind::System);
  g.add_variable("X3", VarKind::System);
  g.add_edge(0, 1);
  g.add_edge(0, 3);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return finish(std::move(g));
}

/// R -> X1 -> X2 -> Y.
inline Example regime_chain() {
  CausalGraph g;
  g.add_variable("R", VarKind::Regime);
  g.add_variable("X1", VarKind::System);
  g.add_variable("X2", VarKind::System);
  g.add_variable("Y", VarKind::System);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return finish(std::move(g));
}

/// R -> I1 -> X2 -> Y, with I1 and R determining each other.
inline Example intervention_chain() {
  CausalGraph g(true);
  g.add_variable("R", VarKind::Regime);
  g.add_variable("I1", VarKind::Intervention);
  g.add_variable("X2", VarKind::System);
  g.add_variable("Y", VarKind::System);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return finish(std::move(g), DetRelationSet{{{0}, 1}, {{1}, 0}});
}

/// Independence facts by D-separation over all orders.
inline std::vector<WeightedStatement> oracle_tests(const Example& e) {
  std::vector<WeightedStatement> out;
  const VarSet scope = e.graph.observed();
  for (const auto& d : enumerate_d_statements(e.graph, e.det, scope, scope.size() - 2)) {
    out.push_back({d.separated() ? WeightedStatement::Kind::Independent : WeightedStatement::Kind::Dependent, d.x,
                   d.y, d.w, kInfiniteWeight, std::nullopt});
  }
  return out;
}

/// Sound solver inputs from the oracle facts.
inline std::vector<DStatement> oracle_inputs(const Example& e) {
  return statements_to_dstatements(oracle_tests(e), e.det).statements;
}

/// The facts read naively as separations, as ICP would use them.
inline std::vector<DStatement> naive_inputs(const Example& e) {
  std::vector<DStatement> out;
  for (const auto& s : oracle_tests(e)) {
    out.push_back({s.independent() ? DStatement::Kind::DSeparated : DStatement::Kind::DConnected, s.x, s.y, s.w,
                   s.weight});
  }
  return out;
}

inline GroundedProblem oracle_problem(const Example& e) {
  const int n = static_cast<int>(e.variables.size());
  return ground_rules(e.variables, {n - 2, e.jci}, oracle_inputs(e));
}

}  // namespace jci::testing
