#pragma once

#include <algorithm>
#include <random>
#include <string>

#include "jci/graph.hpp"

namespace jci::testing {

/// Random DAG on n system variables: each forward pair in a random order gets
/// an edge with probability `density`.
inline CausalGraph random_dag(std::mt19937_64& rng, int n, double density) {
  CausalGraph g;
  for (int i = 0; i < n; ++i) g.add_variable("V" + std::to_string(i), VarKind::System);
  std::vector<VarId> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution edge(density);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) g.add_edge(order[i], order[j]);
    }
  }
  return g;
}

/// Random JCI graph: regime R, `m` intervention variables each pointing to at
/// least one random system variable, and a random DAG over `p` system variables
/// of which `latents` are marked latent.
inline CausalGraph random_jci_graph(std::mt19937_64& rng, int m, int p, int latents,
                                    double density) {
  CausalGraph g(true);
  const VarId r = g.add_variable("R", VarKind::Regime);
  std::vector<VarId> ivars;
  for (int i = 0; i < m; ++i) ivars.push_back(g.add_variable("I" + std::to_string(i + 1), VarKind::Intervention));
  std::vector<VarId> sys;
  for (int j = 0; j < p; ++j) {
    const bool latent = j >= p - latents;
    sys.push_back(g.add_variable((latent ? "L" : "X") + std::to_string(j + 1),
                                 latent ? VarKind::Latent : VarKind::System));
  }
  for (VarId i : ivars) g.add_edge(r, i);
  std::vector<VarId> order = sys;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution edge(density);
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (edge(rng)) g.add_edge(order[a], order[b]);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, sys.size() - 1);
  for (VarId i : ivars) {
    g.add_edge(i, sys[pick(rng)]);
    if (edge(rng)) {
      const VarId t = sys[pick(rng)];
      if (!g.has_edge(i, t)) g.add_edge(i, t);
    }
  }
  return g;
}

// Regime-only graph: R points straight into system variables; latent
// confounders act on system variables only.
inline CausalGraph random_regime_graph(std::mt19937_64& rng, int p, int latents, double density) {
  CausalGraph g;
  g.add_variable("R", VarKind::Regime);
  for (int j = 0; j < p; ++j) g.add_variable("X" + std::to_string(j + 1), VarKind::System);
  for (int l = 0; l < latents; ++l) g.add_variable("L" + std::to_string(l + 1), VarKind::Latent);
  std::vector<VarId> order;
  for (int j = 1; j <= p; ++j) order.push_back(j);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution edge(density);
  for (int a = 0; a < p; ++a) {
    for (int b = a + 1; b < p; ++b) {
      if (edge(rng)) g.add_edge(order[a], order[b]);
    }
  }
  std::uniform_int_distribution<int> pick(1, p);
  g.add_edge(0, pick(rng));
  for (int j = 1; j <= p; ++j) {
    if (!g.has_edge(0, j) && edge(rng)) g.add_edge(0, j);
  }
  for (int l = 0; l < latents; ++l) {
    const VarId a = pick(rng);
    VarId b = pick(rng);
    while (b == a) b = pick(rng);
    g.add_edge(1 + p + l, a);
    g.add_edge(1 + p + l, b);
  }
  return g;
}

inline VarSet random_subset(std::mt19937_64& rng, VarSet base, double prob) {
  std::bernoulli_distribution take(prob);
  VarSet s;
  base.for_each([&](VarId v) {
    if (take(rng)) s.insert(v);
  });
  return s;
}

}  // namespace jci::testing
