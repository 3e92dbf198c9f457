#pragma once

// Ground-truth atom values of a grounded problem for a known graph.

#include <vector>

#include "jci/acid.hpp"
#include "jci/graph.hpp"

namespace jci::testing {

/// Problem variable k is graph variable k; latents (if any) come after.
inline std::vector<bool> true_assignment(const GroundedProblem& p, const CausalGraph& g) {
  const int n = p.n_vars();
  std::vector<bool> out(p.n_atoms());
  for (VarId y = 0; y < n; ++y) {
    const VarSet anc = ancestors(g, VarSet::single(y));
    for (VarId x = 0; x < n; ++x) {
      if (x != y) out[p.ancestry_atom(x, y)] = anc.contains(x);
    }
  }
  for (int atom = n * (n - 1); atom < p.n_atoms(); ++atom) {
    const StatementKey k = p.key(atom);
    out[atom] = is_d_separated(g, VarSet::single(k.x), VarSet::single(k.y), k.w);
  }
  return out;
}

inline bool satisfied(const GroundedProblem::Clause& c, const std::vector<bool>& a) {
  for (Lit l : c.lits) {
    if (a[l >> 1] == !(l & 1)) return true;
  }
  return false;
}

}  // namespace jci::testing
