#include <map>

#include "jci/acid.hpp"
#include "jci/errors.hpp"

namespace jci {

namespace {

/// Polarity lookup; a key listed with both polarities answers for both.
class StatementIndex {
 public:
  explicit StatementIndex(const std::vector<DStatement>& dstmts) {
    for (const auto& s : dstmts) (s.separated() ? sep_ : con_)[key_of(s)] = true;
  }
  bool separated(VarId x, VarId y, VarSet w) const { return sep_.count(make_key(x, y, w)) > 0; }
  bool connected(VarId x, VarId y, VarSet w) const { return con_.count(make_key(x, y, w)) > 0; }

 private:
  std::map<StatementKey, bool> sep_;
  std::map<StatementKey, bool> con_;
};

}  // namespace

std::vector<std::pair<VarId, VarId>> lcd_scan(const std::vector<DStatement>& dstmts, VarId regime, VarSet scope) {
  const StatementIndex idx(dstmts);
  std::vector<std::pair<VarId, VarId>> out;
  const VarSet vars = scope - VarSet::single(regime);
  vars.for_each([&](VarId x) {
    if (!idx.connected(regime, x, {})) return;
    vars.for_each([&](VarId y) {
      if (x != y && idx.connected(x, y, {}) && idx.separated(regime, y, VarSet::single(x))) out.emplace_back(x, y);
    });
  });
  return out;
}

std::optional<VarSet> icp_intersection(const std::vector<DStatement>& dstmts, VarId regime, VarId target,
                                       VarSet scope) {
  if (target == regime) throw InputError("ICP target must differ from the regime");
  const VarSet allowed = scope - VarSet{regime, target};
  std::optional<VarSet> meet;
  for (const auto& s : dstmts) {
    if (!s.separated() || key_of(s) != make_key(regime, target, s.w) || !s.w.subset_of(allowed)) continue;
    meet = meet ? (*meet & s.w) : s.w;
  }
  return meet;
}

Admg refine_to_admg(const AncestralStructure& structure, const std::vector<DStatement>& dstmts,
                    const std::vector<ProblemVariable>& variables, bool jci) {
  const int n = static_cast<int>(variables.size());
  if (structure.size() != n) throw InputError("structure and variable list differ in size");
  std::vector<VarSet> separable(n);
  for (const auto& s : dstmts) {
    if (s.x >= n || s.y >= n) throw InputError("statement names an unknown variable");
    if (s.separated()) {
      separable[s.x].insert(s.y);
      separable[s.y].insert(s.x);
    }
  }
  auto is_dummy = [&](VarId v) {
    return variables[v].kind == VarKind::Regime || variables[v].kind == VarKind::Intervention;
  };
  bool has_interventions = false;
  for (const auto& v : variables) has_interventions |= v.kind == VarKind::Intervention;

  Admg out;
  for (VarId v = 0; v < n; ++v) out.nodes.push_back(v);
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = x + 1; y < n; ++y) {
      if (separable[x].contains(y)) continue;
      if (jci && has_interventions) {
        const bool rx = variables[x].kind == VarKind::Regime;
        const bool ry = variables[y].kind == VarKind::Regime;
        if ((rx && variables[y].kind != VarKind::Intervention) || (ry && variables[x].kind != VarKind::Intervention)) {
          continue;
        }
      }
      const bool xy = structure.causes(x, y);
      const bool yx = structure.causes(y, x);
      if (xy && yx) {
        throw RefinementError(variables[x].name + " and " + variables[y].name + " cause each other");
      }
      if (xy) {
        out.directed.emplace(x, y);
      } else if (yx) {
        out.directed.emplace(y, x);
      } else if (!(jci && (is_dummy(x) || is_dummy(y)))) {
        out.bidirected.emplace(x, y);
      }
    }
  }
  return out;
}

}  // namespace jci
