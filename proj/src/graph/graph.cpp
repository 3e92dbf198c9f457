#include "jci/graph.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "jci/errors.hpp"

namespace jci {

std::string_view to_string(VarKind k) {
  switch (k) {
    case VarKind::System: return "system";
    case VarKind::Regime: return "regime";
    case VarKind::Intervention: return "intervention";
    case VarKind::Latent: return "latent";
  }
  return "system";
}

VarKind parse_var_kind(std::string_view s) {
  if (s == "system") return VarKind::System;
  if (s == "regime") return VarKind::Regime;
  if (s == "intervention") return VarKind::Intervention;
  if (s == "latent") return VarKind::Latent;
  throw InputError("unknown variable kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// CausalGraph

CausalGraph::CausalGraph(std::vector<Variable> variables, bool jci) : jci_(jci) {
  std::sort(variables.begin(), variables.end(),
            [](const Variable& a, const Variable& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].id != static_cast<VarId>(i)) {
      throw InputError("variable ids must be unique and dense from 0; got id " +
                       std::to_string(variables[i].id));
    }
  }
  for (auto& v : variables) add_variable(std::move(v.name), v.kind);
}

VarId CausalGraph::add_variable(std::string name, VarKind kind) {
  if (size() >= kMaxVariables) throw InputError("too many variables");
  if (kind == VarKind::Regime && regime()) throw InputError("at most one regime variable");
  if (find(name)) throw InputError("duplicate variable name '" + name + "'");
  const VarId id = size();
  variables_.push_back({id, std::move(name), kind});
  parents_.emplace_back();
  children_.emplace_back();
  return id;
}

const Variable& CausalGraph::variable(VarId v) const {
  if (v < 0 || v >= size()) throw InputError("unknown variable id " + std::to_string(v));
  return variables_[v];
}

std::vector<std::string> CausalGraph::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::optional<VarId> CausalGraph::find(std::string_view name) const {
  for (const auto& v : variables_) {
    if (v.name == name) return v.id;
  }
  return std::nullopt;
}

VarSet CausalGraph::of_kind(VarKind k) const {
  VarSet s;
  for (const auto& v : variables_) {
    if (v.kind == k) s.insert(v.id);
  }
  return s;
}

VarSet CausalGraph::observed() const { return all() - of_kind(VarKind::Latent); }

std::optional<VarId> CausalGraph::regime() const {
  for (const auto& v : variables_) {
    if (v.kind == VarKind::Regime) return v.id;
  }
  return std::nullopt;
}

void CausalGraph::check_ids(VarSet s) const {
  if (!s.subset_of(all())) {
    throw InputError("unknown variable id " + std::to_string((s - all()).min()));
  }
}

void CausalGraph::check_jci_edge(VarId parent, VarId child) const {
  const VarKind pk = variables_[parent].kind;
  const VarKind ck = variables_[child].kind;
  if (ck == VarKind::Regime) throw InputError("JCI graph: no edge may point into the regime");
  if (pk == VarKind::Regime && ck != VarKind::Intervention) {
    throw InputError("JCI graph: the regime may only point into intervention variables");
  }
  if (ck == VarKind::Intervention && pk != VarKind::Regime) {
    throw InputError("JCI graph: intervention variables may only have the regime as parent");
  }
}

void CausalGraph::add_edge(VarId parent, VarId child) {
  variable(parent);
  variable(child);
  if (parent == child) throw InputError("self loop on " + variables_[parent].name);
  if (jci_) check_jci_edge(parent, child);
  if (ancestors(*this, VarSet::single(parent)).contains(child)) {
    throw InputError("edge " + variables_[parent].name + "->" + variables_[child].name +
                     " would create a cycle");
  }
  parents_[child].insert(parent);
  children_[parent].insert(child);
}

bool CausalGraph::has_edge(VarId parent, VarId child) const {
  return children_.at(parent).contains(child);
}

std::vector<std::pair<VarId, VarId>> CausalGraph::edges() const {
  std::vector<std::pair<VarId, VarId>> out;
  for (VarId p = 0; p < size(); ++p) {
    children_[p].for_each([&](VarId c) { out.emplace_back(p, c); });
  }
  return out;
}

std::vector<VarId> CausalGraph::topological_order() const {
  std::vector<VarId> order;
  order.reserve(size());
  VarSet placed;
  while (static_cast<int>(order.size()) < size()) {
    for (VarId v = 0; v < size(); ++v) {
      if (!placed.contains(v) && parents_[v].subset_of(placed)) {
        order.push_back(v);
        placed.insert(v);
      }
    }
  }
  return order;
}

// ---------------------------------------------------------------------------
// DetRelationSet

DetRelationSet::DetRelationSet(std::initializer_list<DetRelation> rels) {
  for (const auto& r : rels) add(r);
}

DetRelationSet::DetRelationSet(const std::vector<DetRelation>& rels) {
  for (const auto& r : rels) add(r);
}

void DetRelationSet::add(DetRelation r) {
  if (r.determiners.contains(r.determined)) {
    throw InputError("deterministic relation lists its target among its determiners");
  }
  for (const auto& e : relations_) {
    if (e.determined != r.determined) continue;
    if (e.determiners == r.determiners) return;
    if (e.determiners.subset_of(r.determiners) || r.determiners.subset_of(e.determiners)) {
      throw InputError("deterministic relations for variable " + std::to_string(r.determined) +
                       " are not minimal");
    }
  }
  relations_.push_back(r);
}

bool DetRelationSet::remove(const DetRelation& r) {
  auto it = std::find(relations_.begin(), relations_.end(), r);
  if (it == relations_.end()) return false;
  relations_.erase(it);
  return true;
}

// ---------------------------------------------------------------------------
// Separation

VarSet ancestors(const CausalGraph& g, VarSet targets) {
  g.check_ids(targets);
  VarSet result = targets;
  std::vector<VarId> stack = targets.to_vector();
  while (!stack.empty()) {
    const VarId v = stack.back();
    stack.pop_back();
    (g.parents(v) - result).for_each([&](VarId p) {
      result.insert(p);
      stack.push_back(p);
    });
  }
  return result;
}

bool is_separated_by_reachability(const CausalGraph& g, VarSet x, VarSet y, VarSet blocked,
                                  VarSet collider_ok) {
  // up: reached v over an edge v -> child; down: reached v over parent -> v.
  VarSet seen_up;
  VarSet seen_down;
  std::deque<std::pair<VarId, bool>> queue;
  (x - blocked).for_each([&](VarId v) {
    seen_up.insert(v);
    queue.emplace_back(v, true);
  });
  while (!queue.empty()) {
    const auto [v, up] = queue.front();
    queue.pop_front();
    if (y.contains(v) && !blocked.contains(v)) return false;
    const bool pass = !blocked.contains(v);
    auto visit_parents = [&] {
      (g.parents(v) - seen_up).for_each([&](VarId p) {
        seen_up.insert(p);
        queue.emplace_back(p, true);
      });
    };
    auto visit_children = [&] {
      (g.children(v) - seen_down).for_each([&](VarId c) {
        seen_down.insert(c);
        queue.emplace_back(c, false);
      });
    };
    if (up) {
      if (pass) {
        visit_parents();
        visit_children();
      }
    } else {
      if (pass) visit_children();
      if (collider_ok.contains(v)) visit_parents();
    }
  }
  return true;
}

namespace {

void check_separation_args(const CausalGraph& g, VarSet x, VarSet y, VarSet w) {
  g.check_ids(x | y | w);
  if (x.empty() || y.empty()) throw InputError("separation query needs nonempty X and Y");
  if (x.intersects(y) || x.intersects(w) || y.intersects(w)) {
    throw InputError("separation query sets must be pairwise disjoint");
  }
}

}  // namespace

bool is_d_separated(const CausalGraph& g, VarSet x, VarSet y, VarSet w) {
  check_separation_args(g, x, y, w);
  return is_separated_by_reachability(g, x, y, w, ancestors(g, w));
}

VarSet det_closure(const DetRelationSet& d, VarSet w) {
  VarSet closed = w;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : d.relations()) {
      if (!closed.contains(r.determined) && r.determiners.subset_of(closed)) {
        closed.insert(r.determined);
        changed = true;
      }
    }
  }
  return closed;
}

bool is_D_separated(const CausalGraph& g, const DetRelationSet& d, VarSet x, VarSet y, VarSet w) {
  check_separation_args(g, x, y, w);
  return is_separated_by_reachability(g, x, y, det_closure(d, w), ancestors(g, w));
}

bool functionally_determined(const CausalGraph& g, VarId x, VarSet w, VarSet noiseless) {
  g.check_ids(w | noiseless | VarSet::single(x));
  // Ids in topological order let each answer depend only on earlier ones.
  VarSet determined;
  for (VarId v : g.topological_order()) {
    if (w.contains(v) || (noiseless.contains(v) && g.parents(v).subset_of(determined))) {
      determined.insert(v);
    }
    if (v == x) break;
  }
  return determined.contains(x);
}

Admg latent_project(const CausalGraph& g) {
  const VarSet latent = g.of_kind(VarKind::Latent);
  Admg out;
  out.nodes = g.observed().to_vector();

  // Observed variables reachable from v along directed paths whose interior is latent.
  auto observed_reach = [&](VarId v) {
    VarSet reached;
    VarSet seen;
    std::vector<VarId> stack{v};
    while (!stack.empty()) {
      const VarId u = stack.back();
      stack.pop_back();
      (g.children(u) - seen).for_each([&](VarId c) {
        seen.insert(c);
        if (latent.contains(c)) {
          stack.push_back(c);
        } else {
          reached.insert(c);
        }
      });
    }
    return reached;
  };

  for (VarId a : out.nodes) {
    observed_reach(a).for_each([&](VarId b) { out.directed.emplace(a, b); });
  }
  latent.for_each([&](VarId l) {
    const std::vector<VarId> reach = observed_reach(l).to_vector();
    for (std::size_t i = 0; i < reach.size(); ++i) {
      for (std::size_t j = i + 1; j < reach.size(); ++j) out.bidirected.emplace(reach[i], reach[j]);
    }
  });
  return out;
}

std::vector<DStatement> enumerate_d_statements(const CausalGraph& g, const DetRelationSet& d,
                                               VarSet scope, int max_order) {
  g.check_ids(scope);
  std::vector<DStatement> out;
  const std::vector<VarId> vars = scope.to_vector();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      const VarId x = vars[i];
      const VarId y = vars[j];
      const VarSet rest = scope - VarSet{x, y};
      for_each_subset_up_to(rest, max_order, [&](VarSet w) {
        const bool sep = is_D_separated(g, d, VarSet::single(x), VarSet::single(y), w);
        out.push_back({sep ? DStatement::Kind::DSeparated : DStatement::Kind::DConnected, x, y, w,
                       kInfiniteWeight});
      });
    }
  }
  return out;
}

}  // namespace jci
