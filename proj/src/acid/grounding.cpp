#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "jci/acid.hpp"
#include "jci/errors.hpp"

namespace jci {

// ---------------------------------------------------------------------------
// AncestralStructure

AncestralStructure::AncestralStructure(int n) : rows_(n) {}

void AncestralStructure::set(VarId x, VarId y, bool v) {
  if (x == y) return;
  if (v) {
    rows_.at(x).insert(y);
  } else {
    rows_.at(x).erase(y);
  }
}

bool AncestralStructure::valid() const {
  for (VarId x = 0; x < size(); ++x) {
    bool ok = true;
    rows_[x].for_each([&](VarId y) {
      if (rows_[y].contains(x) || !rows_[y].subset_of(rows_[x] | VarSet::single(x))) ok = false;
    });
    if (!ok) return false;
  }
  return true;
}

AncestralStructure ancestral_structure(const CausalGraph& g, VarSet scope) {
  const std::vector<VarId> ids = scope.to_vector();
  AncestralStructure s(static_cast<int>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    const VarSet anc = ancestors(g, VarSet::single(ids[j]));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i != j && anc.contains(ids[i])) s.set(static_cast<VarId>(i), static_cast<VarId>(j), true);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Background file

std::vector<BackgroundFact> read_background(std::istream& in, const std::vector<std::string>& names) {
  auto resolve = [&](const std::string& n) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw InputError("background names unknown variable '" + n + "'");
    return static_cast<VarId>(it - names.begin());
  };
  std::vector<BackgroundFact> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream is(line);
    std::string head;
    if (!(is >> head) || head[0] == '#') continue;
    BackgroundFact f;
    f.text = line;
    std::vector<std::string> toks;
    for (std::string t; is >> t;) toks.push_back(t);
    if (head == "cause" || head == "noncause") {
      if (toks.size() != 2) throw InputError("background: expected '" + head + " X Y': " + line);
      f.kind = head == "cause" ? BackgroundFact::Kind::Cause : BackgroundFact::Kind::NonCause;
      f.x = resolve(toks[0]);
      f.ys = {resolve(toks[1])};
    } else if (head == "oneof") {
      if (toks.size() < 2 || toks[0].back() != ':') throw InputError("background: expected 'oneof X: Y1 Y2 ...': " + line);
      f.kind = BackgroundFact::Kind::OneOf;
      f.x = resolve(toks[0].substr(0, toks[0].size() - 1));
      for (std::size_t k = 1; k < toks.size(); ++k) f.ys.push_back(resolve(toks[k]));
    } else {
      throw InputError("background: unknown fact '" + head + "'");
    }
    for (VarId y : f.ys) {
      if (y == f.x) throw InputError("background fact relates a variable to itself: " + line);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grounding

std::string_view to_string(ClauseOrigin o) {
  switch (o) {
    case ClauseOrigin::Transitivity: return "transitivity";
    case ClauseOrigin::Antisymmetry: return "antisymmetry";
    case ClauseOrigin::Rule1: return "rule 1";
    case ClauseOrigin::Rule2: return "rule 2";
    case ClauseOrigin::Rule3: return "rule 3";
    case ClauseOrigin::Rule4: return "rule 4";
    case ClauseOrigin::Rule5: return "rule 5";
    case ClauseOrigin::Jci1: return "JCI 1";
    case ClauseOrigin::Jci2: return "JCI 2";
    case ClauseOrigin::Jci3: return "JCI 3";
    case ClauseOrigin::Jci4: return "JCI 4";
    case ClauseOrigin::Jci5: return "JCI 5";
    case ClauseOrigin::Jci6: return "JCI 6";
    case ClauseOrigin::Jci7: return "JCI 7";
    case ClauseOrigin::Jci8: return "JCI 8";
    case ClauseOrigin::DistinctInterventions: return "distinct interventions";
    case ClauseOrigin::Background: return "background";
    case ClauseOrigin::HardInput: return "hard input";
  }
  return "?";
}

std::vector<std::string> GroundedProblem::names() const {
  std::vector<std::string> out;
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

int GroundedProblem::ancestry_atom(VarId x, VarId y) const {
  const int n = n_vars();
  if (x == y || x < 0 || y < 0 || x >= n || y >= n) throw InputError("bad ancestry pair");
  return x * (n - 1) + (y < x ? y : y - 1);
}

std::optional<int> GroundedProblem::separation_atom(VarId x, VarId y, VarSet w) const {
  if (y < x) std::swap(x, y);
  const auto& m = sep_index_.at(x * n_vars() + y);
  auto it = m.find(w.bits());
  if (it == m.end()) return std::nullopt;
  return it->second;
}

int GroundedProblem::add_separation_atom(StatementKey k) {
  auto& m = sep_index_.at(k.x * n_vars() + k.y);
  auto [it, fresh] = m.emplace(k.w.bits(), n_atoms());
  if (fresh) {
    atom_keys_.push_back(k);
    cost_true_.push_back(0);
    cost_false_.push_back(0);
  }
  return it->second;
}

void GroundedProblem::add_clause(std::vector<Lit> lits, ClauseOrigin origin, int source) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 1; i < lits.size(); ++i) {
    if ((lits[i] ^ 1) == lits[i - 1]) return;  // tautology
  }
  clauses_.push_back({std::move(lits), origin, source});
}

std::string GroundedProblem::describe(Lit l) const {
  const int atom = l >> 1;
  const bool negated = l & 1;
  if (is_ancestry(atom)) {
    const int n = n_vars();
    const VarId x = atom / (n - 1);
    int y = atom % (n - 1);
    if (y >= x) ++y;
    return vars_[x].name + (negated ? " !~> " : " ~> ") + vars_[y].name;
  }
  const StatementKey k = atom_keys_[atom];
  std::string out = vars_[k.x].name + (negated ? " not_sep " : " sep ") + vars_[k.y].name + " |";
  k.w.for_each([&](VarId v) { out += " " + vars_[v].name; });
  return out;
}

std::string GroundedProblem::describe(const Clause& c) const {
  std::string out = std::string(to_string(c.origin)) + ":";
  for (std::size_t i = 0; i < c.lits.size(); ++i) out += (i ? " or " : " ") + describe(c.lits[i]);
  if (c.origin == ClauseOrigin::Background && c.source >= 0) out += "  [" + background_[c.source].text + "]";
  return out;
}

GroundedProblem ground_rules(const std::vector<ProblemVariable>& variables, const GroundingOptions& opts,
                             const std::vector<DStatement>& inputs,
                             const std::vector<BackgroundFact>& background) {
  const int n = static_cast<int>(variables.size());
  if (n > kMaxVariables) throw InputError("too many variables");
  if (opts.max_order < 0) throw InputError("max_order must be nonnegative");
  GroundedProblem g;
  g.vars_ = variables;
  g.jci_ = opts.jci;
  g.max_order_ = opts.max_order;
  g.background_ = background;

  VarSet regime_set;
  VarSet interventions;
  VarSet system;
  for (VarId v = 0; v < n; ++v) {
    switch (variables[v].kind) {
      case VarKind::Regime: regime_set.insert(v); break;
      case VarKind::Intervention: interventions.insert(v); break;
      case VarKind::System: system.insert(v); break;
      case VarKind::Latent: throw InputError("latent variables cannot take part in discovery");
    }
  }
  if (opts.jci && regime_set.size() != 1) throw InputError("JCI discovery needs exactly one regime variable");
  const VarSet all = VarSet::first(n);

  // Atoms.
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = 0; y < n; ++y) {
      if (x != y) {
        g.atom_keys_.push_back({x, y, {}});
        g.cost_true_.push_back(0);
        g.cost_false_.push_back(0);
      }
    }
  }
  g.sep_index_.assign(static_cast<std::size_t>(n) * n, {});
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = x + 1; y < n; ++y) {
      for_each_subset_up_to(all - VarSet{x, y}, opts.max_order, [&](VarSet w) { g.add_separation_atom({x, y, w}); });
    }
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    DStatement s = inputs[k];
    if (s.x < 0 || s.y < 0 || s.x >= n || s.y >= n || !s.w.subset_of(all)) {
      throw InputError("input statement names an unknown variable");
    }
    normalize(s);
    if (!(s.weight >= 0)) throw InputError("input statement has a negative weight");
    g.inputs_.push_back(s);
    const int atom = g.add_separation_atom(key_of(s));
    if (std::isinf(s.weight)) {
      g.add_clause({s.separated() ? pos(atom) : neg(atom)}, ClauseOrigin::HardInput, static_cast<int>(k));
    } else if (s.separated()) {
      g.cost_false_[atom] += s.weight;
    } else {
      g.cost_true_[atom] += s.weight;
    }
  }

  auto a = [&](VarId x, VarId y) { return g.ancestry_atom(x, y); };
  auto sep = [&](VarId x, VarId y, VarSet w) { return g.separation_atom(x, y, w); };

  // Ancestral structure axioms.
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = 0; y < n; ++y) {
      if (x == y) continue;
      if (x < y) g.add_clause({neg(a(x, y)), neg(a(y, x))}, ClauseOrigin::Antisymmetry);
      for (VarId z = 0; z < n; ++z) {
        if (z != x && z != y) g.add_clause({neg(a(x, y)), neg(a(y, z)), pos(a(x, z))}, ClauseOrigin::Transitivity);
      }
    }
  }

  // ACID rules, anchored on every separation atom s(x, y | W).
  const int first_sep = n * (n - 1);
  const int n_sep_end = g.n_atoms();
  for (int atom = first_sep; atom < n_sep_end; ++atom) {
    const StatementKey k = g.atom_keys_[atom];
    const VarId ends[2] = {k.x, k.y};
    const VarSet w = k.w;

    for (int o = 0; o < 2; ++o) {
      const VarId x = ends[o];
      const VarId y = ends[1 - o];
      std::vector<Lit> c{neg(atom), neg(a(x, y))};
      w.for_each([&](VarId v) { c.push_back(pos(a(x, v))); });
      g.add_clause(std::move(c), ClauseOrigin::Rule1);
    }

    (all - w - VarSet{k.x, k.y}).for_each([&](VarId z) {
      const auto with_z = sep(k.x, k.y, w | VarSet::single(z));
      if (with_z) {
        // Rule 2: X sep Y | W and X con Y | W+Z.
        for (int o = 0; o < 2; ++o) {
          if (auto xz = sep(ends[o], z, w)) g.add_clause({neg(atom), pos(*with_z), neg(*xz)}, ClauseOrigin::Rule2);
        }
        (w | VarSet{k.x, k.y}).for_each([&](VarId t) {
          g.add_clause({neg(atom), pos(*with_z), neg(a(z, t))}, ClauseOrigin::Rule2);
        });
        // Rule 3: X con Y | W and X sep Y | W+Z.
        for (int o = 0; o < 2; ++o) {
          if (auto xz = sep(ends[o], z, w)) g.add_clause({pos(atom), neg(*with_z), neg(*xz)}, ClauseOrigin::Rule3);
        }
        std::vector<Lit> c{pos(atom), neg(*with_z)};
        (w | VarSet{k.x, k.y}).for_each([&](VarId t) { c.push_back(pos(a(z, t))); });
        g.add_clause(std::move(c), ClauseOrigin::Rule3);
        // Rule 4: additionally X sep Z | W+U gives X sep Y | W+U.
        for (int o = 0; o < 2; ++o) {
          const VarId x = ends[o];
          (all - w - VarSet{k.x, k.y, z}).for_each([&](VarId u) {
            const VarSet wu = w | VarSet::single(u);
            const auto xz_u = sep(x, z, wu);
            const auto xy_u = sep(k.x, k.y, wu);
            if (xz_u && xy_u) g.add_clause({pos(atom), neg(*with_z), neg(*xz_u), pos(*xy_u)}, ClauseOrigin::Rule4);
          });
        }
        // Rule 5: Z con X | W, Z con Y | W and X sep Y | W give X con Y | W+Z.
        const auto zx = sep(z, k.x, w);
        const auto zy = sep(z, k.y, w);
        if (zx && zy) g.add_clause({pos(*zx), pos(*zy), neg(atom), neg(*with_z)}, ClauseOrigin::Rule5);
      }
    });
  }

  if (opts.jci) {
    const VarId r = regime_set.min();
    const bool regime_only = interventions.empty();
    interventions.for_each([&](VarId i) {
      g.add_clause({pos(a(r, i))}, ClauseOrigin::Jci1);
      for (const auto& [bits, atom] : g.sep_index_[std::min(r, i) * n + std::max(r, i)]) {
        g.add_clause({neg(atom)}, ClauseOrigin::Jci1);
      }
      interventions.for_each([&](VarId j) {
        if (i != j) g.add_clause({neg(a(i, j))}, ClauseOrigin::DistinctInterventions);
      });
    });
    system.for_each([&](VarId x) {
      if (!regime_only) {
        std::vector<Lit> c{neg(a(r, x))};
        interventions.for_each([&](VarId i) { c.push_back(pos(a(i, x))); });
        g.add_clause(std::move(c), ClauseOrigin::Jci2);
        for_each_subset_up_to(system - VarSet::single(x), n, [&](VarSet w) {
          if (auto s = sep(r, x, w | interventions)) g.add_clause({pos(*s)}, ClauseOrigin::Jci3);
        });
      }
      g.add_clause({neg(a(x, r))}, ClauseOrigin::Jci4);
      interventions.for_each([&](VarId i) { g.add_clause({neg(a(x, i))}, ClauseOrigin::Jci4); });
      if (auto s = sep(r, x, {})) g.add_clause({pos(*s), pos(a(r, x))}, ClauseOrigin::Jci5);
      if (!regime_only) {
        interventions.for_each([&](VarId i) {
          if (auto s = sep(i, x, VarSet::single(r))) g.add_clause({pos(*s), pos(a(i, x))}, ClauseOrigin::Jci6);
        });
      }
    });
    for (int atom = first_sep; atom < g.n_atoms(); ++atom) {
      const StatementKey k = g.atom_keys_[atom];
      if (!system.contains(k.x) || !system.contains(k.y)) continue;
      if (!k.w.contains(r)) {
        if (auto s = sep(k.x, k.y, k.w | VarSet::single(r))) g.add_clause({neg(atom), pos(*s)}, ClauseOrigin::Jci7);
      }
      (interventions - k.w).for_each([&](VarId i) {
        if (auto s = sep(k.x, k.y, k.w | VarSet::single(i))) g.add_clause({neg(atom), pos(*s)}, ClauseOrigin::Jci8);
      });
    }
  }

  for (std::size_t f = 0; f < background.size(); ++f) {
    const auto& fact = background[f];
    for (VarId y : fact.ys) {
      if (fact.x < 0 || fact.x >= n || y < 0 || y >= n || y == fact.x) {
        throw InputError("background fact names a bad variable pair");
      }
    }
    const int src = static_cast<int>(f);
    switch (fact.kind) {
      case BackgroundFact::Kind::Cause:
        g.add_clause({pos(a(fact.x, fact.ys.at(0)))}, ClauseOrigin::Background, src);
        break;
      case BackgroundFact::Kind::NonCause:
        g.add_clause({neg(a(fact.x, fact.ys.at(0)))}, ClauseOrigin::Background, src);
        break;
      case BackgroundFact::Kind::OneOf: {
        std::vector<Lit> some;
        for (VarId y : fact.ys) some.push_back(pos(a(fact.x, y)));
        g.add_clause(some, ClauseOrigin::Background, src);
        for (std::size_t i = 0; i < fact.ys.size(); ++i) {
          for (std::size_t j = i + 1; j < fact.ys.size(); ++j) {
            g.add_clause({neg(a(fact.x, fact.ys[i])), neg(a(fact.x, fact.ys[j]))}, ClauseOrigin::Background, src);
          }
        }
        break;
      }
    }
  }
  return g;
}

}  // namespace jci
