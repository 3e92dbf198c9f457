#include "jci/design.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "jci/errors.hpp"

namespace jci {

namespace {

constexpr double kProbTolerance = 1e-12;
constexpr int kMaxEnumeratedColumns = 20;

/// Value-table view of a design restricted to regimes with positive probability.
class ValueTable {
 public:
  explicit ValueTable(const ExperimentalDesign& d) : d_(d) {
    for (int r = 0; r < d.n_regimes(); ++r) {
      if (d.regime_probs[r] > 0) support_.push_back(r);
    }
  }

  std::vector<double> tuple(int r, VarSet cols) const {
    std::vector<double> t;
    cols.for_each([&](VarId c) { t.push_back(d_.values[r][c]); });
    return t;
  }

  bool constant(int c) const {
    for (int r : support_) {
      if (d_.values[r][c] != d_.values[support_.front()][c]) return false;
    }
    return true;
  }

  /// Column `target` is a function of the columns in `given`.
  bool determines(VarSet given, int target) const {
    std::map<std::vector<double>, double> seen;
    for (int r : support_) {
      auto [it, fresh] = seen.emplace(tuple(r, given), d_.values[r][target]);
      if (!fresh && it->second != d_.values[r][target]) return false;
    }
    return true;
  }

  bool determines_regime(VarSet given) const {
    std::map<std::vector<double>, int> seen;
    for (int r : support_) {
      if (!seen.emplace(tuple(r, given), r).second) return false;
    }
    return true;
  }

  /// Exact check of column a independent of column b given the columns in `given`.
  bool independent(int a, int b, VarSet given) const {
    std::map<std::vector<double>, std::vector<int>> groups;
    for (int r : support_) groups[tuple(r, given)].push_back(r);
    for (const auto& [key, regs] : groups) {
      double mass = 0;
      for (int r : regs) mass += d_.regime_probs[r];
      std::map<double, double> pa;
      std::map<double, double> pb;
      std::map<std::pair<double, double>, double> pab;
      for (int r : regs) {
        const double p = d_.regime_probs[r] / mass;
        pa[d_.values[r][a]] += p;
        pb[d_.values[r][b]] += p;
        pab[{d_.values[r][a], d_.values[r][b]}] += p;
      }
      for (const auto& [va, qa] : pa) {
        for (const auto& [vb, qb] : pb) {
          auto it = pab.find({va, vb});
          const double joint = it == pab.end() ? 0.0 : it->second;
          if (std::abs(joint - qa * qb) > kProbTolerance) return false;
        }
      }
    }
    return true;
  }

 private:
  const ExperimentalDesign& d_;
  std::vector<int> support_;
};

void check_shape(const ExperimentalDesign& d) {
  if (d.n_regimes() == 0) throw InputError("experimental design has no regimes");
  if (static_cast<int>(d.regime_probs.size()) != d.n_regimes()) {
    throw InputError("experimental design needs one probability per regime");
  }
  for (const auto& row : d.values) {
    if (static_cast<int>(row.size()) != d.n_interventions()) {
      throw InputError("experimental design rows must have one value per intervention column");
    }
  }
  if (d.n_interventions() > kMaxEnumeratedColumns) {
    throw InputError("experimental design has too many intervention columns");
  }
}

std::string column_list(const ExperimentalDesign& d, VarSet cols) {
  std::string out = "{";
  bool first = true;
  cols.for_each([&](VarId c) {
    out += (first ? "" : ", ") + d.names[c];
    first = false;
  });
  return out + "}";
}

/// Minimal subsets of `candidates` that determine column c.
std::vector<VarSet> minimal_determiners(const ValueTable& t, VarSet candidates, int c) {
  std::vector<VarSet> found;
  for_each_subset_up_to(candidates, candidates.size(), [&](VarSet s) {
    if (s.empty()) return;
    for (VarSet f : found) {
      if (f.subset_of(s)) return;
    }
    if (t.determines(s, c)) found.push_back(s);
  });
  return found;
}

}  // namespace

ExperimentalDesign ExperimentalDesign::from_counts(std::vector<std::string> names,
                                                   std::vector<std::vector<double>> values,
                                                   const std::vector<int>& counts) {
  if (counts.size() != values.size()) throw InputError("one count per regime required");
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0) throw InputError("regime counts must not all be zero");
  ExperimentalDesign d{std::move(names), std::move(values), {}};
  for (int c : counts) {
    if (c < 0) throw InputError("negative regime count");
    d.regime_probs.push_back(c / total);
  }
  return d;
}

DesignReport validate_design(const ExperimentalDesign& d) {
  check_shape(d);
  DesignReport rep;

  double total = 0;
  for (double p : d.regime_probs) {
    if (!(p >= 0)) rep.probabilities_ok = false;
    total += p;
  }
  if (std::abs(total - 1.0) > kProbTolerance) rep.probabilities_ok = false;
  if (!rep.probabilities_ok) {
    rep.issues.push_back({DesignIssue::Kind::BadProbabilities, {}, {},
                          "regime probabilities must be nonnegative and sum to one"});
  }

  const ValueTable t(d);
  const int m = d.n_interventions();
  VarSet varying;
  for (int c = 0; c < m; ++c) {
    if (t.constant(c)) {
      rep.restricted_determinism = false;
      rep.issues.push_back({DesignIssue::Kind::ConstantColumn, {c}, {},
                            "intervention column " + d.names[c] + " is constant"});
    } else {
      varying.insert(c);
    }
  }
  varying.for_each([&](VarId c) {
    for (VarSet s : minimal_determiners(t, varying - VarSet::single(c), c)) {
      rep.restricted_determinism = false;
      rep.issues.push_back({DesignIssue::Kind::DeterminedColumn, {c}, s.to_vector(),
                            d.names[c] + " is determined by " + column_list(d, s)});
    }
  });

  const std::vector<VarId> cols = varying.to_vector();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    for (std::size_t j = i + 1; j < cols.size(); ++j) {
      const int a = cols[i];
      const int b = cols[j];
      const VarSet rest = varying - VarSet{a, b};
      for_each_subset_up_to(rest, rest.size(), [&](VarSet s) {
        if (t.independent(a, b, s)) {
          rep.pairwise_dependent = false;
          rep.issues.push_back({DesignIssue::Kind::IndependentPair, {a, b}, s.to_vector(),
                                d.names[a] + " and " + d.names[b] + " are independent given " +
                                    column_list(d, s)});
        }
      });
    }
  }

  rep.interventions_determine_regime = t.determines_regime(VarSet::first(m));
  return rep;
}

NormalizedDesign normalize_design(const ExperimentalDesign& in) {
  check_shape(in);
  NormalizedDesign out;
  ExperimentalDesign& d = out.design;
  d.regime_probs = in.regime_probs;
  d.values.assign(in.n_regimes(), {});
  {
    const ValueTable t(in);
    for (int c = 0; c < in.n_interventions(); ++c) {
      if (t.constant(c)) {
        out.dropped.push_back(c);
        continue;
      }
      d.names.push_back(in.names[c]);
      for (int r = 0; r < in.n_regimes(); ++r) d.values[r].push_back(in.values[r][c]);
      out.mapping.push_back({c});
    }
  }

  while (true) {
    const ValueTable t(d);
    const int m = d.n_interventions();
    VarSet group;
    for (int c = 0; c < m && group.empty(); ++c) {
      const auto dets = minimal_determiners(t, VarSet::first(m) - VarSet::single(c), c);
      if (!dets.empty()) group = dets.front() | VarSet::single(c);
    }
    if (group.empty()) break;

    // Code each distinct tuple of the group by order of first appearance.
    std::map<std::vector<double>, double> codes;
    std::vector<double> merged(d.n_regimes());
    for (int r = 0; r < d.n_regimes(); ++r) {
      auto key = t.tuple(r, group);
      auto it = codes.emplace(std::move(key), static_cast<double>(codes.size())).first;
      merged[r] = it->second;
    }
    ExperimentalDesign next;
    next.regime_probs = d.regime_probs;
    next.values.assign(d.n_regimes(), {});
    std::vector<std::vector<int>> mapping;
    std::string name;
    std::vector<int> sources;
    const VarId first = group.min();
    for (int c = 0; c < m; ++c) {
      if (group.contains(c)) {
        name += (name.empty() ? "" : "+") + d.names[c];
        sources.insert(sources.end(), out.mapping[c].begin(), out.mapping[c].end());
        if (c != first) continue;
        next.names.push_back({});
        for (int r = 0; r < d.n_regimes(); ++r) next.values[r].push_back(merged[r]);
        mapping.emplace_back();
      } else {
        next.names.push_back(d.names[c]);
        for (int r = 0; r < d.n_regimes(); ++r) next.values[r].push_back(d.values[r][c]);
        mapping.push_back(out.mapping[c]);
      }
    }
    std::sort(sources.begin(), sources.end());
    int slot = 0;
    for (int c = 0; c < first; ++c) slot += group.contains(c) ? 0 : 1;
    next.names[slot] = name;
    mapping[slot] = sources;
    d = std::move(next);
    out.mapping = std::move(mapping);
  }
  return out;
}

DetRelationSet design_relations(const DesignReport& report, VarId regime,
                                const std::vector<VarId>& interventions) {
  DetRelationSet d;
  for (VarId i : interventions) d.add({VarSet::single(regime), i});
  if (report.interventions_determine_regime) d.add({VarSet::of(interventions), regime});
  return d;
}

void write_design_csv(std::ostream& out, const ExperimentalDesign& d) {
  out << "R";
  for (const auto& n : d.names) out << ',' << n;
  out << ",p\n";
  out.precision(17);
  for (int r = 0; r < d.n_regimes(); ++r) {
    out << r;
    for (double v : d.values[r]) out << ',' << v;
    out << ',' << d.regime_probs[r] << '\n';
  }
}

ExperimentalDesign read_design_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok.erase(std::remove_if(tok.begin(), tok.end(), [](char c) { return c == ' ' || c == '\r'; }),
                tok.end());
      out.push_back(tok);
    }
    return out;
  };
  std::string line;
  if (!std::getline(in, line)) throw InputError("design CSV is empty");
  auto header = split(line);
  if (header.size() < 2 || header.front() != "R" || header.back() != "p") {
    throw InputError("design CSV header must be R,<interventions...>,p");
  }
  ExperimentalDesign d;
  d.names.assign(header.begin() + 1, header.end() - 1);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto toks = split(line);
    if (toks.size() != header.size()) throw InputError("design CSV row has the wrong width");
    try {
      if (std::stoi(toks.front()) != d.n_regimes()) {
        throw InputError("design CSV rows must list regimes 0, 1, 2, ... in order");
      }
      std::vector<double> row;
      for (std::size_t k = 1; k + 1 < toks.size(); ++k) row.push_back(std::stod(toks[k]));
      d.values.push_back(std::move(row));
      d.regime_probs.push_back(std::stod(toks.back()));
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InputError*>(&e)) throw;
      throw InputError("design CSV has a malformed number");
    }
  }
  if (d.values.empty()) throw InputError("design CSV has no regimes");
  return d;
}

}  // namespace jci
