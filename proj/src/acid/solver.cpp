#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "jci/acid.hpp"
#include "jci/errors.hpp"

namespace jci {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tolerance(double best) { return 1e-9 * std::max(1.0, std::abs(best)); }

/// Chronological branch and bound over the grounded clauses with
/// two-watched-literal unit propagation.
class Search {
 public:
  Search(const GroundedProblem& p, const SolveOptions& opts, bool feasibility_only)
      : p_(p), opts_(opts), feasibility_(feasibility_only) {
    const int n_atoms = p.n_atoms();
    value_.assign(n_atoms, -1);
    level_.assign(n_atoms, 0);
    reason_.assign(n_atoms, -1);
    watches_.assign(2 * static_cast<std::size_t>(n_atoms), {});
    cost_true_.resize(n_atoms);
    cost_false_.resize(n_atoms);
    for (int v = 0; v < n_atoms; ++v) {
      cost_true_[v] = feasibility_ ? 0 : p.cost_if_true(v);
      cost_false_[v] = feasibility_ ? 0 : p.cost_if_false(v);
      if (cost_true_[v] > 0 || cost_false_[v] > 0) {
        soft_.push_back(v);
        pending_min_ += std::min(cost_true_[v], cost_false_[v]);
      }
    }
    build_order();
  }

  /// Loads clauses; false when the root level is already contradictory.
  bool load(const std::vector<GroundedProblem::Clause>& clauses, std::span<const Lit> extra,
            const std::vector<bool>* keep = nullptr) {
    start_.push_back(0);
    for (std::size_t c = 0; c < clauses.size(); ++c) {
      if (keep && !(*keep)[c]) continue;
      if (!add(clauses[c].lits)) return false;
    }
    for (Lit l : extra) {
      if (!add({l})) return false;
    }
    return propagate() < 0;
  }

  void run() {
    while (true) {
      bool backtrack = propagate() >= 0;
      if (!backtrack) {
        if (pruned()) {
          backtrack = true;
        } else {
          const int v = next_unassigned();
          if (v < 0) {
            record();
            if (feasibility_) return;
            backtrack = true;
          } else {
            decide(v, preferred(v), false);
            continue;
          }
        }
      }
      if (!backtrack_one()) return;
    }
  }

  bool found() const { return !best_assignment_.empty(); }
  double best() const { return best_; }
  const std::vector<int8_t>& best_assignment() const { return best_assignment_; }
  std::int64_t count() const { return count_; }
  std::int64_t nodes() const { return nodes_; }

 private:
  struct Decision {
    int atom;
    bool value;
    bool second;
    std::size_t order_pos;
  };

  bool lit_true(Lit l) const { return value_[l >> 1] == ((l & 1) ? 0 : 1); }
  bool lit_false(Lit l) const { return value_[l >> 1] == ((l & 1) ? 1 : 0); }
  bool lit_free(Lit l) const { return value_[l >> 1] < 0; }
  int level() const { return static_cast<int>(decisions_.size()) + temp_levels_; }

  bool add(const std::vector<Lit>& lits) {
    if (lits.size() == 1) {
      if (lit_false(lits[0])) return false;
      if (lit_free(lits[0])) assign(lits[0], -1);
      return true;
    }
    const int c = static_cast<int>(start_.size()) - 1;
    lits_.insert(lits_.end(), lits.begin(), lits.end());
    start_.push_back(static_cast<int>(lits_.size()));
    watches_[lits[0]].push_back(c);
    watches_[lits[1]].push_back(c);
    return true;
  }

  void assign(Lit l, int reason) {
    const int v = l >> 1;
    const int8_t val = (l & 1) ? 0 : 1;
    value_[v] = val;
    level_[v] = level();
    reason_[v] = reason;
    trail_.push_back(v);
    cost_ += val ? cost_true_[v] : cost_false_[v];
    pending_min_ -= std::min(cost_true_[v], cost_false_[v]);
  }

  void cancel_until(std::size_t trail_size) {
    while (trail_.size() > trail_size) {
      const int v = trail_.back();
      trail_.pop_back();
      cost_ -= value_[v] ? cost_true_[v] : cost_false_[v];
      pending_min_ += std::min(cost_true_[v], cost_false_[v]);
      value_[v] = -1;
      reason_[v] = -1;
    }
    qhead_ = std::min(qhead_, trail_.size());
  }

  /// Returns a conflicting clause index, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      const int v = trail_[qhead_++];
      const Lit falsified = value_[v] ? neg(v) : pos(v);
      auto& ws = watches_[falsified];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const int c = ws[i];
        int* cl = &lits_[start_[c]];
        const int len = start_[c + 1] - start_[c];
        if (cl[0] == falsified) std::swap(cl[0], cl[1]);
        if (lit_true(cl[0])) {
          ws[keep++] = c;
          continue;
        }
        bool moved = false;
        for (int k = 2; k < len; ++k) {
          if (!lit_false(cl[k])) {
            std::swap(cl[1], cl[k]);
            watches_[cl[1]].push_back(c);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = c;
        if (lit_false(cl[0])) {
          for (std::size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
          ws.resize(keep);
          qhead_ = trail_.size();
          return c;
        }
        assign(cl[0], c);
      }
      ws.resize(keep);
    }
    return -1;
  }

  void build_order() {
    const int n_atoms = p_.n_atoms();
    std::vector<int> soft_sorted = soft_;
    std::stable_sort(soft_sorted.begin(), soft_sorted.end(), [&](int a, int b) {
      return std::abs(cost_true_[a] - cost_false_[a]) > std::abs(cost_true_[b] - cost_false_[b]);
    });
    std::vector<bool> placed(n_atoms, false);
    auto put = [&](int v) {
      if (!placed[v]) {
        placed[v] = true;
        order_.push_back(v);
      }
    };
    const int n_anc = p_.n_vars() * (p_.n_vars() - 1);
    // Fixing the ancestry first turns most rule clauses into short
    // implications between separation atoms, which keeps the bound tight.
    for (int v = 0; v < n_anc; ++v) put(v);
    for (int v : soft_sorted) put(v);
    for (int v = 0; v < n_atoms; ++v) put(v);
    n_ancestry_ = n_anc;
  }

  bool preferred(int v) const {
    if (cost_true_[v] != cost_false_[v]) return cost_true_[v] < cost_false_[v];
    return !p_.is_ancestry(v);
  }

  int next_unassigned() {
    while (pos_ < order_.size() && value_[order_[pos_]] >= 0) ++pos_;
    return pos_ < order_.size() ? order_[pos_] : -1;
  }

  void decide(int v, bool val, bool second) {
    ++nodes_;
    decisions_.push_back({v, val, second, pos_});
    trail_lim_.push_back(trail_.size());
    assign(val ? pos(v) : neg(v), -1);
  }

  bool backtrack_one() {
    while (!decisions_.empty()) {
      const Decision d = decisions_.back();
      decisions_.pop_back();
      cancel_until(trail_lim_.back());
      trail_lim_.pop_back();
      pos_ = d.order_pos;
      if (!d.second) {
        decide(d.atom, !d.value, true);
        return true;
      }
    }
    return false;
  }

  bool structure_complete() const {
    for (int v = 0; v < n_ancestry_; ++v) {
      if (value_[v] < 0) return false;
    }
    return true;
  }

  bool current_structure_counted() const {
    if (counted_structure_.empty() || !structure_complete()) return false;
    for (int v = 0; v < n_ancestry_; ++v) {
      if (value_[v] != counted_structure_[v]) return false;
    }
    return true;
  }

  bool exceeds(double lb) const {
    if (!found()) return false;
    const double eps = tolerance(best_);
    if (opts_.count_optima && !current_structure_counted()) return lb > best_ + eps;
    return lb >= best_ - eps;
  }

  bool pruned() {
    if (feasibility_ || !found()) return false;
    const double lb = cost_ + pending_min_;
    if (exceeds(lb)) return true;
    if (!opts_.conflict_bound) return false;
    return exceeds(lb + conflict_bound(lb));
  }

  /// Disjoint-conflict lower bound: tentatively give unassigned soft atoms
  /// their cheaper value; every conflict reached by propagation involves a
  /// set of those choices of which at least one must flip.
  double conflict_bound(double base) {
    residual_.assign(p_.n_atoms(), 0.0);
    for (int v : soft_) {
      if (value_[v] < 0) residual_[v] = std::abs(cost_true_[v] - cost_false_[v]);
    }
    const std::size_t base_trail = trail_.size();
    const int base_level = level();
    // Temporary levels as (trail mark, scan position); after a core the scan
    // resumes at the earliest level the core depends on.
    std::vector<std::pair<std::size_t, std::size_t>> temps;
    std::size_t k = 0;
    double lb = 0;
    while (true) {
      std::vector<int> core;
      for (; k < order_.size(); ++k) {
        const int v = order_[k];
        if (value_[v] >= 0 || residual_[v] <= 0) continue;
        temps.push_back({trail_.size(), k});
        ++temp_levels_;
        const std::size_t mark = trail_.size();
        assign(preferred(v) ? pos(v) : neg(v), -1);
        const int conflict = propagate();
        if (conflict >= 0) {
          core = explain_clause(conflict, base_level);
          break;
        }
        for (std::size_t t = mark + 1; t < trail_.size(); ++t) {
          const int u = trail_[t];
          if (residual_[u] > 0 && (value_[u] == 1) != preferred(u)) {
            core = explain_atom(u, base_level);
            core.push_back(u);
            break;
          }
        }
        if (!core.empty()) break;
      }
      if (core.empty()) break;
      double delta = kInf;
      int earliest = static_cast<int>(temps.size());
      for (int v : core) {
        delta = std::min(delta, residual_[v]);
        if (value_[v] >= 0 && level_[v] > base_level) earliest = std::min(earliest, level_[v] - base_level - 1);
      }
      for (int v : core) residual_[v] -= delta;
      lb += delta;
      if (exceeds(base + lb)) break;
      earliest = std::min(earliest, static_cast<int>(temps.size()) - 1);
      cancel_until(temps[earliest].first);
      k = temps[earliest].second;
      temps.resize(earliest);
      temp_levels_ = earliest;
    }
    cancel_until(base_trail);
    temp_levels_ = 0;
    return lb;
  }

  /// Temporary decisions that imply the clause's literals are all false.
  std::vector<int> explain_clause(int c, int base_level) {
    std::vector<int> roots;
    for (int k = start_[c]; k < start_[c + 1]; ++k) roots.push_back(lits_[k] >> 1);
    return collect_decisions(roots, base_level);
  }

  std::vector<int> explain_atom(int v, int base_level) { return collect_decisions({v}, base_level); }

  std::vector<int> collect_decisions(std::vector<int> stack, int base_level) {
    std::vector<int> out;
    seen_.resize(p_.n_atoms(), 0);
    std::vector<int> touched;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (seen_[v] || value_[v] < 0 || level_[v] <= base_level) continue;
      seen_[v] = 1;
      touched.push_back(v);
      const int r = reason_[v];
      if (r < 0) {
        out.push_back(v);
        continue;
      }
      for (int k = start_[r]; k < start_[r + 1]; ++k) stack.push_back(lits_[k] >> 1);
    }
    for (int v : touched) seen_[v] = 0;
    return out;
  }

  void record() {
    const double eps = tolerance(best_);
    if (!found() || cost_ < best_ - eps) {
      best_ = cost_;
      best_assignment_ = value_;
      count_ = 1;
      counted_structure_.assign(value_.begin(), value_.begin() + n_ancestry_);
    } else if (opts_.count_optima && !current_structure_counted()) {
      ++count_;
      counted_structure_.assign(value_.begin(), value_.begin() + n_ancestry_);
    }
  }

  const GroundedProblem& p_;
  SolveOptions opts_;
  bool feasibility_;

  std::vector<int> lits_;
  std::vector<int> start_;
  std::vector<std::vector<int>> watches_;

  std::vector<int8_t> value_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<Decision> decisions_;
  int temp_levels_ = 0;

  std::vector<double> cost_true_;
  std::vector<double> cost_false_;
  std::vector<int> soft_;
  double cost_ = 0;
  double pending_min_ = 0;
  std::vector<double> residual_;
  std::vector<char> seen_;

  std::vector<int> order_;
  std::size_t pos_ = 0;
  int n_ancestry_ = 0;

  double best_ = kInf;
  std::vector<int8_t> best_assignment_;
  std::vector<int8_t> counted_structure_;
  std::int64_t count_ = 0;
  std::int64_t nodes_ = 0;
};

bool satisfiable(const GroundedProblem& p, std::span<const Lit> extra, const std::vector<bool>& keep) {
  Search s(p, {}, true);
  if (!s.load(p.clauses(), extra, &keep)) return false;
  s.run();
  return s.found();
}

/// Deletion-based shrinking over the user-supplied hard facts.
[[noreturn]] void throw_infeasible(const GroundedProblem& p, std::span<const Lit> assumptions) {
  const auto& clauses = p.clauses();
  std::vector<bool> keep(clauses.size(), true);
  std::vector<Lit> extra(assumptions.begin(), assumptions.end());
  std::vector<std::size_t> user;
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    if (clauses[c].origin == ClauseOrigin::Background || clauses[c].origin == ClauseOrigin::HardInput) {
      user.push_back(c);
    }
  }
  for (std::size_t c : user) {
    keep[c] = false;
    if (satisfiable(p, extra, keep)) keep[c] = true;
  }
  for (std::size_t k = extra.size(); k-- > 0;) {
    std::vector<Lit> fewer = extra;
    fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
    if (!satisfiable(p, fewer, keep)) extra = fewer;
  }
  std::string msg = "hard constraints are unsatisfiable; conflicting facts:";
  bool any = false;
  for (std::size_t c : user) {
    if (keep[c]) {
      msg += "\n  " + p.describe(clauses[c]);
      any = true;
    }
  }
  for (Lit l : extra) {
    msg += "\n  assumption: " + p.describe(l);
    any = true;
  }
  if (!any) msg += "\n  (the grounded rules alone)";
  throw Infeasible(msg);
}

}  // namespace

double loss_of(const GroundedProblem& p, const std::vector<bool>& assignment) {
  double loss = 0;
  for (const auto& s : p.inputs()) {
    const int atom = *p.separation_atom(s.x, s.y, s.w);
    if (assignment.at(atom) != s.separated()) loss += s.weight;
  }
  return loss;
}

namespace {

std::optional<Solution> try_minimize(const GroundedProblem& p, std::span<const Lit> assumptions,
                                     const SolveOptions& opts) {
  for (Lit l : assumptions) {
    if (l < 0 || (l >> 1) >= p.n_atoms()) throw InputError("assumption names an unknown atom");
  }
  Search s(p, opts, false);
  if (s.load(p.clauses(), assumptions)) s.run();
  if (!s.found()) return std::nullopt;

  Solution out;
  const auto& best = s.best_assignment();
  out.assignment.resize(best.size());
  for (std::size_t v = 0; v < best.size(); ++v) out.assignment[v] = best[v] == 1;
  const int n = p.n_vars();
  out.structure = AncestralStructure(n);
  for (VarId x = 0; x < n; ++x) {
    for (VarId y = 0; y < n; ++y) {
      if (x != y) out.structure.set(x, y, out.assignment[p.ancestry_atom(x, y)]);
    }
  }
  out.loss = loss_of(p, out.assignment);
  out.optimum_count = s.count();
  out.nodes = s.nodes();
  return out;
}

}  // namespace

Solution minimize_loss(const GroundedProblem& p, std::span<const Lit> assumptions, const SolveOptions& opts) {
  auto sol = try_minimize(p, assumptions, opts);
  if (!sol) throw_infeasible(p, assumptions);
  return std::move(*sol);
}

std::vector<ScoredPrediction> score_predictions(const GroundedProblem& p,
                                                const std::vector<std::pair<VarId, VarId>>& pairs,
                                                const SolveOptions& opts) {
  SolveOptions base_opts = opts;
  base_opts.count_optima = false;
  auto found = try_minimize(p, {}, base_opts);
  if (!found) {
    try {
      throw_infeasible(p, {});
    } catch (const Infeasible& e) {
      throw Contradiction(std::string("both sides of every feature are infeasible: ") + e.what());
    }
  }
  const Solution& base = *found;
  std::vector<ScoredPrediction> out;
  for (const auto& [x, y] : pairs) {
    const int atom = p.ancestry_atom(x, y);
    const bool holds = base.assignment[atom];
    const Lit flip = holds ? neg(atom) : pos(atom);
    const auto flipped = try_minimize(p, std::span<const Lit>(&flip, 1), base_opts);
    const double other = flipped ? flipped->loss : kInf;
    // Loss when the feature "x causes y" is forced false minus when forced true.
    const double conf = holds ? other - base.loss : base.loss - other;
    out.push_back({x, y, true, conf});
    out.push_back({x, y, false, conf == 0 ? 0.0 : -conf});
  }
  return out;
}

}  // namespace jci
