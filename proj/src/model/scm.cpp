#include "jci/scm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "jci/errors.hpp"
#include "jci/graph_io.hpp"

namespace jci {

namespace {

using nlohmann::json;

double signed_uniform(std::mt19937_64& rng, double lo, double hi) {
  const double mag = std::uniform_real_distribution<double>(lo, hi)(rng);
  return std::bernoulli_distribution(0.5)(rng) ? mag : -mag;
}

void check_config(int p, int i, int latents, const GeneratorConfig& cfg) {
  if (p < 1) throw InputError("need at least one system variable");
  if (i < 0) throw InputError("intervention count must be nonnegative");
  if (latents < 0) throw InputError("latent count must be nonnegative");
  if (latents > 0 && p < 2) throw InputError("latent confounders need two system variables");
  if (1 + i + p + latents > kMaxVariables) throw InputError("model too large");
  if (!(cfg.edge_prob >= 0 && cfg.edge_prob <= 1)) throw InputError("edge_prob must be in [0,1]");
  if (!(0 <= cfg.coef_min && cfg.coef_min <= cfg.coef_max)) throw InputError("bad coefficient range");
  if (!(0 <= cfg.noise_var_min && cfg.noise_var_min <= cfg.noise_var_max)) {
    throw InputError("bad noise variance range");
  }
  if (!(0 <= cfg.shift_min && cfg.shift_min <= cfg.shift_max)) throw InputError("bad shift range");
  if (cfg.targets_per_intervention < 1 || cfg.targets_per_intervention > p) {
    throw InputError("targets_per_intervention must be in [1, p]");
  }
  if (!cfg.regime_probs.empty() && static_cast<int>(cfg.regime_probs.size()) != i + 1) {
    throw InputError("regime_probs needs i + 1 entries");
  }
}

/// Values of every variable in one regime are A * (shift + E) over the
/// system and latent block; this returns the pieces in graph id order.
struct LinearForm {
  int dim = 0;
  Eigen::MatrixXd total;     // dim x dim: d value / d exogenous term
  Eigen::VectorXd variance;  // exogenous variances (0 for the dummies)
};

LinearForm linear_form(const JciScm& m) {
  const int n = m.graph.size();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd var = Eigen::VectorXd::Zero(n);
  for (const auto& mech : m.mechanisms) {
    for (const auto& [parent, c] : mech.coefficients) b(mech.target, parent) = c;
    var(mech.target) = mech.noise_variance;
  }
  // Dummies are exogenous constants within a regime: their rows of b stay zero.
  const Eigen::MatrixXd a = (Eigen::MatrixXd::Identity(n, n) - b).inverse();
  return {n, a, var};
}

Eigen::VectorXd dummy_values(const JciScm& m, int regime) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.graph.size());
  u(0) = regime;
  const auto ivs = m.interventions();
  for (std::size_t k = 0; k < ivs.size(); ++k) u(ivs[k]) = m.design.values.at(regime)[k];
  return u;
}

Moments to_moments(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov) {
  Moments out;
  out.dim = static_cast<int>(mu.size());
  out.mean.assign(mu.data(), mu.data() + mu.size());
  out.cov.resize(out.dim * out.dim);
  for (int r = 0; r < out.dim; ++r) {
    for (int c = 0; c < out.dim; ++c) out.cov[r * out.dim + c] = cov(r, c);
  }
  return out;
}

}  // namespace

std::vector<VarId> JciScm::interventions() const {
  return graph.of_kind(VarKind::Intervention).to_vector();
}

DetRelationSet JciScm::det_relations() const {
  return design_relations(validate_design(design), regime(), interventions());
}

void check_model(const JciScm& m) {
  const auto& g = m.graph;
  if (!g.is_jci()) throw InputError("model graph must be a JCI graph");
  if (g.size() == 0 || g.variable(0).kind != VarKind::Regime) {
    throw InputError("model graph must have the regime as variable 0");
  }
  const int n_iv = static_cast<int>(m.interventions().size());
  if (n_iv != m.design.n_interventions()) {
    throw InputError("design columns do not match the intervention variables");
  }
  for (VarId v = 1; v <= n_iv; ++v) {
    if (g.variable(v).kind != VarKind::Intervention) {
      throw InputError("intervention variables must have ids 1..m");
    }
  }
  VarSet with_mech;
  for (const auto& mech : m.mechanisms) {
    const VarKind k = g.variable(mech.target).kind;
    if (k != VarKind::System && k != VarKind::Latent) {
      throw InputError("mechanisms are only allowed for system and latent variables");
    }
    if (with_mech.contains(mech.target)) throw InputError("duplicate mechanism");
    with_mech.insert(mech.target);
    VarSet parents;
    for (const auto& [p, c] : mech.coefficients) {
      if (c == 0) throw InputError("mechanism lists a zero coefficient");
      parents.insert(p);
    }
    if (parents != g.parents(mech.target)) {
      throw InputError("mechanism of " + g.variable(mech.target).name + " does not match its parents");
    }
    if (!(mech.noise_variance >= 0)) throw InputError("negative noise variance");
  }
  if (with_mech != (g.of_kind(VarKind::System) | g.of_kind(VarKind::Latent))) {
    throw InputError("every system and latent variable needs a mechanism");
  }
  // Observed ids must be dense so dataset columns line up with graph ids.
  if (g.observed() != VarSet::first(g.observed().size())) {
    throw InputError("latent variables must come after all observed variables");
  }
}

JciScm random_jci_model(int p, int i, std::optional<int> latent_count, std::uint64_t seed,
                        const GeneratorConfig& cfg) {
  const int n_lat = latent_count.value_or(p / 2);
  check_config(p, i, n_lat, cfg);
  std::mt19937_64 rng(seed);

  JciScm m;
  m.graph = CausalGraph(true);
  m.graph.add_variable("R", VarKind::Regime);
  for (int k = 1; k <= i; ++k) m.graph.add_variable("I" + std::to_string(k), VarKind::Intervention);
  std::vector<VarId> xs;
  for (int k = 1; k <= p; ++k) xs.push_back(m.graph.add_variable("X" + std::to_string(k), VarKind::System));
  std::vector<VarId> ls;
  for (int k = 1; k <= n_lat; ++k) ls.push_back(m.graph.add_variable("L" + std::to_string(k), VarKind::Latent));

  std::vector<std::vector<std::pair<VarId, double>>> coefs(m.graph.size());
  auto connect = [&](VarId from, VarId to, double c) {
    m.graph.add_edge(from, to);
    coefs[to].emplace_back(from, c);
  };

  std::vector<VarId> order = xs;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution edge(cfg.edge_prob);
  for (std::size_t a = 0; a < order.size(); ++a) {
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      if (edge(rng)) connect(order[a], order[b], signed_uniform(rng, cfg.coef_min, cfg.coef_max));
    }
  }
  for (VarId l : ls) {
    std::vector<VarId> kids;
    std::sample(xs.begin(), xs.end(), std::back_inserter(kids), 2, rng);
    for (VarId c : kids) connect(l, c, signed_uniform(rng, cfg.coef_min, cfg.coef_max));
  }
  for (int k = 1; k <= i; ++k) {
    m.graph.add_edge(0, k);
    std::vector<VarId> targets;
    std::sample(xs.begin(), xs.end(), std::back_inserter(targets), cfg.targets_per_intervention, rng);
    for (VarId t : targets) connect(k, t, signed_uniform(rng, cfg.shift_min, cfg.shift_max));
  }

  std::uniform_real_distribution<double> noise(cfg.noise_var_min, cfg.noise_var_max);
  for (VarId v : xs) m.mechanisms.push_back({v, coefs[v], noise(rng)});
  for (VarId v : ls) m.mechanisms.push_back({v, coefs[v], noise(rng)});
  for (auto& mech : m.mechanisms) std::sort(mech.coefficients.begin(), mech.coefficients.end());

  for (int k = 1; k <= i; ++k) m.design.names.push_back("I" + std::to_string(k));
  for (int r = 0; r <= i; ++r) {
    std::vector<double> row(i, 0.0);
    if (r > 0) row[r - 1] = 1.0;
    m.design.values.push_back(std::move(row));
  }
  m.design.regime_probs = cfg.regime_probs.empty() ? std::vector<double>(i + 1, 1.0 / (i + 1))
                                                   : cfg.regime_probs;
  return m;
}

PooledDataset sample(const JciScm& m, int n_total, const std::vector<int>& allocation,
                     std::uint64_t seed) {
  check_model(m);
  const int n_reg = m.design.n_regimes();
  std::mt19937_64 rng(seed);
  PooledDataset data;

  std::vector<int> counts(n_reg, 0);
  if (allocation.empty()) {
    int positive = 0;
    for (int r = 0; r < n_reg; ++r) positive += m.design.regime_probs[r] > 0 ? 1 : 0;
    if (n_total < positive) throw InputError("random allocation needs a row for every regime");
    for (int r = 0; r < n_reg; ++r) counts[r] = m.design.regime_probs[r] > 0 ? 1 : 0;
    std::discrete_distribution<int> pick(m.design.regime_probs.begin(), m.design.regime_probs.end());
    for (int k = positive; k < n_total; ++k) ++counts[pick(rng)];
  } else {
    if (static_cast<int>(allocation.size()) != n_reg) throw InputError("allocation needs one count per regime");
    for (int r = 0; r < n_reg; ++r) {
      if (allocation[r] < 0) throw InputError("negative allocation");
      counts[r] = allocation[r];
      if (counts[r] == 0 && m.design.regime_probs[r] > 0) {
        data.warnings.push_back("regime " + std::to_string(r) + " has positive probability but no rows");
      }
    }
    if (std::accumulate(counts.begin(), counts.end(), 0) != n_total) {
      throw InputError("allocation does not sum to the requested sample size");
    }
  }

  const auto& g = m.graph;
  const VarSet observed = g.observed();
  observed.for_each([&](VarId v) {
    data.names.push_back(g.variable(v).name);
    data.kinds.push_back(g.variable(v).kind);
  });
  data.columns.assign(observed.size(), {});
  for (auto& c : data.columns) c.reserve(n_total);
  data.regime.reserve(n_total);
  data.n_regimes = n_reg;

  std::vector<const Mechanism*> mech_of(g.size(), nullptr);
  for (const auto& mech : m.mechanisms) mech_of[mech.target] = &mech;
  const std::vector<VarId> topo = g.topological_order();
  const auto ivs = m.interventions();
  std::normal_distribution<double> std_normal(0.0, 1.0);
  std::vector<double> value(g.size(), 0.0);

  for (int r = 0; r < n_reg; ++r) {
    for (int row = 0; row < counts[r]; ++row) {
      value[0] = r;
      for (std::size_t k = 0; k < ivs.size(); ++k) value[ivs[k]] = m.design.values[r][k];
      for (VarId v : topo) {
        const Mechanism* mech = mech_of[v];
        if (!mech) continue;
        double x = std::sqrt(mech->noise_variance) * std_normal(rng);
        for (const auto& [parent, c] : mech->coefficients) x += c * value[parent];
        value[v] = x;
      }
      for (int c = 0; c < data.cols(); ++c) data.columns[c].push_back(value[c]);
      data.regime.push_back(r);
    }
  }
  return data;
}

Moments regime_moments(const JciScm& m, int regime) {
  check_model(m);
  if (regime < 0 || regime >= m.design.n_regimes()) throw InputError("regime out of range");
  const LinearForm f = linear_form(m);
  const Eigen::VectorXd mu = f.total * dummy_values(m, regime);
  const Eigen::MatrixXd cov = f.total * f.variance.asDiagonal() * f.total.transpose();
  return to_moments(mu, cov);
}

Moments pooled_moments(const JciScm& m) {
  check_model(m);
  const LinearForm f = linear_form(m);
  const Eigen::MatrixXd within = f.total * f.variance.asDiagonal() * f.total.transpose();
  const int n = f.dim;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < m.design.n_regimes(); ++r) {
    const double p = m.design.regime_probs[r];
    const Eigen::VectorXd mr = f.total * dummy_values(m, r);
    mu += p * mr;
    second += p * (within + mr * mr.transpose());
  }
  return to_moments(mu, second - mu * mu.transpose());
}

std::vector<WeightedStatement> oracle_independences(const JciScm& m, int max_order) {
  check_model(m);
  std::vector<WeightedStatement> out;
  VarSet scope = m.graph.observed();
  // With a single regime R is a constant and carries no information.
  if (m.design.n_regimes() == 1) scope.erase(m.regime());
  for (const auto& d : enumerate_d_statements(m.graph, m.det_relations(), scope, max_order)) {
    out.push_back({d.separated() ? WeightedStatement::Kind::Independent : WeightedStatement::Kind::Dependent,
                   d.x, d.y, d.w, kInfiniteWeight, std::nullopt});
  }
  return out;
}

void write_model_json(std::ostream& out, const JciScm& m) {
  std::ostringstream graph_text;
  write_graph_json(graph_text, m.graph, m.det_relations());
  json j;
  j["graph"] = json::parse(graph_text.str());
  json mechs = json::array();
  for (const auto& mech : m.mechanisms) {
    json coefs = json::array();
    for (const auto& [p, c] : mech.coefficients) coefs.push_back({p, c});
    mechs.push_back({{"target", mech.target}, {"coefficients", coefs}, {"noise_variance", mech.noise_variance}});
  }
  j["mechanisms"] = mechs;
  j["design"] = {{"names", m.design.names}, {"values", m.design.values}, {"probs", m.design.regime_probs}};
  out << j.dump(2) << '\n';
}

JciScm read_model_json(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    JciScm m;
    std::istringstream graph_text(j.at("graph").dump());
    m.graph = read_graph_json(graph_text).graph;
    for (const auto& mj : j.at("mechanisms")) {
      Mechanism mech;
      mech.target = mj.at("target").get<VarId>();
      for (const auto& c : mj.at("coefficients")) mech.coefficients.emplace_back(c.at(0).get<VarId>(), c.at(1).get<double>());
      mech.noise_variance = mj.at("noise_variance").get<double>();
      m.mechanisms.push_back(std::move(mech));
    }
    const auto& d = j.at("design");
    m.design.names = d.at("names").get<std::vector<std::string>>();
    m.design.values = d.at("values").get<std::vector<std::vector<double>>>();
    m.design.regime_probs = d.at("probs").get<std::vector<double>>();
    check_model(m);
    return m;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace jci
