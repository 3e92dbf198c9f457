#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "jci/dataset.hpp"
#include "jci/design.hpp"
#include "jci/graph.hpp"

namespace jci {

/// Linear structural equation X = sum(coef * parent) + E, E ~ N(0, noise_variance).
/// Parents may be system, latent or intervention variables.
struct Mechanism {
  VarId target = 0;
  std::vector<std::pair<VarId, double>> coefficients;
  double noise_variance = 1.0;
};

/// Linear-Gaussian JCI model. Variable ids: R = 0, I1..Im = 1..m, then the
/// observed system variables, then latents. The dummies have no mechanism:
/// R is drawn from the design's regime probabilities and each I is read off
/// the design matrix.
struct JciScm {
  CausalGraph graph;
  ExperimentalDesign design;
  std::vector<Mechanism> mechanisms;  // one per system and latent variable

  VarId regime() const { return 0; }
  std::vector<VarId> interventions() const;
  VarSet system() const { return graph.of_kind(VarKind::System); }
  VarSet latents() const { return graph.of_kind(VarKind::Latent); }

  /// {R} -> I_i for each i, plus {I} -> R when the design says so.
  DetRelationSet det_relations() const;
};

/// Checks ids, kinds and that mechanisms match graph edges. Throws InputError.
void check_model(const JciScm& model);

struct GeneratorConfig {
  double edge_prob = 0.5;
  double coef_min = 0.5;  // |b| ~ U[coef_min, coef_max], random sign
  double coef_max = 1.5;
  double noise_var_min = 0.5;
  double noise_var_max = 1.5;
  double shift_min = 0.5;  // intervention coefficient magnitude
  double shift_max = 2.0;
  int targets_per_intervention = 1;
  /// Empty means uniform over the i + 1 regimes.
  std::vector<double> regime_probs;
};

/// Random model with p observed system variables, `latent_count` latent
/// confounders (each a source with two observed children) and i soft
/// interventions with indicator coding. Pass std::nullopt for floor(p / 2)
/// latents.
JciScm random_jci_model(int p, int i, std::optional<int> latent_count, std::uint64_t seed,
                        const GeneratorConfig& cfg = {});

/// Draws `n_total` rows. With an empty allocation every regime of positive
/// probability gets one row and the rest are spread multinomially; otherwise
/// allocation[r] rows come from regime r. Latent columns are not emitted.
PooledDataset sample(const JciScm& model, int n_total, const std::vector<int>& allocation,
                     std::uint64_t seed);

/// Exact first and second moments over all graph variables.
struct Moments {
  int dim = 0;
  std::vector<double> mean;
  std::vector<double> cov;  // row-major dim x dim
};

Moments regime_moments(const JciScm& model, int regime);
/// Mixture over regimes weighted by the design's regime probabilities.
Moments pooled_moments(const JciScm& model);

/// D-separation facts among the observed variables, latents marginalised.
/// Oracle statements carry infinite weight and no p-value.
std::vector<WeightedStatement> oracle_independences(const JciScm& model, int max_order);

void write_model_json(std::ostream& out, const JciScm& model);
JciScm read_model_json(std::istream& in);

}  // namespace jci
