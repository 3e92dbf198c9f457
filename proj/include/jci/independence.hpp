#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "jci/dataset.hpp"
#include "jci/statement.hpp"

namespace jci {

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultMaxWeight = 1e6;
inline constexpr double kCorrelationClamp = 1e-12;

/// Partial correlation of x and y given w from a row-major dim x dim
/// covariance matrix, by Schur complement. The result is not clamped.
/// Throws DegenerateInput when the conditioning block is singular or x or y
/// has (numerically) no variance left after conditioning.
double partial_correlation(std::span<const double> cov, int dim, int x, int y, VarSet w);

/// Sample partial correlation of two dataset columns.
double partial_correlation(const PooledDataset& data, int x, int y, VarSet w);

struct FisherResult {
  double p_value = 1.0;
  bool independent = true;
};

/// z = sqrt(n - order - 3) * atanh(r), two-sided normal p-value; r is
/// clamped to +-(1 - 1e-12) first. Throws DegenerateInput when
/// n - order - 3 <= 0.
FisherResult fisher_z_test(double r, std::size_t n, int order, double alpha = kDefaultAlpha);

/// |log p - log alpha|. p = 0 maps to `max_weight`; tiny p is clamped to
/// 1e-300 before the logarithm.
double weight_frequentist(double p_value, double alpha = kDefaultAlpha,
                          double max_weight = kDefaultMaxWeight);

/// A conditional independence test over the columns of one dataset.
class IndependenceTest {
 public:
  virtual ~IndependenceTest() = default;
  /// p-value for x _||_ y | w. Throws DegenerateInput when untestable.
  virtual double p_value(int x, int y, VarSet w) const = 0;
};

/// Gaussian partial-correlation test. The sample covariance of all columns is
/// computed once up front.
class FisherZTest final : public IndependenceTest {
 public:
  explicit FisherZTest(const PooledDataset& data);
  double p_value(int x, int y, VarSet w) const override;
  double correlation(int x, int y, VarSet w) const;

 private:
  std::size_t n_ = 0;
  int dim_ = 0;
  std::vector<double> cov_;
};

struct SkippedTest {
  VarId x = 0;
  VarId y = 0;
  VarSet w;
  std::string reason;
};

struct TestRun {
  std::vector<WeightedStatement> statements;
  std::vector<SkippedTest> skipped;
};

struct TestOptions {
  double alpha = kDefaultAlpha;
  double max_weight = kDefaultMaxWeight;
};

/// Tests every pair of `scope` given every subset of the rest of the scope
/// with at most `max_order` elements. Regime and intervention columns are
/// ordinary numeric columns here. Output is in statement-key order.
TestRun run_all_tests(const IndependenceTest& test, VarSet scope, int max_order,
                      const TestOptions& opts = {});
TestRun run_all_tests(const PooledDataset& data, VarSet scope, int max_order,
                      const TestOptions& opts = {});

struct Conversion {
  std::vector<DStatement> statements;
  /// Independences ignored because an endpoint lies in Det(W).
  int dropped = 0;
};

/// Sound d-statements from test results under deterministic relations `d`:
/// a dependence gives a d-connection given W; an independence gives a
/// d-separation given Det(W) unless an endpoint is in Det(W), in which case
/// it is dropped. Duplicates keep the largest weight.
Conversion statements_to_dstatements(const std::vector<WeightedStatement>& stmts,
                                     const DetRelationSet& d);

}  // namespace jci
