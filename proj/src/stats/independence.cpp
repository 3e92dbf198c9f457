#include "jci/independence.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "jci/errors.hpp"
#include "jci/kernels.hpp"

namespace jci {

namespace {

// Residual variance below this fraction of the raw variance counts as zero.
constexpr double kRelativeVarianceFloor = 1e-10;

}  // namespace

double partial_correlation(std::span<const double> cov, int dim, int x, int y, VarSet w) {
  if (x == y || w.contains(x) || w.contains(y)) throw InputError("partial correlation needs distinct columns");
  if (x < 0 || y < 0 || x >= dim || y >= dim || !w.subset_of(VarSet::first(dim))) {
    throw InputError("partial correlation column out of range");
  }
  auto at = [&](int r, int c) { return cov[static_cast<std::size_t>(r) * dim + c]; };
  const double vx = at(x, x);
  const double vy = at(y, y);
  if (!(vx > 0) || !(vy > 0)) throw DegenerateInput("constant column");

  double sxx = vx;
  double syy = vy;
  double sxy = at(x, y);
  if (!w.empty()) {
    const std::vector<VarId> ws = w.to_vector();
    const int k = static_cast<int>(ws.size());
    Eigen::MatrixXd sww(k, k);
    Eigen::MatrixXd swa(k, 2);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) sww(i, j) = at(ws[i], ws[j]);
      swa(i, 0) = at(ws[i], x);
      swa(i, 1) = at(ws[i], y);
    }
    // Work on the correlation scale so the singularity threshold is unitless.
    Eigen::VectorXd scale(k);
    for (int i = 0; i < k; ++i) {
      if (!(sww(i, i) > 0)) throw DegenerateInput("constant conditioning column");
      scale(i) = 1.0 / std::sqrt(sww(i, i));
    }
    const Eigen::MatrixXd corr = scale.asDiagonal() * sww * scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < kRelativeVarianceFloor) {
      throw DegenerateInput("singular conditioning covariance");
    }
    const Eigen::MatrixXd scaled = scale.asDiagonal() * swa;
    const Eigen::MatrixXd reduced = scaled.transpose() * corr.ldlt().solve(scaled);
    sxx -= reduced(0, 0);
    syy -= reduced(1, 1);
    sxy -= reduced(0, 1);
  }
  if (sxx <= kRelativeVarianceFloor * vx || syy <= kRelativeVarianceFloor * vy) {
    throw DegenerateInput("column determined by the conditioning set");
  }
  return sxy / std::sqrt(sxx * syy);
}

double partial_correlation(const PooledDataset& data, int x, int y, VarSet w) {
  const VarSet cols = w | VarSet{x, y};
  if (!cols.subset_of(VarSet::first(data.cols()))) throw InputError("partial correlation column out of range");
  if (data.rows() <= static_cast<std::size_t>(w.size()) + 3) {
    throw DegenerateInput("too few samples for the conditioning set");
  }
  const std::vector<VarId> ids = cols.to_vector();
  std::vector<std::span<const double>> spans;
  for (VarId c : ids) spans.push_back(data.column(c));
  const std::vector<double> cov = kernels::covariance(spans);
  auto local = [&](VarId v) { return static_cast<int>(std::find(ids.begin(), ids.end(), v) - ids.begin()); };
  VarSet lw;
  w.for_each([&](VarId v) { lw.insert(local(v)); });
  return partial_correlation(cov, static_cast<int>(ids.size()), local(x), local(y), lw);
}

FisherResult fisher_z_test(double r, std::size_t n, int order, double alpha) {
  const double dof = static_cast<double>(n) - order - 3;
  if (!(dof > 0)) throw DegenerateInput("too few samples for a Fisher z test of this order");
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must be in (0, 1)");
  const double lim = 1.0 - kCorrelationClamp;
  r = std::clamp(r, -lim, lim);
  const double z = std::sqrt(dof) * std::atanh(r);
  const double p = std::erfc(std::abs(z) / std::sqrt(2.0));
  return {p, p > alpha};
}

double weight_frequentist(double p_value, double alpha, double max_weight) {
  if (!(p_value >= 0 && p_value <= 1)) throw InputError("p-value must be in [0, 1]");
  if (!(alpha > 0 && alpha < 1)) throw InputError("alpha must be in (0, 1)");
  if (p_value == 0) return max_weight;
  const double p = std::max(p_value, 1e-300);
  return std::min(std::abs(std::log(p) - std::log(alpha)), max_weight);
}

FisherZTest::FisherZTest(const PooledDataset& data) : n_(data.rows()), dim_(data.cols()) {
  if (n_ >= 2) {
    std::vector<std::span<const double>> spans;
    for (int c = 0; c < dim_; ++c) spans.push_back(data.column(c));
    cov_ = kernels::covariance(spans);
  }
}

double FisherZTest::correlation(int x, int y, VarSet w) const {
  if (n_ <= static_cast<std::size_t>(w.size()) + 3) {
    throw DegenerateInput("too few samples for the conditioning set");
  }
  return partial_correlation(cov_, dim_, x, y, w);
}

double FisherZTest::p_value(int x, int y, VarSet w) const {
  return fisher_z_test(correlation(x, y, w), n_, w.size()).p_value;
}

TestRun run_all_tests(const IndependenceTest& test, VarSet scope, int max_order, const TestOptions& opts) {
  if (!(opts.alpha > 0 && opts.alpha < 1)) throw InputError("alpha must be in (0, 1)");
  if (max_order < 0) throw InputError("max_order must be nonnegative");
  TestRun run;
  const std::vector<VarId> vars = scope.to_vector();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      const VarId x = vars[i];
      const VarId y = vars[j];
      for_each_subset_up_to(scope - VarSet{x, y}, max_order, [&](VarSet w) {
        try {
          const double p = test.p_value(x, y, w);
          WeightedStatement s;
          s.kind = p > opts.alpha ? WeightedStatement::Kind::Independent : WeightedStatement::Kind::Dependent;
          s.x = x;
          s.y = y;
          s.w = w;
          s.weight = weight_frequentist(p, opts.alpha, opts.max_weight);
          s.p_value = p;
          run.statements.push_back(s);
        } catch (const DegenerateInput& e) {
          run.skipped.push_back({x, y, w, e.what()});
        }
      });
    }
  }
  auto by_key = [](const auto& a, const auto& b) { return make_key(a.x, a.y, a.w) < make_key(b.x, b.y, b.w); };
  std::sort(run.statements.begin(), run.statements.end(), by_key);
  std::sort(run.skipped.begin(), run.skipped.end(), by_key);
  return run;
}

TestRun run_all_tests(const PooledDataset& data, VarSet scope, int max_order, const TestOptions& opts) {
  if (!scope.subset_of(VarSet::first(data.cols()))) throw InputError("test scope names a missing column");
  return run_all_tests(FisherZTest(data), scope, max_order, opts);
}

}  // namespace jci
