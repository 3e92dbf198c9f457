#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jci/kernels.hpp"

using namespace jci;

namespace {

std::vector<double> random_column(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(3.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)) * 8; }

// Restores the dispatched ISA when a test body exits.
struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar is always available") {
  const auto isas = kernels::available_isas();
  CHECK(std::find(isas.begin(), isas.end(), kernels::Isa::Scalar) != isas.end());
}

TEST_CASE("every available ISA agrees with the scalar reference") {
  std::mt19937_64 rng(11);
  IsaGuard guard;
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 33u, 500u, 1001u}) {
    const auto a = random_column(rng, n);
    const auto b = random_column(rng, n);
    const double ref_sum = kernels::scalar::sum(a);
    const double ref_dot = kernels::scalar::centered_dot(a, 1.5, b, -0.25);
    for (auto isa : kernels::available_isas()) {
      CAPTURE(kernels::to_string(isa));
      CAPTURE(n);
      kernels::set_active_isa(isa);
      CHECK(close(kernels::sum(a), ref_sum));
      CHECK(close(kernels::centered_dot(a, 1.5, b, -0.25), ref_dot));
    }
  }
}

TEST_CASE("covariance matches a two-pass reference on every ISA") {
  std::mt19937_64 rng(5);
  IsaGuard guard;
  const std::size_t n = 257;
  std::vector<std::vector<double>> cols;
  for (int k = 0; k < 4; ++k) cols.push_back(random_column(rng, n));
  std::vector<std::span<const double>> spans(cols.begin(), cols.end());

  std::vector<double> mean(4, 0.0);
  for (int k = 0; k < 4; ++k) {
    for (double x : cols[k]) mean[k] += x;
    mean[k] /= n;
  }
  for (auto isa : kernels::available_isas()) {
    kernels::set_active_isa(isa);
    const auto cov = kernels::covariance(spans);
    REQUIRE(cov.size() == 16);
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += (cols[r][i] - mean[r]) * (cols[c][i] - mean[c]);
        CHECK(close(cov[r * 4 + c], s / (n - 1)));
      }
    }
  }
}

TEST_CASE("covariance rejects ragged or short input") {
  std::vector<double> a{1, 2, 3};
  std::vector<double> b{1, 2};
  std::vector<std::span<const double>> ragged{a, b};
  CHECK_THROWS(kernels::covariance(ragged));
  std::vector<double> one{1};
  std::vector<std::span<const double>> short_cols{one};
  CHECK_THROWS(kernels::covariance(short_cols));
}
