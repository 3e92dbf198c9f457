#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <string>

#include "jci/kernels.hpp"

namespace jci::kernels {

namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(JCI_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(JCI_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (cpu_has(Isa::Avx2)) return Isa::Avx2;
  if (cpu_has(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (cpu_has(isa)) out.push_back(isa);
  }
  return out;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!cpu_has(isa)) throw std::invalid_argument("ISA " + std::string(to_string(isa)) + " unavailable");
  current().store(isa, std::memory_order_relaxed);
}

double sum(std::span<const double> a) {
  switch (active_isa()) {
#if defined(JCI_HAVE_AVX2)
    case Isa::Avx2: return avx2::sum(a);
#endif
#if defined(JCI_HAVE_NEON)
    case Isa::Neon: return neon::sum(a);
#endif
    default: return scalar::sum(a);
  }
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  if (a.size() != b.size()) throw std::invalid_argument("centered_dot: length mismatch");
  switch (active_isa()) {
#if defined(JCI_HAVE_AVX2)
    case Isa::Avx2: return avx2::centered_dot(a, ma, b, mb);
#endif
#if defined(JCI_HAVE_NEON)
    case Isa::Neon: return neon::centered_dot(a, ma, b, mb);
#endif
    default: return scalar::centered_dot(a, ma, b, mb);
  }
}

std::vector<double> covariance(std::span<const std::span<const double>> columns) {
  const std::size_t k = columns.size();
  std::vector<double> out(k * k, 0.0);
  if (k == 0) return out;
  const std::size_t n = columns[0].size();
  for (const auto& c : columns) {
    if (c.size() != n) throw std::invalid_argument("covariance: ragged columns");
  }
  if (n < 2) throw std::invalid_argument("covariance: need at least two rows");
  std::vector<double> mean(k);
  for (std::size_t i = 0; i < k; ++i) mean[i] = sum(columns[i]) / static_cast<double>(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      const double c = centered_dot(columns[i], mean[i], columns[j], mean[j]) / denom;
      out[i * k + j] = c;
      out[j * k + i] = c;
    }
  }
  return out;
}

}  // namespace jci::kernels
