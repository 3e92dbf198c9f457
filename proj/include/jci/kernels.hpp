#pragma once

// Data-parallel arithmetic used by the statistics layer. Every kernel has a
// scalar reference implementation and, where the CPU allows it, a vectorised
// variant; `active_isa()` picks the widest one available at startup.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace jci::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

/// ISAs compiled into this binary and supported by the running CPU.
std::vector<Isa> available_isas();
Isa active_isa();
/// Overrides dispatch (tests and benchmarks). Throws if `isa` is unavailable.
void set_active_isa(Isa isa);

/// Sum of a[i].
double sum(std::span<const double> a);
/// Sum of (a[i] - ma) * (b[i] - mb).
double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb);

/// Sample covariance (divisor n - 1) of equally long columns, row-major k x k.
std::vector<double> covariance(std::span<const std::span<const double>> columns);

namespace scalar {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb);
}  // namespace scalar

#if defined(JCI_HAVE_AVX2)
namespace avx2 {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb);
}  // namespace avx2
#endif

#if defined(JCI_HAVE_NEON)
namespace neon {
double sum(std::span<const double> a);
double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb);
}  // namespace neon
#endif

}  // namespace jci::kernels
