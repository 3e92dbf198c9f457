#include "jci/kernels.hpp"

namespace jci::kernels::scalar {

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

double centered_dot(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

}  // namespace jci::kernels::scalar
