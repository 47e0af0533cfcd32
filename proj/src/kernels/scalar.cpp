// Reference kernels. Lane order and min/max operand order must match the
// SIMD variants exactly (minpd/maxpd return the second operand on ties).

#include "kernels_internal.hpp"

namespace loadsched::kernels::detail {
namespace {

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += x[i];
  return combine(acc);
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += x[i] * y[i];
  return combine(acc);
}

double quadratic(const double* e, const double* a, const double* b, const double* c, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % 4] += (a[i] * e[i] + b[i]) * e[i] + c[i];
  return combine(acc);
}

double step(const double* e, std::size_t n, double threshold, double low, double high) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double below = e[i] < threshold ? e[i] : threshold;
    const double diff = e[i] - threshold;
    const double above = diff > 0.0 ? diff : 0.0;
    acc[i % 4] += low * below + high * above;
  }
  return combine(acc);
}

ExcessSums excess(const double* x, const double* limit, std::size_t n) {
  double over[4] = {0.0, 0.0, 0.0, 0.0};
  double within[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = x[i] - limit[i];
    const double ex = diff > 0.0 ? diff : 0.0;
    over[i % 4] += ex;
    within[i % 4] += x[i] - ex;
  }
  return {combine(over), combine(within)};
}

void scale(const double* x, double factor, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * factor;
}

void add_constant(double* x, std::size_t n, double value) {
  for (std::size_t i = 0; i < n; ++i) x[i] += value;
}

std::size_t argmax(const double* x, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (x[i] > x[best]) best = i;
  return best;
}

constexpr KernelTable kScalar{Isa::scalar, sum, dot, quadratic, step, excess, scale, add_constant, argmax};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace loadsched::kernels::detail
