#pragma once

// Per-slot arithmetic kernels with a scalar reference and SIMD variants.
//
// Every reduction accumulates into four interleaved lanes (element i goes
// to lane i % 4) and combines them as (l0 + l1) + (l2 + l3). The AVX2 and
// NEON variants follow the same order without FMA, so all variants return
// bit-identical results and the optimizer's tie-breaking does not depend on
// the CPU it runs on.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace loadsched::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct ExcessSums {
  double over = 0.0;    // sum of max(0, x - limit)
  double within = 0.0;  // sum of x - max(0, x - limit)
};

struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum of (a*e + b)*e + c
  double (*quadratic)(const double* e, const double* a, const double* b, const double* c,
                      std::size_t n);
  // sum of low*min(e, threshold) + high*max(e - threshold, 0)
  double (*step)(const double* e, std::size_t n, double threshold, double low, double high);
  ExcessSums (*excess)(const double* x, const double* limit, std::size_t n);
  void (*scale)(const double* x, double factor, double* out, std::size_t n);
  void (*add_constant)(double* x, std::size_t n, double value);
  // earliest index of the maximum; 0 for n == 0
  std::size_t (*argmax)(const double* x, std::size_t n);
};

bool available(Isa isa);
const KernelTable& table(Isa isa);

/// Best ISA supported by this CPU, honoring force_isa().
Isa active_isa();
const KernelTable& active();
/// Pins dispatch to `isa` (must be available); nullopt restores detection.
void force_isa(std::optional<Isa> isa);

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline std::size_t argmax(std::span<const double> x) { return active().argmax(x.data(), x.size()); }

}  // namespace loadsched::kernels
