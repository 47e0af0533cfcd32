// AVX2 kernels: one __m256d holds the four accumulation lanes.

#include "kernels_internal.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define LOADSCHED_HAVE_AVX2_TU 1
#include <immintrin.h>
#endif

namespace loadsched::kernels::detail {

#ifdef LOADSCHED_HAVE_AVX2_TU
namespace {

#define LOADSCHED_AVX2 __attribute__((target("avx2")))

LOADSCHED_AVX2 inline void store_lanes(__m256d v, double lanes[4]) { _mm256_storeu_pd(lanes, v); }

LOADSCHED_AVX2 double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double lanes[4];
  store_lanes(acc, lanes);
  for (; i < n; ++i) lanes[i % 4] += x[i];
  return combine(lanes);
}

LOADSCHED_AVX2 double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double lanes[4];
  store_lanes(acc, lanes);
  for (; i < n; ++i) lanes[i % 4] += x[i] * y[i];
  return combine(lanes);
}

LOADSCHED_AVX2 double quadratic(const double* e, const double* a, const double* b, const double* c,
                                std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ev = _mm256_loadu_pd(e + i);
    __m256d v = _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(a + i), ev), _mm256_loadu_pd(b + i));
    v = _mm256_add_pd(_mm256_mul_pd(v, ev), _mm256_loadu_pd(c + i));
    acc = _mm256_add_pd(acc, v);
  }
  double lanes[4];
  store_lanes(acc, lanes);
  for (; i < n; ++i) lanes[i % 4] += (a[i] * e[i] + b[i]) * e[i] + c[i];
  return combine(lanes);
}

LOADSCHED_AVX2 double step(const double* e, std::size_t n, double threshold, double low, double high) {
  const __m256d th = _mm256_set1_pd(threshold);
  const __m256d lo = _mm256_set1_pd(low);
  const __m256d hi = _mm256_set1_pd(high);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ev = _mm256_loadu_pd(e + i);
    const __m256d below = _mm256_min_pd(ev, th);
    const __m256d above = _mm256_max_pd(_mm256_sub_pd(ev, th), zero);
    acc = _mm256_add_pd(acc, _mm256_add_pd(_mm256_mul_pd(lo, below), _mm256_mul_pd(hi, above)));
  }
  double lanes[4];
  store_lanes(acc, lanes);
  for (; i < n; ++i) {
    const double below = e[i] < threshold ? e[i] : threshold;
    const double diff = e[i] - threshold;
    const double above = diff > 0.0 ? diff : 0.0;
    lanes[i % 4] += low * below + high * above;
  }
  return combine(lanes);
}

LOADSCHED_AVX2 ExcessSums excess(const double* x, const double* limit, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d over = zero;
  __m256d within = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d ex = _mm256_max_pd(_mm256_sub_pd(xv, _mm256_loadu_pd(limit + i)), zero);
    over = _mm256_add_pd(over, ex);
    within = _mm256_add_pd(within, _mm256_sub_pd(xv, ex));
  }
  double o[4], w[4];
  store_lanes(over, o);
  store_lanes(within, w);
  for (; i < n; ++i) {
    const double diff = x[i] - limit[i];
    const double ex = diff > 0.0 ? diff : 0.0;
    o[i % 4] += ex;
    w[i % 4] += x[i] - ex;
  }
  return {combine(o), combine(w)};
}

LOADSCHED_AVX2 void scale(const double* x, double factor, double* out, std::size_t n) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
  for (; i < n; ++i) out[i] = x[i] * factor;
}

LOADSCHED_AVX2 void add_constant(double* x, std::size_t n, double value) {
  const __m256d v = _mm256_set1_pd(value);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), v));
  for (; i < n; ++i) x[i] += value;
}

LOADSCHED_AVX2 std::size_t argmax(const double* x, std::size_t n) {
  if (n == 0) return 0;
  double best = x[0];
  std::size_t i = 0;
  if (n >= 4) {
    __m256d m = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
    double lanes[4];
    store_lanes(m, lanes);
    best = lanes[0];
    for (double v : lanes) best = v > best ? v : best;
  }
  for (; i < n; ++i) best = x[i] > best ? x[i] : best;
  std::size_t k = 0;
  while (x[k] != best) ++k;
  return k;
}

#undef LOADSCHED_AVX2

constexpr KernelTable kAvx2{Isa::avx2, sum, dot, quadratic, step, excess, scale, add_constant, argmax};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace loadsched::kernels::detail
