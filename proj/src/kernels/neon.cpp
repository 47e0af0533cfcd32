// NEON kernels for AArch64. A float64x2_t holds two lanes, so two registers
// carry lanes {0,1} and {2,3}.

#include "kernels_internal.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#define LOADSCHED_HAVE_NEON_TU 1
#include <arm_neon.h>
#endif

namespace loadsched::kernels::detail {

#ifdef LOADSCHED_HAVE_NEON_TU
namespace {

inline void store_lanes(float64x2_t lo, float64x2_t hi, double lanes[4]) {
  vst1q_f64(lanes, lo);
  vst1q_f64(lanes + 2, hi);
}

double sum(const double* x, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(x + i));
    hi = vaddq_f64(hi, vld1q_f64(x + i + 2));
  }
  double lanes[4];
  store_lanes(lo, hi, lanes);
  for (; i < n; ++i) lanes[i % 4] += x[i];
  return combine(lanes);
}

double dot(const double* x, const double* y, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2)));
  }
  double lanes[4];
  store_lanes(lo, hi, lanes);
  for (; i < n; ++i) lanes[i % 4] += x[i] * y[i];
  return combine(lanes);
}

inline float64x2_t quad2(const double* e, const double* a, const double* b, const double* c) {
  const float64x2_t ev = vld1q_f64(e);
  float64x2_t v = vaddq_f64(vmulq_f64(vld1q_f64(a), ev), vld1q_f64(b));
  return vaddq_f64(vmulq_f64(v, ev), vld1q_f64(c));
}

double quadratic(const double* e, const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, quad2(e + i, a + i, b + i, c + i));
    hi = vaddq_f64(hi, quad2(e + i + 2, a + i + 2, b + i + 2, c + i + 2));
  }
  double lanes[4];
  store_lanes(lo, hi, lanes);
  for (; i < n; ++i) lanes[i % 4] += (a[i] * e[i] + b[i]) * e[i] + c[i];
  return combine(lanes);
}

inline float64x2_t step2(const double* e, float64x2_t th, float64x2_t lo, float64x2_t hi) {
  const float64x2_t ev = vld1q_f64(e);
  // vbsl keeps the x86 operand convention: e < th ? e : th, diff > 0 ? diff : 0
  const float64x2_t below = vbslq_f64(vcltq_f64(ev, th), ev, th);
  const float64x2_t diff = vsubq_f64(ev, th);
  const float64x2_t above = vbslq_f64(vcgtq_f64(diff, vdupq_n_f64(0.0)), diff, vdupq_n_f64(0.0));
  return vaddq_f64(vmulq_f64(lo, below), vmulq_f64(hi, above));
}

double step(const double* e, std::size_t n, double threshold, double low, double high) {
  const float64x2_t th = vdupq_n_f64(threshold), lo_rate = vdupq_n_f64(low), hi_rate = vdupq_n_f64(high);
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, step2(e + i, th, lo_rate, hi_rate));
    hi = vaddq_f64(hi, step2(e + i + 2, th, lo_rate, hi_rate));
  }
  double lanes[4];
  store_lanes(lo, hi, lanes);
  for (; i < n; ++i) {
    const double below = e[i] < threshold ? e[i] : threshold;
    const double diff = e[i] - threshold;
    const double above = diff > 0.0 ? diff : 0.0;
    lanes[i % 4] += low * below + high * above;
  }
  return combine(lanes);
}

ExcessSums excess(const double* x, const double* limit, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t over[2] = {zero, zero}, within[2] = {zero, zero};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int h = 0; h < 2; ++h) {
      const float64x2_t xv = vld1q_f64(x + i + 2 * h);
      const float64x2_t diff = vsubq_f64(xv, vld1q_f64(limit + i + 2 * h));
      const float64x2_t ex = vbslq_f64(vcgtq_f64(diff, zero), diff, zero);
      over[h] = vaddq_f64(over[h], ex);
      within[h] = vaddq_f64(within[h], vsubq_f64(xv, ex));
    }
  }
  double o[4], w[4];
  store_lanes(over[0], over[1], o);
  store_lanes(within[0], within[1], w);
  for (; i < n; ++i) {
    const double diff = x[i] - limit[i];
    const double ex = diff > 0.0 ? diff : 0.0;
    o[i % 4] += ex;
    w[i % 4] += x[i] - ex;
  }
  return {combine(o), combine(w)};
}

void scale(const double* x, double factor, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_n_f64(vld1q_f64(x + i), factor));
  for (; i < n; ++i) out[i] = x[i] * factor;
}

void add_constant(double* x, std::size_t n, double value) {
  const float64x2_t v = vdupq_n_f64(value);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vaddq_f64(vld1q_f64(x + i), v));
  for (; i < n; ++i) x[i] += value;
}

std::size_t argmax(const double* x, std::size_t n) {
  if (n == 0) return 0;
  double best = x[0];
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t m = vld1q_f64(x);
    for (i = 2; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(x + i));
    best = vmaxvq_f64(m);
  }
  for (; i < n; ++i) best = x[i] > best ? x[i] : best;
  std::size_t k = 0;
  while (x[k] != best) ++k;
  return k;
}

constexpr KernelTable kNeon{Isa::neon, sum, dot, quadratic, step, excess, scale, add_constant, argmax};

}  // namespace

const KernelTable* neon_table() { return &kNeon; }

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace loadsched::kernels::detail
