#include <atomic>

#include "kernels_internal.hpp"
#include "loadsched/errors.hpp"

namespace loadsched::kernels {
namespace {

// -1: auto-detect
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (detail::avx2_table() && cpu_has_avx2()) return Isa::avx2;
  if (detail::neon_table()) return Isa::neon;
  return Isa::scalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) throw DomainError("kernel variant not available: " + std::string(to_string(isa)));
  switch (isa) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    case Isa::scalar: break;
  }
  return detail::scalar_table();
}

Isa active_isa() {
  static const Isa detected = detect();
  const int forced = g_forced.load(std::memory_order_relaxed);
  return forced >= 0 ? static_cast<Isa>(forced) : detected;
}

const KernelTable& active() {
  switch (active_isa()) {
    case Isa::avx2: return *detail::avx2_table();
    case Isa::neon: return *detail::neon_table();
    case Isa::scalar: break;
  }
  return detail::scalar_table();
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !available(*isa))
    throw DomainError("kernel variant not available: " + std::string(to_string(*isa)));
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

}  // namespace loadsched::kernels
