#pragma once

#include <cstdint>

#include "loadsched/scheduler.hpp"

namespace loadsched {

/// Small seeded problem for oracle checks: one to three fixed background
/// loads, one to three shiftable runs whose start windows hold at most 24
/// slots and overlap, and a tariff drawn from all four kinds.
Problem random_instance(std::uint64_t seed);

}  // namespace loadsched
