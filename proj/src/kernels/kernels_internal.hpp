#pragma once

#include "loadsched/kernels.hpp"

namespace loadsched::kernels::detail {

const KernelTable& scalar_table();
// nullptr when the variant was not compiled for this architecture.
const KernelTable* avx2_table();
const KernelTable* neon_table();

inline double combine(const double lanes[4]) { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }

}  // namespace loadsched::kernels::detail
