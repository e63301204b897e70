#pragma once

#include "twsense/kernels.hpp"

namespace twsense::simd::detail {

extern const KernelTable kScalarTable;
#ifdef TWSENSE_HAVE_AVX2
extern const KernelTable kAvx2Table;
#endif

}  // namespace twsense::simd::detail
