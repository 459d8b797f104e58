#pragma once

#include <string>

namespace harmotop {

// Eigenvalue counts with multiplicity. Counts of order lambda^{-4} overflow
// 64 bits at lambda = 1e-5, so a 128-bit integer is used throughout.
__extension__ using Count = __int128;

std::string to_string(Count value);
double to_double(Count value);

}  // namespace harmotop
