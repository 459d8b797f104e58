#include "harmotop/count.hpp"

#include <algorithm>

namespace harmotop {

std::string to_string(Count value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  // Work with the negative magnitude so the minimum value is representable.
  Count v = negative ? value : -value;
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' - static_cast<int>(v % 10)));
    v /= 10;
  }
  if (negative) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

double to_double(Count value) { return static_cast<double>(value); }

}  // namespace harmotop
