#include "trsp/units.hpp"

#include <cstdio>

namespace trsp {

std::string format_cost_gb(Cost c) {
  const bool neg = c < 0;
  const Cost a = neg ? -c : c;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%05lld", neg ? "-" : "",
                static_cast<long long>(a / kCostPerGb),
                static_cast<long long>(a % kCostPerGb));
  return buf;
}

}  // namespace trsp
