#include "ambig/format.hpp"

#include <cstdio>

namespace ambig {

std::string fixed4(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

}  // namespace ambig
