#pragma once

#include <string>

namespace ambig {

// "%.4f" — the fixed-point form used by every machine-readable report.
std::string fixed4(double value);

}  // namespace ambig
