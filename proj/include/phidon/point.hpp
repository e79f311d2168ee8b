#pragma once

#include <vector>

namespace phidon {

/// Spatial point, 1 or 2 coordinates.
using Point = std::vector<double>;

}  // namespace phidon
