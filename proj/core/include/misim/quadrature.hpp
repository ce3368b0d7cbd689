#pragma once

#include <vector>

namespace misim {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached, thread-safe).
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace misim
