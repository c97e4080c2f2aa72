#pragma once

#include <vector>

namespace delayfield {

struct QuadratureNode {
  double node;
  double weight;
};

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
std::vector<QuadratureNode> gauss_legendre(int n);

}  // namespace delayfield
