#include "delayfield/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace delayfield {

// Nodes via Newton iteration on P_n with the asymptotic cosine initial guess.
std::vector<QuadratureNode> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  std::vector<QuadratureNode> out(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[i] = {-x, w};
    out[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) out[n / 2].node = 0.0;
  return out;
}

}  // namespace delayfield
