#pragma once

#include <utility>
#include <vector>

#include "mls/numerics/bigfloat.hpp"

namespace mls {

/// n-point Gauss-Legendre rule on [-1, 1] at the working precision.
/// Nodes by Newton iteration on the three-term recurrence.
inline std::pair<std::vector<BigFloat>, std::vector<BigFloat>> gauss_legendre(int n) {
  std::vector<BigFloat> nodes(n), weights(n);
  const BigFloat eps = pow10_neg(static_cast<int>(working_precision()) - 2);
  const BigFloat pi_v = pi();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    BigFloat x = cos(pi_v * (BigFloat(i) + BigFloat("0.75")) / (BigFloat(n) + BigFloat("0.5")));
    BigFloat dp = 0;
    for (int it = 0; it < 100; ++it) {
      BigFloat p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        BigFloat p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      BigFloat step = p1 / dp;
      x -= step;
      if (abs(step) < eps) break;
    }
    BigFloat p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      BigFloat p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
  return {nodes, weights};
}

}  // namespace mls
