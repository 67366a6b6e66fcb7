#pragma once

#include <vector>

#include "mls/billiard/billiard.hpp"

namespace mls {

/// Cyclic word over {1, 2, 3} with no equal neighbours.
using Coding = std::vector<int>;

void validate_coding(const Coding& coding);
/// 3 (12)^{m-1} 1 3 (12)^{n-1} 1
Coding cyclicity2_coding(int m, int n);
/// 3 (12)^{n-1} 1
Coding cyclicity1_coding(int n);

struct PeriodicOrbit {
  Coding coding;
  std::vector<PhasePoint> points;
  BigFloat perimeter;
  /// max |dW/ds_k| of the length functional at the solution
  BigFloat residual;
  std::vector<BigFloat> residual_history;
};

/// Critical point of W(s) = sum_k L(s_k, s_{k+1}) for the coding, by Newton
/// with a cyclic tridiagonal Hessian. initial_theta seeds the normal angles.
PeriodicOrbit solve_periodic(const BilliardTable& table, const Coding& coding,
                             const std::vector<BigFloat>& initial_theta = {});

/// x_0 and x_{2m} lie on D3; x_m and x_{2m+n} are perpendicular bounces.
PeriodicOrbit cyclicity2_orbit(const BilliardTable& table, int m, int n);
/// x_0 on D3; x_0 and x_n are perpendicular bounces.
PeriodicOrbit cyclicity1_orbit(const BilliardTable& table, int n);

/// The 2-periodic orbit (1, 2) and the contraction rate lambda of F at it:
/// lambda^2 is the smaller eigenvalue modulus of DF^2.
struct TwoPeriodic {
  PeriodicOrbit orbit;
  Matrix2 dF2;  // D(F o F) at the point on D1
  BigFloat lambda;
};
TwoPeriodic two_periodic(const BilliardTable& table);

/// x_k^inf for |k| <= range, as the limit of x_k^{m,m} accelerated by Aitken
/// extrapolation in m.
struct HomoclinicOrbit {
  int range = 0;
  int m_used = 0;
  std::vector<PhasePoint> points;  // index k + range
  std::vector<BigFloat> error;     // estimate for |s| and |r| together
  const PhasePoint& at(int k) const { return points.at(k + range); }
  const BigFloat& error_at(int k) const { return error.at(k + range); }
};
HomoclinicOrbit homoclinic_orbit(const BilliardTable& table, int range);

}  // namespace mls
