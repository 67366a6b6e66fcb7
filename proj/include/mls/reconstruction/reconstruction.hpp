#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mls/billiard/billiard.hpp"

namespace mls {

/// The two known scatterers, in the normalized frame of the full table.
struct KnownPair {
  Scatterer d1, d2;
  const Scatterer& at(int i) const;
};

KnownPair known_pair(const BilliardTable& table);

/// One periodic orbit with a single collision on the unknown scatterer:
/// the points strictly between two visits and the full perimeter.
struct OrbitData {
  int n = 0;
  std::vector<PhasePoint> interior;  // x_1 .. x_{N-1}, each on D1 or D2
  BigFloat perimeter;
};

struct ReconstructedPoint {
  int n = 0;
  Vec2 point;
  BigFloat L31;  // distance from x_1 to the new point
  BigFloat error;
  /// |perimeter - re-summed length through point|
  BigFloat closure;
};

/// Point of the unknown scatterer hit by each orbit: the first interior
/// chord is mirrored back through the reflection law at x_1 for a length
/// (perimeter - interior chords) / 2.
std::vector<ReconstructedPoint> reconstruct_d3_points(const KnownPair& known, const std::vector<OrbitData>& orbits);

/// OrbitData of cyclicity1_orbit(table, n) for n in [n_lo, n_hi].
std::vector<OrbitData> cyclicity1_data(const BilliardTable& table, int n_lo, int n_hi);

enum class ArcModel { Circle, Conic };

struct ArcFit {
  ArcModel model = ArcModel::Circle;
  /// A x^2 + B x y + C y^2 + D x + E y + F = 0, normalized by A + C = 1
  std::array<BigFloat, 6> conic;
  Vec2 center;     // circle model only
  BigFloat radius;  // circle model only
  std::vector<BigFloat> residuals;  // first-order geometric distance per point
  BigFloat max_residual;
  BigFloat threshold;
  bool flagged = false;  // some residual exceeds threshold
};

/// Least-squares circle or conic through the points; residuals are compared
/// with `errors` (one per point, or empty for 10^-(P/2)) scaled by `slack`.
ArcFit fit_boundary_arc(const std::vector<Vec2>& points, ArcModel model = ArcModel::Circle,
                        const std::vector<BigFloat>& errors = {}, const BigFloat& slack = BigFloat(100));

/// Columns n, x, y, error, closure.
void write_points_csv(std::ostream& out, const std::vector<ReconstructedPoint>& points);

}  // namespace mls
