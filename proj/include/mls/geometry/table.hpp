#pragma once

#include <array>
#include <optional>

#include "mls/geometry/scatterer.hpp"

namespace mls {

/// Line {x : x . normal = offset}.
struct Line {
  Vec2 normal;
  BigFloat offset;
};

struct NonEclipseReport {
  bool ok = false;
  /// min over directions of the gap between the slab of line offsets
  /// common to all three scatterers; positive iff no line meets all three.
  BigFloat margin;
  std::optional<Line> witness;  // a line through all three when !ok
};

/// Three scatterers in the normalized frame: gamma_1(0) = (0, l0/2),
/// gamma_2(0) = (0, -l0/2) realize the distance between D1 and D2, and D3 lies
/// in x > 0. Scatterer indices are 1-based in the public API.
class BilliardTable {
 public:
  const Scatterer& scatterer(int i) const { return sc_.at(i - 1); }
  const std::array<Scatterer, 3>& scatterers() const { return sc_; }
  const BigFloat& l0() const { return l0_; }
  /// Isometry taking the input coordinates to the normalized frame.
  const Isometry& frame() const { return frame_; }

  BoundaryPoint eval(int i, const BigFloat& s) const { return scatterer(i).eval(s); }

 private:
  friend BilliardTable normalize_frame(const std::array<Scatterer, 3>& scatterers);
  std::array<Scatterer, 3> sc_;
  BigFloat l0_;
  Isometry frame_;
};

/// Separation of two convex bodies along the best direction; the distance
/// between them when positive. theta is the outward normal angle of the first
/// body at its closest point.
struct Separation {
  BigFloat distance;
  BigFloat theta;
};

Separation separation(const Scatterer& a, const Scatterer& b);

BilliardTable normalize_frame(const std::array<Scatterer, 3>& scatterers);

BigFloat chord_length(const BilliardTable& table, int i, const BigFloat& s, int j, const BigFloat& s2);

NonEclipseReport check_non_eclipse(const std::array<Scatterer, 3>& scatterers);
inline NonEclipseReport check_non_eclipse(const BilliardTable& table) { return check_non_eclipse(table.scatterers()); }

/// Unit circles centered at (0, 2), (0, -2), (6, 0).
BilliardTable reference_table();

}  // namespace mls
