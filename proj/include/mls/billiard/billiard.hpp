#pragma once

#include <array>
#include <optional>

#include "mls/geometry/table.hpp"

namespace mls {

/// Point of the collision space: scatterer i (1-based), arc length s, and
/// r = T . v, the tangential component of the outgoing unit velocity.
struct PhasePoint {
  int i = 1;
  BigFloat s{0};
  BigFloat r{0};
};

using Matrix2 = std::array<std::array<BigFloat, 2>, 2>;

/// Outgoing unit velocity at x.
Vec2 velocity(const BilliardTable& table, const PhasePoint& x);

/// Next collision, or nullopt when the ray escapes. Throws TangencyError on a
/// grazing hit.
std::optional<PhasePoint> collide(const BilliardTable& table, const PhasePoint& x);
/// Same, but throws ConvergenceError on escape.
PhasePoint collide_or_throw(const BilliardTable& table, const PhasePoint& x);
PhasePoint collide_inverse(const BilliardTable& table, const PhasePoint& x);

inline PhasePoint involution(const PhasePoint& x) { return {x.i, x.s, -x.r}; }

/// Second derivatives of L(s, s') = |gamma_j(s') - gamma_i(s)| at the chord x -> y.
struct ChordHessian {
  BigFloat length, l_ss, l_sy, l_yy;
};
ChordHessian chord_hessian(const BoundaryPoint& a, const BoundaryPoint& b);
ChordHessian chord_hessian(const BilliardTable& table, int i, const BigFloat& s, int j, const BigFloat& sy);

/// D F at x in (s, r) coordinates.
Matrix2 jacobian(const BilliardTable& table, const PhasePoint& x);

/// Taylor expansion of (ds, dr) -> F(x + (ds, dr)) - F(x) to order K, with
/// the image on the scatterer F(x) lands on.
struct CollisionJet {
  PhasePoint image;
  Jet2Map<BigFloat> map;
};
CollisionJet collision_jet(const BilliardTable& table, const PhasePoint& x, int order);

/// Jet of the inverse map at x, built from the forward jet at F^{-1}(x).
CollisionJet collision_jet_inverse(const BilliardTable& table, const PhasePoint& x, int order);

}  // namespace mls
