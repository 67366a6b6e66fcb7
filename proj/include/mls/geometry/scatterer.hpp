#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mls/geometry/vec2.hpp"
#include "mls/numerics/jet.hpp"

namespace mls {

enum class ScattererKind { Circle, Ellipse, Fourier };

std::string to_string(ScattererKind kind);

/// Rigid motion x -> R(angle) * (reflect ? diag(-1, 1) x : x) + shift.
struct Isometry {
  BigFloat angle{0};
  bool reflect = false;
  Vec2 shift;

  Vec2 apply(const Vec2& p) const;
  Vec2 apply_linear(const Vec2& v) const;
  /// this after other
  Isometry after(const Isometry& other) const;
  Isometry inverse() const;
};

struct BoundaryPoint {
  BigFloat theta;  // angle of the outward normal
  Vec2 point;
  Vec2 tangent;  // counter-clockwise unit tangent
  Vec2 normal;   // outward unit normal of the scatterer, pointing into the table
  BigFloat curvature;
};

struct ArcTable;

/// Analytic strictly convex closed curve described by its support function
/// h(theta). The boundary point with outward normal n(theta) = (cos, sin) is
/// h n + h' t with t = (-sin, cos); the radius of curvature is h + h''.
///
/// Arc length s is measured counter-clockwise from the point with normal
/// angle theta_origin() and reported in [-perimeter/2, perimeter/2).
class Scatterer {
 public:
  Scatterer() = default;
  static Scatterer circle(const Vec2& center, const BigFloat& radius);
  /// Semi-axes a, b; the a-axis is rotated by angle from the x-axis.
  static Scatterer ellipse(const Vec2& center, const BigFloat& a, const BigFloat& b, const BigFloat& angle);
  /// h(theta) = radius + sum_k (cos_k cos k theta + sin_k sin k theta) around center.
  /// Index k of the vectors is the harmonic; entries 0 and 1 must be zero.
  static Scatterer fourier(const Vec2& center, const BigFloat& radius, std::vector<BigFloat> cos_coeffs,
                           std::vector<BigFloat> sin_coeffs);

  ScattererKind kind() const { return kind_; }
  const BigFloat& perimeter() const { return perimeter_; }
  const BigFloat& theta_origin() const { return theta_origin_; }

  Scatterer transformed(const Isometry& g) const;
  Scatterer with_origin(const BigFloat& theta) const;

  BigFloat support(const BigFloat& theta) const;
  /// Taylor polynomial of h(theta + x) in x.
  Jet1<BigFloat> support_jet(const BigFloat& theta, int order) const;
  /// Radius of curvature h + h''.
  BigFloat radius_of_curvature(const BigFloat& theta) const;

  BoundaryPoint at_angle(const BigFloat& theta) const;
  /// Arc length from the origin to theta, not reduced.
  BigFloat arc_length(const BigFloat& theta) const;
  /// Normal angle of the point at arc length s (any real s).
  BigFloat angle_at(const BigFloat& s) const;
  BigFloat reduce_arc(const BigFloat& s) const;
  BoundaryPoint eval(const BigFloat& s) const;

  /// Smallest radius of curvature over a dense sample; positive for convex input.
  BigFloat min_radius_of_curvature(int samples = 4096) const;

  // Parameters in the scatterer's own frame, for reporting.
  const BigFloat& radius() const { return r_; }
  const BigFloat& semi_a() const { return a_; }
  const BigFloat& semi_b() const { return b_; }
  Vec2 center() const { return t_; }

 private:
  template <class X>
  X base_support(const X& phi) const;
  BigFloat base_rho(const BigFloat& phi) const;
  BigFloat base_arc(const BigFloat& phi) const;
  BigFloat phi_of(const BigFloat& theta) const { return sigma_ * theta + beta_; }
  void finish();

  ScattererKind kind_ = ScattererKind::Circle;
  BigFloat r_{0}, a_{0}, b_{0};
  std::vector<BigFloat> ck_, dk_;
  int sigma_ = 1;
  BigFloat beta_{0};
  Vec2 t_;
  BigFloat theta_origin_{0};
  BigFloat perimeter_{0};
  std::shared_ptr<const ArcTable> arc_;
};

}  // namespace mls
