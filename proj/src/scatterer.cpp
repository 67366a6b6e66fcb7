#include "mls/geometry/scatterer.hpp"

#include "mls/errors.hpp"
#include "mls/numerics/quadrature.hpp"

namespace mls {

std::string to_string(ScattererKind kind) {
  switch (kind) {
    case ScattererKind::Circle:
      return "circle";
    case ScattererKind::Ellipse:
      return "ellipse";
    case ScattererKind::Fourier:
      return "fourier";
  }
  return "unknown";
}

Vec2 Isometry::apply_linear(const Vec2& v) const {
  Vec2 w = reflect ? Vec2(-v.x, v.y) : v;
  BigFloat c = cos(angle), s = sin(angle);
  return {c * w.x - s * w.y, s * w.x + c * w.y};
}

Vec2 Isometry::apply(const Vec2& p) const { return apply_linear(p) + shift; }

Isometry Isometry::after(const Isometry& other) const {
  Isometry r;
  r.angle = reflect ? BigFloat(angle - other.angle) : BigFloat(angle + other.angle);
  r.reflect = reflect != other.reflect;
  r.shift = apply(other.shift);
  return r;
}

Isometry Isometry::inverse() const {
  Isometry r;
  r.reflect = reflect;
  r.angle = reflect ? angle : BigFloat(-angle);
  r.shift = -r.apply_linear(shift);
  return r;
}

// Cumulative integrals of the base radius of curvature on a uniform grid.
struct ArcTable {
  BigFloat step;
  std::vector<BigFloat> cumulative;  // size anchors + 1
  std::vector<BigFloat> nodes, weights;
};

namespace {
constexpr int kArcAnchors = 4096;
constexpr int kConvexitySamples = 4096;
}  // namespace

template <class X>
X Scatterer::base_support(const X& phi) const {
  switch (kind_) {
    case ScattererKind::Circle:
      return phi * BigFloat(0) + r_;
    case ScattererKind::Ellipse: {
      X c = cos(phi);
      X s = sin(phi);
      X q = c * c * BigFloat(a_ * a_) + s * s * BigFloat(b_ * b_);
      return sqrt(q);
    }
    case ScattererKind::Fourier: {
      X out = phi * BigFloat(0) + r_;
      for (std::size_t k = 2; k < ck_.size(); ++k) {
        X kp = phi * BigFloat(static_cast<int>(k));
        if (ck_[k] != 0) out = out + cos(kp) * ck_[k];
        if (dk_[k] != 0) out = out + sin(kp) * dk_[k];
      }
      return out;
    }
  }
  return phi;
}

BigFloat Scatterer::base_rho(const BigFloat& phi) const {
  switch (kind_) {
    case ScattererKind::Circle:
      return r_;
    case ScattererKind::Ellipse: {
      BigFloat h = base_support(phi);
      return a_ * a_ * b_ * b_ / (h * h * h);
    }
    case ScattererKind::Fourier: {
      BigFloat out = r_;
      for (std::size_t k = 2; k < ck_.size(); ++k) {
        BigFloat f = BigFloat(1) - BigFloat(static_cast<int>(k * k));
        BigFloat kp = phi * static_cast<int>(k);
        out += f * (ck_[k] * cos(kp) + dk_[k] * sin(kp));
      }
      return out;
    }
  }
  return r_;
}

// Antiderivative of base_rho with value 0 at phi = 0.
BigFloat Scatterer::base_arc(const BigFloat& phi) const {
  switch (kind_) {
    case ScattererKind::Circle:
      return r_ * phi;
    case ScattererKind::Fourier: {
      BigFloat out = r_ * phi;
      for (std::size_t k = 2; k < ck_.size(); ++k) {
        BigFloat f = (BigFloat(1) - BigFloat(static_cast<int>(k * k))) / static_cast<int>(k);
        BigFloat kp = phi * static_cast<int>(k);
        out += f * (ck_[k] * sin(kp) - dk_[k] * cos(kp) + dk_[k]);
      }
      return out;
    }
    case ScattererKind::Ellipse: {
      const ArcTable& t = *arc_;
      const BigFloat two_pi = 2 * pi();
      BigFloat turns = floor(phi / two_pi);
      BigFloat rem = phi - turns * two_pi;
      int j = static_cast<int>(floor(rem / t.step));
      j = std::clamp(j, 0, kArcAnchors - 1);
      BigFloat lo = t.step * j;
      BigFloat half = (rem - lo) / 2, mid = lo + half;
      BigFloat partial = 0;
      for (std::size_t q = 0; q < t.nodes.size(); ++q) partial += t.weights[q] * base_rho(mid + half * t.nodes[q]);
      return turns * t.cumulative.back() + t.cumulative[j] + half * partial;
    }
  }
  return phi;
}

void Scatterer::finish() {
  if (kind_ == ScattererKind::Ellipse && !arc_) {
    auto table = std::make_shared<ArcTable>();
    int n = static_cast<int>(working_precision()) / 4 + 6;
    auto [nodes, weights] = gauss_legendre(n);
    table->nodes = nodes;
    table->weights = weights;
    table->step = 2 * pi() / kArcAnchors;
    table->cumulative.assign(kArcAnchors + 1, BigFloat(0));
    BigFloat half = table->step / 2;
    for (int j = 0; j < kArcAnchors; ++j) {
      BigFloat mid = table->step * j + half;
      BigFloat part = 0;
      for (int q = 0; q < n; ++q) part += weights[q] * base_rho(mid + half * nodes[q]);
      table->cumulative[j + 1] = table->cumulative[j] + half * part;
    }
    arc_ = table;
  }
  if (kind_ == ScattererKind::Ellipse)
    perimeter_ = arc_->cumulative.back();
  else
    perimeter_ = base_arc(2 * pi());
  if (!(min_radius_of_curvature(kConvexitySamples) > 0)) throw GeometryError("scatterer is not strictly convex");
}

Scatterer Scatterer::circle(const Vec2& center, const BigFloat& radius) {
  if (!(radius > 0)) throw GeometryError("circle radius must be positive");
  Scatterer sc;
  sc.kind_ = ScattererKind::Circle;
  sc.r_ = radius;
  sc.t_ = center;
  sc.finish();
  return sc;
}

Scatterer Scatterer::ellipse(const Vec2& center, const BigFloat& a, const BigFloat& b, const BigFloat& angle) {
  if (!(a > 0) || !(b > 0)) throw GeometryError("ellipse semi-axes must be positive");
  Scatterer sc;
  sc.kind_ = ScattererKind::Ellipse;
  sc.a_ = a;
  sc.b_ = b;
  sc.beta_ = -angle;
  sc.t_ = center;
  sc.finish();
  return sc;
}

Scatterer Scatterer::fourier(const Vec2& center, const BigFloat& radius, std::vector<BigFloat> cos_coeffs,
                             std::vector<BigFloat> sin_coeffs) {
  std::size_t n = std::max<std::size_t>({cos_coeffs.size(), sin_coeffs.size(), 2});
  cos_coeffs.resize(n, BigFloat(0));
  sin_coeffs.resize(n, BigFloat(0));
  for (std::size_t k = 0; k < 2; ++k)
    if (cos_coeffs[k] != 0 || sin_coeffs[k] != 0)
      throw GeometryError("fourier scatterer: harmonics 0 and 1 belong in radius and center");
  Scatterer sc;
  sc.kind_ = ScattererKind::Fourier;
  sc.r_ = radius;
  sc.ck_ = std::move(cos_coeffs);
  sc.dk_ = std::move(sin_coeffs);
  sc.t_ = center;
  sc.finish();
  return sc;
}

Scatterer Scatterer::transformed(const Isometry& g) const {
  Scatterer sc = *this;
  if (g.reflect) {
    sc.beta_ = beta_ + sigma_ * (pi() + g.angle);
    sc.sigma_ = -sigma_;
    sc.theta_origin_ = pi() - theta_origin_ + g.angle;
  } else {
    sc.beta_ = beta_ - sigma_ * g.angle;
    sc.theta_origin_ = theta_origin_ + g.angle;
  }
  sc.t_ = g.apply(t_);
  return sc;
}

Scatterer Scatterer::with_origin(const BigFloat& theta) const {
  Scatterer sc = *this;
  sc.theta_origin_ = theta;
  return sc;
}

BigFloat Scatterer::support(const BigFloat& theta) const {
  return base_support(phi_of(theta)) + t_.x * cos(theta) + t_.y * sin(theta);
}

Jet1<BigFloat> Scatterer::support_jet(const BigFloat& theta, int order) const {
  Jet1<BigFloat> phi = Jet1<BigFloat>::variable(order, 0, phi_of(theta));
  if (order >= 1) phi[1] = BigFloat(sigma_);
  Jet1<BigFloat> th = Jet1<BigFloat>::variable(order, 0, theta);
  return base_support(phi) + cos(th) * t_.x + sin(th) * t_.y;
}

BigFloat Scatterer::radius_of_curvature(const BigFloat& theta) const { return base_rho(phi_of(theta)); }

BoundaryPoint Scatterer::at_angle(const BigFloat& theta) const {
  BoundaryPoint b;
  b.theta = theta;
  b.normal = unit_at(theta);
  b.tangent = rot90(b.normal);
  BigFloat h = support(theta);
  BigFloat hp;
  if (kind_ == ScattererKind::Circle) {
    hp = -t_.x * sin(theta) + t_.y * cos(theta);
  } else {
    hp = support_jet(theta, 1)[1];
  }
  b.point = h * b.normal + hp * b.tangent;
  b.curvature = 1 / radius_of_curvature(theta);
  return b;
}

BigFloat Scatterer::arc_length(const BigFloat& theta) const {
  return sigma_ * (base_arc(phi_of(theta)) - base_arc(phi_of(theta_origin_)));
}

BigFloat Scatterer::reduce_arc(const BigFloat& s) const {
  BigFloat shifted = s + perimeter_ / 2;
  BigFloat r = shifted - floor(shifted / perimeter_) * perimeter_;
  return r - perimeter_ / 2;
}

BigFloat Scatterer::angle_at(const BigFloat& s) const {
  const BigFloat two_pi = 2 * pi();
  BigFloat turns = floor(s / perimeter_);
  BigFloat target = s - turns * perimeter_;
  if (kind_ == ScattererKind::Circle) return theta_origin_ + target / r_ + turns * two_pi;
  BigFloat lo = theta_origin_, hi = theta_origin_ + two_pi;
  BigFloat theta = theta_origin_ + two_pi * target / perimeter_;
  const BigFloat tol = pow10_neg(static_cast<int>(working_precision()) - 5);
  for (int it = 0; it < 200; ++it) {
    BigFloat f = arc_length(theta) - target;
    if (f == 0) break;
    if (f > 0)
      hi = theta;
    else
      lo = theta;
    BigFloat next = theta - f / radius_of_curvature(theta);
    if (next < lo || next > hi) next = (lo + hi) / 2;
    BigFloat step = abs(next - theta);
    theta = next;
    if (step < tol) break;
  }
  return theta + turns * two_pi;
}

BoundaryPoint Scatterer::eval(const BigFloat& s) const { return at_angle(angle_at(s)); }

BigFloat Scatterer::min_radius_of_curvature(int samples) const {
  BigFloat best = base_rho(BigFloat(0));
  const BigFloat step = 2 * pi() / samples;
  for (int i = 1; i < samples; ++i) {
    BigFloat r = base_rho(step * i);
    if (r < best) best = r;
  }
  return best;
}

}  // namespace mls
