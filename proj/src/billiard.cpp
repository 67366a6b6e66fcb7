#include "mls/billiard/billiard.hpp"

#include "mls/errors.hpp"

namespace mls {

namespace {

BigFloat newton_tol() { return pow10_neg(static_cast<int>(working_precision()) - 5); }

struct Hit {
  BigFloat theta;
  BigFloat time;
  bool grazing = false;
};

// Entry point of the ray p + t v into the scatterer, if the line meets it ahead of p.
std::optional<Hit> ray_hit(const Scatterer& sc, const Vec2& p, const Vec2& v) {
  const BigFloat theta_w = atan2(v.y, v.x) + pi() / 2;
  const Vec2 w = rot90(v);
  const BigFloat c = dot(p, w);
  const BigFloat upper = sc.support(theta_w);
  const BigFloat lower = -sc.support(theta_w + pi());
  // a line whose offset is within rounding of a support line is a grazing hit
  const BigFloat graze = pow10_neg(static_cast<int>(working_precision()) - 10);
  for (int side = 0; side < 2; ++side) {
    BigFloat gap = side == 0 ? BigFloat(upper - c) : BigFloat(c - lower);
    if (abs(gap) < graze) {
      BigFloat th = side == 0 ? theta_w : BigFloat(theta_w + pi());
      BigFloat t = dot(sc.at_angle(th).point - p, v);
      if (t > 0) return Hit{th, t, true};
      return std::nullopt;
    }
  }
  if (!(c < upper && c > lower)) return std::nullopt;
  // gamma(theta) . w decreases from upper to lower on [theta_w, theta_w + pi]
  BigFloat lo = theta_w, hi = theta_w + pi();
  BigFloat theta = lo + (hi - lo) * (upper - c) / (upper - lower);
  const BigFloat tol = newton_tol();
  for (int it = 0; it < 300; ++it) {
    BoundaryPoint b = sc.at_angle(theta);
    BigFloat f = dot(b.point, w) - c;
    if (f == 0) break;
    if (f > 0)
      lo = theta;
    else
      hi = theta;
    BigFloat df = dot(b.normal, v) / b.curvature;
    BigFloat next = df < 0 ? BigFloat(theta - f / df) : BigFloat((lo + hi) / 2);
    if (next <= lo || next >= hi) next = (lo + hi) / 2;
    BigFloat step = abs(next - theta);
    theta = next;
    if (step < tol) break;
  }
  BigFloat t = dot(sc.at_angle(theta).point - p, v);
  if (!(t > 0)) return std::nullopt;
  return Hit{theta, t};
}

// Taylor data of a scatterer around the normal angle theta0, in x = dtheta.
struct CurveJet {
  Jet1<BigFloat> px, py, tx, ty, nx, ny, arc;
};

CurveJet curve_jet(const Scatterer& sc, const BigFloat& theta0, int K) {
  const int K2 = K + 2;
  Jet1<BigFloat> h = sc.support_jet(theta0, K2);
  Jet1<BigFloat> h1 = h.derivative(0);
  Jet1<BigFloat> h2 = h1.derivative(0);
  Jet1<BigFloat> th = Jet1<BigFloat>::variable(K2, 0, theta0);
  Jet1<BigFloat> c = cos(th), s = sin(th);
  CurveJet cj;
  cj.nx = c.with_order(K);
  cj.ny = s.with_order(K);
  cj.tx = (-s).with_order(K);
  cj.ty = c.with_order(K);
  cj.px = (h * c - h1 * s).with_order(K);
  cj.py = (h * s + h1 * c).with_order(K);
  cj.arc = (h + h2).integral(0).with_order(K);
  return cj;
}

template <int N>
Jet<BigFloat, N> lift(const Jet1<BigFloat>& f, const Jet<BigFloat, N>& x) {
  return compose<BigFloat, 1, N>(f, std::array<Jet<BigFloat, N>, 1>{x});
}

}  // namespace

Vec2 velocity(const BilliardTable& table, const PhasePoint& x) {
  if (abs(x.r) > 1) throw GeometryError("phase point has |r| > 1");
  BoundaryPoint b = table.eval(x.i, x.s);
  BigFloat c = sqrt(1 - x.r * x.r);
  return x.r * b.tangent + c * b.normal;
}

std::optional<PhasePoint> collide(const BilliardTable& table, const PhasePoint& x) {
  const Vec2 p = table.eval(x.i, x.s).point;
  const Vec2 v = velocity(table, x);
  std::optional<Hit> best;
  int best_j = 0;
  for (int j = 1; j <= 3; ++j) {
    if (j == x.i) continue;
    auto h = ray_hit(table.scatterer(j), p, v);
    if (h && (!best || h->time < best->time)) {
      best = h;
      best_j = j;
    }
  }
  if (!best) return std::nullopt;
  const Scatterer& sc = table.scatterer(best_j);
  BoundaryPoint b = sc.at_angle(best->theta);
  if (best->grazing || abs(dot(b.normal, v)) < pow10_neg(static_cast<int>(working_precision()) - 30))
    throw TangencyError("tangential collision with scatterer " + std::to_string(best_j));
  return PhasePoint{best_j, sc.reduce_arc(sc.arc_length(best->theta)), dot(b.tangent, v)};
}

PhasePoint collide_or_throw(const BilliardTable& table, const PhasePoint& x) {
  auto y = collide(table, x);
  if (!y) throw ConvergenceError("trajectory escapes from scatterer " + std::to_string(x.i));
  return *y;
}

PhasePoint collide_inverse(const BilliardTable& table, const PhasePoint& x) {
  return involution(collide_or_throw(table, involution(x)));
}

ChordHessian chord_hessian(const BilliardTable& table, int i, const BigFloat& s, int j, const BigFloat& sy) {
  return chord_hessian(table.eval(i, s), table.eval(j, sy));
}

ChordHessian chord_hessian(const BoundaryPoint& a, const BoundaryPoint& b) {
  Vec2 d = b.point - a.point;
  ChordHessian H;
  H.length = norm(d);
  Vec2 u = d / H.length;
  BigFloat r = dot(a.tangent, u), ry = dot(b.tangent, u);
  BigFloat c = dot(a.normal, u), cy = -dot(b.normal, u);
  H.l_ss = a.curvature * c + (1 - r * r) / H.length;
  H.l_yy = b.curvature * cy + (1 - ry * ry) / H.length;
  H.l_sy = -(dot(a.tangent, b.tangent) - r * ry) / H.length;
  return H;
}

Matrix2 jacobian(const BilliardTable& table, const PhasePoint& x) {
  PhasePoint y = collide_or_throw(table, x);
  ChordHessian H = chord_hessian(table, x.i, x.s, y.i, y.s);
  // r = -L_s(s, s'), r' = L_s'(s, s')
  Matrix2 J;
  J[0][0] = -H.l_ss / H.l_sy;
  J[0][1] = -1 / H.l_sy;
  J[1][0] = H.l_sy - H.l_yy * H.l_ss / H.l_sy;
  J[1][1] = -H.l_yy / H.l_sy;
  return J;
}

CollisionJet collision_jet(const BilliardTable& table, const PhasePoint& x, int K) {
  using J3 = Jet<BigFloat, 3>;
  using J2 = Jet2<BigFloat>;
  PhasePoint y = collide_or_throw(table, x);
  const Scatterer& si = table.scatterer(x.i);
  const Scatterer& sj = table.scatterer(y.i);
  const BigFloat theta_i = si.angle_at(x.s), theta_j = sj.angle_at(y.s);
  CurveJet ci = curve_jet(si, theta_i, K), cj = curve_jet(sj, theta_j, K);

  // dtheta on scatterer i as a function of ds
  auto dtheta = invert_map<BigFloat, 1>(std::array<Jet1<BigFloat>, 1>{ci.arc});
  J3 a = J3::variable(K, 0), z = J3::variable(K, 2);
  J3 ti = lift<3>(dtheta[0], a);
  J3 R = J3::variable(K, 1, x.r);
  J3 C = sqrt(1 - R * R);
  J3 vx = R * lift<3>(ci.tx, ti) + C * lift<3>(ci.nx, ti);
  J3 vy = R * lift<3>(ci.ty, ti) + C * lift<3>(ci.ny, ti);
  J3 dx = lift<3>(cj.px, z) - lift<3>(ci.px, ti);
  J3 dy = lift<3>(cj.py, z) - lift<3>(ci.py, ti);
  J3 F = vx * dy - vy * dx;

  const BigFloat tol = pow10_neg(static_cast<int>(working_precision()) - 15);
  J2 w = solve_implicit<BigFloat, 2>(F, tol);
  J3 rj = lift<3>(cj.tx, z) * vx + lift<3>(cj.ty, z) * vy;

  CollisionJet out;
  out.image = y;
  out.map[0] = compose<BigFloat, 1, 2>(cj.arc, std::array<J2, 1>{w});
  out.map[1] = substitute_last<BigFloat, 2>(rj, w);
  out.map[1][0] = BigFloat(0);
  return out;
}

CollisionJet collision_jet_inverse(const BilliardTable& table, const PhasePoint& x, int K) {
  CollisionJet f = collision_jet(table, involution(x), K);
  CollisionJet out;
  out.image = involution(f.image);
  // I o F o I with I(a, b) = (a, -b)
  for (int k = 0; k < 2; ++k) {
    Jet2<BigFloat> g(K);
    for (std::size_t m = 0; m < g.size(); ++m) {
      const auto& e = g.exponents(m);
      BigFloat c = f.map[k][m];
      if (e[1] % 2 == 1) c = -c;
      if (k == 1) c = -c;
      g[m] = c;
    }
    out.map[k] = g;
  }
  return out;
}

}  // namespace mls
