#include "mls/reconstruction/reconstruction.hpp"

#include <ostream>

#include "mls/errors.hpp"
#include "mls/orbits/orbits.hpp"

namespace mls {

const Scatterer& KnownPair::at(int i) const {
  if (i == 1) return d1;
  if (i == 2) return d2;
  throw GeometryError("interior point on scatterer " + std::to_string(i) + ", expected 1 or 2");
}

KnownPair known_pair(const BilliardTable& table) { return {table.scatterer(1), table.scatterer(2)}; }

std::vector<ReconstructedPoint> reconstruct_d3_points(const KnownPair& known, const std::vector<OrbitData>& orbits) {
  const BigFloat eps = pow10_neg(static_cast<int>(working_precision()) - 15);
  std::vector<ReconstructedPoint> out;
  for (const OrbitData& o : orbits) {
    if (o.interior.empty()) throw GeometryError("orbit " + std::to_string(o.n) + " has no interior points");
    std::vector<Vec2> p;
    for (const PhasePoint& x : o.interior) p.push_back(known.at(x.i).eval(x.s).point);
    BigFloat sum = 0;
    for (std::size_t k = 1; k < p.size(); ++k) sum += norm(p[k] - p[k - 1]);

    ReconstructedPoint r;
    r.n = o.n;
    r.L31 = (o.perimeter - sum) / 2;
    if (!(r.L31 > 0)) throw GeometryError("orbit " + std::to_string(o.n) + ": perimeter shorter than the interior chords");
    const PhasePoint& x1 = o.interior.front();
    if (!(abs(x1.r) < 1)) throw GeometryError("orbit " + std::to_string(o.n) + ": |r_1| >= 1");
    const BoundaryPoint b = known.at(x1.i).eval(x1.s);
    // incoming direction reversed: the normal turned by -arcsin(r_1)
    const Vec2 u = sqrt(1 - x1.r * x1.r) * b.normal - x1.r * b.tangent;
    r.point = p.front() + r.L31 * u;
    r.closure = abs(o.perimeter - (r.L31 + sum + norm(p.back() - r.point)));
    r.error = (static_cast<int>(p.size()) + r.L31) * eps;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<OrbitData> cyclicity1_data(const BilliardTable& table, int n_lo, int n_hi) {
  std::vector<OrbitData> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    const PeriodicOrbit o = cyclicity1_orbit(table, n);
    out.push_back({n, std::vector<PhasePoint>(o.points.begin() + 1, o.points.end()), o.perimeter});
  }
  return out;
}

namespace {

// min |a x - b| by Householder QR; a is rows x cols
std::vector<BigFloat> least_squares(std::vector<std::vector<BigFloat>> a, std::vector<BigFloat> b) {
  const std::size_t rows = a.size(), cols = a.front().size();
  for (std::size_t c = 0; c < cols; ++c) {
    BigFloat alpha = 0;
    for (std::size_t r = c; r < rows; ++r) alpha += a[r][c] * a[r][c];
    alpha = sqrt(alpha);
    if (alpha == 0) throw GeometryError("degenerate point configuration");
    if (a[c][c] > 0) alpha = -alpha;
    std::vector<BigFloat> v(rows, BigFloat(0));
    for (std::size_t r = c; r < rows; ++r) v[r] = a[r][c];
    v[c] -= alpha;
    BigFloat vv = 0;
    for (std::size_t r = c; r < rows; ++r) vv += v[r] * v[r];
    if (vv == 0) continue;
    for (std::size_t k = c; k < cols; ++k) {
      BigFloat s = 0;
      for (std::size_t r = c; r < rows; ++r) s += v[r] * a[r][k];
      s = 2 * s / vv;
      for (std::size_t r = c; r < rows; ++r) a[r][k] -= s * v[r];
    }
    BigFloat s = 0;
    for (std::size_t r = c; r < rows; ++r) s += v[r] * b[r];
    s = 2 * s / vv;
    for (std::size_t r = c; r < rows; ++r) b[r] -= s * v[r];
  }
  BigFloat scale = 0;
  for (std::size_t c = 0; c < cols; ++c) scale = max(scale, BigFloat(abs(a[c][c])));
  std::vector<BigFloat> x(cols);
  for (std::size_t c = cols; c-- > 0;) {
    if (abs(a[c][c]) <= scale * pow10_neg(static_cast<int>(working_precision()) - 5))
      throw GeometryError("degenerate point configuration");
    BigFloat s = b[c];
    for (std::size_t k = c + 1; k < cols; ++k) s -= a[c][k] * x[k];
    x[c] = s / a[c][c];
  }
  return x;
}

}  // namespace

ArcFit fit_boundary_arc(const std::vector<Vec2>& points, ArcModel model, const std::vector<BigFloat>& errors,
                        const BigFloat& slack) {
  if (points.size() < 6) throw GeometryError("fit_boundary_arc needs at least 6 points");
  if (!errors.empty() && errors.size() != points.size()) throw Error("fit_boundary_arc: one error per point");
  const std::size_t np = points.size();

  // centroid and RMS spread
  Vec2 c0;
  for (const Vec2& p : points) c0 = c0 + p;
  c0 = c0 / BigFloat(np);
  BigFloat s2 = 0;
  for (const Vec2& p : points) s2 += dot(p - c0, p - c0);
  const BigFloat sc = sqrt(s2 / np);
  if (sc == 0) throw GeometryError("degenerate point configuration");
  std::vector<Vec2> q;
  for (const Vec2& p : points) q.push_back((p - c0) / sc);

  ArcFit fit;
  fit.model = model;
  std::vector<std::vector<BigFloat>> a;
  std::vector<BigFloat> b;
  if (model == ArcModel::Circle) {
    for (const Vec2& p : q) {
      a.push_back({p.x, p.y, BigFloat(1)});
      b.push_back(-(p.x * p.x + p.y * p.y));
    }
    const std::vector<BigFloat> x = least_squares(a, b);
    const Vec2 c{-x[0] / 2, -x[1] / 2};
    const BigFloat r2 = dot(c, c) - x[2];
    if (!(r2 > 0)) throw GeometryError("fitted circle has no real radius");
    fit.center = c0 + sc * c;
    fit.radius = sc * sqrt(r2);
    // x^2 + y^2 - 2 cx x - 2 cy y + |c|^2 - R^2, halved so A + C = 1
    fit.conic = {BigFloat("0.5"), BigFloat(0), BigFloat("0.5"), -fit.center.x, -fit.center.y,
                 (dot(fit.center, fit.center) - fit.radius * fit.radius) / 2};
    for (const Vec2& p : points) fit.residuals.push_back(abs(norm(p - fit.center) - fit.radius));
  } else {
    // A (x^2 - y^2) + B x y + D x + E y + F = -y^2, C = 1 - A
    for (const Vec2& p : q) {
      a.push_back({p.x * p.x - p.y * p.y, p.x * p.y, p.x, p.y, BigFloat(1)});
      b.push_back(-p.y * p.y);
    }
    const std::vector<BigFloat> x = least_squares(a, b);
    const BigFloat A = x[0], B = x[1], C = 1 - x[0], D = x[2], E = x[3], F = x[4];
    for (const Vec2& p : q) {
      const BigFloat v = A * p.x * p.x + B * p.x * p.y + C * p.y * p.y + D * p.x + E * p.y + F;
      const BigFloat gx = 2 * A * p.x + B * p.y + D, gy = B * p.x + 2 * C * p.y + E;
      fit.residuals.push_back(sc * abs(v) / sqrt(gx * gx + gy * gy));
    }
    // back to the input frame: substitute (p - c0) / sc and divide by sc^-2
    const BigFloat cx = c0.x, cy = c0.y;
    const BigFloat s = sc;
    fit.conic = {A,
                 B,
                 C,
                 D * s - 2 * A * cx - B * cy,
                 E * s - B * cx - 2 * C * cy,
                 A * cx * cx + B * cx * cy + C * cy * cy - D * s * cx - E * s * cy + F * s * s};
  }

  fit.max_residual = 0;
  fit.threshold = 0;
  const BigFloat floor = pow10_neg(static_cast<int>(working_precision()) / 2);
  for (std::size_t k = 0; k < np; ++k) {
    const BigFloat tol = slack * (errors.empty() ? floor : errors[k]);
    fit.threshold = max(fit.threshold, tol);
    fit.max_residual = max(fit.max_residual, fit.residuals[k]);
    if (fit.residuals[k] > tol) fit.flagged = true;
  }
  return fit;
}

void write_points_csv(std::ostream& out, const std::vector<ReconstructedPoint>& points) {
  out << "n,x,y,error,closure\n";
  for (const ReconstructedPoint& p : points)
    out << p.n << ',' << to_decimal(p.point.x) << ',' << to_decimal(p.point.y) << ',' << to_decimal(p.error, 6) << ','
        << to_decimal(p.closure, 6) << '\n';
}

}  // namespace mls
