#include "mls/orbits/orbits.hpp"

#include <cmath>

#include "mls/errors.hpp"

namespace mls {

namespace {

// Solve the symmetric cyclic tridiagonal system with diagonal d, couplings
// e[k] between k and k+1 (mod n), by Sherman-Morrison on the Thomas algorithm.
std::vector<BigFloat> solve_cyclic(const std::vector<BigFloat>& d, const std::vector<BigFloat>& e,
                                   const std::vector<BigFloat>& b) {
  const int n = static_cast<int>(d.size());
  if (n == 2) {
    BigFloat off = e[0] + e[1];
    BigFloat det = d[0] * d[1] - off * off;
    if (det == 0) throw ConvergenceError("singular Hessian");
    return {(d[1] * b[0] - off * b[1]) / det, (d[0] * b[1] - off * b[0]) / det};
  }
  auto thomas = [&](std::vector<BigFloat> diag, std::vector<BigFloat> rhs) {
    // sub- and super-diagonal entries are e[0..n-2]
    for (int k = 1; k < n; ++k) {
      if (diag[k - 1] == 0) throw ConvergenceError("singular Hessian");
      BigFloat w = e[k - 1] / diag[k - 1];
      diag[k] -= w * e[k - 1];
      rhs[k] -= w * rhs[k - 1];
    }
    std::vector<BigFloat> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int k = n - 2; k >= 0; --k) x[k] = (rhs[k] - e[k] * x[k + 1]) / diag[k];
    return x;
  };
  const BigFloat gamma = -d[0];
  const BigFloat& corner = e[n - 1];
  std::vector<BigFloat> dm = d;
  dm[0] -= gamma;
  dm[n - 1] -= corner * corner / gamma;
  std::vector<BigFloat> y = thomas(dm, b);
  std::vector<BigFloat> u(n, BigFloat(0));
  u[0] = gamma;
  u[n - 1] = corner;
  std::vector<BigFloat> z = thomas(dm, u);
  BigFloat vy = y[0] + corner / gamma * y[n - 1];
  BigFloat vz = z[0] + corner / gamma * z[n - 1];
  BigFloat f = vy / (1 + vz);
  for (int k = 0; k < n; ++k) y[k] -= f * z[k];
  return y;
}

struct Evaluation {
  std::vector<BoundaryPoint> pts;
  std::vector<ChordHessian> chords;  // chord k -> k+1
  std::vector<Vec2> dirs;
  std::vector<BigFloat> grad;  // dW/ds_k
  BigFloat residual;
};

Evaluation evaluate(const BilliardTable& table, const Coding& c, const std::vector<BigFloat>& theta) {
  const int n = static_cast<int>(c.size());
  Evaluation ev;
  ev.pts.reserve(n);
  for (int k = 0; k < n; ++k) ev.pts.push_back(table.scatterer(c[k]).at_angle(theta[k]));
  ev.chords.resize(n);
  ev.dirs.resize(n);
  for (int k = 0; k < n; ++k) {
    const BoundaryPoint& a = ev.pts[k];
    const BoundaryPoint& b = ev.pts[(k + 1) % n];
    ev.chords[k] = chord_hessian(a, b);
    ev.dirs[k] = (b.point - a.point) / ev.chords[k].length;
  }
  ev.grad.resize(n);
  ev.residual = 0;
  for (int k = 0; k < n; ++k) {
    const Vec2& T = ev.pts[k].tangent;
    ev.grad[k] = dot(T, ev.dirs[(k + n - 1) % n]) - dot(T, ev.dirs[k]);
    if (abs(ev.grad[k]) > ev.residual) ev.residual = abs(ev.grad[k]);
  }
  return ev;
}

Vec2 unit(const Vec2& v) { return v / norm(v); }

}  // namespace

void validate_coding(const Coding& c) {
  if (c.size() < 2) throw Error("coding must have at least two letters");
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k] < 1 || c[k] > 3) throw Error("coding letters must be 1, 2 or 3");
    if (c[k] == c[(k + 1) % c.size()]) throw Error("coding repeats a letter at position " + std::to_string(k));
  }
}

Coding cyclicity2_coding(int m, int n) {
  if (m < 1 || n < 1) throw Error("cyclicity-2 coding needs m, n >= 1");
  Coding c{3};
  for (int k = 1; k < m; ++k) c.insert(c.end(), {1, 2});
  c.insert(c.end(), {1, 3});
  for (int k = 1; k < n; ++k) c.insert(c.end(), {1, 2});
  c.push_back(1);
  return c;
}

Coding cyclicity1_coding(int n) {
  if (n < 1) throw Error("cyclicity-1 coding needs n >= 1");
  Coding c{3};
  for (int k = 1; k < n; ++k) c.insert(c.end(), {1, 2});
  c.push_back(1);
  return c;
}

PeriodicOrbit solve_periodic(const BilliardTable& table, const Coding& coding, const std::vector<BigFloat>& initial) {
  validate_coding(coding);
  const int n = static_cast<int>(coding.size());
  const int P = static_cast<int>(working_precision());
  std::vector<BigFloat> theta = initial;
  if (theta.empty()) {
    // normal bisecting the directions towards the neighbours' centres
    for (int k = 0; k < n; ++k) {
      Vec2 c = table.scatterer(coding[k]).center();
      Vec2 prev = table.scatterer(coding[(k + n - 1) % n]).center();
      Vec2 next = table.scatterer(coding[(k + 1) % n]).center();
      Vec2 d = unit(prev - c) + unit(next - c);
      theta.push_back(atan2(d.y, d.x));
    }
  }
  if (static_cast<int>(theta.size()) != n) throw Error("initial guess has the wrong length");

  const BigFloat tol = pow10_neg(P - 10);
  const BigFloat noise = pow10_neg(P / 2);
  PeriodicOrbit orb;
  orb.coding = coding;
  Evaluation ev = evaluate(table, coding, theta);
  bool done = false;
  for (int it = 0; it < 80 && !done; ++it) {
    orb.residual_history.push_back(ev.residual);
    if (ev.residual < tol) break;
    std::vector<BigFloat> rho(n), d(n), e(n), rhs(n);
    for (int k = 0; k < n; ++k) rho[k] = 1 / ev.pts[k].curvature;
    for (int k = 0; k < n; ++k) {
      d[k] = (ev.chords[(k + n - 1) % n].l_yy + ev.chords[k].l_ss) * rho[k] * rho[k];
      e[k] = ev.chords[k].l_sy * rho[k] * rho[(k + 1) % n];
      rhs[k] = -ev.grad[k] * rho[k];
    }
    std::vector<BigFloat> step = solve_cyclic(d, e, rhs);
    BigFloat biggest = 0;
    for (const BigFloat& s : step) biggest = max(biggest, BigFloat(abs(s)));
    BigFloat scale = biggest > BigFloat("0.3") ? BigFloat(BigFloat("0.3") / biggest) : BigFloat(1);
    for (int tries = 0;; ++tries) {
      std::vector<BigFloat> trial = theta;
      for (int k = 0; k < n; ++k) trial[k] += scale * step[k];
      Evaluation next = evaluate(table, coding, trial);
      if (next.residual < ev.residual || tries >= 30) {
        if (!(next.residual < ev.residual) && ev.residual < noise) done = true;
        theta = std::move(trial);
        ev = std::move(next);
        break;
      }
      if (ev.residual < noise) {
        done = true;  // stalled at the rounding floor
        break;
      }
      scale /= 2;
    }
  }
  if (!(ev.residual < noise)) throw ConvergenceError("periodic orbit Newton did not converge");
  orb.residual = ev.residual;
  if (orb.residual_history.empty() || orb.residual_history.back() != ev.residual)
    orb.residual_history.push_back(ev.residual);

  orb.perimeter = 0;
  for (int k = 0; k < n; ++k) {
    const Scatterer& sc = table.scatterer(coding[k]);
    orb.points.push_back({coding[k], sc.reduce_arc(sc.arc_length(theta[k])), dot(ev.pts[k].tangent, ev.dirs[k])});
    orb.perimeter += ev.chords[k].length;
  }

  // each step must be a genuine collision with the next letter
  const BigFloat vtol = pow10_neg(P - 15);
  for (int k = 0; k < n; ++k) {
    const PhasePoint& want = orb.points[(k + 1) % n];
    auto y = collide(table, orb.points[k]);
    if (!y || y->i != want.i)
      throw CodingMismatch("orbit for the requested coding is obstructed at step " + std::to_string(k));
    BigFloat ds = table.scatterer(want.i).reduce_arc(y->s - want.s);
    if (abs(ds) > vtol || abs(y->r - want.r) > vtol)
      throw CodingMismatch("collision map does not close the orbit at step " + std::to_string(k));
  }
  return orb;
}

PeriodicOrbit cyclicity2_orbit(const BilliardTable& table, int m, int n) {
  return solve_periodic(table, cyclicity2_coding(m, n));
}

PeriodicOrbit cyclicity1_orbit(const BilliardTable& table, int n) { return solve_periodic(table, cyclicity1_coding(n)); }

TwoPeriodic two_periodic(const BilliardTable& table) {
  TwoPeriodic tp;
  tp.orbit = solve_periodic(table, {1, 2});
  Matrix2 a = jacobian(table, tp.orbit.points[0]);
  Matrix2 b = jacobian(table, tp.orbit.points[1]);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) tp.dF2[i][j] = b[i][0] * a[0][j] + b[i][1] * a[1][j];
  BigFloat tr = tp.dF2[0][0] + tp.dF2[1][1];
  BigFloat det = tp.dF2[0][0] * tp.dF2[1][1] - tp.dF2[0][1] * tp.dF2[1][0];
  BigFloat disc = tr * tr - 4 * det;
  if (!(disc > 0) || !(tr > 0)) throw SingularLinearPart("2-periodic orbit is not hyperbolic with positive eigenvalues");
  BigFloat small = (tr - sqrt(disc)) / 2;
  tp.lambda = sqrt(small);
  return tp;
}

HomoclinicOrbit homoclinic_orbit(const BilliardTable& table, int range) {
  if (range < 0) throw Error("homoclinic range must be nonnegative");
  const int P = static_cast<int>(working_precision());
  TwoPeriodic tp = two_periodic(table);
  const double rate = -std::log10(static_cast<double>(tp.lambda));
  // deviation of x_k^{m,m} from x_k^inf is about lambda^(2m - |k|)
  const int m = (range + static_cast<int>(std::ceil((P + 5) / rate)) + 1) / 2 + 1;

  std::vector<std::vector<PhasePoint>> runs;
  for (int dm = 0; dm < 3; ++dm) {
    PeriodicOrbit o = cyclicity2_orbit(table, m + dm, m + dm);
    const int len = static_cast<int>(o.points.size());
    std::vector<PhasePoint> pts;
    for (int k = -range; k <= range; ++k) pts.push_back(o.points[((k % len) + len) % len]);
    runs.push_back(std::move(pts));
  }
  HomoclinicOrbit h;
  h.range = range;
  h.m_used = m + 2;
  const BigFloat floor_ = pow10_neg(P - 5);
  auto accelerate = [&](const BigFloat& x0, const BigFloat& x1, const BigFloat& x2, BigFloat& err) {
    BigFloat d1 = x1 - x0, d2 = x2 - x1;
    err = max(err, BigFloat(abs(d2)));
    if (abs(d2) > floor_ && abs(d2) < abs(d1) * BigFloat("0.9")) {
      BigFloat acc = x2 - d2 * d2 / (d2 - d1);
      return acc;
    }
    return x2;
  };
  for (int idx = 0; idx <= 2 * range; ++idx) {
    const PhasePoint &a = runs[0][idx], &b = runs[1][idx], &c = runs[2][idx];
    BigFloat err = floor_;
    PhasePoint x{c.i, accelerate(a.s, b.s, c.s, err), accelerate(a.r, b.r, c.r, err)};
    h.points.push_back(x);
    h.error.push_back(err);
    if (err > pow10_neg(P - 20)) throw ConvergenceError("homoclinic orbit not converged at the working precision");
  }
  return h;
}

}  // namespace mls
