#include <random>

#include "doctest.h"
#include "mls/billiard/billiard.hpp"
#include "mls/errors.hpp"

using namespace mls;

namespace {

BigFloat bf(const char* s) { return BigFloat(s); }

// Two unit circles and an axis-aligned ellipse; the input frame is already normal.
BilliardTable mixed_table() {
  return normalize_frame({Scatterer::circle({BigFloat(0), BigFloat(2)}, BigFloat(1)),
                          Scatterer::circle({BigFloat(0), BigFloat(-2)}, BigFloat(1)),
                          Scatterer::ellipse({BigFloat(6), BigFloat(0)}, bf("0.8"), bf("1.5"), BigFloat(0))});
}

// Implicit inside-functions of the input scatterers of mixed_table.
BigFloat implicit(int j, const Vec2& q) {
  if (j == 1) return q.x * q.x + (q.y - 2) * (q.y - 2) - 1;
  if (j == 2) return q.x * q.x + (q.y + 2) * (q.y + 2) - 1;
  BigFloat u = (q.x - 6) / bf("0.8"), w = q.y / bf("1.5");
  return u * u + w * w - 1;
}

struct MarchHit {
  int j = 0;
  Vec2 point;
};

// Dense march in double precision, then bisection on the implicit function.
MarchHit march(const Vec2& p, const Vec2& v, int from) {
  const double dt = 1e-3;
  for (int k = 1; k < 40000; ++k) {
    double t = k * dt;
    Vec2 q = p + BigFloat(t) * v;
    for (int j = 1; j <= 3; ++j) {
      if (j == from) continue;
      double qx = static_cast<double>(q.x), qy = static_cast<double>(q.y);
      if (implicit(j, Vec2(BigFloat(qx), BigFloat(qy))) > 0) continue;
      BigFloat lo = t - dt, hi = t;
      for (int it = 0; it < 300; ++it) {
        BigFloat mid = (lo + hi) / 2;
        if (implicit(j, p + mid * v) > 0)
          lo = mid;
        else
          hi = mid;
      }
      return {j, p + lo * v};
    }
  }
  return {};
}

std::vector<PhasePoint> random_points(const BilliardTable& t, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<PhasePoint> out;
  while (static_cast<int>(out.size()) < count) {
    int i = 1 + static_cast<int>(rng() % 3);
    BigFloat s = t.scatterer(i).perimeter() / 2 * BigFloat(U(rng));
    PhasePoint x{i, s, BigFloat(U(rng)) * bf("0.95")};
    auto y = collide(t, x);
    if (y && collide(t, *y)) out.push_back(x);
  }
  return out;
}

BigFloat det(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

PhasePoint shifted(const PhasePoint& x, const BigFloat& ds, const BigFloat& dr) { return {x.i, x.s + ds, x.r + dr}; }

// difference of arc-length coordinates on the same scatterer, unwrapped
BigFloat arc_diff(const BilliardTable& t, int j, const BigFloat& a, const BigFloat& b) {
  return t.scatterer(j).reduce_arc(a - b);
}

}  // namespace

TEST_CASE("involution") {
  PrecisionScope scope(40);
  PhasePoint x{1, bf("0.3"), bf("0.5")};
  PhasePoint y = involution(x);
  CHECK(y.i == 1);
  CHECK(y.s == x.s);
  CHECK(y.r == bf("-0.5"));
  PhasePoint z = involution(y);
  CHECK(z.r == x.r);
  PhasePoint f{2, bf("0.1"), BigFloat(0)};
  CHECK(involution(f).r == f.r);
  CHECK(involution(x).r != x.r);
}

TEST_CASE("two-periodic bounce on the reference circles") {
  PrecisionScope scope(80);
  BilliardTable t = reference_table();
  PhasePoint y = collide_or_throw(t, {1, BigFloat(0), BigFloat(0)});
  CHECK(y.i == 2);
  CHECK(abs(y.s) < pow10_neg(70));
  CHECK(abs(y.r) < pow10_neg(70));
  PhasePoint z = collide_or_throw(t, y);
  CHECK(z.i == 1);
  CHECK(abs(z.s) < pow10_neg(70));
}

TEST_CASE("escape and tangency") {
  PrecisionScope scope(60);
  BilliardTable t = reference_table();
  // rightmost point of D3, shooting right
  PhasePoint out{3, t.scatterer(3).perimeter() / 2 - pow10_neg(50), BigFloat(0)};
  CHECK_FALSE(collide(t, out).has_value());
  CHECK_THROWS_AS(collide_or_throw(t, out), ConvergenceError);
  // from (1, 2) straight down along x = 1, grazing D2 at (1, -2)
  PhasePoint graze{1, pi() / 2, BigFloat(-1)};
  CHECK_THROWS_AS(collide(t, graze), TangencyError);
}

TEST_CASE("collide against a ray-marching oracle") {
  PrecisionScope scope(60);
  BilliardTable t = mixed_table();
  Isometry back = t.frame().inverse();
  for (const PhasePoint& x : random_points(t, 12, 3)) {
    PhasePoint y = collide_or_throw(t, x);
    Vec2 p = back.apply(t.eval(x.i, x.s).point);
    Vec2 v = back.apply_linear(velocity(t, x));
    MarchHit m = march(p, v, x.i);
    CHECK(m.j == y.i);
    CHECK(norm(back.apply(t.eval(y.i, y.s).point) - m.point) < pow10_neg(50));
    CHECK(y.i != x.i);
  }
}

TEST_CASE("time reversal") {
  PrecisionScope scope(80);
  BilliardTable t = mixed_table();
  for (const PhasePoint& x : random_points(t, 10, 5)) {
    PhasePoint y = collide_or_throw(t, x);
    PhasePoint back = collide_or_throw(t, involution(y));
    CHECK(back.i == x.i);
    CHECK(abs(arc_diff(t, x.i, back.s, x.s)) < pow10_neg(65));
    CHECK(abs(back.r + x.r) < pow10_neg(65));
    PhasePoint inv = collide_inverse(t, y);
    CHECK(abs(arc_diff(t, x.i, inv.s, x.s)) < pow10_neg(65));
  }
}

TEST_CASE("generating function law") {
  PrecisionScope scope(80);
  BilliardTable t = mixed_table();
  const BigFloat h = pow10_neg(27);
  for (const PhasePoint& x : random_points(t, 8, 7)) {
    PhasePoint y = collide_or_throw(t, x);
    auto L = [&](const BigFloat& a, const BigFloat& b) { return chord_length(t, x.i, x.s + a, y.i, y.s + b); };
    BigFloat ds = (L(h, 0) - L(-h, 0)) / (2 * h);
    BigFloat dy = (L(0, h) - L(0, -h)) / (2 * h);
    CHECK(abs(x.r + ds) < pow10_neg(26));
    CHECK(abs(y.r - dy) < pow10_neg(26));
  }
}

TEST_CASE("jacobian") {
  PrecisionScope scope(80);
  BilliardTable ref = reference_table();
  Matrix2 J = jacobian(ref, {1, BigFloat(0), BigFloat(0)});
  // flight-reflection product for unit curvature and gap 2, in the (s, r)
  // orientation where the tangents of D1 and D2 are opposite at the bounce
  const int expect[2][2] = {{-3, -2}, {-4, -3}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(abs(J[a][b] - expect[a][b]) < pow10_neg(70));
  BigFloat tr = J[0][0] + J[1][1];
  BigFloat lam = (tr - sqrt(tr * tr - 4)) / 2;
  CHECK(abs(abs(lam) - (3 + 2 * sqrt(BigFloat(2)))) < pow10_neg(70));

  BilliardTable t = mixed_table();
  const BigFloat h = pow10_neg(40);
  for (const PhasePoint& x : random_points(t, 8, 11)) {
    Matrix2 D = jacobian(t, x);
    CHECK(abs(det(D) - 1) < pow10_neg(65));
    PhasePoint y = collide_or_throw(t, x);
    PhasePoint sp = collide_or_throw(t, shifted(x, h, 0)), sm = collide_or_throw(t, shifted(x, -h, 0));
    PhasePoint rp = collide_or_throw(t, shifted(x, 0, h)), rm = collide_or_throw(t, shifted(x, 0, -h));
    CHECK(abs(arc_diff(t, y.i, sp.s, sm.s) / (2 * h) - D[0][0]) < pow10_neg(30));
    CHECK(abs((sp.r - sm.r) / (2 * h) - D[1][0]) < pow10_neg(30));
    CHECK(abs(arc_diff(t, y.i, rp.s, rm.s) / (2 * h) - D[0][1]) < pow10_neg(30));
    CHECK(abs((rp.r - rm.r) / (2 * h) - D[1][1]) < pow10_neg(30));
  }
}

TEST_CASE("collision jet: linear part and inverse") {
  PrecisionScope scope(80);
  BilliardTable t = mixed_table();
  for (const PhasePoint& x : random_points(t, 4, 13)) {
    CollisionJet f = collision_jet(t, x, 5);
    Matrix2 D = jacobian(t, x);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) CHECK(abs(f.map[a].linear(b) - D[a][b]) < pow10_neg(65));
    CHECK(f.map[0].constant_term() == 0);
    CHECK(f.map[1].constant_term() == 0);
    CollisionJet g = collision_jet_inverse(t, f.image, 5);
    auto inv = invert_map<BigFloat, 2>(f.map);
    CHECK(abs(arc_diff(t, x.i, g.image.s, x.s)) < pow10_neg(65));
    for (int k = 0; k < 2; ++k) CHECK((g.map[k] - inv[k]).max_abs() < pow10_neg(50));
  }
}

TEST_CASE("collision jet against finite differences at three precisions") {
  // 1-D Taylor coefficients along directions (alpha, beta), from Richardson-extrapolated
  // central differences of collide
  std::vector<std::array<BigFloat, 4>> coeffs;
  for (int P : {60, 80, 100}) {
    PrecisionScope scope(P);
    BilliardTable t = mixed_table();
    PhasePoint x{1, bf("0.05"), bf("0.1")};
    CollisionJet f = collision_jet(t, x, 3);
    std::array<BigFloat, 4> cur;
    int n = 0;
    for (auto [al, be] : std::vector<std::pair<const char*, const char*>>{{"1", "0"}, {"0", "1"}, {"0.6", "-0.8"}}) {
      const BigFloat A = bf(al), B = bf(be);
      // jet restricted to the line
      for (int comp = 0; comp < 2; ++comp) {
        Jet1<BigFloat> line = compose<BigFloat, 2, 1>(
            f.map[comp], {Jet1<BigFloat>::variable(3, 0) * A, Jet1<BigFloat>::variable(3, 0) * B});
        auto g = [&](const BigFloat& tt) {
          PhasePoint y = collide_or_throw(t, shifted(x, tt * A, tt * B));
          return comp == 0 ? arc_diff(t, f.image.i, y.s, f.image.s) : BigFloat(y.r - f.image.r);
        };
        // third derivative: (g(2h) - 2g(h) + 2g(-h) - g(-2h)) / (2h^3), error O(h^2)
        auto d3 = [&](const BigFloat& h) { return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h); };
        auto d2 = [&](const BigFloat& h) { return (g(h) - 2 * g(BigFloat(0)) + g(-h)) / (h * h); };
        BigFloat h = pow10_neg(P / 8);
        BigFloat c3 = (4 * d3(h / 2) - d3(h)) / 3 / 6;
        BigFloat c2 = (4 * d2(h / 2) - d2(h)) / 3 / 2;
        CHECK(abs(line[3] - c3) < pow10_neg(P / 4 - 4));
        CHECK(abs(line[2] - c2) < pow10_neg(P / 4 - 4));
        if (n < 4) cur[n++] = line[3];
      }
    }
    coeffs.push_back(cur);
  }
  for (int k = 0; k < 4; ++k) {
    CHECK(abs(coeffs[0][k] - coeffs[2][k]) < pow10_neg(55));
    CHECK(abs(coeffs[1][k] - coeffs[2][k]) < pow10_neg(75));
  }
}
