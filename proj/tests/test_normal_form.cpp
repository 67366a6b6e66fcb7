#include "doctest.h"
#include "mls/errors.hpp"
#include "mls/normal_form/normal_form.hpp"
#include "mls/orbits/orbits.hpp"
#include "mls/series/series.hpp"

using namespace mls;

namespace {

using J2 = Jet2<BigFloat>;

struct Fixture {
  PrecisionScope scope{80};
  BilliardTable table = reference_table();
  NormalFormData nf = compute_normal_form(table, 12);
  GluingData glue = extend_and_glue(table, nf, 4);
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

BigFloat rel(const BigFloat& a, const BigFloat& b) { return abs(a - b) / max(BigFloat(1e-300), BigFloat(abs(b))); }

std::array<BigFloat, 2> eval(const Jet2Map<BigFloat>& f, const BigFloat& x, const BigFloat& y) {
  std::array<BigFloat, 2> p{x, y};
  return {f[0].evaluate(p), f[1].evaluate(p)};
}

}  // namespace

TEST_CASE("lambda of the reference table") {
  auto& f = fixture();
  const BigFloat want = 3 - 2 * sqrt(BigFloat(2));
  CHECK(abs(f.nf.lambda - want) < pow10_neg(70));
  CHECK(abs(f.nf.lambda - two_periodic(f.table).lambda) < pow10_neg(70));
  CHECK(f.nf.delta.size() == 5);
  CHECK(f.nf.x1.i == 1);
  CHECK(f.nf.x2.i == 2);
}

TEST_CASE("conjugacy and involution identities as jets") {
  auto& f = fixture();
  CHECK(f.nf.conjugacy_residual < pow10_neg(50));
  CHECK(f.nf.involution_residual < pow10_neg(50));
  CHECK(f.nf.area_residual < pow10_neg(50));
  for (const BigFloat& e : f.nf.delta_error) CHECK(e < pow10_neg(55));
}

TEST_CASE("conjugacy holds for the actual map on sample points") {
  auto& f = fixture();
  const int K = f.nf.order;
  Jet2Map<BigFloat> N = birkhoff_power(f.nf, 1, K);
  // radius in units of 1/2, roughly where the coefficients start to grow
  for (const char* radius : {"1e-2", "1e-3"}) {
    const BigFloat r(radius);
    const BigFloat bound = 10 * pow(2 * r, K + 1);
    for (int k = 0; k < 4; ++k) {
      const BigFloat x = r * (k % 2 == 0 ? 1 : -1) * BigFloat("0.7"), y = r * (k < 2 ? 1 : -1) * BigFloat("0.6");
      auto p = eval(f.nf.phi1, x, y);
      PhasePoint z{1, BigFloat(f.nf.x1.s + p[0]), BigFloat(f.nf.x1.r + p[1])};
      PhasePoint w = collide_or_throw(f.table, z);
      CHECK(w.i == 2);
      auto n = eval(N, x, y);
      auto q = eval(f.nf.phi2, n[0], n[1]);
      CHECK(abs(w.s - f.nf.x2.s - q[0]) < bound);
      CHECK(abs(w.r - f.nf.x2.r - q[1]) < bound);
    }
  }
}

TEST_CASE("delta does not depend on the normalization") {
  auto& f = fixture();
  NormalFormOptions opt;
  opt.resonant_choice = {BigFloat("0.3"), BigFloat("-0.2"), BigFloat("0.5")};
  NormalFormData other = compute_normal_form(f.table, 12, opt);
  REQUIRE(other.delta.size() == f.nf.delta.size());
  for (std::size_t j = 0; j < other.delta.size(); ++j) CHECK(abs(other.delta[j] - f.nf.delta[j]) < pow10_neg(55));
  CHECK(abs(other.phi1[0].coeff({2, 1}) - f.nf.phi1[0].coeff({2, 1})) > BigFloat("0.01"));
  CHECK(other.conjugacy_residual < pow10_neg(50));
  CHECK(other.area_residual < pow10_neg(50));
  CHECK(other.involution_residual > BigFloat("0.01"));

  // Phi1 o Psi with tau(h) = 1 + h conjugates with the same N
  const int K = f.nf.order;
  const J2 x = J2::variable(K, 0), y = J2::variable(K, 1);
  const J2 tau = 1 + x * y;
  Jet2Map<BigFloat> psi{x * tau, y / tau};
  Jet2Map<BigFloat> N = birkhoff_power(f.nf, 1, K);
  auto p1 = compose<BigFloat, 2, 2>(f.nf.phi1, psi);
  auto p2 = compose<BigFloat, 2, 2>(f.nf.phi2, psi);
  auto lhs = compose<BigFloat, 2, 2>(p2, N);
  auto rhs = compose<BigFloat, 2, 2>(collision_jet(f.table, f.nf.x1, K).map, p1);
  CHECK((lhs[0] - rhs[0]).max_abs() < pow10_neg(50));
  CHECK((lhs[1] - rhs[1]).max_abs() < pow10_neg(50));
}

TEST_CASE("unsupported orders are rejected") {
  PrecisionScope scope(40);
  CHECK_THROWS_AS(compute_normal_form(reference_table(), 0), OrderMismatch);
  CHECK_THROWS_AS(compute_normal_form(reference_table(), kMaxJetOrder), OrderMismatch);
}

TEST_CASE("gluing map and generating function") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  CHECK(g.xi_inf > 0);
  CHECK(g.xi_inf_error < pow10_neg(50));
  CHECK(g.x0.i == 3);
  CHECK(g.involution_residual < pow10_neg(40));
  CHECK(g.closedness_residual < pow10_neg(40));
  CHECK(g.symmetry_residual < pow10_neg(40));
  CHECK(abs(g.a(1, 0) - 1) < pow10_neg(60));
  CHECK(abs(g.a(0, 1) - 1) < pow10_neg(60));
  CHECK(abs(g.M_tilde.constant_term()) < pow10_neg(60));
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) CHECK(abs(g.a(i, j) - g.a(j, i)) < pow10_neg(35));

  // D Psi(0,0) = xi_inf I
  const BigFloat det = g.psi_a.constant_term() * g.psi_b.constant_term();
  CHECK(rel(det, g.xi_inf * g.xi_inf) < pow10_neg(70));
}

TEST_CASE("a_hat from G matches the series chain from a") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  const int K = g.order;
  J2 a(K);
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j) a[std::array<int, 2>{i, j}] = (g.a(i, j) + g.a(j, i)) / 2;
  a[std::array<int, 2>{0, 0}] = 0;
  a[std::array<int, 2>{1, 0}] = 1;
  a[std::array<int, 2>{0, 1}] = 1;
  GluingSeries<BigFloat> chain = u_from_gluing(a, g.xi_inf, K);
  for (int i = 0; i <= K; ++i)
    for (int j = 0; i + j <= K; ++j) CHECK(rel(chain.a_hat.coeff({i, j}), g.a_hat(i, j)) < pow10_neg(35));
}

TEST_CASE("xi_inf from homoclinic points") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  HomoclinicOrbit hom = homoclinic_orbit(f.table, 9);
  for (int k = 5; k <= 9; ++k) {
    auto b = birkhoff_coordinates(g.nf, hom.at(k));
    CHECK(rel(b[0], g.xi_inf * pow(g.nf.lambda, k)) < pow10_neg(40));
    CHECK(abs(b[1]) < pow10_neg(40));
  }
}

TEST_CASE("L_inf against symmetric cyclicity-2 perimeters") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  CHECK(g.L_inf_error < pow10_neg(60));
  // (l_{n,n} - 4 n l0) / 2 - L_inf = -z + O(n z^2), z = xi_inf^2 lambda^(2n)
  for (int n : {10, 14}) {
    const BigFloat l = cyclicity2_orbit(f.table, n, n).perimeter;
    const BigFloat z = g.xi_inf * g.xi_inf * pow(g.nf.lambda, 2 * n);
    const BigFloat excess = (l - 4 * n * f.table.l0()) / 2 - g.L_inf;
    CHECK(rel(excess, -z) < 100 * n * z);
  }
}

TEST_CASE("fixed point energies") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  FixedPointEnergies e = fixed_point_energies(g.nf, g, 8, 11);
  CHECK(e.symmetry_residual < pow10_neg(60));
  const BigFloat za = g.xi_inf * g.xi_inf * pow(g.nf.lambda, 16);
  CHECK(rel(e.h_a, za) < 10 * za);

  BigFloat prev = 1;
  for (int m : {6, 9, 12}) {
    FixedPointEnergies em = fixed_point_energies(g.nf, g, m, m);
    const BigFloat z = g.xi_inf * g.xi_inf * pow(g.nf.lambda, 2 * m);
    const BigFloat dev = abs(em.h_a / z - 1);
    CHECK(dev < prev);
    prev = dev;
  }

  FixedPointEnergies s = fixed_point_energies(g.nf, g, 11, 8);
  CHECK(rel(s.h_a, e.h_b) < pow10_neg(60));
  CHECK(rel(s.h_b, e.h_a) < pow10_neg(60));
  CHECK(rel(s.xi_a, e.xi_b) < pow10_neg(60));
}

TEST_CASE("Birkhoff energies of orbit-solver points") {
  auto& f = fixture();
  const GluingData& g = f.glue;
  const int m = 8, n = 11;
  FixedPointEnergies e = fixed_point_energies(g.nf, g, m, n);
  PeriodicOrbit o = cyclicity2_orbit(f.table, m, n);
  // x_1 .. x_{2m-1} lie in chart A; the jets are accurate near the middle
  for (int k = 5; k <= 2 * m - 5; ++k) {
    auto b = birkhoff_coordinates(g.nf, o.points[k]);
    CHECK(rel(b[0] * b[1], e.h_a) < pow10_neg(30));
  }
  for (int k = 2 * m + 5; k <= 2 * m + 2 * n - 5; ++k) {
    auto b = birkhoff_coordinates(g.nf, o.points[k]);
    CHECK(rel(b[0] * b[1], e.h_b) < pow10_neg(30));
  }
}
