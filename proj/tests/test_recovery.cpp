#include "doctest.h"
#include "mls/errors.hpp"
#include "mls/recovery/recovery.hpp"

using namespace mls;

namespace {

using Q = Rational;

SeriesModel<BigFloat> to_float(const SeriesModel<Q>& q) {
  SeriesModel<BigFloat> m;
  m.lambda = to_bigfloat(q.lambda);
  m.xi_inf = to_bigfloat(q.xi_inf);
  m.l0 = to_bigfloat(q.l0);
  m.L_inf = to_bigfloat(q.L_inf);
  for (const Q& d : q.delta) m.delta.push_back(to_bigfloat(d));
  m.a = Jet2<BigFloat>(q.a.order());
  for (int i = 0; i <= q.a.order(); ++i)
    for (int j = 0; i + j <= q.a.order(); ++j) m.a[std::array<int, 2>{i, j}] = to_bigfloat(q.a.coeff({i, j}));
  return m;
}

template <class T>
LcFrame<T> exact_frame(const SeriesModel<T>& md) {
  return {md.l0, md.lambda, md.xi_inf * md.xi_inf};
}

SpectrumTable as_table(const GridValues<BigFloat>& g) {
  SpectrumTable t;
  for (const auto& [mn, v] : g) t.set(mn.first, mn.second, v);
  return t;
}

}  // namespace

TEST_CASE("rational round trip reproduces the seed exactly") {
  PrecisionScope scope(80);
  for (int nu = 1; nu <= 4; ++nu)
    for (unsigned seed : {1u, 2u, 3u}) {
      CAPTURE(nu);
      CAPTURE(seed);
      RoundTrip rt = rational_roundtrip(random_rational_model(seed * 17 + nu, nu), nu, 1, 12);
      CHECK_MESSAGE(rt.exact, rt.mismatch);
      CHECK(rt.recovered.a10 == 1);
      CHECK(rt.recovered.a01 == 1);
      for (int k = 1; k <= nu; ++k) CHECK(rt.recovered.residual[k] == 0);
    }
}

TEST_CASE("zero seed round trips") {
  SeriesModel<Q> md = random_rational_model(5, 3);
  md.delta.assign(2, Q(0));
  md.a = symmetric_jet<Q>(3, {});
  md.L_inf = 0;
  CHECK(rational_roundtrip(md, 3, 1, 12).exact);
}

TEST_CASE("float round trip to a third of the precision") {
  PrecisionScope scope(80);
  const SeriesModel<BigFloat> md = to_float(random_rational_model(11, 4));
  const LcFit<BigFloat> fit = extract_lc(synthetic_grid(md, 4, 1, 12), exact_frame(md), 4);
  CHECK(fit.check_cells.size() == fit.cells.size());
  const Invariants<BigFloat> inv = invert_to_invariants(fit.lc, 4, &fit.error);
  const BigFloat tol = pow10_neg(80 / 3);
  for (std::size_t j = 0; j < md.delta.size(); ++j) CHECK(abs(inv.delta[j] - md.delta[j]) < tol);
  for (int k = 2; k <= 4; ++k)
    for (int p = 0; p <= k; ++p) CHECK(abs(inv.a.coeff({p, k - p}) - md.a.coeff({p, k - p})) < tol);
  CHECK(abs(inv.L_inf - md.L_inf) < tol);

  // the check-grid error bounds the true error
  const TriangularSeries<BigFloat> want = length_series(md, 4).ell;
  want.for_each([&](int p, int q, int i, int j, const BigFloat& c) {
    CHECK(abs(fit.lc.get(p, q, i, j) - c) <= 10 * fit.error.get(p, q, i, j) + pow10_neg(70));
  });
}

TEST_CASE("l^10_20 = -delta_1 with only delta_1 nonzero") {
  SeriesModel<Q> md = random_rational_model(3, 2);
  md.a = symmetric_jet<Q>(2, {});
  md.delta = {Q(7, 3)};
  const LcFit<Q> fit = extract_lc(synthetic_grid(md, 2, 1, 12), exact_frame(md), 2);
  CHECK(fit.lc.get(2, 0, 1, 0) == Q(-7, 3));
  CHECK(fit.lc.get(0, 2, 0, 1) == Q(-7, 3));
  CHECK(fit.lc.get(1, 0, 0, 0) == -1);
  CHECK(fit.lc.get(0, 1, 0, 0) == -1);
  CHECK(fit.lc.get(0, 0, 0, 0) == 2 * md.L_inf);
}

TEST_CASE("grading check: non-strict coefficients fit to zero") {
  const SeriesModel<Q> md = random_rational_model(8, 3);
  const LcFit<Q> fit = extract_lc(synthetic_grid(md, 3, 1, 12), exact_frame(md), 3, Grading::Triangular);
  const TriangularSeries<Q> strict(3, Grading::Strict);
  const TriangularSeries<Q> want = length_series(md, 3).ell;
  int extra = 0;
  fit.lc.for_each([&](int p, int q, int i, int j, const Q& c) {
    if (strict.allowed(p, q, i, j)) {
      CHECK(c == want.get(p, q, i, j));
    } else {
      ++extra;
      CHECK(c == 0);
    }
  });
  CHECK(extra == 35 - 18);
}

TEST_CASE("mirror disagreement is rejected") {
  const SeriesModel<Q> md = random_rational_model(4, 3);
  LcFit<Q> fit = extract_lc(synthetic_grid(md, 3, 1, 12), exact_frame(md), 3);
  fit.lc.set(2, 1, 0, 0, fit.lc.get(2, 1, 0, 0) + Q(1, 1000));
  CHECK_THROWS_AS(invert_to_invariants(fit.lc, 3), ToleranceError);
  CHECK_THROWS_AS(invert_to_invariants(fit.lc, 4), OrderMismatch);
}

TEST_CASE("too few cells are reported") {
  const SeriesModel<Q> md = random_rational_model(4, 4);
  CHECK_THROWS_AS(extract_lc(synthetic_grid(md, 4, 1, 6), exact_frame(md), 4), SingularLinearPart);
}

TEST_CASE("frame of a synthetic spectrum") {
  PrecisionScope scope(120);
  const SeriesModel<BigFloat> md = to_float(random_rational_model(21, 2));
  const Frame f = extract_frame(as_table(synthetic_grid(md, 2, 1, 30)));
  const BigFloat tol = pow10_neg(60);
  CHECK(abs(f.l0 - md.l0) < tol);
  CHECK(abs(f.lambda - md.lambda) < tol);
  CHECK(abs(f.xi2 - md.xi_inf * md.xi_inf) < tol);
  CHECK(abs(f.L_inf - md.L_inf) < tol);
  CHECK(f.xi2_error < tol);
  CHECK(f.L_inf_error < tol);
  CHECK(f.window == 25);
}

TEST_CASE("frame of the reference spectrum") {
  PrecisionScope scope(80);
  // only the cells extract_frame reads: rows 13..16 over m in [11, 16] and the diagonal from 9
  SpectrumRun rows = compute_spectrum(reference_table(), 11, 16, 13, 16);
  REQUIRE(rows.failures.empty());
  SpectrumTable t = rows.table;
  for (int k = 9; k <= 12; ++k) t.set(k, k, compute_spectrum(reference_table(), k, k, k, k).table.at(k, k));
  const Frame f = extract_frame(t);
  CHECK(abs(f.l0 - 2) < pow10_neg(40));
  CHECK(abs(f.lambda - (3 - 2 * sqrt(BigFloat(2)))) < pow10_neg(25));
  CHECK(f.xi2_error < pow10_neg(15));
  CHECK(f.L_inf_error < pow10_neg(15));
  CHECK(f.L_inf > 5);

  SpectrumTable small;
  small.set(4, 4, t.at(13, 13));
  CHECK_THROWS_AS(extract_frame(small), Error);
}
