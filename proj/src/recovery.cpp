#include "mls/recovery/recovery.hpp"

#include <ostream>
#include <random>

namespace mls {

namespace {

struct RowFit {
  BigFloat l0, w, A;
};

// det of [1, w^t, w^2t, t w^2t, d_t], t = 0..4
BigFloat prony_det(const std::vector<BigFloat>& d, const BigFloat& w) {
  std::vector<std::vector<BigFloat>> a(5, std::vector<BigFloat>(5));
  for (int t = 0; t < 5; ++t) {
    const BigFloat wt = pow(w, t), w2t = wt * wt;
    a[t] = {BigFloat(1), wt, w2t, t * w2t, d[t]};
  }
  BigFloat det = 1;
  for (int c = 0; c < 5; ++c) {
    int piv = c;
    for (int r = c + 1; r < 5; ++r)
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(a[c], a[piv]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < 5; ++r) {
      const BigFloat f = a[r][c] / a[c][c];
      for (int k = c; k < 5; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

// d_t = l_{m+t+1,n} - l_{m+t,n} = 2 l0 + A w^t + (B + C t) w^2t
RowFit fit_row(const SpectrumTable& table, int m, int n) {
  std::vector<BigFloat> d(5);
  for (int t = 0; t < 5; ++t) d[t] = table.at(m + t + 1, n) - table.at(m + t, n);
  const BigFloat dd0 = d[1] - d[0], dd1 = d[2] - d[1];
  if (dd0 == 0) throw ConvergenceError("extract_frame: row " + std::to_string(n) + " shows no decay");
  BigFloat w0 = dd1 / dd0;
  if (!(w0 > 0 && w0 < 1)) throw ConvergenceError("extract_frame: ratio estimate outside (0, 1)");
  BigFloat w1 = w0 * (1 + pow10_neg(6));
  BigFloat g0 = prony_det(d, w0), g1 = prony_det(d, w1);
  const BigFloat tol = pow10_neg(static_cast<int>(working_precision()) - 10);
  for (int it = 0; it < 200 && g1 != g0; ++it) {
    const BigFloat w2 = w1 - g1 * (w1 - w0) / (g1 - g0);
    w0 = w1;
    g0 = g1;
    w1 = w2;
    g1 = prony_det(d, w1);
    if (abs(w1 - w0) < tol * w1) break;
  }
  const BigFloat w = w1;
  std::vector<std::vector<BigFloat>> a;
  std::vector<BigFloat> b;
  for (int t = 0; t < 4; ++t) {
    const BigFloat wt = pow(w, t), w2t = wt * wt;
    a.push_back({BigFloat(1), wt, w2t, t * w2t});
    b.push_back(d[t]);
  }
  const std::vector<BigFloat> x = detail::solve_dense(a, b);
  return {x[0] / 2, w, x[1]};
}

// s_t = l_{m+t,m+t} - 4 (m+t) l0 = 2 L + A w^t + (B + C t) w^2t
BigFloat fit_diagonal(const SpectrumTable& table, int m, const BigFloat& l0, const BigFloat& w) {
  std::vector<std::vector<BigFloat>> a;
  std::vector<BigFloat> b;
  for (int t = 0; t < 4; ++t) {
    const BigFloat wt = pow(w, t), w2t = wt * wt;
    a.push_back({BigFloat(1), wt, w2t, t * w2t});
    b.push_back(table.at(m + t, m + t) - 4 * (m + t) * l0);
  }
  return detail::solve_dense(a, b)[0] / 2;
}

}  // namespace

Frame extract_frame(const SpectrumTable& table) {
  if (table.values.empty()) throw Error("extract_frame: empty spectrum");
  int n_max = table.values.begin()->first.second;
  for (const auto& [mn, v] : table.values) n_max = std::max(n_max, mn.second);
  const int m_max = table.m_max();
  const int m = m_max - 5;
  // rows n_max .. n_max - 3 over [m, m_max], diagonals over [m_max - 7, m_max]
  auto need = [&](int a, int b) {
    if (!table.has(a, b))
      throw Error("extract_frame: grid too small, missing cell (" + std::to_string(a) + ", " + std::to_string(b) + ")");
  };
  for (int k = m_max - 7; k <= m_max; ++k) need(k, k);
  for (int k = m; k <= m_max; ++k)
    for (int n = n_max - 3; n <= n_max; ++n) need(k, n);

  // the amplitude of w^t in row n carries a factor 1 + c z_B(n); two
  // neighbouring rows remove it
  auto xi2_of = [&](const RowFit& r0, const RowFit& r1) {
    const BigFloat w = r0.w;
    return BigFloat((r0.A - w * r1.A) / ((1 - w) * (1 - w) * pow(w, m)));
  };
  const RowFit r0 = fit_row(table, m, n_max), r1 = fit_row(table, m, n_max - 1);
  const RowFit r2 = fit_row(table, m, n_max - 2), r3 = fit_row(table, m, n_max - 3);
  Frame f;
  f.window = m;
  f.l0 = r0.l0;
  f.lambda = sqrt(r0.w);
  f.xi2 = xi2_of(r0, r1);
  f.l0_alt = r2.l0;
  f.lambda_alt = sqrt(r2.w);
  f.xi2_alt = xi2_of(r2, r3);
  f.L_inf = fit_diagonal(table, m_max - 3, f.l0, r0.w);
  f.L_inf_alt = fit_diagonal(table, m_max - 7, f.l0, r0.w);
  f.l0_error = abs(f.l0 - f.l0_alt);
  f.lambda_error = abs(f.lambda - f.lambda_alt);
  f.xi2_error = abs(f.xi2 - f.xi2_alt);
  f.L_inf_error = abs(f.L_inf - f.L_inf_alt);
  return f;
}

SeriesModel<Rational> random_rational_model(unsigned seed, int nu) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(-16, 16), den(1, 8);
  auto draw = [&] { return Rational(num(rng), den(rng)); };
  SeriesModel<Rational> md;
  md.lambda = Rational(1, 5);
  md.xi_inf = 2;
  md.l0 = Rational(3, 2);
  md.L_inf = draw();
  for (int j = 1; j < nu; ++j) md.delta.push_back(draw());
  std::vector<std::pair<std::array<int, 2>, Rational>> entries;
  for (int k = 2; k <= nu; ++k)
    for (int p = k; 2 * p >= k; --p) entries.push_back({{p, k - p}, draw()});
  md.a = symmetric_jet<Rational>(std::max(nu, 1), entries);
  return md;
}

RoundTrip rational_roundtrip(const SeriesModel<Rational>& seed, int nu, int lo, int hi) {
  RoundTrip rt;
  rt.seed = seed;
  const GridValues<Rational> grid = synthetic_grid(seed, nu, lo, hi);
  const LcFit<Rational> fit = extract_lc(grid, LcFrame<Rational>{seed.l0, seed.lambda, seed.xi_inf * seed.xi_inf}, nu);
  rt.cells = static_cast<int>(fit.cells.size());
  rt.recovered = invert_to_invariants(fit.lc, nu);
  const Invariants<Rational>& r = rt.recovered;
  auto differ = [&](const std::string& what) {
    if (rt.mismatch.empty()) rt.mismatch = what;
  };
  if (r.L_inf != seed.L_inf) differ("L_inf");
  if (r.a10 != 1 || r.a01 != 1) differ("a10/a01");
  for (int j = 1; j < nu; ++j)
    if (r.delta.at(j - 1) != seed.delta.at(j - 1)) differ("delta_" + std::to_string(j));
  for (int k = 2; k <= nu; ++k)
    for (int p = 0; p <= k; ++p)
      if (r.a.coeff({p, k - p}) != seed.a.coeff({p, k - p})) differ("a_" + std::to_string(p) + std::to_string(k - p));
  rt.exact = rt.mismatch.empty();
  return rt;
}

RecoveryReport recover(const SpectrumTable& table, int nu) {
  RecoveryReport r;
  r.frame = extract_frame(table);
  r.fit = extract_lc(GridValues<BigFloat>(table.values), lc_frame(r.frame), nu);
  bool have_errors = !r.fit.check_cells.empty();
  r.invariants = invert_to_invariants(r.fit.lc, nu, have_errors ? &r.fit.error : nullptr);
  return r;
}

void write_recovery_report(std::ostream& out, const RecoveryReport& r) {
  const Frame& f = r.frame;
  out << "[frame]\n";
  out << "window_m = " << f.window << "\n";
  out << "l0 = " << to_decimal(f.l0) << "\nl0_error = " << to_decimal(f.l0_error, 6) << "\n";
  out << "L_inf = " << to_decimal(f.L_inf) << "\nL_inf_error = " << to_decimal(f.L_inf_error, 6) << "\n";
  out << "lambda = " << to_decimal(f.lambda) << "\nlambda_error = " << to_decimal(f.lambda_error, 6) << "\n";
  out << "xi_inf2 = " << to_decimal(f.xi2) << "\nxi_inf2_error = " << to_decimal(f.xi2_error, 6) << "\n";
  out << "\n[fit]\n";
  out << "cells = " << r.fit.cells.size() << "\ncheck_cells = " << r.fit.check_cells.size() << "\n";
  out << "condition = " << to_decimal(r.fit.condition, 6) << "\n";
  const Invariants<BigFloat>& inv = r.invariants;
  out << "\n[invariants]\n";
  out << "order = " << inv.order << "\n";
  out << "a10 = " << to_decimal(inv.a10) << "\na01 = " << to_decimal(inv.a01) << "\n";
  out << "L_inf = " << to_decimal(inv.L_inf) << "\n";
  for (std::size_t j = 0; j < inv.delta.size(); ++j) {
    const BigFloat e = r.fit.check_cells.empty() ? BigFloat(-1) : r.fit.error.get(static_cast<int>(j) + 2, 0, 1, 0);
    out << "delta_" << j + 1 << " = " << to_decimal(inv.delta[j]) << "\n";
    out << "delta_" << j + 1 << "_lc_error = " << to_decimal(e, 6) << "\n";
  }
  for (int k = 2; k <= inv.order; ++k)
    for (int p = k; 2 * p >= k; --p)
      out << "a_" << p << k - p << " = " << to_decimal(inv.a.coeff({p, k - p})) << "\n";
  for (int k = 1; k <= inv.order; ++k) out << "residual_" << k << " = " << to_decimal(inv.residual[k], 6) << "\n";
}

void write_lc_csv(std::ostream& out, const LcFit<BigFloat>& fit) {
  out << "p,q,i,j,coefficient,error\n";
  fit.lc.for_each([&](int p, int q, int i, int j, const BigFloat& c) {
    out << p << ',' << q << ',' << i << ',' << j << ',' << to_decimal(c) << ',' << to_decimal(fit.error.get(p, q, i, j), 6) << '\n';
  });
}

}  // namespace mls
