#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "mls/errors.hpp"
#include "mls/orbits/spectrum.hpp"
#include "mls/series/series.hpp"

namespace mls {

template <class T>
using GridValues = std::map<std::pair<int, int>, T>;

inline BigFloat to_bigfloat(const BigFloat& x) { return x; }
inline BigFloat to_bigfloat(const Rational& x) {
  return BigFloat(boost::multiprecision::numerator(x)) / BigFloat(boost::multiprecision::denominator(x));
}

/// l0, L_inf, lambda and xi_inf^2 read off the spectrum.
struct Frame {
  BigFloat l0, L_inf, lambda, xi2;
  BigFloat l0_error, L_inf_error, lambda_error, xi2_error;
  /// the same quantities from a disjoint set of cells
  BigFloat l0_alt, L_inf_alt, lambda_alt, xi2_alt;
  int window = 0;  // first m of the fitted window
};

/// Local fits of the leading asymptotics along the last row (n = n_max), the
/// row below it for the alternative estimates, and the diagonal for L_inf.
Frame extract_frame(const SpectrumTable& table);

/// The part of the frame that enters the basis functions of extract_lc.
template <class T>
struct LcFrame {
  T l0, lambda, xi2;
};

inline LcFrame<BigFloat> lc_frame(const Frame& f) { return {f.l0, f.lambda, f.xi2}; }

template <class T>
struct LcFit {
  TriangularSeries<T> lc;
  TriangularSeries<BigFloat> error;  // |fit - fit on the check cells|
  std::vector<std::pair<int, int>> cells, check_cells;
  BigFloat condition;  // smallest relative pivot of the scaled fit system
};

namespace detail {

struct Slot {
  int p, q, i, j;
};

template <class T>
std::vector<Slot> lc_slots(int nu, Grading g) {
  std::vector<Slot> s;
  TriangularSeries<T>(nu, g).for_each([&](int p, int q, int i, int j, const T&) { s.push_back({p, q, i, j}); });
  return s;
}

template <class T>
T power(const T& x, int k) {
  T r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

/// Gaussian elimination with partial pivoting; a is n x n, b has n entries.
template <class T>
std::vector<T> solve_dense(std::vector<std::vector<T>> a, std::vector<T> b) {
  const int n = static_cast<int>(b.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0) throw SingularLinearPart("singular fit system");
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const T f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<T> x(n);
  for (int r = n - 1; r >= 0; --r) {
    T s = b[r];
    for (int k = r + 1; k < n; ++k) s -= a[r][k] * x[k];
    x[r] = s / a[r][r];
  }
  return x;
}

}  // namespace detail

/// Joint fit of every coefficient l^{ij}_{pq} with p + q <= nu to
/// l_{m,n} - (2m + 2n) l0 over a unisolvent set of cells picked greedily by
/// increasing m + n; a second, disjoint set gives the error estimate.
template <class T>
LcFit<T> extract_lc(const GridValues<T>& values, const LcFrame<T>& frame, int nu, Grading basis = Grading::Strict) {
  using detail::power;
  const std::vector<detail::Slot> slots = detail::lc_slots<T>(nu, basis);
  const int U = static_cast<int>(slots.size());

  std::vector<std::pair<int, int>> cand;
  for (const auto& [mn, v] : values) cand.push_back(mn);
  std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) {
    const int sa = a.first + a.second, sb = b.first + b.second;
    if (sa != sb) return sa < sb;
    const int da = std::abs(a.first - a.second), db = std::abs(b.first - b.second);
    if (da != db) return da < db;
    return a < b;
  });

  const T z2 = frame.lambda * frame.lambda;
  auto zk = [&](int k) { return frame.xi2 * power(z2, k); };
  auto row = [&](int m, int n) {
    std::vector<T> r(U);
    const T za = zk(m), zb = zk(n);
    for (int c = 0; c < U; ++c) {
      const auto& s = slots[c];
      r[c] = power(T(m), s.i) * power(T(n), s.j) * power(za, s.p) * power(zb, s.q);
    }
    return r;
  };

  // column scales and the greedy selection run in floating point
  std::map<std::pair<int, int>, std::vector<BigFloat>> frow;
  std::vector<BigFloat> scale(U, BigFloat(0));
  for (const auto& mn : cand) {
    std::vector<T> r = row(mn.first, mn.second);
    std::vector<BigFloat> f(U);
    for (int c = 0; c < U; ++c) {
      f[c] = to_bigfloat(r[c]);
      scale[c] = max(scale[c], BigFloat(abs(f[c])));
    }
    frow[mn] = std::move(f);
  }
  for (int c = 0; c < U; ++c)
    if (scale[c] == 0) throw SingularLinearPart("fit basis vanishes on the grid");
  // pivots below 10^(-P/2) of the row would amplify the noise floor past P/2 digits
  const BigFloat thr = pow10_neg(static_cast<int>(working_precision()) / 2);

  // rank test: exact for rationals, relative pivot threshold otherwise
  constexpr bool exact = std::is_same_v<T, Rational>;
  using E = std::conditional_t<exact, Rational, BigFloat>;
  auto select = [&](std::vector<bool>& used, BigFloat& cond) {
    std::vector<std::pair<int, int>> pick;
    std::vector<std::vector<E>> ech;
    std::vector<int> pcol;
    cond = 1;
    for (std::size_t k = 0; k < cand.size() && static_cast<int>(pick.size()) < U; ++k) {
      if (used[k]) continue;
      std::vector<E> v;
      if constexpr (exact) {
        v = row(cand[k].first, cand[k].second);
      } else {
        v = frow[cand[k]];
        for (int c = 0; c < U; ++c) v[c] /= scale[c];
      }
      E norm0 = 0;
      for (const E& x : v) norm0 = max(norm0, E(abs(x)));
      for (std::size_t e = 0; e < ech.size(); ++e) {
        const E f = v[pcol[e]] / ech[e][pcol[e]];
        if (f == 0) continue;
        for (int c = 0; c < U; ++c) v[c] -= f * ech[e][c];
      }
      int best = 0;
      for (int c = 1; c < U; ++c)
        if (abs(v[c]) > abs(v[best])) best = c;
      if constexpr (exact) {
        if (v[best] == 0) continue;
      } else {
        const BigFloat rel = abs(v[best]) / norm0;
        if (!(rel > thr)) continue;
        cond = min(cond, rel);
      }
      used[k] = true;
      pick.push_back(cand[k]);
      ech.push_back(std::move(v));
      pcol.push_back(best);
    }
    return pick;
  };

  auto solve = [&](const std::vector<std::pair<int, int>>& cells) {
    std::vector<std::vector<T>> a;
    std::vector<T> b;
    for (const auto& [m, n] : cells) {
      a.push_back(row(m, n));
      b.push_back(values.at({m, n}) - T(2 * m + 2 * n) * frame.l0);
    }
    if constexpr (std::is_same_v<T, Rational>) {
      return detail::solve_dense(a, b);
    } else {
      for (auto& r : a)
        for (int c = 0; c < U; ++c) r[c] /= scale[c];
      std::vector<T> x = detail::solve_dense(a, b);
      for (int c = 0; c < U; ++c) x[c] /= scale[c];
      return x;
    }
  };

  LcFit<T> fit;
  std::vector<bool> used(cand.size(), false);
  BigFloat cond2;
  fit.cells = select(used, fit.condition);
  if (static_cast<int>(fit.cells.size()) < U)
    throw SingularLinearPart("grid too small for order " + std::to_string(nu) + ": " + std::to_string(fit.cells.size()) +
                             " independent cells for " + std::to_string(U) + " coefficients");
  fit.check_cells = select(used, cond2);
  const std::vector<T> x = solve(fit.cells);
  fit.lc = TriangularSeries<T>(nu, basis);
  fit.error = TriangularSeries<BigFloat>(nu, basis);
  for (int c = 0; c < U; ++c) fit.lc.set(slots[c].p, slots[c].q, slots[c].i, slots[c].j, x[c]);
  if (static_cast<int>(fit.check_cells.size()) == U) {
    const std::vector<T> y = solve(fit.check_cells);
    for (int c = 0; c < U; ++c) fit.error.set(slots[c].p, slots[c].q, slots[c].i, slots[c].j, to_bigfloat(T(abs(x[c] - y[c]))));
  } else {
    fit.check_cells.clear();
    for (int c = 0; c < U; ++c) fit.error.set(slots[c].p, slots[c].q, slots[c].i, slots[c].j, BigFloat(-1));
  }
  return fit;
}

template <class T>
struct Invariants {
  int order = 0;
  std::vector<T> delta;  // delta[j-1] = delta_j, j <= order - 1
  Jet2<T> a;             // symmetric, a_00 = 0
  T a10, a01, L_inf;
  /// per order: max |forward - extracted| over all coefficients of that order
  std::vector<BigFloat> residual;
};

/// Order-by-order inversion. At order k the unknowns {a_pq : p + q = k} and
/// delta_{k-1} enter the order-k coefficients affinely; the affine map is
/// probed from the exact forward model and the square system
/// l^00_pq (p >= q), l^10_{k,0} is solved. l^00_pq and l^00_qp must agree
/// within 10 times their fit errors, or exactly without errors.
template <class T>
Invariants<T> invert_to_invariants(const TriangularSeries<T>& lc, int nu,
                                   const TriangularSeries<BigFloat>* error = nullptr) {
  if (nu > lc.order()) throw OrderMismatch("invert_to_invariants: lc extracted only through order " + std::to_string(lc.order()));
  Invariants<T> out;
  out.order = nu;
  out.L_inf = lc.get(0, 0, 0, 0) / T(2);
  out.a10 = (T(1) - lc.get(1, 0, 0, 0)) / T(2);
  out.a01 = (T(1) - lc.get(0, 1, 0, 0)) / T(2);
  out.a = Jet2<T>(std::max(nu, 1));
  out.a[std::array<int, 2>{1, 0}] = T(1);
  out.a[std::array<int, 2>{0, 1}] = T(1);
  out.residual.assign(nu + 1, BigFloat(0));
  if (nu >= 1)
    out.residual[1] = max(to_bigfloat(T(abs(out.a10 - T(1)))), to_bigfloat(T(abs(out.a01 - T(1)))));

  for (int k = 2; k <= nu; ++k) {
    for (int p = 0; p <= k; ++p) {
      const BigFloat d = abs(to_bigfloat(T(lc.get(p, k - p, 0, 0) - lc.get(k - p, p, 0, 0))));
      const BigFloat tol = error ? BigFloat(10 * (error->get(p, k - p, 0, 0) + error->get(k - p, p, 0, 0))) : BigFloat(0);
      if (d > tol)
        throw ToleranceError("l^00_" + std::to_string(p) + std::to_string(k - p) + " and its mirror disagree");
    }
    auto model_with = [&](const std::vector<T>& x) {
      SeriesModel<T> md;
      md.lambda = T(1);
      md.xi_inf = T(1);
      md.L_inf = out.L_inf;
      md.delta = out.delta;
      md.delta.push_back(x.back());
      md.a = out.a.with_order(k);
      int idx = 0;
      for (int p = k; 2 * p >= k; --p) {
        md.a[std::array<int, 2>{p, k - p}] = x[idx];
        md.a[std::array<int, 2>{k - p, p}] = x[idx];
        ++idx;
      }
      return md;
    };
    auto targets = [&](const TriangularSeries<T>& s) {
      std::vector<T> t;
      for (int p = k; 2 * p >= k; --p) t.push_back(s.get(p, k - p, 0, 0));
      t.push_back(s.get(k, 0, 1, 0));
      return t;
    };
    const int n_a = k / 2 + 1;
    std::vector<T> x0(n_a + 1, T(0));
    const std::vector<T> base = targets(length_series(model_with(x0), k).ell);
    std::vector<std::vector<T>> A(n_a + 1, std::vector<T>(n_a + 1));
    for (int c = 0; c <= n_a; ++c) {
      std::vector<T> e = x0;
      e[c] = T(1);
      const std::vector<T> col = targets(length_series(model_with(e), k).ell);
      for (int r = 0; r <= n_a; ++r) A[r][c] = col[r] - base[r];
    }
    const std::vector<T> want = targets(lc);
    std::vector<T> rhs(n_a + 1);
    for (int r = 0; r <= n_a; ++r) rhs[r] = want[r] - base[r];
    const std::vector<T> x = detail::solve_dense(A, rhs);
    const SeriesModel<T> md = model_with(x);
    out.delta = md.delta;
    out.a = md.a.with_order(nu);

    const TriangularSeries<T> fwd = length_series(md, k).ell;
    BigFloat res = 0;
    fwd.for_each([&](int p, int q, int i, int j, const T& c) {
      if (p + q == k && lc.allowed(p, q, i, j)) res = max(res, to_bigfloat(T(abs(c - lc.get(p, q, i, j)))));
    });
    out.residual[k] = res;
  }
  return out;
}

/// l_{m,n} from the forward model for every (m, n) in [lo, hi]^2.
template <class T>
GridValues<T> synthetic_grid(const SeriesModel<T>& model, int nu, int lo, int hi) {
  const TriangularSeries<T> ell = length_series(model, nu).ell;
  GridValues<T> g;
  for (int m = lo; m <= hi; ++m)
    for (int n = lo; n <= hi; ++n) g[{m, n}] = evaluate_length(model, ell, m, n);
  return g;
}

/// Random rational seed: delta_j and a_pq (p >= q, mirrored) with numerators
/// in [-16, 16] over denominators in [1, 8]; lambda = 1/5, xi_inf = 2.
SeriesModel<Rational> random_rational_model(unsigned seed, int nu);

struct RoundTrip {
  bool exact = false;
  int cells = 0;
  SeriesModel<Rational> seed;
  Invariants<Rational> recovered;
  std::string mismatch;  // first differing coefficient
};

/// seed -> length_series -> exact grid over [lo, hi]^2 -> extract_lc ->
/// invert_to_invariants, all in rational arithmetic.
RoundTrip rational_roundtrip(const SeriesModel<Rational>& seed, int nu, int lo, int hi);

struct RecoveryReport {
  Frame frame;
  LcFit<BigFloat> fit;
  Invariants<BigFloat> invariants;
};

/// extract_frame, extract_lc and invert_to_invariants on a numeric spectrum.
RecoveryReport recover(const SpectrumTable& table, int nu);

void write_recovery_report(std::ostream& out, const RecoveryReport& report);
/// Columns p, q, i, j, coefficient, error.
void write_lc_csv(std::ostream& out, const LcFit<BigFloat>& fit);

}  // namespace mls
