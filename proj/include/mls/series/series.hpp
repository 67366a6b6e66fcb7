#pragma once

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mls/errors.hpp"
#include "mls/numerics/bigfloat.hpp"
#include "mls/numerics/jet.hpp"

namespace mls {

/// Bit flags; Strict = StrictA | StrictB.
enum class Grading : unsigned { Triangular = 0, StrictA = 1, StrictB = 2, Strict = 3 };

inline Grading operator&(Grading a, Grading b) {
  return static_cast<Grading>(static_cast<unsigned>(a) & static_cast<unsigned>(b));
}
inline Grading operator|(Grading a, Grading b) {
  return static_cast<Grading>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
inline bool has_flag(Grading g, Grading flag) { return (g & flag) == flag; }

std::string to_string(Grading g);
Grading parse_grading(const std::string& text);

inline constexpr int kMaxSeriesOrder = 6;

/// Truncated formal series sum c^{ij}_{pq} m^i n^j z_A^p z_B^q over p + q <= order,
/// with the polynomial degree in (m, n) of each z-monomial bounded by its
/// grading: i <= p (or max(0, p-1) when strict in z_A), likewise j against q.
template <class T>
class TriangularSeries {
 public:
  TriangularSeries() : TriangularSeries(0, Grading::Strict) {}
  TriangularSeries(int order, Grading grading) : order_(order), grading_(grading) {
    if (order < 0 || order > kMaxSeriesOrder) throw OrderMismatch("series order out of range");
    offset_.assign((order + 1) * (order + 1), -1);
    int n = 0;
    for (int p = 0; p <= order; ++p)
      for (int q = 0; p + q <= order; ++q) {
        offset_[p * (order + 1) + q] = n;
        n += (p + 1) * (q + 1);
      }
    c_.assign(n, T(0));
  }

  static TriangularSeries constant(int order, const T& value) {
    TriangularSeries s(order, Grading::Strict);
    s.set(0, 0, 0, 0, value);
    return s;
  }
  /// z_A or z_B as a series.
  static TriangularSeries z_a(int order) {
    TriangularSeries s(order, Grading::Strict);
    if (order >= 1) s.set(1, 0, 0, 0, T(1));
    return s;
  }
  static TriangularSeries z_b(int order) { return z_a(order).swapped(); }

  int order() const { return order_; }
  Grading grading() const { return grading_; }

  int max_i(int p) const { return has_flag(grading_, Grading::StrictA) ? std::max(0, p - 1) : p; }
  int max_j(int q) const { return has_flag(grading_, Grading::StrictB) ? std::max(0, q - 1) : q; }
  bool allowed(int p, int q, int i, int j) const {
    return p >= 0 && q >= 0 && p + q <= order_ && i >= 0 && j >= 0 && i <= max_i(p) && j <= max_j(q);
  }

  /// Zero outside the stored range.
  T get(int p, int q, int i, int j) const {
    if (p < 0 || q < 0 || p + q > order_ || i < 0 || j < 0 || i > p || j > q) return T(0);
    return c_[slot(p, q, i, j)];
  }

  /// Writes a coefficient; a nonzero value in a slot the grading forbids is an error.
  void set(int p, int q, int i, int j, const T& value) {
    if (p + q > order_) throw OrderMismatch("series: write above order");
    if (!allowed(p, q, i, j)) {
      if (value == 0) return;
      throw GradingError("series: coefficient (" + std::to_string(p) + "," + std::to_string(q) + "," +
                         std::to_string(i) + "," + std::to_string(j) + ") violates " + to_string(grading_) +
                         " grading");
    }
    c_[slot(p, q, i, j)] = value;
  }

  /// Visits every stored coefficient slot allowed by the grading.
  template <class F>
  void for_each(F&& f) const {
    for (int p = 0; p <= order_; ++p)
      for (int q = 0; p + q <= order_; ++q)
        for (int i = 0; i <= max_i(p); ++i)
          for (int j = 0; j <= max_j(q); ++j) f(p, q, i, j, c_[slot(p, q, i, j)]);
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const T& x) { return x == 0; });
  }

  /// Largest |coefficient|.
  T max_abs() const {
    T best(0);
    for (const T& x : c_) {
      T a = x < 0 ? T(-x) : x;
      if (a > best) best = a;
    }
    return best;
  }

  /// True when no coefficient has z-degree below k and the m-degree of every
  /// z_A^p coefficient is at most p - k.
  bool multiple_of_z_a(int k) const {
    for (int p = 0; p <= order_; ++p)
      for (int q = 0; p + q <= order_; ++q)
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= q; ++j)
            if (c_[slot(p, q, i, j)] != 0 && (p < k || i > p - k)) return false;
    return true;
  }

  /// Same coefficients, re-checked against a new grading.
  TriangularSeries with_grading(Grading g) const {
    TriangularSeries r(order_, g);
    copy_into(r);
    return r;
  }

  /// Truncates (or zero-pads) to a new order.
  TriangularSeries with_order(int order) const {
    TriangularSeries r(order, grading_);
    copy_into(r);
    return r;
  }

  /// (m, n, z_A, z_B) -> (n, m, z_B, z_A).
  TriangularSeries swapped() const {
    Grading g = Grading::Triangular;
    if (has_flag(grading_, Grading::StrictA)) g = g | Grading::StrictB;
    if (has_flag(grading_, Grading::StrictB)) g = g | Grading::StrictA;
    TriangularSeries r(order_, g);
    for_each([&](int p, int q, int i, int j, const T& c) {
      if (c != 0) r.set(q, p, j, i, c);
    });
    return r;
  }

  /// F / z_A^k for F a multiple of z_A^k whose z_A^p coefficients have
  /// m-degree at most p - k (k = 1: strict in z_A). The quotient is
  /// triangular up to order - k and keeps strictness in z_B.
  TriangularSeries divided_by_z_a(int k = 1) const {
    if (k < 0 || k > order_) throw OrderMismatch("divided_by_z_a: bad power");
    if (!multiple_of_z_a(k)) throw GradingError("divided_by_z_a: not a graded multiple of z_A^k");
    TriangularSeries r(order_ - k, grading_ & Grading::StrictB);
    for_each([&](int p, int q, int i, int j, const T& c) {
      if (c != 0) r.set(p - k, q, i, j, c);
    });
    return r;
  }

  /// Product with P(m) z_A^d where P has degree at most d; the result is
  /// strict in z_A whenever deg P < d. The order becomes new_order.
  TriangularSeries times_z_a(const std::vector<T>& poly_m, int d, int new_order) const {
    const int deg = static_cast<int>(poly_m.size()) - 1;
    if (deg > d) throw GradingError("times_z_a: polynomial degree exceeds z_A power");
    Grading g = grading_ & Grading::StrictB;
    if (deg < d || (d == 0 && has_flag(grading_, Grading::StrictA))) g = g | Grading::StrictA;
    TriangularSeries r(new_order, g);
    for_each([&](int p, int q, int i, int j, const T& c) {
      if (c == 0 || p + d + q > new_order) return;
      for (int k = 0; k <= deg; ++k)
        if (poly_m[k] != 0) r.add_to(p + d, q, i + k, j, c * poly_m[k]);
    });
    return r;
  }

  template <class U>
  U evaluate(const U& m, const U& n, const U& za, const U& zb) const {
    U sum(0);
    std::vector<U> mp(order_ + 1, U(1)), np(order_ + 1, U(1)), ap(order_ + 1, U(1)), bp(order_ + 1, U(1));
    for (int k = 1; k <= order_; ++k) {
      mp[k] = mp[k - 1] * m;
      np[k] = np[k - 1] * n;
      ap[k] = ap[k - 1] * za;
      bp[k] = bp[k - 1] * zb;
    }
    for_each([&](int p, int q, int i, int j, const T& c) {
      if (c != 0) sum += U(c) * mp[i] * np[j] * ap[p] * bp[q];
    });
    return sum;
  }

  TriangularSeries& operator+=(const TriangularSeries& o) { return *this = combine(*this, o, T(1)); }
  TriangularSeries& operator-=(const TriangularSeries& o) { return *this = combine(*this, o, T(-1)); }
  TriangularSeries& operator*=(const T& s) {
    for (T& x : c_) x *= s;
    return *this;
  }

  friend TriangularSeries operator+(const TriangularSeries& a, const TriangularSeries& b) {
    return combine(a, b, T(1));
  }
  friend TriangularSeries operator-(const TriangularSeries& a, const TriangularSeries& b) {
    return combine(a, b, T(-1));
  }
  friend TriangularSeries operator*(TriangularSeries a, const T& s) { return a *= s; }
  friend TriangularSeries operator*(const T& s, TriangularSeries a) { return a *= s; }

  friend TriangularSeries operator*(const TriangularSeries& a, const TriangularSeries& b) {
    const int K = std::min(a.order_, b.order_);
    TriangularSeries r(K, a.grading_ & b.grading_);
    a.for_each([&](int p1, int q1, int i1, int j1, const T& x) {
      if (x == 0 || p1 + q1 > K) return;
      b.for_each([&](int p2, int q2, int i2, int j2, const T& y) {
        if (y == 0 || p1 + q1 + p2 + q2 > K) return;
        r.add_to(p1 + p2, q1 + q2, i1 + i2, j1 + j2, x * y);
      });
    });
    return r;
  }

  friend bool operator==(const TriangularSeries& a, const TriangularSeries& b) {
    if (a.order_ != b.order_) return false;
    for (int p = 0; p <= a.order_; ++p)
      for (int q = 0; p + q <= a.order_; ++q)
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= q; ++j)
            if (a.c_[a.slot(p, q, i, j)] != b.c_[b.slot(p, q, i, j)]) return false;
    return true;
  }

 private:
  int slot(int p, int q, int i, int j) const { return offset_[p * (order_ + 1) + q] + i * (q + 1) + j; }

  void add_to(int p, int q, int i, int j, const T& v) {
    if (p + q > order_) return;
    if (i > p || j > q) throw GradingError("series: m/n degree above z degree");
    T& c = c_[slot(p, q, i, j)];
    T next = c + v;
    if (!allowed(p, q, i, j) && next != 0) set(p, q, i, j, next);
    c = next;
  }

  void copy_into(TriangularSeries& r) const {
    for (int p = 0; p <= std::min(order_, r.order_); ++p)
      for (int q = 0; p + q <= std::min(order_, r.order_); ++q)
        for (int i = 0; i <= p; ++i)
          for (int j = 0; j <= q; ++j) r.set(p, q, i, j, c_[slot(p, q, i, j)]);
  }

  static TriangularSeries combine(const TriangularSeries& a, const TriangularSeries& b, const T& sb) {
    const int K = std::min(a.order_, b.order_);
    TriangularSeries r(K, a.grading_ & b.grading_);
    a.for_each([&](int p, int q, int i, int j, const T& x) {
      if (x != 0 && p + q <= K) r.add_to(p, q, i, j, x);
    });
    b.for_each([&](int p, int q, int i, int j, const T& y) {
      if (y != 0 && p + q <= K) r.add_to(p, q, i, j, sb * y);
    });
    return r;
  }

  int order_;
  Grading grading_;
  std::vector<int> offset_;
  std::vector<T> c_;
};

/// sum_k f[k] S^k; S must have no constant term.
template <class T>
TriangularSeries<T> compose_analytic(const std::vector<T>& f, const TriangularSeries<T>& s) {
  if (s.get(0, 0, 0, 0) != 0) throw OrderMismatch("compose_analytic: argument has a constant term");
  const int K = s.order();
  TriangularSeries<T> r(K, s.grading());
  for (int k = std::min<int>(K, static_cast<int>(f.size()) - 1); k >= 0; --k) {
    r = r * s;
    r += TriangularSeries<T>::constant(K, f[k]);
  }
  return r;
}

/// sum f_{ij} A^i B^j for a bivariate jet f; A and B have no constant terms.
template <class T>
TriangularSeries<T> compose_bivariate(const Jet2<T>& f, const TriangularSeries<T>& a, const TriangularSeries<T>& b) {
  if (a.get(0, 0, 0, 0) != 0 || b.get(0, 0, 0, 0) != 0)
    throw OrderMismatch("compose_bivariate: arguments have constant terms");
  const int K = std::min(a.order(), b.order());
  const int D = std::min(K, f.order());
  std::vector<TriangularSeries<T>> pa{TriangularSeries<T>::constant(K, T(1))}, pb = pa;
  for (int k = 1; k <= D; ++k) {
    pa.push_back(pa.back() * a.with_order(K));
    pb.push_back(pb.back() * b.with_order(K));
  }
  TriangularSeries<T> r(K, a.grading() & b.grading());
  for (std::size_t s = 0; s < f.size(); ++s) {
    const auto& e = f.exponents(s);
    if (f[s] == 0 || e[0] + e[1] > D) continue;
    r += (pa[e[0]] * pb[e[1]]) * f[s];
  }
  return r;
}

/// Coefficients (in m) of the binomial polynomial C(2m, i).
template <class T>
std::vector<T> binomial_2m(int i) {
  std::vector<T> poly{T(1)};
  for (int k = 0; k < i; ++k) {
    // multiply by (2m - k) / (k + 1)
    std::vector<T> next(poly.size() + 1, T(0));
    for (std::size_t d = 0; d < poly.size(); ++d) {
      next[d + 1] += poly[d] * T(2);
      next[d] -= poly[d] * T(k);
    }
    for (T& x : next) x /= T(k + 1);
    poly = std::move(next);
  }
  return poly;
}

// ---------------------------------------------------------------------------
// Forward model (delta, a) -> h_A, h_B, length spectrum.

/// Inputs of the forward model. delta[j-1] = delta_j, a is the jet of the
/// generating function in energy coordinates (a_10 = a_01 = 1, symmetric).
template <class T>
struct SeriesModel {
  T lambda{0};
  std::vector<T> delta;
  Jet2<T> a;
  T xi_inf{1};
  T L_inf{0};
  T l0{0};
};

template <class T>
struct GluingSeries {
  Jet2<T> u;      // u(h_A, h_B), exact through degree order - 1
  Jet2<T> a_hat;  // M(eta_A, eta_B)
};

/// Jet of M~ = sum a_ij h_A^i h_B^j with a_10 = a_01 = 1 and the given
/// coefficients of total degree >= 2 (symmetric fill from i >= j entries).
template <class T>
Jet2<T> symmetric_jet(int order, const std::vector<std::pair<std::array<int, 2>, T>>& entries) {
  Jet2<T> a(order);
  if (order >= 1) {
    a[{1, 0}] = T(1);
    a[{0, 1}] = T(1);
  }
  for (const auto& [e, v] : entries) {
    if (e[0] + e[1] > order) continue;
    a[e] = v;
    a[{e[1], e[0]}] = v;
  }
  return a;
}

template <class T>
void check_gluing_input(const Jet2<T>& a) {
  if (a.order() < 1 || a.coeff({0, 0}) != 0) throw Error("generating function must vanish at the origin");
  if (a.coeff({1, 0}) != 1 || a.coeff({0, 1}) != 1) throw Error("generating function needs a_10 = a_01 = 1");
  for (std::size_t s = 0; s < a.size(); ++s) {
    const auto& e = a.exponents(s);
    if (a[s] != a.coeff({e[1], e[0]})) throw Error("generating function is not symmetric");
  }
}

/// u = v^2 / xi_inf^2 - 1 through the chain M -> Psi -> v. M is solved from
/// M(eta) = M~(eta_A dM/deta_A, eta_B dM/deta_B) degree by degree in the
/// scaled variable xi_inf * eta, where the Euler operator turns the degree-d
/// equation into (1 - d) M_d = R_d.
template <class T>
GluingSeries<T> u_from_gluing(const Jet2<T>& a, const T& xi_inf, int nu) {
  check_gluing_input(a);
  const int K = std::max(nu, 1);
  const Jet2<T> x = Jet2<T>::variable(K, 0), y = Jet2<T>::variable(K, 1);
  Jet2<T> N = x + y;
  for (int d = 2; d <= K; ++d) {
    const Jet2<T> ha = x * N.derivative(0), hb = y * N.derivative(1);
    std::vector<Jet2<T>> pa{Jet2<T>::constant(K, T(1))}, pb = pa;
    for (int k = 1; k <= d; ++k) {
      pa.push_back(pa.back() * ha);
      pb.push_back(pb.back() * hb);
    }
    Jet2<T> R(K);
    for (int p = 0; p <= d; ++p)
      for (int q = 0; p + q <= d; ++q) {
        if (p + q < 2) continue;
        T c = a.coeff({p, q});
        if (c != 0) R += (pa[p] * pb[q]) * c;
      }
    N += R.degree_part(d) / T(1 - d);
  }
  const Jet2<T> Nx = N.derivative(0);
  const Jet2Map<T> psi{x * Nx, y * N.derivative(1)};
  const Jet2Map<T> psi_inv = invert_map<T, 2>(psi);
  const Jet2<T> w = compose<T, 2, 2>(Nx, psi_inv);
  GluingSeries<T> out;
  out.u = (w * w - T(1)).truncated(K - 1);
  out.a_hat = N;
  for (std::size_t s = 0; s < N.size(); ++s) {
    const auto& e = N.exponents(s);
    T scale(1);
    for (int k = 0; k < e[0] + e[1]; ++k) scale *= xi_inf;
    out.a_hat[s] = N[s] * scale;
  }
  return out;
}

/// delta_hat_1..delta_hat_K of Sigma(h) = sum delta_hat_j h^{j+1}. With
/// g = log(1 + delta(h)), Sigma = h g - int g, so delta_hat_k = k/(k+1) g_k.
template <class T>
std::vector<T> sigma_from_mu(const std::vector<T>& delta, int K) {
  if (K < 1) return {};
  Jet1<T> d(K);
  for (int j = 1; j <= K && j <= static_cast<int>(delta.size()); ++j) d[std::array<int, 1>{j}] = delta[j - 1];
  std::vector<T> log1p(K + 1, T(0));
  for (int k = 1; k <= K; ++k) log1p[k] = T(k % 2 == 1 ? 1 : -1) / T(k);
  const Jet1<T> g = compose_series(log1p, d);
  std::vector<T> out(K);
  for (int k = 1; k <= K; ++k) out[k - 1] = g[std::array<int, 1>{k}] * T(k) / T(k + 1);
  return out;
}

template <class T>
struct EnergySeries {
  TriangularSeries<T> h_a, h_b;
  int sweeps = 0;
};

namespace detail {

template <class T>
bool series_close(const TriangularSeries<T>& a, const TriangularSeries<T>& b) {
  if constexpr (std::is_same_v<T, Rational>) {
    return a == b;
  } else {
    const T scale = std::max(T(1), a.max_abs());
    return (a - b).max_abs() <= scale * pow10_neg(static_cast<int>(working_precision()) - 10);
  }
}

}  // namespace detail

/// One substitution of (h_A, h_B) into h_A = (1 + u(h_A, h_B)) (1 + delta(h_A))^{2m} z_A,
/// with the binomial expanded as sum_i C(2m, i) delta(h_A)^i.
template <class T>
TriangularSeries<T> energy_sweep(const std::vector<T>& delta, const Jet2<T>& u, const TriangularSeries<T>& h_a,
                                 const TriangularSeries<T>& h_b) {
  const int nu = h_a.order();
  if (nu == 0) return TriangularSeries<T>(0, Grading::Strict);
  std::vector<T> dpoly(nu, T(0));
  for (int j = 1; j < nu && j <= static_cast<int>(delta.size()); ++j) dpoly[j] = delta[j - 1];
  const TriangularSeries<T> ratio = compose_analytic(dpoly, h_a).divided_by_z_a(1);  // delta(h_A)/z_A
  TriangularSeries<T> binom(nu - 1, Grading::StrictB);
  TriangularSeries<T> power = TriangularSeries<T>::constant(nu - 1, T(1));
  for (int i = 0; i < nu; ++i) {
    binom += power.times_z_a(binomial_2m<T>(i), i, nu - 1);
    power = power * ratio;
  }
  const TriangularSeries<T> one_plus_u =
      TriangularSeries<T>::constant(nu - 1, T(1)) + compose_bivariate(u, h_a.with_order(nu - 1), h_b.with_order(nu - 1));
  return (one_plus_u * binom).times_z_a({T(1)}, 1, nu).with_grading(Grading::Strict);
}

/// Solves the implicit energy equations by fixed-point sweeps; sweep k fixes
/// the z-degree k part, so nu sweeps give the exact truncation. h_B is the swap.
template <class T>
EnergySeries<T> solve_energy_series(const std::vector<T>& delta, const Jet2<T>& u, int nu) {
  EnergySeries<T> out;
  out.h_a = TriangularSeries<T>(nu, Grading::Strict);
  for (int k = 0; k < nu; ++k) {
    out.h_a = energy_sweep(delta, u, out.h_a, out.h_a.swapped());
    ++out.sweeps;
  }
  const TriangularSeries<T> check = energy_sweep(delta, u, out.h_a, out.h_a.swapped());
  if (!detail::series_close(check, out.h_a)) throw ConvergenceError("energy series did not settle in nu sweeps");
  out.h_b = out.h_a.swapped();
  return out;
}

template <class T>
struct LengthSeries {
  TriangularSeries<T> ell;  // ell_{m,n} - (2m + 2n) l0
  EnergySeries<T> energy;
  GluingSeries<T> gluing;
  std::vector<T> delta_hat;
};

/// Forward model: 2 L_inf + 2m Sigma(h_A) + 2n Sigma(h_B) + h_A + h_B - 2 M~(h_A, h_B).
template <class T>
LengthSeries<T> length_series(const SeriesModel<T>& model, int nu) {
  LengthSeries<T> out;
  out.gluing = u_from_gluing(model.a, model.xi_inf, std::max(nu, 1));
  out.energy = solve_energy_series(model.delta, out.gluing.u, nu);
  out.delta_hat = sigma_from_mu(model.delta, std::max(nu - 1, 0));
  const auto& ha = out.energy.h_a;
  const auto& hb = out.energy.h_b;

  TriangularSeries<T> ell = TriangularSeries<T>::constant(nu, T(2) * model.L_inf);
  if (nu >= 2) {
    std::vector<T> sig(nu + 1, T(0));
    for (int j = 1; j + 1 <= nu; ++j) sig[j + 1] = out.delta_hat[j - 1];
    const TriangularSeries<T> action = compose_analytic(sig, ha).divided_by_z_a(2).times_z_a({T(0), T(2)}, 2, nu);
    ell += action + action.swapped();
  }
  ell += ha + hb;
  ell -= compose_bivariate(model.a.with_order(nu), ha, hb) * T(2);
  out.ell = ell.with_grading(Grading::Strict);
  return out;
}

/// z = xi_inf^2 lambda^{2k}.
template <class T>
T z_of(const SeriesModel<T>& model, int k) {
  T z = model.xi_inf * model.xi_inf;
  const T l2 = model.lambda * model.lambda;
  for (int i = 0; i < k; ++i) z *= l2;
  return z;
}

/// Evaluates the truncated spectrum (2m + 2n) l0 + ell(m, n, z_A, z_B).
template <class T>
T evaluate_length(const SeriesModel<T>& model, const TriangularSeries<T>& ell, int m, int n) {
  return T(2 * m + 2 * n) * model.l0 + ell.evaluate(T(m), T(n), z_of(model, m), z_of(model, n));
}

// ---------------------------------------------------------------------------
// Dump format: header line "# order <nu> grading <name>", then one line
// "p q i j coefficient" per nonzero coefficient.

template <class T>
void write_series(std::ostream& os, const TriangularSeries<T>& s) {
  os << "# order " << s.order() << " grading " << to_string(s.grading()) << "\n";
  s.for_each([&](int p, int q, int i, int j, const T& c) {
    if (c == 0) return;
    os << p << ' ' << q << ' ' << i << ' ' << j << ' ';
    if constexpr (std::is_same_v<T, Rational>)
      os << c.str();
    else
      os << to_decimal(c);
    os << '\n';
  });
}

template <class T>
TriangularSeries<T> read_series(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("series dump: empty input");
  std::istringstream head(line);
  std::string hash, korder, kgrading, gname;
  int order = 0;
  if (!(head >> hash >> korder >> order >> kgrading >> gname) || hash != "#" || korder != "order")
    throw Error("series dump: bad header");
  TriangularSeries<T> s(order, parse_grading(gname));
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    int p, q, i, j;
    std::string value;
    if (!(ls >> p >> q >> i >> j >> value)) throw Error("series dump: bad line '" + line + "'");
    s.set(p, q, i, j, T(value));
  }
  return s;
}

}  // namespace mls
