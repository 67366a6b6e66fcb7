#pragma once

// Truncated multivariate Taylor polynomials ("jets"), stored densely by total
// degree. T is any field type (BigFloat, Rational, double).

#include <algorithm>
#include <array>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "mls/errors.hpp"

namespace mls {

inline constexpr int kMaxJetOrder = 16;

namespace detail {

template <int N>
struct MonomialTable {
  int order = 0;
  std::vector<std::array<int, N>> exps;
  std::vector<int> degree;
  std::vector<int> degree_start;  // size order + 2
  std::vector<int> dense;         // (order+1)^N -> index or -1
  // products[ia] lists (ib, ic) with exps[ia] + exps[ib] = exps[ic]
  std::vector<std::vector<std::pair<int, int>>> products;

  int dense_key(const std::array<int, N>& e) const {
    int key = 0;
    for (int v = 0; v < N; ++v) key = key * (order + 1) + e[v];
    return key;
  }

  int index(const std::array<int, N>& e) const {
    int total = 0;
    for (int v = 0; v < N; ++v) {
      if (e[v] < 0) return -1;
      total += e[v];
    }
    if (total > order) return -1;
    return dense[dense_key(e)];
  }
};

template <int N>
void enumerate_degree(int d, int var, std::array<int, N>& cur, std::vector<std::array<int, N>>& out) {
  if (var == N - 1) {
    cur[var] = d;
    out.push_back(cur);
    return;
  }
  for (int k = d; k >= 0; --k) {
    cur[var] = k;
    enumerate_degree<N>(d - k, var + 1, cur, out);
  }
}

template <int N>
std::unique_ptr<MonomialTable<N>> build_table(int order) {
  auto t = std::make_unique<MonomialTable<N>>();
  t->order = order;
  for (int d = 0; d <= order; ++d) {
    t->degree_start.push_back(static_cast<int>(t->exps.size()));
    std::array<int, N> cur{};
    enumerate_degree<N>(d, 0, cur, t->exps);
    while (t->degree.size() < t->exps.size()) t->degree.push_back(d);
  }
  t->degree_start.push_back(static_cast<int>(t->exps.size()));
  int dense_size = 1;
  for (int v = 0; v < N; ++v) dense_size *= order + 1;
  t->dense.assign(dense_size, -1);
  for (std::size_t i = 0; i < t->exps.size(); ++i) t->dense[t->dense_key(t->exps[i])] = static_cast<int>(i);
  const int count = static_cast<int>(t->exps.size());
  t->products.resize(count);
  for (int ia = 0; ia < count; ++ia) {
    for (int ib = 0; ib < count; ++ib) {
      if (t->degree[ia] + t->degree[ib] > order) continue;
      std::array<int, N> e{};
      for (int v = 0; v < N; ++v) e[v] = t->exps[ia][v] + t->exps[ib][v];
      t->products[ia].emplace_back(ib, t->index(e));
    }
  }
  return t;
}

template <int N>
const MonomialTable<N>& monomials(int order) {
  static std::array<std::unique_ptr<MonomialTable<N>>, kMaxJetOrder + 1> tables;
  static std::array<std::once_flag, kMaxJetOrder + 1> flags;
  if (order < 0 || order > kMaxJetOrder) throw OrderMismatch("jet order " + std::to_string(order) + " unsupported");
  std::call_once(flags[order], [&] { tables[order] = build_table<N>(order); });
  return *tables[order];
}

template <class T>
bool is_zero(const T& x) {
  return x == 0;
}

}  // namespace detail

template <class T, int N>
class Jet {
 public:
  using Exponents = std::array<int, N>;

  Jet() : Jet(0) {}
  explicit Jet(int order) : table_(&detail::monomials<N>(order)), c_(table_->exps.size(), T(0)) {}

  static Jet constant(int order, const T& value) {
    Jet j(order);
    j.c_[0] = value;
    return j;
  }

  /// value + x_var
  static Jet variable(int order, int var, const T& value = T(0)) {
    Jet j = constant(order, value);
    if (order >= 1) {
      Exponents e{};
      e[var] = 1;
      j[e] = T(1);
    }
    return j;
  }

  static std::array<Jet, N> identity(int order) {
    std::array<Jet, N> id;
    for (int v = 0; v < N; ++v) id[v] = variable(order, v);
    return id;
  }

  int order() const { return table_->order; }
  std::size_t size() const { return c_.size(); }
  const Exponents& exponents(std::size_t i) const { return table_->exps[i]; }
  int degree_of(std::size_t i) const { return table_->degree[i]; }
  int degree_begin(int d) const { return table_->degree_start[d]; }
  int degree_end(int d) const { return table_->degree_start[d + 1]; }

  T& operator[](std::size_t i) { return c_[i]; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T& operator[](const Exponents& e) { return c_[checked_index(e)]; }
  const T& operator[](const Exponents& e) const { return c_[checked_index(e)]; }

  /// Coefficient of x^e, zero when e is outside the stored range.
  T coeff(const Exponents& e) const {
    int i = table_->index(e);
    return i < 0 ? T(0) : c_[i];
  }

  const T& constant_term() const { return c_[0]; }

  /// Coefficient of x_var in the linear part.
  T linear(int var) const {
    Exponents e{};
    e[var] = 1;
    return coeff(e);
  }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const T& x) { return detail::is_zero(x); });
  }

  /// Largest absolute coefficient.
  T max_abs() const {
    T best(0);
    for (const T& x : c_) {
      T a = x < 0 ? T(-x) : x;
      if (a > best) best = a;
    }
    return best;
  }

  Jet degree_part(int d) const {
    Jet r(order());
    if (d < 0 || d > order()) return r;
    for (int i = degree_begin(d); i < degree_end(d); ++i) r.c_[i] = c_[i];
    return r;
  }

  /// Drops all terms of total degree above d (order is kept).
  Jet truncated(int d) const {
    Jet r(*this);
    for (std::size_t i = 0; i < r.c_.size(); ++i)
      if (degree_of(i) > d) r.c_[i] = T(0);
    return r;
  }

  /// Same coefficients at a different order; extending pads with zeros.
  Jet with_order(int new_order) const {
    Jet r(new_order);
    for (std::size_t i = 0; i < r.c_.size(); ++i) {
      int j = table_->index(r.exponents(i));
      if (j >= 0) r.c_[i] = c_[j];
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    check_order(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_order(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(const T& s) {
    for (T& x : c_) x *= s;
    return *this;
  }
  Jet& operator/=(const T& s) {
    for (T& x : c_) x /= s;
    return *this;
  }
  Jet& operator+=(const T& s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(const T& s) {
    c_[0] -= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (T& x : a.c_) x = -x;
    return a;
  }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, const T& s) { return a /= s; }
  friend Jet operator+(Jet a, const T& s) { return a += s; }
  friend Jet operator+(const T& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const T& s) { return a -= s; }
  friend Jet operator-(const T& s, const Jet& a) { return (-a) += s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_order(b);
    Jet r(a.order());
    const auto& prods = a.table_->products;
    for (std::size_t ia = 0; ia < a.c_.size(); ++ia) {
      if (detail::is_zero(a.c_[ia])) continue;
      for (const auto& [ib, ic] : prods[ia]) {
        if (detail::is_zero(b.c_[ib])) continue;
        r.c_[ic] += a.c_[ia] * b.c_[ib];
      }
    }
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

  friend bool operator==(const Jet& a, const Jet& b) { return a.order() == b.order() && a.c_ == b.c_; }

  /// Partial derivative in x_var. Exact through degree order-1; the top
  /// degree of the result is zero.
  Jet derivative(int var) const {
    Jet r(order());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const Exponents& e = exponents(i);
      if (e[var] == 0 || detail::is_zero(c_[i])) continue;
      Exponents f = e;
      f[var] -= 1;
      r.c_[table_->index(f)] += c_[i] * T(e[var]);
    }
    return r;
  }

  /// Antiderivative in x_var; terms pushed above the order are dropped.
  Jet integral(int var) const {
    Jet r(order());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      Exponents f = exponents(i);
      f[var] += 1;
      int j = table_->index(f);
      if (j >= 0) r.c_[j] = c_[i] / T(f[var]);
    }
    return r;
  }

  T evaluate(const std::array<T, N>& x) const {
    std::array<std::vector<T>, N> pw;
    for (int v = 0; v < N; ++v) {
      pw[v].assign(order() + 1, T(1));
      for (int k = 1; k <= order(); ++k) pw[v][k] = pw[v][k - 1] * x[v];
    }
    T sum(0);
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (detail::is_zero(c_[i])) continue;
      T term = c_[i];
      for (int v = 0; v < N; ++v)
        if (exponents(i)[v] > 0) term *= pw[v][exponents(i)[v]];
      sum += term;
    }
    return sum;
  }

  const std::vector<T>& coefficients() const { return c_; }

 private:
  int checked_index(const Exponents& e) const {
    int i = table_->index(e);
    if (i < 0) throw OrderMismatch("monomial outside jet order");
    return i;
  }
  void check_order(const Jet& o) const {
    if (o.order() != order()) throw OrderMismatch("jet orders differ");
  }

  const detail::MonomialTable<N>* table_;
  std::vector<T> c_;
};

template <class T>
using Jet1 = Jet<T, 1>;
template <class T>
using Jet2 = Jet<T, 2>;
template <class T>
using Jet3 = Jet<T, 3>;
template <class T>
using Jet2Map = std::array<Jet<T, 2>, 2>;

/// Sum_k a[k] g^k for g without constant term (Horner).
template <class T, int N>
Jet<T, N> compose_series(const std::vector<T>& a, const Jet<T, N>& g) {
  if (!detail::is_zero(g.constant_term())) throw OrderMismatch("compose_series: argument has a constant term");
  const int K = g.order();
  Jet<T, N> r(K);
  for (int k = std::min<int>(K, static_cast<int>(a.size()) - 1); k >= 0; --k) {
    r = r * g;
    r += a[k];
  }
  return r;
}

template <class T, int N>
Jet<T, N> reciprocal(const Jet<T, N>& f) {
  const T c0 = f.constant_term();
  if (detail::is_zero(c0)) throw SingularLinearPart("reciprocal of a jet with zero constant term");
  const int K = f.order();
  std::vector<T> a(K + 1);
  T p = T(1) / c0;
  for (int k = 0; k <= K; ++k) {
    a[k] = p;
    p = -p / c0;
  }
  return compose_series(a, f - c0);
}

template <class T, int N>
Jet<T, N> sqrt(const Jet<T, N>& f) {
  using std::sqrt;
  const T c0 = f.constant_term();
  if (!(c0 > 0)) throw SingularLinearPart("sqrt of a jet with non-positive constant term");
  const int K = f.order();
  std::vector<T> a(K + 1);
  T s = sqrt(c0);
  a[0] = s;
  for (int k = 1; k <= K; ++k) a[k] = a[k - 1] * (T(3) - T(2 * k)) / (T(2 * k) * c0);
  return compose_series(a, f - c0);
}

template <class T, int N>
Jet<T, N> exp(const Jet<T, N>& f) {
  using std::exp;
  const T c0 = f.constant_term();
  const int K = f.order();
  std::vector<T> a(K + 1);
  a[0] = exp(c0);
  for (int k = 1; k <= K; ++k) a[k] = a[k - 1] / T(k);
  return compose_series(a, f - c0);
}

template <class T, int N>
Jet<T, N> log(const Jet<T, N>& f) {
  using std::log;
  const T c0 = f.constant_term();
  if (!(c0 > 0)) throw SingularLinearPart("log of a jet with non-positive constant term");
  const int K = f.order();
  std::vector<T> a(K + 1);
  a[0] = log(c0);
  T p = T(1) / c0;
  for (int k = 1; k <= K; ++k) {
    a[k] = (k % 2 == 1 ? p : T(-p)) / T(k);
    p /= c0;
  }
  return compose_series(a, f - c0);
}

namespace detail {
template <class T>
std::vector<T> sincos_coeffs(const T& s, const T& c, int K, int phase) {
  const T cycle[4] = {s, c, -s, -c};
  std::vector<T> a(K + 1);
  T fact(1);
  for (int k = 0; k <= K; ++k) {
    if (k > 0) fact *= T(k);
    a[k] = cycle[(k + phase) % 4] / fact;
  }
  return a;
}
}  // namespace detail

template <class T, int N>
Jet<T, N> sin(const Jet<T, N>& f) {
  using std::cos;
  using std::sin;
  const T c0 = f.constant_term();
  return compose_series(detail::sincos_coeffs(T(sin(c0)), T(cos(c0)), f.order(), 0), f - c0);
}

template <class T, int N>
Jet<T, N> cos(const Jet<T, N>& f) {
  using std::cos;
  using std::sin;
  const T c0 = f.constant_term();
  return compose_series(detail::sincos_coeffs(T(sin(c0)), T(cos(c0)), f.order(), 1), f - c0);
}

/// Truncation of f∘g. g must have zero constant terms.
template <class T, std::size_t M, int N>
Jet<T, N> compose(const Jet<T, static_cast<int>(M)>& f, const std::array<Jet<T, N>, M>& g) {
  const int K = f.order();
  for (std::size_t v = 0; v < M; ++v) {
    if (g[v].order() != K) throw OrderMismatch("compose: orders of f and g differ");
    if (!detail::is_zero(g[v].constant_term()))
      throw OrderMismatch("compose: inner map has a constant term; recenter f first");
  }
  std::array<std::vector<Jet<T, N>>, M> pw;
  for (std::size_t v = 0; v < M; ++v) {
    pw[v].reserve(K + 1);
    pw[v].push_back(Jet<T, N>::constant(K, T(1)));
    for (int k = 1; k <= K; ++k) pw[v].push_back(pw[v][k - 1] * g[v]);
  }
  Jet<T, N> r(K);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (detail::is_zero(f[i])) continue;
    const auto& e = f.exponents(i);
    Jet<T, N> term = Jet<T, N>::constant(K, f[i]);
    bool first = true;
    for (std::size_t v = 0; v < M; ++v) {
      if (e[v] == 0) continue;
      if (first) {
        term = pw[v][e[v]] * f[i];
        first = false;
      } else {
        term = term * pw[v][e[v]];
      }
    }
    r += term;
  }
  return r;
}

template <class T, std::size_t M, int N>
std::array<Jet<T, N>, M> compose(const std::array<Jet<T, static_cast<int>(M)>, M>& f,
                                 const std::array<Jet<T, N>, M>& g) {
  std::array<Jet<T, N>, M> r;
  for (std::size_t v = 0; v < M; ++v) r[v] = compose<T, M, N>(f[v], g);
  return r;
}

/// F(x_1..x_N, w) with w substituted by a jet in x_1..x_N (zero constant term).
template <class T, int N>
Jet<T, N> substitute_last(const Jet<T, N + 1>& F, const Jet<T, N>& w) {
  const int K = F.order();
  if (w.order() != K) throw OrderMismatch("substitute_last: orders differ");
  if (!detail::is_zero(w.constant_term())) throw OrderMismatch("substitute_last: w has a constant term");
  std::vector<Jet<T, N>> slice(K + 1, Jet<T, N>(K));
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (detail::is_zero(F[i])) continue;
    const auto& e = F.exponents(i);
    std::array<int, N> head{};
    for (int v = 0; v < N; ++v) head[v] = e[v];
    slice[e[N]][head] += F[i];
  }
  Jet<T, N> r(K);
  for (int k = K; k >= 0; --k) {
    r = r * w;
    r += slice[k];
  }
  return r;
}

/// Taylor shift: g(x) = f(shift + x), exact for the stored polynomial.
template <class T, int N>
Jet<T, N> recenter(const Jet<T, N>& f, const std::array<T, static_cast<std::size_t>(N)>& shift) {
  const int K = f.order();
  std::array<std::vector<Jet<T, N>>, N> pw;
  for (int v = 0; v < N; ++v) {
    Jet<T, N> base = Jet<T, N>::variable(K, v, shift[v]);
    pw[v].push_back(Jet<T, N>::constant(K, T(1)));
    for (int k = 1; k <= K; ++k) pw[v].push_back(pw[v][k - 1] * base);
  }
  Jet<T, N> r(K);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (detail::is_zero(f[i])) continue;
    Jet<T, N> term = Jet<T, N>::constant(K, f[i]);
    for (int v = 0; v < N; ++v)
      if (f.exponents(i)[v] > 0) term = term * pw[v][f.exponents(i)[v]];
    r += term;
  }
  return r;
}

/// Inverse of a small dense matrix by Gauss-Jordan with partial pivoting.
template <class T, std::size_t N>
std::array<std::array<T, N>, N> invert_matrix(std::array<std::array<T, N>, N> a) {
  constexpr int n = static_cast<int>(N);
  std::array<std::array<T, N>, N> inv{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = T(i == j ? 1 : 0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    auto mag = [](const T& x) { return x < 0 ? T(-x) : x; };
    for (int r = col + 1; r < n; ++r)
      if (mag(a[r][col]) > mag(a[piv][col])) piv = r;
    if (detail::is_zero(a[piv][col])) throw SingularLinearPart("singular linear part");
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    T p = a[col][col];
    for (int j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || detail::is_zero(a[r][col])) continue;
      T f = a[r][col];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

template <class T, std::size_t N>
std::array<std::array<T, N>, N> linear_part(const std::array<Jet<T, static_cast<int>(N)>, N>& g) {
  std::array<std::array<T, N>, N> a{};
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) a[i][j] = g[i].linear(static_cast<int>(j));
  return a;
}

/// h with g∘h = id to the jet order. Requires g(0) = 0.
template <class T, std::size_t NN>
std::array<Jet<T, static_cast<int>(NN)>, NN> invert_map(const std::array<Jet<T, static_cast<int>(NN)>, NN>& g) {
  constexpr int N = static_cast<int>(NN);
  const int K = g[0].order();
  for (int v = 0; v < N; ++v)
    if (!detail::is_zero(g[v].constant_term())) throw OrderMismatch("invert_map: g(0) != 0");
  const auto A = linear_part<T, NN>(g);
  const auto Ainv = invert_matrix<T, NN>(A);
  std::array<Jet<T, N>, N> nonlinear;
  for (int v = 0; v < N; ++v) {
    nonlinear[v] = g[v];
    for (int j = 0; j < N; ++j) {
      std::array<int, N> e{};
      e[j] = 1;
      if (K >= 1) nonlinear[v][e] = T(0);
    }
  }
  const auto id = Jet<T, N>::identity(K);
  auto apply_ainv = [&](const std::array<Jet<T, N>, N>& y) {
    std::array<Jet<T, N>, N> out;
    for (int i = 0; i < N; ++i) {
      out[i] = Jet<T, N>(K);
      for (int j = 0; j < N; ++j) out[i] += y[j] * Ainv[i][j];
    }
    return out;
  };
  std::array<Jet<T, N>, N> h = apply_ainv(id);
  for (int it = 1; it < K; ++it) {
    auto nl = compose<T, NN, N>(nonlinear, h);
    std::array<Jet<T, N>, N> rhs;
    for (int v = 0; v < N; ++v) rhs[v] = id[v] - nl[v];
    h = apply_ainv(rhs);
  }
  return h;
}

/// Local solution w(x) of F(x, w(x)) = 0 for a jet F centered at a root.
/// Returns the displacement from the base point (zero constant term).
template <class T, int N>
Jet<T, N> solve_implicit(const Jet<T, N + 1>& F, const T& residual_tolerance = T(0)) {
  const int K = F.order();
  std::array<int, N + 1> ez{};
  ez[N] = 1;
  const T Fz = F.coeff(ez);
  if (detail::is_zero(Fz)) throw TangencyError("solve_implicit: dF/dz vanishes at the base point");
  T f0 = F.constant_term();
  T af0 = f0 < 0 ? T(-f0) : f0;
  if (af0 > residual_tolerance) throw TangencyError("solve_implicit: base point is not a root");
  Jet<T, N> w(K);
  for (int it = 0; it <= K; ++it) {
    Jet<T, N> r = substitute_last<T, N>(F, w);
    r[0] = T(0);
    w -= r / Fz;
  }
  return w;
}

}  // namespace mls
