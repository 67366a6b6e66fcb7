#include "mls/normal_form/normal_form.hpp"

#include <cmath>
#include <ostream>

#include "mls/errors.hpp"
#include "mls/orbits/orbits.hpp"

namespace mls {

namespace {

using J2 = Jet2<BigFloat>;
using Map = Jet2Map<BigFloat>;
using E2 = std::array<int, 2>;

Map apply_linear(const Matrix2& a, const Map& f) {
  Map out;
  for (int i = 0; i < 2; ++i) out[i] = f[0] * a[i][0] + f[1] * a[i][1];
  return out;
}

Map linear_map(const Matrix2& a, int order) { return apply_linear(a, J2::identity(order)); }

J2 swap_vars(const J2& f) {
  J2 g(f.order());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto& e = f.exponents(i);
    g[E2{e[1], e[0]}] = f[i];
  }
  return g;
}

Map with_order(const Map& f, int order) { return {f[0].with_order(order), f[1].with_order(order)}; }

BigFloat max_abs(const Map& f) { return max(f[0].max_abs(), f[1].max_abs()); }

Map difference(const Map& a, const Map& b) { return {a[0] - b[0], a[1] - b[1]}; }

J2 jacobian_det(const Map& f) {
  return f[0].derivative(0) * f[1].derivative(1) - f[0].derivative(1) * f[1].derivative(0);
}

J2 energy(int order) { return J2::variable(order, 0) * J2::variable(order, 1); }

/// 1 / (sum_k c_k h^k) coefficients up to index n.
std::vector<BigFloat> reciprocal_series(const std::vector<BigFloat>& c, int n) {
  std::vector<BigFloat> r(n + 1, BigFloat(0));
  r[0] = 1 / c[0];
  for (int k = 1; k <= n; ++k) {
    BigFloat s = 0;
    for (int i = 1; i <= k && i < static_cast<int>(c.size()); ++i) s += c[i] * r[k - i];
    r[k] = -s / c[0];
  }
  return r;
}

/// (nu(h) xi, eta / nu(h)) with the known coefficients of nu.
Map square_normal_form(const std::vector<BigFloat>& nu, int order) {
  const J2 h = energy(order);
  const int n = order / 2;
  std::vector<BigFloat> c(nu.begin(), nu.end());
  c.resize(n + 1, BigFloat(0));
  std::vector<BigFloat> inv = reciprocal_series(c, n);
  return {J2::variable(order, 0) * compose_series(c, h), J2::variable(order, 1) * compose_series(inv, h)};
}

void negate_odd(Map& f) {
  for (auto& comp : f)
    for (std::size_t i = 0; i < comp.size(); ++i)
      if (comp.degree_of(i) % 2 == 1) comp[i] = -comp[i];
}

}  // namespace

BigFloat mu_of(const NormalFormData& nf, const BigFloat& h) {
  BigFloat s = 0;
  for (int j = static_cast<int>(nf.delta.size()); j >= 1; --j) s = (s + nf.delta[j - 1]) * h;
  return nf.lambda * (1 + s);
}

J2 mu_jet(const NormalFormData& nf, const J2& h) {
  std::vector<BigFloat> c{nf.lambda};
  for (const BigFloat& d : nf.delta) c.push_back(nf.lambda * d);
  return compose_series(c, h);
}

Map birkhoff_power(const NormalFormData& nf, int k, int order) {
  const J2 h = energy(order);
  J2 p = exp(log(mu_jet(nf, h)) * BigFloat(k));
  return {J2::variable(order, 0) * p, J2::variable(order, 1) / p};
}

const Map& chart_for(const NormalFormData& nf, int scatterer) { return scatterer == 1 ? nf.phi1 : nf.phi2; }

std::array<BigFloat, 2> birkhoff_coordinates(const NormalFormData& nf, const PhasePoint& x) {
  if (x.i != 1 && x.i != 2) throw Error("birkhoff_coordinates: point is not on D1 or D2");
  const PhasePoint& base = x.i == 1 ? nf.x1 : nf.x2;
  const Map& inv = x.i == 1 ? nf.phi1_inv : nf.phi2_inv;
  std::array<BigFloat, 2> d{BigFloat(x.s - base.s), BigFloat(x.r - base.r)};
  return {inv[0].evaluate(d), inv[1].evaluate(d)};
}

NormalFormData compute_normal_form(const BilliardTable& table, int K, const NormalFormOptions& options) {
  // collision jets use two extra orders for the curve
  if (K < 1 || K > kMaxJetOrder - 2) throw OrderMismatch("normal form order " + std::to_string(K) + " unsupported");
  NormalFormData nf;
  nf.order = K;
  TwoPeriodic tp = two_periodic(table);
  nf.x1 = tp.orbit.points[0];
  nf.x2 = tp.orbit.points[1];
  nf.dF2 = tp.dF2;
  if (nf.x1.i != 1) std::swap(nf.x1, nf.x2);

  CollisionJet f12 = collision_jet(table, nf.x1, K);
  CollisionJet f21 = collision_jet(table, nf.x2, K);
  Map F2 = compose<BigFloat, 2, 2>(f21.map, f12.map);

  // eigenvector of the small eigenvalue, scaled so [v, I0 v] has unit determinant
  Matrix2 a = linear_part<BigFloat, 2>(F2);
  const BigFloat tr = a[0][0] + a[1][1];
  const BigFloat det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const BigFloat disc = tr * tr - 4 * det;
  if (!(disc > 0) || !(tr > 0)) throw SingularLinearPart("2-periodic orbit is not hyperbolic with positive eigenvalues");
  const BigFloat sigma1 = (tr - sqrt(disc)) / 2;
  BigFloat vx = a[0][1], vy = sigma1 - a[0][0];
  if (abs(vx) + abs(vy) < abs(a[1][0]) + abs(sigma1 - a[1][1])) {
    vx = sigma1 - a[1][1];
    vy = a[1][0];
  }
  if (!(vx * vy < 0)) throw SingularLinearPart("stable direction is not compatible with the involution");
  const BigFloat scale = sqrt(BigFloat(-1 / (2 * vx * vy)));
  vx *= scale;
  vy *= scale;
  if (vx < 0) {
    vx = -vx;
    vy = -vy;
  }
  const Matrix2 P{{{vx, vx}, {vy, BigFloat(-vy)}}};
  const Matrix2 Pinv = invert_matrix<BigFloat, 2>(P);
  const Map Ge = apply_linear(Pinv, compose<BigFloat, 2, 2>(F2, linear_map(P, K)));
  const BigFloat s1 = Ge[0].linear(0), s2 = Ge[1].linear(1);
  nf.lambda = sqrt(s1);

  // order-by-order reduction; psi maps Birkhoff to eigen coordinates
  Map psi = J2::identity(K);
  std::vector<BigFloat> nu{s1};
  for (int d = 2; d <= K; ++d) {
    const Map Gd = with_order(Ge, d);
    const Map psid = with_order(psi, d);
    const Map lhs = compose<BigFloat, 2, 2>(Gd, psid);
    const Map rhs = compose<BigFloat, 2, 2>(psid, square_normal_form(nu, d));
    const bool odd = d % 2 == 1;
    const int j = (d - 1) / 2;
    for (int k = 0; k < 2; ++k) {
      J2 e = lhs[k] - rhs[k];
      const BigFloat sk = k == 0 ? s1 : s2;
      for (int al = d; al >= 0; --al) {
        const int be = d - al;
        const BigFloat E = e.coeff({al, be});
        if (odd && k == 0 && al == j + 1 && be == j) {
          nu.push_back(E);
          continue;
        }
        if (odd && k == 1 && al == j && be == j + 1) {
          // the lower coefficients of 1/nu are already in rhs
          nf.delta_error.push_back(abs(E + nu[j] / (nu[0] * nu[0])));
          continue;
        }
        const BigFloat div = sk - pow(s1, al) * pow(s2, be);
        if (abs(div) < pow10_neg(static_cast<int>(working_precision()) / 2))
          throw SingularLinearPart("resonance in the homological equation");
        psi[k][E2{al, be}] = -E / div;
      }
    }
    if (odd) {
      // c1 + c2 is fixed by det D psi = 1; c1 = c2 gives the involution
      const BigFloat kappa = jacobian_det(with_order(psi, d)).coeff({j, j});
      const BigFloat sum = -kappa / (j + 1);
      BigFloat c1 = sum / 2;
      if (j - 1 < static_cast<int>(options.resonant_choice.size())) c1 = options.resonant_choice[j - 1];
      psi[0][E2{j + 1, j}] = c1;
      psi[1][E2{j, j + 1}] = sum - c1;
    }
  }

  // mu = sqrt(nu)
  Jet1<BigFloat> nu1(static_cast<int>(nu.size()) - 1);
  for (std::size_t k = 0; k < nu.size(); ++k) nu1[std::array<int, 1>{static_cast<int>(k)}] = nu[k];
  Jet1<BigFloat> mu1 = sqrt(nu1);
  for (std::size_t k = 1; k < nu.size(); ++k) nf.delta.push_back(mu1[std::array<int, 1>{static_cast<int>(k)}] / nf.lambda);

  nf.phi1 = apply_linear(P, psi);
  nf.phi2 = compose<BigFloat, 2, 2>(f12.map, compose<BigFloat, 2, 2>(nf.phi1, birkhoff_power(nf, -1, K)));
  nf.phi1_inv = invert_map<BigFloat, 2>(nf.phi1);
  nf.phi2_inv = invert_map<BigFloat, 2>(nf.phi2);

  const Map N = birkhoff_power(nf, 1, K);
  nf.conjugacy_residual =
      max(max_abs(difference(compose<BigFloat, 2, 2>(nf.phi2, N), compose<BigFloat, 2, 2>(f12.map, nf.phi1))),
          max_abs(difference(compose<BigFloat, 2, 2>(nf.phi1, N), compose<BigFloat, 2, 2>(f21.map, nf.phi2))));
  BigFloat inv_res = 0;
  for (const Map* f : {&nf.phi1, &nf.phi2}) {
    inv_res = max(inv_res, BigFloat((swap_vars((*f)[0]) - (*f)[0]).max_abs()));
    inv_res = max(inv_res, BigFloat((swap_vars((*f)[1]) + (*f)[1]).max_abs()));
  }
  nf.involution_residual = inv_res;
  J2 area = jacobian_det(nf.phi1) - BigFloat(1);
  nf.area_residual = area.with_order(K - 1).max_abs();
  return nf;
}

namespace {

/// Flips Phi_1, Phi_2 by -id if the homoclinic point has a negative xi.
void orient(const BilliardTable& table, NormalFormData& nf, BigFloat& xi_inf, BigFloat& error) {
  const int P = static_cast<int>(working_precision());
  const double rate = -std::log10(static_cast<double>(nf.lambda));
  const int k1 = std::max(2, static_cast<int>(std::ceil((P - 20) / ((nf.order + 1) * rate))));
  HomoclinicOrbit hom = homoclinic_orbit(table, k1 + 2);
  std::vector<BigFloat> est;
  for (int k = k1; k <= k1 + 2; ++k) {
    std::array<BigFloat, 2> b = birkhoff_coordinates(nf, hom.at(k));
    est.push_back(b[0] / pow(nf.lambda, k));
  }
  xi_inf = est[1];
  error = 0;
  for (const BigFloat& e : est) error = max(error, BigFloat(abs(e - xi_inf)));
  if (xi_inf < 0) {
    xi_inf = -xi_inf;
    for (Map* f : {&nf.phi1, &nf.phi2, &nf.phi1_inv, &nf.phi2_inv}) negate_odd(*f);
  }
}

struct Glued {
  Map phi_minus, G;
  PhasePoint x0;
  J2 psi_a, psi_b, M, M_tilde;
  BigFloat involution, closedness, symmetry, transversality;
};

Glued glue_with_steps(const BilliardTable& table, const NormalFormData& nf, const BigFloat& xi_inf, int K, int s) {
  Glued g;
  const BigFloat qx = pow(nf.lambda, s) * xi_inf;
  const Map& chart = s % 2 == 1 ? nf.phi1 : nf.phi2;
  const PhasePoint& base = s % 2 == 1 ? nf.x1 : nf.x2;
  Map rec;
  for (int c = 0; c < 2; ++c) rec[c] = recenter(chart[c], std::array<BigFloat, 2>{qx, BigFloat(0)}).with_order(K);
  PhasePoint y{base.i, BigFloat(base.s + rec[0].constant_term()), BigFloat(base.r + rec[1].constant_term())};
  rec[0][0] = 0;
  rec[1][0] = 0;

  // N^s at (xi_inf, 0) in displacement form
  const J2 x = J2::variable(K, 0), eta = J2::variable(K, 1);
  const J2 h = (x + xi_inf) * eta;
  J2 p = exp(log(mu_jet(nf, h)) * BigFloat(s));
  Map ns{(x + xi_inf) * p, eta / p};
  ns[0][0] = 0;
  Map chain = compose<BigFloat, 2, 2>(rec, ns);
  for (int t = 0; t < s; ++t) {
    CollisionJet back = collision_jet_inverse(table, y, K);
    chain = compose<BigFloat, 2, 2>(back.map, chain);
    y = back.image;
    const int expect = t == s - 1 ? 3 : ((s - t) % 2 == 0 ? 1 : 2);
    if (y.i != expect) throw CodingMismatch("homoclinic chain left the expected coding");
  }
  g.x0 = y;
  g.phi_minus = chain;

  // Phi_+ = I0 o Phi_- o I
  Map plus{swap_vars(chain[0]), -swap_vars(chain[1])};
  g.G = compose<BigFloat, 2, 2>(invert_map<BigFloat, 2>(chain), plus);
  Map gi{swap_vars(g.G[0]), swap_vars(g.G[1])};
  g.involution = max(max_abs(difference(compose<BigFloat, 2, 2>(gi, gi), J2::identity(K))), BigFloat(abs(2 * y.r)));

  g.transversality = abs(g.G[1].linear(1));
  if (g.transversality < pow10_neg(static_cast<int>(working_precision()) / 4))
    throw TangencyError("gluing map is not transverse at the homoclinic point");
  Map t{x, g.G[1]};
  Map tinv = invert_map<BigFloat, 2>(t);
  g.psi_a = tinv[1] + xi_inf;
  g.psi_b = compose<BigFloat, 2, 2>(g.G[0], tinv) + xi_inf;
  g.closedness = (g.psi_a.derivative(1) - g.psi_b.derivative(0)).max_abs();

  J2 edge(K);
  for (std::size_t i = 0; i < g.psi_b.size(); ++i)
    if (g.psi_b.exponents(i)[0] == 0) edge[i] = g.psi_b[i];
  g.M = g.psi_a.integral(0) + edge.integral(1);
  g.symmetry = (g.M - swap_vars(g.M)).max_abs();
  Map Psi{x * g.psi_a, eta * g.psi_b};
  g.M_tilde = compose<BigFloat, 2, 2>(g.M, invert_map<BigFloat, 2>(Psi));
  return g;
}

J2 abs_diff(const J2& a, const J2& b) {
  J2 d = a - b;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = abs(d[i]);
  return d;
}

}  // namespace

GluingData extend_and_glue(const BilliardTable& table, const NormalFormData& nf_in, int K) {
  if (nf_in.order < K + 2) throw OrderMismatch("extend_and_glue: normal form order must exceed the gluing order by 2");
  GluingData out;
  out.nf = nf_in;
  out.order = K;
  orient(table, out.nf, out.xi_inf, out.xi_inf_error);
  const NormalFormData& nf = out.nf;

  // Phi_s is evaluated at distance rho from x1; the truncation error of the
  // degree-K coefficients, rho^(Kf+1-2K), balances the cancellation 10^-P rho^-K.
  const int P = static_cast<int>(working_precision());
  const double rate = -std::log10(static_cast<double>(nf.lambda));
  const double r = std::max(2.0, static_cast<double>(P) / (nf.order + 1 - K));
  const int s = std::max(1, static_cast<int>(std::ceil((r + std::log10(static_cast<double>(out.xi_inf))) / rate)));
  Glued g = glue_with_steps(table, nf, out.xi_inf, K, s);
  Glued g2 = glue_with_steps(table, nf, out.xi_inf, K, s + 1);
  out.steps = s;
  out.x0 = g.x0;
  out.phi_minus = g.phi_minus;
  out.G = g.G;
  out.psi_a = g.psi_a;
  out.psi_b = g.psi_b;
  out.M = g.M;
  out.M_tilde = g.M_tilde;
  out.a_hat_error = abs_diff(g.M, g2.M);
  out.a_error = abs_diff(g.M_tilde, g2.M_tilde);
  out.involution_residual = g.involution;
  out.closedness_residual = g.closedness;
  out.symmetry_residual = g.symmetry;
  out.transversality = g.transversality;

  // L_inf = lim (perimeter of 3 (12)^(n-1) 1) - 2 n l0
  const double lx = 2 * std::log10(static_cast<double>(out.xi_inf));
  const int n = std::max(2, static_cast<int>(std::ceil((P - 10 + lx) / (2 * rate))) + 1);
  BigFloat prev = cyclicity1_orbit(table, n).perimeter - 2 * n * table.l0();
  out.L_inf = cyclicity1_orbit(table, n + 1).perimeter - 2 * (n + 1) * table.l0();
  out.L_inf_error = max(BigFloat(abs(out.L_inf - prev)), pow10_neg(P - 10));
  return out;
}

GluingData extend_and_glue(const BilliardTable& table, int K) {
  return extend_and_glue(table, compute_normal_form(table, std::min(12, K + 8)), K);
}

FixedPointEnergies fixed_point_energies(const NormalFormData& nf, const GluingData& glue, int m, int n) {
  if (m < 1 || n < 1) throw Error("fixed_point_energies: m and n must be positive");
  const J2 &pa = glue.psi_a, &pb = glue.psi_b;
  const J2 pa0 = pa.derivative(0), pa1 = pa.derivative(1), pb0 = pb.derivative(0), pb1 = pb.derivative(1);
  auto dmu = [&](const BigFloat& h) {
    BigFloat s = 0;
    for (int j = static_cast<int>(nf.delta.size()); j >= 1; --j) s = s * h + j * nf.delta[j - 1];
    return BigFloat(nf.lambda * s);
  };
  FixedPointEnergies r;
  BigFloat ea = glue.xi_inf * pow(nf.lambda, 2 * m), eb = glue.xi_inf * pow(nf.lambda, 2 * n);
  const BigFloat tol = pow10_neg(static_cast<int>(working_precision()) - 8);
  for (int it = 1; it <= 60; ++it) {
    const std::array<BigFloat, 2> e{ea, eb};
    const BigFloat xa = pa.evaluate(e), xb = pb.evaluate(e);
    const BigFloat ha = xa * ea, hb = xb * eb;
    const BigFloat ma = mu_of(nf, ha), mb = mu_of(nf, hb);
    const BigFloat Pa = pow(ma, 2 * m), Pb = pow(mb, 2 * n);
    const BigFloat dPa = 2 * m * pow(ma, 2 * m - 1) * dmu(ha), dPb = 2 * n * pow(mb, 2 * n - 1) * dmu(hb);
    const BigFloat xa0 = pa0.evaluate(e), xa1 = pa1.evaluate(e), xb0 = pb0.evaluate(e), xb1 = pb1.evaluate(e);
    const BigFloat f1 = xa * Pa - ea, f2 = xb * Pb - eb;
    const BigFloat j11 = xa0 * Pa + xa * dPa * (xa + ea * xa0) - 1;
    const BigFloat j12 = xa1 * Pa + xa * dPa * (ea * xa1);
    const BigFloat j21 = xb0 * Pb + xb * dPb * (eb * xb0);
    const BigFloat j22 = xb1 * Pb + xb * dPb * (xb + eb * xb1) - 1;
    const BigFloat det = j11 * j22 - j12 * j21;
    const BigFloat da = (f1 * j22 - f2 * j12) / det, db = (j11 * f2 - j21 * f1) / det;
    ea -= da;
    eb -= db;
    r.iterations = it;
    if (abs(da) <= tol * abs(ea) && abs(db) <= tol * abs(eb)) break;
    if (it == 60) throw ConvergenceError("fixed_point_energies: Newton did not converge");
  }
  const std::array<BigFloat, 2> e{ea, eb};
  r.eta_a = ea;
  r.eta_b = eb;
  r.xi_a = pa.evaluate(e);
  r.xi_b = pb.evaluate(e);
  r.h_a = r.xi_a * r.eta_a;
  r.h_b = r.xi_b * r.eta_b;
  const BigFloat ma = pow(mu_of(nf, r.h_a), 2 * m), mb = pow(mu_of(nf, r.h_b), 2 * n);
  r.symmetry_residual = max(max(BigFloat(abs(ma * r.xi_a - r.eta_a) / r.eta_a), BigFloat(abs(r.eta_a / ma - r.xi_a) / r.xi_a)),
                            max(BigFloat(abs(mb * r.xi_b - r.eta_b) / r.eta_b), BigFloat(abs(r.eta_b / mb - r.xi_b) / r.xi_b)));
  return r;
}

void write_normal_form_report(std::ostream& out, const GluingData& glue) {
  const NormalFormData& nf = glue.nf;
  out << "# normal form order " << nf.order << " gluing order " << glue.order << "\n";
  out << "lambda = " << to_decimal(nf.lambda) << "\n";
  for (std::size_t j = 0; j < nf.delta.size(); ++j)
    out << "delta_" << j + 1 << " = " << to_decimal(nf.delta[j]) << " +- " << to_decimal(nf.delta_error[j], 3) << "\n";
  out << "xi_inf = " << to_decimal(glue.xi_inf) << " +- " << to_decimal(glue.xi_inf_error, 3) << "\n";
  out << "L_inf = " << to_decimal(glue.L_inf) << " +- " << to_decimal(glue.L_inf_error, 3) << "\n";
  for (int d = 1; d <= glue.order; ++d)
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      out << "a_" << i << "_" << j << " = " << to_decimal(glue.a(i, j)) << " +- " << to_decimal(glue.a_error.coeff({i, j}), 3)
          << "\n";
    }
  for (int d = 1; d <= glue.order; ++d)
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      out << "a_hat_" << i << "_" << j << " = " << to_decimal(glue.a_hat(i, j)) << " +- "
          << to_decimal(glue.a_hat_error.coeff({i, j}), 3) << "\n";
    }
  out << "conjugacy_residual = " << to_decimal(nf.conjugacy_residual, 3) << "\n";
  out << "involution_residual = " << to_decimal(nf.involution_residual, 3) << "\n";
  out << "gluing_involution_residual = " << to_decimal(glue.involution_residual, 3) << "\n";
  out << "closedness_residual = " << to_decimal(glue.closedness_residual, 3) << "\n";
  out << "steps = " << glue.steps << "\n";
}

}  // namespace mls
