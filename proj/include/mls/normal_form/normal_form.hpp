#pragma once

#include <iosfwd>
#include <vector>

#include "mls/billiard/billiard.hpp"
#include "mls/numerics/jet.hpp"

namespace mls {

struct NormalFormOptions {
  /// Coefficient of xi^{j+1} eta^j in the first component of the conjugacy
  /// (index j-1). The partner coefficient of xi^j eta^{j+1} keeps the
  /// conjugacy area preserving. Empty: both equal, so the conjugacy also
  /// commutes with the involution.
  std::vector<BigFloat> resonant_choice;
};

/// Birkhoff normal form of the 2-periodic orbit (1, 2).
///
/// phi1 and phi2 are displacement jets (xi, eta) -> (ds, dr) around x1 and
/// x2 = F(x1). N(xi, eta) = (mu(h) xi, eta / mu(h)) with h = xi eta and
/// mu(h) = lambda (1 + sum_j delta_j h^j).
struct NormalFormData {
  int order = 0;
  BigFloat lambda;
  std::vector<BigFloat> delta;  // delta[j-1] = delta_j
  PhasePoint x1, x2;
  Matrix2 dF2;
  Jet2Map<BigFloat> phi1, phi2;
  Jet2Map<BigFloat> phi1_inv, phi2_inv;
  /// max |coefficient| of the jet identities (b)-(e) and det D phi1 - 1
  BigFloat conjugacy_residual, involution_residual, area_residual;
  /// mismatch between the two resonant coefficients fixed by one mu, per delta_j
  std::vector<BigFloat> delta_error;
};

NormalFormData compute_normal_form(const BilliardTable& table, int order, const NormalFormOptions& options = {});

/// mu(h) to the stored order.
BigFloat mu_of(const NormalFormData& nf, const BigFloat& h);
/// Jet of mu(h(x)) for a jet h without constant term.
Jet2<BigFloat> mu_jet(const NormalFormData& nf, const Jet2<BigFloat>& h);
/// N^k as a jet at the origin, k of any sign.
Jet2Map<BigFloat> birkhoff_power(const NormalFormData& nf, int k, int order);
/// phi1 if the collision index is odd (D1), phi2 otherwise.
const Jet2Map<BigFloat>& chart_for(const NormalFormData& nf, int scatterer);
/// Birkhoff coordinates of a point near x1 or x2 via the inverted chart.
std::array<BigFloat, 2> birkhoff_coordinates(const NormalFormData& nf, const PhasePoint& x);

struct GluingData {
  NormalFormData nf;  // oriented so xi_inf > 0
  int order = 0;
  BigFloat xi_inf, xi_inf_error;
  BigFloat L_inf, L_inf_error;
  int steps = 0;       // inverse collisions composed into Phi_-
  PhasePoint x0;       // homoclinic point on D3
  Jet2Map<BigFloat> phi_minus;  // displacement jet at (xi_inf, 0)
  Jet2Map<BigFloat> G;          // displacement jet (0, xi_inf) -> (xi_inf, 0)
  /// xi_A and xi_B as functions of (eta_A, eta_B)
  Jet2<BigFloat> psi_a, psi_b;
  Jet2<BigFloat> M, M_tilde;
  Jet2<BigFloat> a_hat_error, a_error;  // coefficientwise change under steps + 1
  BigFloat involution_residual, closedness_residual, symmetry_residual;
  BigFloat transversality;  // |d eta_B / d xi_A| at the homoclinic point
  BigFloat a_hat(int i, int j) const { return M.coeff({i, j}); }
  BigFloat a(int i, int j) const { return M_tilde.coeff({i, j}); }
};

/// Orients nf, builds Phi_- by composing inverse collision jets along the
/// homoclinic orbit, and recovers G, M and M~ as order-`order` jets. nf must
/// have a higher order than `order`.
GluingData extend_and_glue(const BilliardTable& table, const NormalFormData& nf, int order);
GluingData extend_and_glue(const BilliardTable& table, int order);

struct FixedPointEnergies {
  BigFloat h_a, h_b, xi_a, eta_a, xi_b, eta_b;
  /// |N^{2m}(xi_A, eta_A) - (eta_A, xi_A)| and the B counterpart
  BigFloat symmetry_residual;
  int iterations = 0;
};

/// Fixed point of G o N^{2n} o G o N^{2m} in the jet-truncated dynamics.
FixedPointEnergies fixed_point_energies(const NormalFormData& nf, const GluingData& glue, int m, int n);

void write_normal_form_report(std::ostream& out, const GluingData& glue);

}  // namespace mls
