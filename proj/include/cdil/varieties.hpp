#pragma once

// The distinguished varieties N_B in the bidisk and V_B in the N-polydisk.
// Only the zero list of B enters; the unimodular constant is ignored.

#include <vector>

#include "cdil/blaschke.hpp"
#include "cdil/random.hpp"

namespace cdil {

/// p(x, y) = sum coeffs[i][j] x^i y^j.
struct BivariatePoly {
  std::vector<std::vector<cplx>> coeffs;

  cplx operator()(cplx x, cplx y) const;
  /// sum |coeffs|.
  double scale() const;
  std::size_t x_degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
  std::size_t y_degree() const { return coeffs.empty() ? 0 : coeffs.front().size() - 1; }
};

/// P(x, y) = sum_k S_k(conj a) x^{N-k+1} y^k - S_k(a) x^k y^{N-k}; vanishes on
/// (B(z), z B(z)) for B with unit constant.
BivariatePoly variety_polynomial(const BlaschkeProduct& b);

/// |P(x, y)| <= tol * P.scale(), for (x, y) in the closed bidisk (within tol).
bool variety_membership(const BivariatePoly& p, cplx x, cplx y, double tol = 1e-8);

struct VarietyParameter {
  cplx z;
  bool degenerate = false;  // x == 0, which forces y == 0
};

/// z = y / x.
VarietyParameter point_to_parameter(cplx x, cplx y);

/// (B, zB, ..., z^{N-1} B) at z.
std::vector<cplx> lift_to_VB(const BlaschkeProduct& b, cplx z);

/// Psi(y) = (M0 + y M1) T^{-1} with T unit upper bidiagonal. All matrices are
/// (N+1) x (N+1), matching the x-degree of P.
///
/// Psi itself is unitary on the circle only when every zero is 0. With
/// D = diag(1, 1 - |a_1|^2, ..., 1 - |a_N|^2) the similar matrix
/// D^{1/2} T^{-1} (M0 + y M1) D^{-1/2} is unitary for |y| = 1.
struct DeterminantalRep {
  std::vector<cplx> zeros;  // a_1..a_N in the order used
  ComplexMatrix m0, m1, t, t_inv;
  std::vector<double> d;  // diagonal of D

  std::size_t size() const { return t.rows(); }
  ComplexMatrix psi(cplx y) const;
  ComplexMatrix psi_unitary(cplx y) const;
  /// det(x I - Psi(y)).
  cplx char_det(cplx x, cplx y) const;
};

DeterminantalRep determinantal_rep(const BlaschkeProduct& b);

struct ProportionalityFit {
  cplx constant;           // least-squares c with det(xI - Psi(y)) ~ c P(x, y)
  double relative_spread;  // max |ratio - c| / |c| over the samples
};

/// Samples `count` random (x, y) in the bidisk away from the variety.
ProportionalityFit fit_det_constant(const DeterminantalRep& rep, const BivariatePoly& p, Rng& rng,
                                    int count = 100);

}  // namespace cdil
