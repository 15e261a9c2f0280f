#include "cdil/varieties.hpp"

#include <algorithm>
#include <cmath>

namespace cdil {

cplx BivariatePoly::operator()(cplx x, cplx y) const {
  // Horner in x over Horner-in-y rows.
  cplx acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + poly_eval(coeffs[i], y);
  return acc;
}

double BivariatePoly::scale() const {
  double s = 0.0;
  for (const auto& row : coeffs)
    for (const cplx c : row) s += std::abs(c);
  return s;
}

BivariatePoly variety_polynomial(const BlaschkeProduct& b) {
  const int n = b.degree();
  if (n < 2) throw ValidationError("variety_polynomial needs N >= 2");
  const auto zs = b.zero_list();
  std::vector<cplx> zc(zs.size());
  std::transform(zs.begin(), zs.end(), zc.begin(), [](cplx a) { return std::conj(a); });
  const auto s = symmetric_sums(zs).values;
  const auto sc = symmetric_sums(zc).values;
  BivariatePoly p;
  p.coeffs.assign(static_cast<std::size_t>(n) + 2, std::vector<cplx>(static_cast<std::size_t>(n) + 1));
  for (int k = 0; k <= n; ++k) {
    p.coeffs[static_cast<std::size_t>(n - k + 1)][static_cast<std::size_t>(k)] += sc[static_cast<std::size_t>(k)];
    p.coeffs[static_cast<std::size_t>(k)][static_cast<std::size_t>(n - k)] -= s[static_cast<std::size_t>(k)];
  }
  return p;
}

bool variety_membership(const BivariatePoly& p, cplx x, cplx y, double tol) {
  if (std::abs(x) > 1.0 + tol || std::abs(y) > 1.0 + tol) return false;
  return std::abs(p(x, y)) <= tol * p.scale();
}

VarietyParameter point_to_parameter(cplx x, cplx y) {
  if (std::abs(x) <= 1e-14 * std::max(1.0, std::abs(y))) return {0.0, true};
  return {y / x, false};
}

std::vector<cplx> lift_to_VB(const BlaschkeProduct& b, cplx z) {
  if (std::abs(z) > 1.0 + 1e-12) throw DomainError("lift_to_VB requires |z| <= 1");
  std::vector<cplx> out(static_cast<std::size_t>(b.degree()));
  cplx v = b(z);
  for (auto& x : out) {
    x = v;
    v *= z;
  }
  return out;
}

DeterminantalRep determinantal_rep(const BlaschkeProduct& b) {
  const int n = b.degree();
  if (n < 2) throw ValidationError("determinantal_rep needs N >= 2");
  DeterminantalRep rep;
  rep.zeros = b.zero_list();
  const auto sz = static_cast<std::size_t>(n) + 1;
  rep.m0 = ComplexMatrix(sz, sz);
  rep.m1 = ComplexMatrix(sz, sz);
  rep.t = ComplexMatrix::identity(sz);
  const auto& a = rep.zeros;
  rep.m1(0, 1) = -1.0;
  for (std::size_t i = 1; i + 1 < sz; ++i) {
    rep.m1(i, i) = std::conj(a[i - 1]);
    rep.m1(i, i + 1) = -1.0;
  }
  rep.m0(sz - 1, 0) = (n % 2 == 0) ? 1.0 : -1.0;
  rep.m1(sz - 1, sz - 1) = std::conj(a[sz - 2]);
  for (std::size_t i = 0; i + 1 < sz; ++i) rep.t(i, i + 1) = -a[i];
  rep.t_inv = inverse(rep.t);
  rep.d.assign(sz, 1.0);
  for (std::size_t i = 1; i < sz; ++i) rep.d[i] = 1.0 - std::norm(a[i - 1]);
  return rep;
}

ComplexMatrix DeterminantalRep::psi(cplx y) const { return (m0 + y * m1) * t_inv; }

ComplexMatrix DeterminantalRep::psi_unitary(cplx y) const {
  auto u = t_inv * (m0 + y * m1);
  for (std::size_t i = 0; i < u.rows(); ++i)
    for (std::size_t j = 0; j < u.cols(); ++j) u(i, j) *= std::sqrt(d[i] / d[j]);
  return u;
}

cplx DeterminantalRep::char_det(cplx x, cplx y) const {
  auto a = psi(y);
  a *= -1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) += x;
  return determinant(a);
}

ProportionalityFit fit_det_constant(const DeterminantalRep& rep, const BivariatePoly& p, Rng& rng,
                                    int count) {
  std::vector<cplx> dv, pv;
  const double floor = 1e-3 * p.scale();
  while (static_cast<int>(pv.size()) < count) {
    const cplx x = rng.in_disk(1.0);
    const cplx y = rng.in_disk(1.0);
    const cplx pxy = p(x, y);
    if (std::abs(pxy) < floor) continue;
    pv.push_back(pxy);
    dv.push_back(rep.char_det(x, y));
  }
  cplx num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < pv.size(); ++k) {
    num += std::conj(pv[k]) * dv[k];
    den += std::norm(pv[k]);
  }
  ProportionalityFit fit{num / den, 0.0};
  for (std::size_t k = 0; k < pv.size(); ++k)
    fit.relative_spread =
        std::max(fit.relative_spread, std::abs(dv[k] / pv[k] - fit.constant) / std::abs(fit.constant));
  return fit;
}

}  // namespace cdil
