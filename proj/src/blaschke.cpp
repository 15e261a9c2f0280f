#include "cdil/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdil {

cplx mobius_eval(DiskPoint a, cplx z) {
  if (a.is_infinite()) return 1.0;
  const cplx alpha = a.value();
  const cplx den = 1.0 - std::conj(alpha) * z;
  if (std::abs(den) <= 1e-300 || (alpha != cplx{} && std::abs(den) <= 1e-15))
    throw DomainError("Mobius map evaluated at its pole");
  return (z - alpha) / den;
}

BlaschkeProduct::BlaschkeProduct(std::vector<BlaschkeZero> zeros, cplx constant)
    : constant_(constant) {
  if (std::abs(std::abs(constant) - 1.0) > 1e-12)
    throw ValidationError("Blaschke constant must be unimodular");
  for (const auto& z : zeros) {
    if (z.multiplicity < 1) throw ValidationError("zero multiplicity must be positive");
    if (!(std::abs(z.point) < 1.0 - kBoundaryGuard))
      throw ValidationError("Blaschke zero must lie strictly inside the unit disk");
    auto it = std::find_if(zeros_.begin(), zeros_.end(),
                           [&](const BlaschkeZero& e) { return e.point == z.point; });
    if (it != zeros_.end())
      it->multiplicity += z.multiplicity;
    else
      zeros_.push_back(z);
    degree_ += z.multiplicity;
  }
}

BlaschkeProduct BlaschkeProduct::from_points(std::span<const cplx> points, cplx constant) {
  std::vector<BlaschkeZero> zs;
  zs.reserve(points.size());
  for (const cplx p : points) zs.push_back({p, 1});
  return BlaschkeProduct(std::move(zs), constant);
}

BlaschkeProduct BlaschkeProduct::power_of_z(int n) {
  if (n < 0) throw ValidationError("negative power");
  if (n == 0) return BlaschkeProduct();
  return BlaschkeProduct({{0.0, n}});
}

std::vector<cplx> BlaschkeProduct::zero_list() const {
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(degree_));
  for (const auto& z : zeros_)
    for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.point);
  return out;
}

bool BlaschkeProduct::has_zero_at_origin() const {
  return std::any_of(zeros_.begin(), zeros_.end(),
                     [](const BlaschkeZero& z) { return z.point == cplx{}; });
}

BlaschkeProduct BlaschkeProduct::with_constant(cplx c) const {
  BlaschkeProduct out = *this;
  if (std::abs(std::abs(c) - 1.0) > 1e-12)
    throw ValidationError("Blaschke constant must be unimodular");
  out.constant_ = c;
  return out;
}

BlaschkeProduct BlaschkeProduct::times(const BlaschkeProduct& other) const {
  std::vector<BlaschkeZero> zs = zeros_;
  zs.insert(zs.end(), other.zeros_.begin(), other.zeros_.end());
  cplx c = constant_ * other.constant_;
  c /= std::abs(c);
  return BlaschkeProduct(std::move(zs), c);
}

BlaschkeProduct BlaschkeProduct::power(int r) const {
  if (r < 0) throw ValidationError("negative power");
  std::vector<BlaschkeZero> zs;
  if (r > 0)
    for (const auto& z : zeros_) zs.push_back({z.point, z.multiplicity * r});
  cplx c = std::pow(constant_, r);
  c /= std::abs(c);
  return BlaschkeProduct(std::move(zs), c);
}

cplx BlaschkeProduct::operator()(cplx z) const {
  cplx acc = constant_;
  for (const auto& zero : zeros_) {
    const cplx m = mobius_eval(DiskPoint(zero.point), z);
    for (int k = 0; k < zero.multiplicity; ++k) acc *= m;
  }
  return acc;
}

std::vector<cplx> series_mul(std::span<const cplx> a, std::span<const cplx> b, int order) {
  std::vector<cplx> c(static_cast<std::size_t>(order) + 1);
  for (std::size_t i = 0; i < a.size() && i <= static_cast<std::size_t>(order); ++i) {
    if (a[i] == cplx{}) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= static_cast<std::size_t>(order); ++j)
      c[i + j] += a[i] * b[j];
  }
  return c;
}

std::vector<cplx> series_pow(std::span<const cplx> a, int power, int order) {
  std::vector<cplx> result(static_cast<std::size_t>(order) + 1);
  result[0] = 1.0;
  std::vector<cplx> base(a.begin(), a.end());
  base.resize(static_cast<std::size_t>(order) + 1);
  int p = power;
  while (p > 0) {
    if (p & 1) result = series_mul(result, base, order);
    p >>= 1;
    if (p > 0) base = series_mul(base, base, order);
  }
  return result;
}

std::vector<cplx> BlaschkeProduct::taylor(cplx z0, int order) const {
  if (order < 0) throw ValidationError("negative Taylor order");
  std::vector<cplx> acc(static_cast<std::size_t>(order) + 1);
  acc[0] = constant_;
  for (const auto& zero : zeros_) {
    // m_a(z0 + h) = (u + h) / (d - conj(a) h),  u = z0 - a,  d = 1 - conj(a) z0.
    const cplx a = zero.point;
    const cplx u = z0 - a;
    const cplx d = 1.0 - std::conj(a) * z0;
    if (std::abs(d) <= 1e-15) throw DomainError("Blaschke product evaluated at a pole");
    const cplx ratio = std::conj(a) / d;
    std::vector<cplx> m(static_cast<std::size_t>(order) + 1);
    cplx prev = 0.0;  // ratio^(k-1)
    cplx pw = 1.0;    // ratio^k
    for (int k = 0; k <= order; ++k) {
      m[k] = (u * pw + prev) / d;
      prev = pw;
      pw *= ratio;
    }
    acc = series_mul(acc, series_pow(m, zero.multiplicity, order), order);
  }
  return acc;
}

cplx BlaschkeProduct::derivative(cplx z, int k) const {
  if (k < 1) throw ValidationError("derivative order must be at least 1");
  const auto t = taylor(z, k);
  double fact = 1.0;
  for (int j = 2; j <= k; ++j) fact *= j;
  return fact * t[static_cast<std::size_t>(k)];
}

std::vector<cplx> BlaschkeProduct::numerator() const {
  auto p = poly_from_roots(zero_list());
  for (auto& c : p) c *= constant_;
  return p;
}

std::vector<cplx> BlaschkeProduct::denominator() const {
  std::vector<cplx> p{1.0};
  for (const cplx a : zero_list()) {
    const cplx lin[] = {1.0, -std::conj(a)};
    p = poly_mul(p, lin);
  }
  return p;
}

cplx blaschke_eval(const BlaschkeProduct& b, cplx z) { return b(z); }

cplx blaschke_deriv(const BlaschkeProduct& b, cplx z, int order) { return b.derivative(z, order); }

SymmetricSums symmetric_sums(std::span<const cplx> x) {
  // prod (z - x_j) in ascending order, then reversed.
  const auto asc = poly_from_roots(x);
  SymmetricSums s;
  s.values.assign(asc.rbegin(), asc.rend());
  return s;
}

BlaschkeProduct normalize_at_one(const BlaschkeProduct& b) {
  const cplx v = b(1.0);
  const double mag = std::abs(v);
  if (mag == 0.0) throw ValidationError("B(1) = 0; cannot normalize");
  cplx c = b.constant() * std::conj(v) / mag;
  c /= std::abs(c);
  return b.with_constant(c);
}

}  // namespace cdil
