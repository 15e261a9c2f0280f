#pragma once

// Finite Blaschke products, Mobius maps and signed symmetric sums.

#include <span>
#include <vector>

#include "cdil/numerics.hpp"

namespace cdil {

/// A point of the one-point compactification of the disk.
class DiskPoint {
 public:
  constexpr DiskPoint() = default;
  constexpr explicit DiskPoint(cplx z) : value_(z) {}
  static constexpr DiskPoint infinity() {
    DiskPoint p;
    p.infinite_ = true;
    return p;
  }

  bool is_infinite() const { return infinite_; }
  /// Only meaningful when finite.
  cplx value() const { return value_; }

  friend bool operator==(const DiskPoint& a, const DiskPoint& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  cplx value_{};
  bool infinite_ = false;
};

/// (z - a) / (1 - conj(a) z); identically 1 for a = infinity.
cplx mobius_eval(DiskPoint a, cplx z);

struct BlaschkeZero {
  cplx point;
  int multiplicity = 1;

  friend bool operator==(const BlaschkeZero&, const BlaschkeZero&) = default;
};

/// c * prod_j m_{a_j}^{t_j}. Zeros are kept in insertion order; exact
/// duplicates are merged into multiplicities.
class BlaschkeProduct {
 public:
  static constexpr double kBoundaryGuard = 1e-12;

  BlaschkeProduct() = default;
  explicit BlaschkeProduct(std::vector<BlaschkeZero> zeros, cplx constant = 1.0);
  /// One factor per entry (repeated entries become multiplicities).
  static BlaschkeProduct from_points(std::span<const cplx> points, cplx constant = 1.0);
  /// z^n.
  static BlaschkeProduct power_of_z(int n);

  const std::vector<BlaschkeZero>& zeros() const { return zeros_; }
  cplx constant() const { return constant_; }
  int degree() const { return degree_; }
  /// Zero list with repetition according to multiplicity.
  std::vector<cplx> zero_list() const;
  bool has_zero_at_origin() const;

  BlaschkeProduct with_constant(cplx c) const;
  BlaschkeProduct times(const BlaschkeProduct& other) const;
  BlaschkeProduct power(int r) const;

  cplx operator()(cplx z) const;
  /// k-th derivative, k >= 1.
  cplx derivative(cplx z, int k) const;
  /// Taylor coefficients B(z0 + h) = sum_k c_k h^k, k = 0..order.
  std::vector<cplx> taylor(cplx z0, int order) const;

  /// c * prod (z - a_j)^{t_j}, ascending coefficients.
  std::vector<cplx> numerator() const;
  /// prod (1 - conj(a_j) z)^{t_j}, ascending coefficients.
  std::vector<cplx> denominator() const;

  friend bool operator==(const BlaschkeProduct&, const BlaschkeProduct&) = default;

 private:
  std::vector<BlaschkeZero> zeros_;
  cplx constant_{1.0};
  int degree_ = 0;
};

cplx blaschke_eval(const BlaschkeProduct& b, cplx z);
cplx blaschke_deriv(const BlaschkeProduct& b, cplx z, int order);

/// S_0..S_n with prod_j (z - x_j) = sum_k S_k z^{n-k}.
struct SymmetricSums {
  std::vector<cplx> values;
};

SymmetricSums symmetric_sums(std::span<const cplx> x);

/// Multiplies by conj(B(1)) / |B(1)| so that the result equals 1 at z = 1.
BlaschkeProduct normalize_at_one(const BlaschkeProduct& b);

// Truncated power-series helpers (coefficient k multiplies h^k).
std::vector<cplx> series_mul(std::span<const cplx> a, std::span<const cplx> b, int order);
std::vector<cplx> series_pow(std::span<const cplx> a, int power, int order);

}  // namespace cdil
