#pragma once

// Test-function families for A_B (Psi_B) and A_B^0 (Psi_B^0) and their
// discretization grids.

#include <string>
#include <vector>

#include "cdil/blaschke.hpp"
#include "cdil/herglotz.hpp"

namespace cdil {

/// Total preorder on the closed disk plus infinity: by modulus, then by
/// argument in [0, 2pi); infinity is maximal.
bool order_le(const DiskPoint& a, const DiskPoint& b);
void canonical_sort(std::vector<DiskPoint>& pts);

enum class TestVariant { Extras, GenB, GenZB, Tail };

const char* to_string(TestVariant v);

struct TestFunction {
  AlgebraTag family = AlgebraTag::Full;
  TestVariant variant = TestVariant::Extras;
  /// Extras: N-1 canonically sorted points. Tail: the single point alpha.
  std::vector<DiskPoint> params;
  /// The normalised product, psi(1) = 1.
  BlaschkeProduct psi;

  cplx operator()(cplx z) const { return psi(z); }
  int zero_count() const { return psi.degree(); }
  friend bool operator==(const TestFunction&, const TestFunction&) = default;
};

/// c B prod_{a in extras, a != inf} m_a with c chosen so that psi(1) = 1.
TestFunction make_test_fn_AB(const BlaschkeProduct& b, std::vector<DiskPoint> extras);
/// GenB: cB, GenZB: czB, Tail: cB^{N-1} m_alpha.
TestFunction make_test_fn_AB0(const BlaschkeProduct& b, TestVariant variant,
                              DiskPoint alpha = DiskPoint::infinity());

/// psi(x) for |x| < 1.
cplx eval_E(const TestFunction& psi, cplx x);

struct GridResolution {
  int radial = 4;
  int angular = 8;
  double r_max = 0.95;

  void validate() const;
};

/// Radii j/(R+1) r_max (j = 1..R) times angles 2 pi k / A, followed by infinity.
std::vector<DiskPoint> polar_parameters(const GridResolution& res);

struct TestGrid {
  AlgebraTag family = AlgebraTag::Full;
  BlaschkeProduct base;
  GridResolution resolution;
  std::vector<TestFunction> functions;
};

inline constexpr std::size_t kMaxGridFunctions = 20000;

/// Psi_B: every multiset of N-1 polar parameters (N <= 3 only).
/// Psi_B^0: GenB, GenZB, then Tail over the polar parameters.
TestGrid build_grid(AlgebraTag family, const BlaschkeProduct& b, const GridResolution& res);

}  // namespace cdil
