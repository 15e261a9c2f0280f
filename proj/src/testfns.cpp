#include "cdil/testfns.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cdil {

namespace {

double arg_0_2pi(cplx z) {
  const double t = std::arg(z);
  return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
}

void check_param(const DiskPoint& p) {
  if (!p.is_infinite() && !(std::abs(p.value()) < 1.0 - BlaschkeProduct::kBoundaryGuard))
    throw ValidationError("test-function parameter must lie in the open disk or be infinity");
}

BlaschkeProduct finite_factor(const std::vector<DiskPoint>& pts) {
  std::vector<cplx> zs;
  for (const auto& p : pts)
    if (!p.is_infinite()) zs.push_back(p.value());
  return BlaschkeProduct::from_points(zs);
}

}  // namespace

bool order_le(const DiskPoint& a, const DiskPoint& b) {
  if (b.is_infinite()) return true;
  if (a.is_infinite()) return false;
  const double ra = std::abs(a.value());
  const double rb = std::abs(b.value());
  if (ra != rb) return ra < rb;
  if (ra == 0.0) return true;
  return arg_0_2pi(a.value()) <= arg_0_2pi(b.value());
}

void canonical_sort(std::vector<DiskPoint>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const DiskPoint& a, const DiskPoint& b) {
    return order_le(a, b) && !order_le(b, a);
  });
}

const char* to_string(TestVariant v) {
  switch (v) {
    case TestVariant::Extras: return "extras";
    case TestVariant::GenB: return "gen_B";
    case TestVariant::GenZB: return "gen_zB";
    case TestVariant::Tail: return "tail";
  }
  return "?";
}

TestFunction make_test_fn_AB(const BlaschkeProduct& b, std::vector<DiskPoint> extras) {
  if (b.degree() < 1) throw ValidationError("test functions need N >= 1");
  if (extras.size() != static_cast<std::size_t>(b.degree() - 1))
    throw ValidationError("Psi_B needs exactly N-1 extra parameters");
  for (const auto& p : extras) check_param(p);
  canonical_sort(extras);
  TestFunction f;
  f.family = AlgebraTag::Full;
  f.variant = TestVariant::Extras;
  f.psi = normalize_at_one(b.times(finite_factor(extras)));
  f.params = std::move(extras);
  return f;
}

TestFunction make_test_fn_AB0(const BlaschkeProduct& b, TestVariant variant, DiskPoint alpha) {
  const int n = b.degree();
  if (n < 2) throw ValidationError("Psi_B^0 needs N >= 2");
  TestFunction f;
  f.family = AlgebraTag::Constrained;
  f.variant = variant;
  switch (variant) {
    case TestVariant::GenB:
      f.psi = normalize_at_one(b);
      break;
    case TestVariant::GenZB:
      f.psi = normalize_at_one(b.times(BlaschkeProduct::power_of_z(1)));
      break;
    case TestVariant::Tail:
      check_param(alpha);
      f.params = {alpha};
      f.psi = normalize_at_one(b.power(n - 1).times(finite_factor(f.params)));
      break;
    default:
      throw ValidationError("invalid Psi_B^0 variant");
  }
  return f;
}

cplx eval_E(const TestFunction& psi, cplx x) {
  if (!(std::abs(x) < 1.0)) throw DomainError("eval_E requires |x| < 1");
  return psi(x);
}

void GridResolution::validate() const {
  if (radial < 1 || angular < 1) throw ValidationError("grid resolution must be at least 1");
  if (!(r_max > 0.0 && r_max < 1.0)) throw ValidationError("r_max must lie in (0, 1)");
}

std::vector<DiskPoint> polar_parameters(const GridResolution& res) {
  res.validate();
  std::vector<DiskPoint> pts;
  for (int j = 1; j <= res.radial; ++j) {
    const double r = res.r_max * j / (res.radial + 1.0);
    for (int k = 0; k < res.angular; ++k)
      pts.emplace_back(std::polar(r, 2.0 * std::numbers::pi * k / res.angular));
  }
  pts.push_back(DiskPoint::infinity());
  return pts;
}

TestGrid build_grid(AlgebraTag family, const BlaschkeProduct& b, const GridResolution& res) {
  const auto pts = polar_parameters(res);
  TestGrid grid{family, b, res, {}};
  const int n = b.degree();
  if (family == AlgebraTag::Constrained) {
    grid.functions.push_back(make_test_fn_AB0(b, TestVariant::GenB));
    grid.functions.push_back(make_test_fn_AB0(b, TestVariant::GenZB));
    for (const auto& p : pts) grid.functions.push_back(make_test_fn_AB0(b, TestVariant::Tail, p));
    return grid;
  }
  if (n >= 4)
    throw ValidationError("grid too large: Psi_B tensor grids are limited to N <= 3; use A_B^0 or a coarser model");
  const std::size_t p = pts.size();
  // Nondecreasing index tuples of length N-1 enumerate the multisets once each.
  std::vector<std::vector<std::size_t>> combos;
  if (n == 1) {
    combos.push_back({});
  } else if (n == 2) {
    for (std::size_t i = 0; i < p; ++i) combos.push_back({i});
  } else {
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i; j < p; ++j) combos.push_back({i, j});
  }
  if (combos.size() > kMaxGridFunctions)
    throw ValidationError("grid too large (" + std::to_string(combos.size()) +
                          " functions); use a coarser resolution");
  grid.functions.resize(combos.size());
  const auto total = static_cast<std::int64_t>(combos.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < total; ++t) {
    std::vector<DiskPoint> extras;
    for (const std::size_t i : combos[static_cast<std::size_t>(t)]) extras.push_back(pts[i]);
    grid.functions[static_cast<std::size_t>(t)] = make_test_fn_AB(b, std::move(extras));
  }
  return grid;
}

}  // namespace cdil
