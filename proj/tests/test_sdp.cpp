#include <cmath>

#include "cdil/sdp.hpp"
#include "doctest.h"

using namespace cdil;

namespace {

std::vector<cplx> random_nodes(Rng& rng, std::size_t n, double radius = 0.9) {
  std::vector<cplx> z(n);
  for (auto& v : z) v = rng.in_disk(radius);
  return z;
}

ComplexMatrix random_psd(Rng& rng, std::size_t n, std::size_t rank) {
  ComplexMatrix g(n, rank);
  for (auto& v : g.data()) v = rng.complex_normal();
  return g * g.adjoint();
}

// Generators from random Blaschke-product test functions.
std::vector<ComplexMatrix> random_generators(Rng& rng, const std::vector<cplx>& nodes, std::size_t count) {
  std::vector<ComplexMatrix> gens;
  for (std::size_t m = 0; m < count; ++m) {
    const int deg = 1 + static_cast<int>(rng.below(3));
    std::vector<cplx> zs(static_cast<std::size_t>(deg));
    for (auto& z : zs) z = rng.in_disk(0.9);
    const auto b = BlaschkeProduct::from_points(zs, rng.on_circle());
    std::vector<cplx> vals;
    for (const cplx z : nodes) vals.push_back(b(z));
    gens.push_back(kernel_from_values(vals));
  }
  return gens;
}

ConeProblem constructed_feasible(Rng& rng, std::size_t n, std::size_t block, std::size_t gens,
                                 std::size_t used) {
  ConeProblem p;
  p.block = block;
  p.nodes = random_nodes(rng, n);
  p.generators = random_generators(rng, p.nodes, gens);
  p.target = ComplexMatrix(n * block, n * block);
  for (std::size_t k = 0; k < used; ++k) {
    const auto q = random_psd(rng, n * block, 1 + rng.below(n * block));
    p.target += schur_product(q, expand_kernel(p.generators[rng.below(gens)], block));
  }
  p.target = p.target.hermitian_part();
  p.target *= 1.0 / p.target.frobenius_norm();
  return p;
}

}  // namespace

TEST_CASE("assemble_kernel") {
  const auto psi = make_test_fn_AB(BlaschkeProduct::power_of_z(2), {DiskPoint::infinity()});
  const cplx one[] = {0.0};
  CHECK(assemble_kernel(psi, one)(0, 0) == cplx(1.0));
  const cplx two[] = {0.0, 0.5};
  const auto k = assemble_kernel(psi, two);
  CHECK(k(0, 1) == cplx(1.0));
  CHECK(k(1, 0) == cplx(1.0));
  CHECK(std::abs(k(1, 1) - 0.9375) < 1e-15);
  const cplx bad[] = {1.0};
  CHECK_THROWS_AS(assemble_kernel(psi, bad), ValidationError);
}

TEST_CASE("kernels are positive after Schur multiplication by the Szego kernel") {
  // 1 - psi psi* itself is J - v v*, which is indefinite in general; the
  // admissible form (1 - psi(z) psi(w)*) / (1 - z conj(w)) is PSD.
  Rng rng(1);
  const BlaschkeProduct b({{0.0, 1}, {0.5, 1}});
  const auto grid = build_grid(AlgebraTag::Full, b, GridResolution{2, 4});
  for (const auto& psi : grid.functions) {
    const auto nodes = random_nodes(rng, 6, 0.95);
    const auto k = assemble_kernel(psi, nodes);
    ComplexMatrix sz(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) sz(i, j) = 1.0 / (1.0 - nodes[i] * std::conj(nodes[j]));
    const auto ev = herm_eigvals(schur_product(k, sz));
    CHECK(ev.front() >= -1e-12 * ev.back());
  }
}

TEST_CASE("constructed feasible instance") {
  Rng rng(2);
  const auto p = constructed_feasible(rng, 5, 1, 5, 5);
  const auto cert = cone_feasibility(p);
  REQUIRE(cert.status == CertStatus::Feasible);
  CHECK(cert.residual <= 1e-6);
  const auto rep = verify_certificate(cert, p);
  CHECK(rep.ok);
  CHECK(rep.residual <= 1e-6);
}

TEST_CASE("diag(1, -1) is infeasible") {
  Rng rng(3);
  ConeProblem p;
  p.nodes = random_nodes(rng, 2);
  p.generators = random_generators(rng, p.nodes, 4);
  const double d[] = {1.0, -1.0};
  p.target = ComplexMatrix::diagonal(d);
  const auto cert = cone_feasibility(p);
  REQUIRE(cert.status == CertStatus::Infeasible);
  CHECK(cert.margin > 0.0);
  CHECK(cert.w(1, 1).real() < 0.0);
  // By hand: W = diag(0, -1) works for every generator.
  Certificate hand;
  hand.status = CertStatus::Infeasible;
  const double wd[] = {0.0, -1.0};
  hand.w = ComplexMatrix::diagonal(wd);
  const auto rep = verify_certificate(hand, p);
  CHECK(rep.ok);
  CHECK(rep.margin == doctest::Approx(1.0));
  CHECK(rep.worst_lmax <= 0.0);
}

TEST_CASE("PSD targets are feasible against any grid") {
  Rng rng(4);
  const BlaschkeProduct b({{0.0, 1}, {0.5, 1}});
  const auto grid = build_grid(AlgebraTag::Full, b, GridResolution{2, 4});
  ConeProblem p;
  p.nodes = random_nodes(rng, 4);
  for (const auto& f : grid.functions) p.generators.push_back(assemble_kernel(f, p.nodes));
  p.target = random_psd(rng, 4, 2);
  p.target *= 1.0 / p.target.frobenius_norm();
  const auto cert = cone_feasibility(p);
  CHECK(cert.status == CertStatus::Feasible);
  CHECK(verify_certificate(cert, p).ok);
}

TEST_CASE("tampered separator is rejected") {
  Rng rng(5);
  ConeProblem p;
  p.nodes = random_nodes(rng, 3);
  p.generators = random_generators(rng, p.nodes, 6);
  p.target = random_psd(rng, 3, 3);
  p.target *= -1.0 / p.target.frobenius_norm();
  auto cert = cone_feasibility(p);
  REQUIRE(cert.status == CertStatus::Infeasible);
  CHECK(verify_certificate(cert, p).ok);
  cert.w *= -1.0;
  const auto rep = verify_certificate(cert, p);
  CHECK_FALSE(rep.ok);
  CHECK(rep.margin < 0.0);
}

TEST_CASE("feasible certificates are reproducible bit for bit") {
  Rng r1(6), r2(6);
  const auto p1 = constructed_feasible(r1, 4, 2, 6, 4);
  const auto p2 = constructed_feasible(r2, 4, 2, 6, 4);
  SolverOptions serial;
  serial.parallel = false;
  const auto a = cone_feasibility(p1);
  const auto b = cone_feasibility(p2, serial);
  REQUIRE(a.status == b.status);
  CHECK(a.iterations == b.iterations);
  for (std::size_t m = 0; m < a.weights.size(); ++m) CHECK(a.weights[m] == b.weights[m]);
}

TEST_CASE("dimension mismatch is a validation error") {
  ConeProblem p;
  p.generators = {ComplexMatrix::identity(2)};
  p.target = ComplexMatrix::identity(3);
  CHECK_THROWS_AS(cone_feasibility(p), ValidationError);
  p.target = ComplexMatrix::identity(2);
  p.generators.clear();
  CHECK_THROWS_AS(cone_feasibility(p), ValidationError);
}
