#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "cdil/herglotz.hpp"
#include "doctest.h"

using namespace cdil;

namespace {

constexpr double kPi = std::numbers::pi;

AtomicMeasure random_probability(Rng& rng, int n) {
  // Angles separated by at least 0.1 rad, masses at least 0.05.
  std::vector<double> th;
  while (static_cast<int>(th.size()) < n) {
    const double t = rng.uniform(0.0, 2 * kPi);
    bool ok = true;
    for (const double s : th) {
      double d = std::abs(t - s);
      d = std::min(d, 2 * kPi - d);
      if (d < 0.1) ok = false;
    }
    if (ok) th.push_back(t);
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (auto& v : w) sum += (v = rng.uniform());
  std::vector<Atom> atoms;
  const double free = 1.0 - 0.05 * n;
  for (int k = 0; k < n; ++k)
    atoms.push_back({std::polar(1.0, th[static_cast<std::size_t>(k)]),
                     0.05 + free * w[static_cast<std::size_t>(k)] / sum});
  return AtomicMeasure(atoms);
}

BlaschkeProduct random_blaschke(Rng& rng, int n, double radius = 0.9) {
  std::vector<cplx> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = rng.in_disk(radius);
  return BlaschkeProduct::from_points(pts);
}

// Plain definition of the H^2 pairing on an m-point grid, unnormalised.
cplx pair_by_definition(const std::function<cplx(cplx)>& f, const KernelCombination& l,
                        std::size_t m) {
  cplx acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const cplx w = std::polar(1.0, 2 * kPi * static_cast<double>(k) / static_cast<double>(m));
    acc += f(w) * std::conj(l(w));
  }
  return acc / static_cast<double>(m);
}

double h2_norm(const KernelCombination& l, std::size_t m) {
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k)
    acc += std::norm(l(std::polar(1.0, 2 * kPi * static_cast<double>(k) / static_cast<double>(m))));
  return std::sqrt(acc / static_cast<double>(m));
}

}  // namespace

TEST_CASE("cayley transforms") {
  CHECK(cayley(0.0) == cplx(1.0));
  CHECK(std::abs(cayley(cplx(0, 1)) - cplx(0, 1)) < 1e-15);
  const cplx z(0.3, -0.2);
  CHECK(std::abs(inverse_cayley(cayley(z)) - z) < 1e-14);
  CHECK_THROWS_AS(cayley(1.0), DomainError);
  CHECK_THROWS_AS(inverse_cayley(-1.0), DomainError);
}

TEST_CASE("herglotz_eval") {
  const AtomicMeasure one({{1.0, 1.0}});
  CHECK(std::abs(herglotz_eval(one, 0.0) - 1.0) < 1e-15);
  const cplx z(0.2, 0.4);
  CHECK(std::abs(herglotz_eval(one, z) - (1.0 + z) / (1.0 - z)) < 1e-14);
  const AtomicMeasure two({{1.0, 0.5}, {-1.0, 0.5}});
  CHECK(std::abs(herglotz_eval(two, 0.5) - 5.0 / 3.0) < 1e-14);

  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto mu = random_probability(rng, 2 + static_cast<int>(rng.below(5)));
    CHECK(std::abs(herglotz_eval(mu, 0.0) - 1.0) < 1e-12);
    CHECK(herglotz_eval(mu, rng.in_disk(0.99)).real() > 0.0);
  }
}

TEST_CASE("AtomicMeasure validation") {
  CHECK_THROWS_AS(AtomicMeasure({{1.1, 1.0}}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure({{1.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(AtomicMeasure({{1.0, 0.5}, {1.0, 0.5}}), ValidationError);
  CHECK(AtomicMeasure({{1.0, 0.5}, {-1.0, 0.5}}).is_probability());
  CHECK_FALSE(AtomicMeasure({{1.0, 0.5}}).is_probability());
}

TEST_CASE("measure_to_blaschke examples") {
  const auto a = measure_to_blaschke(AtomicMeasure({{1.0, 1.0}})).phi;
  REQUIRE(a.degree() == 1);
  CHECK(std::abs(a(0.37) - 0.37) < 1e-14);

  const auto b = measure_to_blaschke(AtomicMeasure({{1.0, 0.5}, {-1.0, 0.5}})).phi;
  REQUIRE(b.degree() == 2);
  const cplx z(0.1, 0.6);
  CHECK(std::abs(b(z) - z * z) < 1e-12);
}

TEST_CASE("measure_to_blaschke agrees with the inverse Cayley of the Herglotz integral") {
  Rng rng(2);
  for (int t = 0; t < 50; ++t) {
    const auto mu = random_probability(rng, 4);
    const auto res = measure_to_blaschke(mu);
    CHECK(res.phi.degree() == 4);
    CHECK(std::abs(res.phi(0.0)) < 1e-8);
    for (const auto& atom : mu.atoms()) CHECK(std::abs(res.phi(atom.point) - 1.0) < 1e-8);
    for (int k = 0; k < 5; ++k) {
      const cplx z = rng.in_disk(0.95);
      CHECK(std::abs(res.phi(z) - inverse_cayley(herglotz_eval(mu, z))) < 1e-9);
    }
  }
  // Non-probability measures give phi(0) = (m - 1)/(m + 1), real.
  for (int t = 0; t < 20; ++t) {
    const double m = rng.uniform(0.2, 5.0);
    auto base = random_probability(rng, 3);
    std::vector<Atom> atoms = base.atoms();
    for (auto& a : atoms) a.mass *= m;
    const auto phi = measure_to_blaschke(AtomicMeasure(atoms)).phi;
    CHECK(std::abs(phi(0.0) - (m - 1.0) / (m + 1.0)) < 1e-9);
  }
}

TEST_CASE("blaschke_to_measure examples") {
  const auto z2 = blaschke_to_measure(BlaschkeProduct::power_of_z(2)).mu;
  REQUIRE(z2.size() == 2);
  CHECK(std::abs(z2.atoms()[0].point - 1.0) < 1e-12);
  CHECK(std::abs(z2.atoms()[1].point + 1.0) < 1e-12);
  CHECK(z2.atoms()[0].mass == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(z2.atoms()[1].mass == doctest::Approx(0.5).epsilon(1e-12));

  const auto z1 = blaschke_to_measure(BlaschkeProduct::power_of_z(1)).mu;
  REQUIRE(z1.size() == 1);
  CHECK(std::abs(z1.atoms()[0].point - 1.0) < 1e-12);
  CHECK(z1.atoms()[0].mass == doctest::Approx(1.0).epsilon(1e-12));

  const auto bad = BlaschkeProduct::from_points(std::vector<cplx>{cplx(0.3, 0.2)});
  CHECK_THROWS_AS(blaschke_to_measure(bad), ValidationError);
}

TEST_CASE("round trip measure -> Blaschke -> measure on 100 random measures") {
  Rng rng(3);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto mu = random_probability(rng, 2 + static_cast<int>(rng.below(5)));
    const auto back = blaschke_to_measure(measure_to_blaschke(mu).phi).mu;
    REQUIRE(back.size() == mu.size());
    for (const auto& a : mu.atoms()) {
      auto it = std::min_element(back.atoms().begin(), back.atoms().end(),
                                 [&](const Atom& x, const Atom& y) {
                                   return std::abs(x.point - a.point) < std::abs(y.point - a.point);
                                 });
      worst = std::max({worst, std::abs(it->point - a.point), std::abs(it->mass - a.mass)});
    }
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("Clark masses are positive and sum to f(0)") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    // phi(0) real: rotate the constant so that c * prod(-a_j) is real.
    const auto b = random_blaschke(rng, 1 + static_cast<int>(rng.below(5)));
    const cplx v = b(0.0);
    const auto phi = b.with_constant(std::abs(v) > 0 ? std::conj(v) / std::abs(v) : cplx(1.0));
    const double p0 = phi(0.0).real();
    const auto mu = blaschke_to_measure(phi).mu;
    CHECK(mu.size() == static_cast<std::size_t>(phi.degree()));
    for (const auto& a : mu.atoms()) CHECK(a.mass > 0.0);
    CHECK(std::abs(mu.total_mass() - (1.0 + p0) / (1.0 - p0)) <= 1e-8 * mu.total_mass());
    CHECK(mu.is_probability() == (std::abs(p0) < 1e-9));
  }
}

TEST_CASE("constraint_residuals") {
  const auto z2 = BlaschkeProduct::power_of_z(2);
  const auto r1 = constraint_residuals(AtomicMeasure({{1.0, 0.5}, {-1.0, 0.5}}), z2);
  REQUIRE(r1.size() == 1);
  CHECK(r1[0] < 1e-15);
  const auto r2 = constraint_residuals(AtomicMeasure({{1.0, 1.0}}), z2);
  REQUIRE(r2.size() == 1);
  CHECK(r2[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(constraint_residuals(AtomicMeasure({{1.0, 1.0}}),
                                       BlaschkeProduct::from_points(std::vector<cplx>{0.5})),
                  ValidationError);
}

TEST_CASE("Clark measures of B R satisfy the constraints, and the converse holds") {
  Rng rng(5);
  for (int t = 0; t < 40; ++t) {
    // B with a zero at the origin, repeated zeros allowed.
    std::vector<BlaschkeZero> zs{{0.0, 1 + static_cast<int>(rng.below(2))}};
    const int extra = static_cast<int>(rng.below(3));
    for (int k = 0; k < extra; ++k) zs.push_back({rng.in_disk(0.8), 1 + static_cast<int>(rng.below(2))});
    const BlaschkeProduct b(zs);
    const auto r = random_blaschke(rng, 1 + static_cast<int>(rng.below(3)), 0.95);
    const auto phi = b.times(r).with_constant(rng.on_circle());
    const auto mu = blaschke_to_measure(phi).mu;
    for (const double v : constraint_residuals(mu, b)) CHECK(v <= 1e-8);

    const auto back = measure_to_blaschke(mu).phi;
    const cplx ref = back(b.zeros()[0].point);
    for (const auto& z : b.zeros()) {
      CHECK(std::abs(back(z.point) - ref) <= 1e-7);
      for (int k = 1; k < z.multiplicity; ++k) CHECK(std::abs(back.derivative(z.point, k)) <= 1e-7);
    }
  }
}

TEST_CASE("annihilator_basis examples") {
  const auto a = annihilator_basis(BlaschkeProduct::power_of_z(2));
  REQUIRE(a.dimension() == 1);
  REQUIRE(a.functionals[0].terms.size() == 1);
  CHECK(a.functionals[0].terms[0].kernel.order == 1);
  CHECK(a.functionals[0].terms[0].kernel.alpha == cplx(0.0));

  const auto b = annihilator_basis(BlaschkeProduct::from_points(std::vector<cplx>{0.0, 0.5}));
  REQUIRE(b.dimension() == 1);
  REQUIRE(b.functionals[0].terms.size() == 2);
  CHECK(b.functionals[0].terms[0].kernel.alpha == cplx(0.0));
  CHECK(b.functionals[0].terms[1].kernel.alpha == cplx(0.5));
  CHECK(b.functionals[0].terms[0].coeff == -b.functionals[0].terms[1].coeff);

  CHECK(annihilator_basis(BlaschkeProduct({{0.0, 2}, {0.5, 1}})).dimension() == 2);
  CHECK_THROWS_AS(annihilator_basis(BlaschkeProduct::power_of_z(1)), ValidationError);
}

TEST_CASE("kernel pairing reproduces derivatives") {
  Rng rng(6);
  const auto b = random_blaschke(rng, 3);
  for (int i = 0; i <= 4; ++i) {
    const KernelCombination l{{{{cplx(0.3, -0.4), i}, 1.0}}};
    const cplx q = pair_by_definition([&](cplx w) { return b(w); }, l, 4096);
    const cplx exact = i == 0 ? b(cplx(0.3, -0.4)) : b.derivative(cplx(0.3, -0.4), i);
    CHECK(std::abs(q - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("A_B annihilators kill random algebra elements") {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    std::vector<BlaschkeZero> zs;
    const int distinct = 1 + static_cast<int>(rng.below(3));
    for (int k = 0; k < distinct; ++k) zs.push_back({rng.in_disk(0.9), 1 + static_cast<int>(rng.below(3))});
    const BlaschkeProduct b(zs);
    if (b.degree() < 2) continue;
    const auto basis = annihilator_basis(b);
    CHECK(basis.dimension() == static_cast<std::size_t>(b.degree() - 1));
    for (int e = 0; e < 20; ++e) {
      const auto el = random_algebra_element(b, AlgebraTag::Full, rng);
      for (const auto& l : basis.functionals)
        CHECK(std::abs(pair_by_definition(el, l, 4096)) / h2_norm(l, 4096) <= 1e-8);
    }
  }
}

TEST_CASE("annihilator_basis_constrained examples") {
  const auto z3 = annihilator_basis_constrained(BlaschkeProduct::power_of_z(3));
  REQUIRE(z3.dimension() == 3);
  std::set<int> orders;
  for (const auto& f : z3.functionals) {
    REQUIRE(f.terms.size() == 1);
    CHECK(f.terms[0].kernel.alpha == cplx(0.0));
    orders.insert(f.terms[0].kernel.order);
  }
  CHECK(orders == std::set<int>{1, 2, 5});

  const auto z2 = annihilator_basis_constrained(BlaschkeProduct::power_of_z(2));
  REQUIRE(z2.dimension() == 1);
  CHECK(z2.functionals[0].terms[0].kernel.order == 1);

  CHECK(annihilator_basis_constrained(BlaschkeProduct::power_of_z(4)).dimension() == 6);
  CHECK(annihilator_basis_constrained(BlaschkeProduct({{0.0, 2}, {0.4, 2}})).dimension() == 6);
}

TEST_CASE("A_B^0 annihilators kill random constrained elements") {
  Rng rng(8);
  for (int t = 0; t < 6; ++t) {
    const cplx a = rng.in_disk(0.8);
    const BlaschkeProduct b = (t % 2 == 0) ? BlaschkeProduct({{0.0, 2}, {a, 1}})
                                           : BlaschkeProduct({{0.0, 1}, {a, 1}, {rng.in_disk(0.8), 1}});
    const auto basis = annihilator_basis_constrained(b);
    REQUIRE(basis.dimension() == 3);
    for (int e = 0; e < 20; ++e) {
      const auto el = random_algebra_element(b, AlgebraTag::Constrained, rng);
      for (const auto& l : basis.functionals)
        CHECK(std::abs(pair_by_definition(el, l, 4096)) / h2_norm(l, 4096) <= 1e-7);
    }
  }
  // N = 4 with a repeated and a simple zero.
  const BlaschkeProduct b4({{0.0, 3}, {cplx(0.3, 0.3), 1}});
  const auto basis4 = annihilator_basis_constrained(b4);
  REQUIRE(basis4.dimension() == 6);
  for (int e = 0; e < 10; ++e) {
    const auto el = random_algebra_element(b4, AlgebraTag::Constrained, rng);
    for (const auto& l : basis4.functionals)
      CHECK(std::abs(pair_by_definition(el, l, 8192)) / h2_norm(l, 8192) <= 1e-7);
  }
}

TEST_CASE("annihilator Gram matrices have full rank") {
  Rng rng(9);
  std::vector<BlaschkeProduct> cases{BlaschkeProduct::power_of_z(2), BlaschkeProduct::power_of_z(3),
                                     BlaschkeProduct::power_of_z(4),
                                     BlaschkeProduct({{0.0, 2}, {0.5, 1}})};
  for (int t = 0; t < 5; ++t) cases.push_back(BlaschkeProduct({{0.0, 1}, {rng.in_disk(0.9), 2}}));
  for (const auto& b : cases)
    for (const auto tag : {AlgebraTag::Full, AlgebraTag::Constrained}) {
      const auto ev = herm_eigvals(annihilator_gram(annihilator_for(b, tag)));
      CHECK(ev.front() >= 1e-6);
    }
}

TEST_CASE("is_in_algebra") {
  const auto z2 = BlaschkeProduct::power_of_z(2);
  CHECK(is_in_algebra(sample_boundary(z2, 4096), z2, AlgebraTag::Full).member);
  const auto r = is_in_algebra(sample_boundary([](cplx w) { return w; }, 4096), z2, AlgebraTag::Full);
  CHECK_FALSE(r.member);
  CHECK(r.residual == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(is_in_algebra(sample_boundary(z2, 1024), z2, AlgebraTag::Full), ValidationError);

  Rng rng(10);
  const BlaschkeProduct b({{0.0, 1}, {cplx(0.4, 0.2), 1}, {cplx(-0.5, 0.1), 1}});
  CHECK_FALSE(is_in_algebra(sample_boundary([&](cplx w) { return w * w * b(w); }, 4096), b,
                            AlgebraTag::Constrained)
                  .member);
  CHECK(is_in_algebra(sample_boundary([&](cplx w) { return w * b(w); }, 4096), b,
                      AlgebraTag::Constrained)
            .member);
  CHECK(is_in_algebra(sample_boundary([&](cplx w) { return w * w * b(w); }, 4096), b,
                      AlgebraTag::Full)
            .member);
  for (int t = 0; t < 10; ++t) {
    const auto el = random_algebra_element(b, AlgebraTag::Constrained, rng);
    CHECK(is_in_algebra(sample_boundary(el, 4096), b, AlgebraTag::Constrained).member);
  }
}

TEST_CASE("parallel and serial pairings agree") {
  Rng rng(11);
  const BlaschkeProduct b({{0.0, 2}, {cplx(0.2, 0.5), 2}});
  const auto basis = annihilator_basis_constrained(b);
  const auto samples = sample_boundary([](cplx w) { return std::exp(w); }, 4096);
  const auto p = annihilator_pairings(samples, basis);
  const auto s = annihilator_pairings_serial(samples, basis);
  REQUIRE(p.size() == s.size());
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(p[k] - s[k]) <= 1e-13 * (1 + std::abs(s[k])));
}
