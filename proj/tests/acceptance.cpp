// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>

#include "cdil/dilation.hpp"
#include "cdil/varieties.hpp"

using namespace cdil;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<cplx> separated_nodes(Rng& rng, std::size_t n, double radius = 0.9) {
  std::vector<cplx> z;
  while (z.size() < n) {
    const cplx c = rng.in_disk(radius);
    bool ok = true;
    for (const cplx y : z) ok = ok && std::abs(c - y) > 0.05;
    if (ok) z.push_back(c);
  }
  return z;
}

BlaschkeProduct random_blaschke(Rng& rng, int n, double radius) {
  std::vector<cplx> pts(static_cast<std::size_t>(n));
  for (auto& p : pts) p = rng.in_disk(radius);
  return BlaschkeProduct::from_points(pts);
}

// ---------------------------------------------------------------- 1

Outcome measure_round_trip() {
  Rng rng(101);
  double worst_atom = 0.0, worst_sum = 0.0;
  bool positive = true;
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.below(5));
    std::vector<double> th;
    while (static_cast<int>(th.size()) < n) {
      const double a = rng.uniform(0.0, 2 * kPi);
      bool ok = true;
      for (const double s : th) ok = ok && std::min(std::abs(a - s), 2 * kPi - std::abs(a - s)) >= 0.1;
      if (ok) th.push_back(a);
    }
    std::vector<double> w(th.size());
    double sum = 0.0;
    for (auto& v : w) sum += (v = rng.uniform());
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < th.size(); ++k)
      atoms.push_back({std::polar(1.0, th[k]), 0.05 + (1.0 - 0.05 * n) * w[k] / sum});
    const AtomicMeasure mu(atoms);
    const auto f = measure_to_blaschke(mu).phi;
    const auto back = blaschke_to_measure(f).mu;
    if (back.size() != mu.size()) return {false, fmt("trial %d: %zu atoms recovered, %zu expected", t, back.size(), mu.size())};
    for (const auto& a : mu.atoms()) {
      double best = 1e300, mass = 0.0;
      for (const auto& b : back.atoms())
        if (std::abs(b.point - a.point) < best) best = std::abs(b.point - a.point), mass = b.mass;
      worst_atom = std::max({worst_atom, best, std::abs(mass - a.mass)});
    }
    for (const auto& b : back.atoms()) positive = positive && b.mass > 0.0;
    // Clark masses of f sum to (1 + f(0)) / (1 - f(0)); f(0) = 0 for a probability measure.
    const double f0 = f(0.0).real();
    worst_sum = std::max(worst_sum, std::abs(back.total_mass() - (1.0 + f0) / (1.0 - f0)));
  }
  const bool ok = worst_atom <= 1e-7 && worst_sum <= 1e-9 && positive;
  return {ok, fmt("max atom/mass error %.2e, max |sum m - f(0) relation| %.2e, masses positive %d", worst_atom,
                  worst_sum, positive)};
}

// ---------------------------------------------------------------- 2

Outcome constraint_equivalence() {
  Rng rng(202);
  const std::vector<BlaschkeProduct> bases{BlaschkeProduct::power_of_z(2), BlaschkeProduct({{0.0, 1}, {0.5, 1}}),
                                           BlaschkeProduct({{0.0, 2}, {0.5, 1}})};
  double worst_in = 0.0, weakest_out = 1e300;
  for (int t = 0; t < 50; ++t) {
    const auto& b = bases[static_cast<std::size_t>(t) % bases.size()];
    const auto r = random_blaschke(rng, 1 + static_cast<int>(rng.below(3)), 0.95);
    const auto phi = b.times(r).with_constant(rng.on_circle());
    for (const double v : constraint_residuals(blaschke_to_measure(phi).mu, b)) worst_in = std::max(worst_in, v);
  }
  for (int t = 0; t < 50; ++t) {
    const auto& b = bases[static_cast<std::size_t>(t) % bases.size()];
    // z R with R kept visibly away from the algebra: |R| >= 0.1 at 0 and at the zeros of B.
    BlaschkeProduct r;
    for (;;) {
      r = random_blaschke(rng, 1 + static_cast<int>(rng.below(3)), 0.95).with_constant(rng.on_circle());
      bool far = std::abs(r(0.0)) >= 0.1;
      for (const cplx a : b.zero_list()) far = far && std::abs(r(a)) >= 0.1;
      if (far) break;
    }
    const auto phi = BlaschkeProduct::power_of_z(1).times(r);
    const auto res = constraint_residuals(blaschke_to_measure(phi).mu, b);
    weakest_out = std::min(weakest_out, *std::max_element(res.begin(), res.end()));
  }
  return {worst_in <= 1e-7 && weakest_out > 1e-3,
          fmt("members: max residual %.2e; non-members: min over trials of max residual %.2e", worst_in, weakest_out)};
}

// ---------------------------------------------------------------- 3

Outcome variety_identities() {
  Rng rng(303);
  double worst = 0.0;
  bool dichotomy = true;
  for (int t = 0; t < 5; ++t) {
    const auto b = random_blaschke(rng, 2 + t % 2, 0.9);
    const auto p = variety_polynomial(b);
    for (int i = 1; i <= 10; ++i)
      for (int k = 0; k < 20; ++k) {
        const cplx z = std::polar(i / 10.0, 2 * kPi * k / 20.0);
        worst = std::max(worst, std::abs(p(b(z), z * b(z))) / p.scale());
      }
    for (int k = 0; k < 100; ++k) {
      const cplx z = rng.on_circle();
      dichotomy = dichotomy && std::abs(std::abs(b(z)) - 1.0) <= 1e-10 && std::abs(std::abs(z * b(z)) - 1.0) <= 1e-10;
      const cplx w = rng.in_disk(0.999);
      dichotomy = dichotomy && std::max(std::abs(b(w)), std::abs(w * b(w))) < 1.0;
    }
  }
  // z^2: x^3 - y^2 exactly.
  const auto p2 = variety_polynomial(BlaschkeProduct::power_of_z(2));
  bool exact = p2.x_degree() == 3 && p2.y_degree() == 2;
  for (std::size_t i = 0; exact && i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const cplx e = (i == 3 && j == 0) ? 1.0 : (i == 0 && j == 2) ? -1.0 : 0.0;
      exact = exact && p2.coeffs[i][j] == e;
    }
  return {worst <= 1e-10 && exact && dichotomy,
          fmt("max |P(B, zB)| / scale %.2e, z^2 gives x^3 - y^2: %d, boundary dichotomy: %d", worst, exact, dichotomy)};
}

// ---------------------------------------------------------------- 4

Outcome determinantal() {
  Rng rng(404);
  double spread = 0.0, unitary = 0.0, on_variety = 0.0;
  for (int t = 0; t < 6; ++t) {
    const auto b = random_blaschke(rng, 2 + t % 3, 0.9);
    const auto rep = determinantal_rep(b);
    const auto p = variety_polynomial(b);
    spread = std::max(spread, fit_det_constant(rep, p, rng).relative_spread);
    for (int k = 0; k < 50; ++k) {
      const auto u = rep.psi_unitary(rng.on_circle());
      unitary = std::max(unitary, (u.adjoint() * u - ComplexMatrix::identity(rep.size())).frobenius_norm());
      const cplx z = rng.in_disk(1.0);
      on_variety = std::max(on_variety, std::abs(rep.char_det(b(z), z * b(z))));
    }
  }
  return {spread <= 1e-6 && unitary <= 1e-8 && on_variety <= 1e-8,
          fmt("ratio spread %.2e, unitarity defect %.2e, on-variety det %.2e", spread, unitary, on_variety)};
}

// ---------------------------------------------------------------- 5

Outcome test_function_axioms() {
  Rng rng(505);
  const std::vector<BlaschkeProduct> bases{BlaschkeProduct({{0.0, 1}, {0.5, 1}}),
                                           BlaschkeProduct({{0.0, 1}, {0.5, 1}, {-0.5, 1}})};
  std::size_t checked = 0;
  std::string failure;
  for (const auto& b : bases)
    for (const auto fam : {AlgebraTag::Full, AlgebraTag::Constrained}) {
      const auto grid = build_grid(fam, b, GridResolution{6, 12});
      const auto n = static_cast<std::size_t>(b.degree());
      for (int k = 0; k < 100 && failure.empty(); ++k) {
        const cplx x = rng.in_disk(0.999), y = rng.in_disk(0.999);
        double sup = 0.0, sep = 0.0;
        for (const auto& f : grid.functions) {
          sup = std::max(sup, std::abs(eval_E(f, x)));
          sep = std::max(sep, std::abs(f(x) - f(y)));
        }
        if (!(sup < 1.0)) failure = fmt("|psi(x)| = %.17g", sup);
        if (!(sep > 1e-6)) failure = "pair not separated";
      }
      for (const auto& f : grid.functions) {
        if (!failure.empty()) break;
        ++checked;
        if (!is_in_algebra(sample_boundary(f, kMinQuadraturePoints), b, fam).member) failure = "membership";
        if (fam != AlgebraTag::Full) continue;
        const auto mu = blaschke_to_measure(f.psi).mu;
        double nearest = 1e300;
        for (const auto& a : mu.atoms()) nearest = std::min(nearest, std::abs(a.point - 1.0));
        if (mu.size() < n || mu.size() > 2 * n - 1) failure = fmt("support size %zu", mu.size());
        if (nearest > 1e-10) failure = "1 not in support";
      }
    }
  return {failure.empty(), failure.empty() ? fmt("%zu grid functions checked on N = 2, 3", checked) : failure};
}

// ---------------------------------------------------------------- 6

Outcome agler_decomposition() {
  const BlaschkeProduct b({{0.0, 1}, {0.5, 1}});
  const auto coarse = build_grid(AlgebraTag::Full, b, GridResolution{8, 16});
  const auto fine = build_grid(AlgebraTag::Full, b, GridResolution{17, 32});
  double worst = 0.0, worst_fine = 0.0;
  for (int t = 0; t < 20; ++t) {
    Rng rng(derive_seed(606, static_cast<std::uint64_t>(t)));
    const auto phi = random_algebra_element(b, AlgebraTag::Full, rng);
    PickProblem p{AlgebraTag::Full, b, separated_nodes(rng, 5), {}};
    for (const cplx z : p.nodes) p.targets.push_back(phi(z));
    const auto r = pick_check(p, coarse);
    if (r.cert.status != CertStatus::Feasible || !r.report.ok || !r.classical_psd)
      return {false, fmt("trial %d: %s on the 8 x 16 grid", t, to_string(r.cert.status))};
    worst = std::max(worst, r.report.residual);
    const auto rf = pick_check(p, fine);
    if (rf.cert.status != CertStatus::Feasible || !rf.report.ok)
      return {false, fmt("trial %d: %s on the 17 x 32 grid", t, to_string(rf.cert.status))};
    worst_fine = std::max(worst_fine, rf.report.residual);
  }
  return {worst <= 1e-6 && worst_fine <= 1e-6,
          fmt("20/20 feasible, max residual %.2e (8 x 16), %.2e (17 x 32)", worst, worst_fine)};
}

// ---------------------------------------------------------------- 7

Outcome pick_gap() {
  const BlaschkeProduct b({{0.0, 1}, {0.5, 1}});
  const PickProblem p{AlgebraTag::Full, b, {0.0, 0.5}, {0.0, 0.3}};
  const auto r = pick_check(p, build_grid(AlgebraTag::Full, b, GridResolution{8, 16}));
  return {r.cert.status == CertStatus::Infeasible && r.report.ok && r.classical_psd,
          fmt("status %s, margin %.3e, verified %d, classical Pick PSD %d", to_string(r.cert.status),
              r.report.margin, r.report.ok, r.classical_psd)};
}

// ---------------------------------------------------------------- 8

Outcome rational_dilation() {
  const auto cfg = default_dilation_config();
  const auto r = dilation_certify(cfg);
  const auto& f = r.fine_report;
  const bool ok = r.cert.status == CertStatus::Infeasible && r.nodes.points.size() == 7 && f.ok &&
                  f.margin >= 1e-4 && f.worst_lmax <= 1e-8 && f.worst_lmax_fine <= 1e-8 && f.fine_count > 0;
  return {ok, fmt("status %s, |S| = %zu, %zu + %zu generators, margin %.3e, max lambda %.2e / %.2e (fine %d x %d)",
                  to_string(r.cert.status), r.nodes.points.size(), r.generator_count, f.fine_count, f.margin,
                  f.worst_lmax, f.worst_lmax_fine, r.fine_grid.radial, r.fine_grid.angular)};
}

// ---------------------------------------------------------------- 9

Outcome kv_gap() {
  GapConfig cfg;
  cfg.base = BlaschkeProduct({{0.0, 1}, {0.5, 1}, {-0.5, 1}});
  cfg.trials = 500;
  const auto w = generator_gap_search(cfg);
  if (!w.found) return {false, fmt("no witness in %d trials", w.trials_run)};
  const auto grid = build_grid(AlgebraTag::Constrained, cfg.base, cfg.grid);
  const std::vector<TestFunction> restricted(grid.functions.begin(), grid.functions.begin() + 2);
  const auto rr = verify_certificate(w.restricted, gap_problem(restricted, w.phi, w.nodes));
  const auto fr = verify_certificate(w.full, gap_problem(grid.functions, w.phi, w.nodes));
  return {rr.ok && fr.ok && rr.margin > cfg.opts.margin_min,
          fmt("witness at trial %d, full residual %.2e, restricted margin %.3e", w.trial, fr.residual, rr.margin)};
}

// ---------------------------------------------------------------- 10

Outcome minimality() {
  MinimalityConfig cfg;
  cfg.base = BlaschkeProduct::power_of_z(2);
  cfg.psi0 = {DiskPoint(0.5)};
  cfg.center = {DiskPoint(0.5)};
  const auto iso = minimality_witness(cfg);
  cfg.center = {DiskPoint(-0.5)};
  const auto dis = minimality_witness(cfg);
  return {iso.cert.status == CertStatus::Infeasible && iso.report.ok && dis.cert.status == CertStatus::Feasible &&
              dis.report.ok,
          fmt("isolating: %s (removed %zu, margin %.3e, verified %d); disjoint: %s (verified %d)",
              to_string(iso.cert.status), iso.removed, iso.report.margin, iso.report.ok, to_string(dis.cert.status),
              dis.report.ok)};
}

// ---------------------------------------------------------------- 11

ComplexMatrix random_psd(Rng& rng, std::size_t n, std::size_t rank) {
  ComplexMatrix g(n, rank);
  for (auto& v : g.data()) v = rng.complex_normal();
  return g * g.adjoint();
}

ConeProblem random_instance(Rng& rng, bool feasible) {
  ConeProblem p;
  const std::size_t n = 2 + rng.below(4);
  p.block = 1 + rng.below(2);
  p.nodes = separated_nodes(rng, n);
  const std::size_t count = 3 + rng.below(6);
  for (std::size_t m = 0; m < count; ++m) {
    const auto psi = random_blaschke(rng, 1 + static_cast<int>(rng.below(3)), 0.9).with_constant(rng.on_circle());
    std::vector<cplx> vals;
    for (const cplx z : p.nodes) vals.push_back(psi(z));
    p.generators.push_back(kernel_from_values(vals));
  }
  const std::size_t d = n * p.block;
  ComplexMatrix t(d, d);
  for (std::size_t k = 0; k < 2 + rng.below(count); ++k)
    t += schur_product(random_psd(rng, d, 1 + rng.below(d)), expand_kernel(p.generators[rng.below(count)], p.block));
  t = t.hermitian_part();
  if (!feasible) {
    if (rng.below(2) == 0) {
      t = random_psd(rng, d, 1 + rng.below(d));
      t *= -1.0;
    } else {
      // Every cone element has a nonnegative diagonal.
      const std::size_t k = rng.below(d);
      t(k, k) = -rng.uniform(0.05, 1.0) * std::abs(t(k, k)) - 0.01 * t.frobenius_norm();
    }
  }
  t *= 1.0 / t.frobenius_norm();
  p.target = t;
  return p;
}

Outcome solver_soundness() {
  int correct = 0, verified = 0;
  std::string first;
  for (int k = 0; k < 200; ++k) {
    const bool feasible = k < 100;
    Rng rng(derive_seed(1111, static_cast<std::uint64_t>(k)));
    const auto p = random_instance(rng, feasible);
    const auto c = cone_feasibility(p);
    const bool right = c.status == (feasible ? CertStatus::Feasible : CertStatus::Infeasible);
    const bool ok = verify_certificate(c, p).ok;
    correct += right;
    verified += ok;
    if ((!right || !ok) && first.empty())
      first = fmt(" (instance %d: %s, residual %.2e, margin %.2e)", k, to_string(c.status), c.residual, c.margin);
  }
  return {correct == 200 && verified == 200, fmt("%d/200 classified, %d/200 certificates verified%s", correct,
                                                verified, first.c_str())};
}

}  // namespace

// Optional arguments select criteria by number; default is all.
int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    double limit;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "measure / Blaschke round trip", 5, measure_round_trip},
      {2, "constraint equivalence", 10, constraint_equivalence},
      {3, "variety identities", 5, variety_identities},
      {4, "determinantal representation", 5, determinantal},
      {5, "test-function axioms", 30, test_function_axioms},
      {6, "Agler decomposition existence", 60, agler_decomposition},
      {7, "constrained vs classical Pick gap", 20, pick_gap},
      {8, "rational dilation failure certificate", 180, rational_dilation},
      {9, "generator gap witness", 180, kv_gap},
      {10, "minimality witness", 60, minimality},
      {11, "solver soundness", 60, solver_soundness},
  };
  int failed = 0;
  double total = 0.0;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    total += s;
    const bool pass = o.pass && s <= c.limit;
    failed += !pass;
    std::printf("%s criterion %2d %s: %s [%.1f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), s, c.limit);
    std::fflush(stdout);
  }
  std::printf("total %.1f s, %d failed\n", total, failed);
  return failed == 0 ? 0 : 1;
}
