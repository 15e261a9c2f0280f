#include "cdil/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cdil {

namespace {

constexpr double kNodeSeparation = 1e-8;

void check_distinct(std::span<const cplx> pts, const char* what) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::abs(pts[i] - pts[j]) < kNodeSeparation)
        throw ValidationError(std::string(what) + ": nodes collide");
}

bool near_zero_of(const BlaschkeProduct& b, cplx p) {
  for (const auto& z : b.zeros())
    if (std::abs(z.point - p) < kNodeSeparation) return true;
  return false;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace

// ---------------------------------------------------------------- Pick

void PickProblem::validate() const {
  if (nodes.empty()) throw ValidationError("Pick problem needs at least one node");
  if (nodes.size() != targets.size()) throw ValidationError("node and target counts differ");
  for (const cplx z : nodes)
    if (!(std::abs(z) < 1.0)) throw ValidationError("Pick node outside the open disk");
  for (const cplx x : targets)
    if (!(std::abs(x) < 1.0)) throw ValidationError("Pick target must lie in the open disk");
  check_distinct(nodes, "Pick problem");
}

ComplexMatrix pick_target(const PickProblem& p) { return kernel_from_values(p.targets); }

ComplexMatrix classical_pick_matrix(std::span<const cplx> nodes, std::span<const cplx> targets) {
  ComplexMatrix k = kernel_from_values(targets);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j) k(i, j) /= 1.0 - nodes[i] * std::conj(nodes[j]);
  return k.hermitian_part();
}

std::vector<ComplexMatrix> grid_kernels(const std::vector<TestFunction>& fns, std::span<const cplx> nodes,
                                        bool parallel) {
  std::vector<ComplexMatrix> out(fns.size());
  const auto total = static_cast<std::int64_t>(fns.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t m = 0; m < total; ++m) {
    const auto i = static_cast<std::size_t>(m);
    out[i] = assemble_kernel(fns[i], nodes);
  }
  return out;
}

PickResult pick_check(const PickProblem& problem, const TestGrid& grid, const SolverOptions& opts) {
  problem.validate();
  if (grid.family != problem.tag) throw ValidationError("grid family does not match the problem's algebra");
  if (grid.functions.empty()) throw ValidationError("empty test-function grid");
  ConeProblem cp;
  cp.target = pick_target(problem);
  cp.generators = grid_kernels(grid.functions, problem.nodes, opts.parallel);
  cp.nodes = problem.nodes;
  PickResult res;
  res.generator_count = cp.generators.size();
  res.cert = cone_feasibility(cp, opts);
  if (res.cert.status != CertStatus::Inconclusive) res.report = verify_certificate(res.cert, cp, {}, opts);
  res.classical = classical_pick_matrix(problem.nodes, problem.targets);
  res.classical_psd = is_psd(res.classical, opts.tol);
  return res;
}

// ---------------------------------------------------------------- Phi

ComplexMatrix default_unitary() {
  const double s = 1.0 / std::sqrt(2.0);
  return ComplexMatrix::from_rows({{s, s}, {s, -s}});
}

ComplexMatrix RFunction::operator()(cplx z) const {
  const cplx a = mobius_eval(DiskPoint(p1), z);
  const cplx b = mobius_eval(DiskPoint(p2), z);
  ComplexMatrix r(2, 2);
  r(0, 0) = a * u(0, 0);
  r(0, 1) = a * u(0, 1) * b;
  r(1, 0) = u(1, 0);
  r(1, 1) = u(1, 1) * b;
  return r;
}

RFunction build_R(cplx p1, cplx p2, const ComplexMatrix& u) {
  if (!(std::abs(p1) < 1.0 && std::abs(p2) < 1.0)) throw ValidationError("p1, p2 must lie in the open disk");
  if (std::abs(p1 - p2) < kNodeSeparation) throw ValidationError("p1 and p2 must be distinct");
  if (u.rows() != 2 || u.cols() != 2) throw ValidationError("U must be 2x2");
  if ((u.adjoint() * u - ComplexMatrix::identity(2)).max_abs() > 1e-12)
    throw ValidationError("U must be unitary");
  if (std::abs(u(0, 1)) < 1e-12 || std::abs(u(1, 0)) < 1e-12)
    throw ValidationError("U must have nonzero off-diagonal entries");
  return RFunction{p1, p2, u};
}

ComplexMatrix MatrixFunction2x2::operator()(cplx z) const {
  ComplexMatrix r = this->r(z);
  r *= std::pow(base(z), power);
  return r;
}

double MatrixFunction2x2::sampled_sup(std::size_t m) const {
  double sup = 0.0;
  for (const cplx w : boundary_grid(m)) {
    const auto v = (*this)(w);
    sup = std::max(sup, std::sqrt(std::max(0.0, lambda_max((v * v.adjoint()).hermitian_part()))));
  }
  return sup;
}

MatrixFunction2x2 build_Phi(const BlaschkeProduct& b, AlgebraTag tag, cplx p1, cplx p2,
                            const ComplexMatrix& u) {
  const int n = b.degree();
  if (n < 1) throw ValidationError("B must have degree at least 1");
  if (tag == AlgebraTag::Constrained && n < 2) throw ValidationError("A_B^0 needs N >= 2");
  for (const cplx p : {p1, p2}) {
    if (std::abs(p) < kNodeSeparation) throw ValidationError("p1, p2 must be nonzero");
    if (near_zero_of(b, p)) throw ValidationError("p1, p2 must avoid the zeros of B");
  }
  MatrixFunction2x2 phi{b, tag == AlgebraTag::Full ? 1 : n - 1, build_R(p1, p2, u)};
  if (phi.sampled_sup() > 1.0 + 1e-10) throw ValidationError("sampled norm of Phi exceeds 1");
  return phi;
}

// ---------------------------------------------------------------- S

std::size_t node_set_size(int n) { return static_cast<std::size_t>(2 * n * n - 3 * n + 5); }

double vandermonde_min_singular_value(std::span<const cplx> pts) {
  const std::size_t n = pts.size();
  if (n == 0) return 0.0;
  ComplexMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      v(i, k) = p;
      p *= pts[i];
    }
  }
  // sigma_min = 1 / ||V^{-1}||_2; the largest eigenvalue is the accurate end.
  try {
    const auto vi = inverse(v);
    return 1.0 / std::sqrt(lambda_max((vi.adjoint() * vi).hermitian_part()));
  } catch (const NumericError&) {
    return 0.0;
  }
}

NodeSetS build_S(const BlaschkeProduct& b, cplx p1, cplx p2, std::uint64_t seed) {
  const int n = b.degree();
  if (n < 1) throw ValidationError("B must have degree at least 1");
  build_R(p1, p2);  // parameter checks
  for (const cplx p : {p1, p2})
    if (near_zero_of(b, p) || std::abs(p) < kNodeSeparation)
      throw ValidationError("p1, p2 must avoid 0 and the zeros of B");

  NodeSetS s;
  s.points = {p1, p2};
  for (const auto& z : b.zeros()) {
    if (z.multiplicity == 1) {
      s.zero_slots.push_back(s.points.size());
      s.points.push_back(z.point);
      continue;
    }
    for (int k = 0; k < z.multiplicity; ++k) {
      s.zero_slots.push_back(s.points.size());
      s.points.push_back(z.point + std::polar(kRepeatedZeroOffset, 2.0 * std::numbers::pi * k / z.multiplicity));
    }
  }
  for (const cplx z : s.points)
    if (!(std::abs(z) < 1.0)) throw ValidationError("a zero slot left the disk; zeros too close to the circle");

  const std::size_t fill = static_cast<std::size_t>(2 * (n - 1) * (n - 1) + 1);
  const std::size_t fixed = s.points.size();
  // Keep fill points clear of the fixed ones so kernels stay well conditioned.
  const double sep = 0.05;
  Rng rng(seed);
  constexpr int kMaxAttempts = 200;
  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    std::vector<cplx> cand;
    int guard = 0;
    while (cand.size() < fill && guard < 100000) {
      ++guard;
      const cplx z = rng.in_disk(kFillRadius);
      bool ok = true;
      for (std::size_t i = 0; i < fixed && ok; ++i) ok = std::abs(z - s.points[i]) >= sep;
      for (const cplx c : cand)
        if (std::abs(z - c) < sep) ok = false;
      if (ok) cand.push_back(z);
    }
    if (cand.size() < fill) continue;
    const double sv = vandermonde_min_singular_value(cand);
    if (sv > 1e-8) {
      s.attempts = attempt;
      s.vandermonde_min_sv = sv;
      for (const cplx z : cand) {
        s.fill.push_back(s.points.size());
        s.points.push_back(z);
      }
      return s;
    }
  }
  throw NumericError("could not draw a generic fill set for S; try another seed");
}

// ---------------------------------------------------------------- Delta

ComplexMatrix delta_matrix(const MatrixValued& f, std::span<const cplx> nodes) {
  std::vector<ComplexMatrix> vals;
  vals.reserve(nodes.size());
  for (const cplx z : nodes) vals.push_back(f(z));
  const std::size_t b = vals.empty() ? 0 : vals.front().rows();
  const std::size_t n = nodes.size();
  ComplexMatrix d(n * b, n * b);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto blk = vals[i] * vals[j].adjoint();
      for (std::size_t a = 0; a < b; ++a)
        for (std::size_t c = 0; c < b; ++c) d(i * b + a, j * b + c) = (a == c ? 1.0 : 0.0) - blk(a, c);
    }
  return d.hermitian_part();
}

ComplexMatrix delta_matrix(const MatrixFunction2x2& phi, std::span<const cplx> nodes) {
  return delta_matrix([&phi](cplx z) { return phi(z); }, nodes);
}

DilationConfig default_dilation_config() {
  DilationConfig c;
  c.base = BlaschkeProduct({{0.0, 1}, {0.5, 1}});
  return c;
}

DilationResult dilation_certify(const DilationConfig& config) {
  const auto& b = config.base;
  const int n = b.degree();
  DilationResult res;
  bool hypotheses = true;
  if (config.tag == AlgebraTag::Full) {
    hypotheses = n >= 2;
  } else {
    hypotheses = b.zeros().size() >= 2;
    for (const auto& z : b.zeros()) hypotheses = hypotheses && z.multiplicity == b.zeros().front().multiplicity;
  }
  if (!hypotheses && !config.exploratory)
    throw ValidationError(config.tag == AlgebraTag::Full
                              ? "the counterexample needs N >= 2"
                              : "the A_B^0 counterexample needs two or more distinct zeros of equal multiplicity");
  if (!b.has_zero_at_origin()) throw ValidationError("B must vanish at 0 (normalise by a disk automorphism)");
  res.exploratory = !hypotheses;
  if (config.verify_factor < 1) throw ValidationError("verify factor must be at least 1");

  const auto phi = build_Phi(b, config.tag, config.p1, config.p2, config.u);
  res.sup_norm = phi.sampled_sup();
  res.nodes = build_S(b, config.p1, config.p2, config.seed);
  const auto& pts = res.nodes.points;
  if (config.scalar_override) {
    const auto psi = *config.scalar_override;
    res.delta = delta_matrix(
        [&psi](cplx z) {
          ComplexMatrix m = ComplexMatrix::identity(2);
          m *= psi(z);
          return m;
        },
        pts);
  } else {
    res.delta = delta_matrix(phi, pts);
  }

  const auto grid = build_grid(config.tag, b, config.grid);
  ConeProblem cp;
  cp.block = 2;
  cp.target = res.delta;
  cp.nodes = pts;
  cp.generators = grid_kernels(grid.functions, pts, config.opts.parallel);
  res.generator_count = cp.generators.size();
  SolverOptions opts = config.opts;
  opts.seed = config.seed;
  res.cert = cone_feasibility(cp, opts);
  if (res.cert.status == CertStatus::Inconclusive) return res;
  res.report = verify_certificate(res.cert, cp, {}, opts);

  res.fine_grid = config.grid;
  res.fine_grid.radial *= config.verify_factor;
  res.fine_grid.angular *= config.verify_factor;
  if (res.cert.status == CertStatus::Infeasible) {
    const auto fine = build_grid(config.tag, b, res.fine_grid);
    const auto fk = grid_kernels(fine.functions, pts, config.opts.parallel);
    res.fine_report = verify_certificate(res.cert, cp, fk, opts);
    res.margin_degradation = res.cert.margin > 0.0 ? 1.0 - res.fine_report.margin / res.cert.margin : 1.0;
  } else {
    res.fine_report = res.report;
  }
  return res;
}

// ---------------------------------------------------------------- KV gap

AlgebraElement tail_algebra_element(const BlaschkeProduct& b, const DiskPoint& alpha, double scale) {
  const int n = b.degree();
  if (n < 2) throw ValidationError("A_B^0 needs N >= 2");
  AlgebraElement e;
  e.tag = AlgebraTag::Constrained;
  e.base = b;
  cplx m1 = 1.0;
  if (alpha.is_infinite()) {
    e.g = {1.0};
  } else {
    const cplx a = alpha.value();
    const double r = std::abs(a);
    if (!(r < 1.0)) throw ValidationError("tail parameter must lie in the open disk");
    // m_a(z) = -a + (1 - |a|^2) sum_{k>=1} conj(a)^{k-1} z^k, cut where |a|^k < 1e-18.
    const int deg = r < 1e-300 ? 1 : std::clamp(static_cast<int>(std::ceil(std::log(1e-18) / std::log(r))), 1, 4096);
    e.g.resize(static_cast<std::size_t>(deg) + 1);
    e.g[0] = -a;
    cplx p = 1.0 - r * r;
    for (int k = 1; k <= deg; ++k, p *= std::conj(a)) e.g[static_cast<std::size_t>(k)] = p;
    m1 = (1.0 - a) / (1.0 - std::conj(a));
  }
  const cplx c = scale / (std::pow(b(1.0), n - 1) * m1);
  for (auto& v : e.g) v *= c;
  return e;
}

ConeProblem gap_problem(const std::vector<TestFunction>& fns, const AlgebraElement& phi,
                        std::span<const cplx> nodes) {
  ConeProblem cp;
  std::vector<cplx> vals;
  for (const cplx z : nodes) vals.push_back(phi(z));
  cp.target = kernel_from_values(vals);
  cp.nodes.assign(nodes.begin(), nodes.end());
  cp.generators = grid_kernels(fns, nodes, false);
  return cp;
}

namespace {

struct TrialOutcome {
  bool found = false;
  GapWitness w;
};

TrialOutcome gap_trial(const GapConfig& cfg, const std::vector<TestFunction>& full,
                       const std::vector<TestFunction>& restricted, int trial, const SolverOptions& opts) {
  TrialOutcome out;
  Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
  AlgebraElement phi;
  if (trial % 2 == 0) {
    // Slightly shrunk tail generator at a finite grid parameter.
    const auto params = polar_parameters(cfg.grid);
    const DiskPoint alpha = params[rng.below(params.size() - 1)];
    phi = tail_algebra_element(cfg.base, alpha, rng.uniform(0.98, 0.995));
  } else {
    phi = random_algebra_element(cfg.base, AlgebraTag::Constrained, rng);
    const double s = 1.0 / cfg.safety;
    phi.c *= s;
    for (auto& g : phi.g) g *= s;
    for (auto& a : phi.a) a.value *= s;
  }
  std::vector<cplx> nodes;
  while (nodes.size() < cfg.f_size) {
    const cplx z = rng.in_disk(cfg.node_radius);
    bool ok = true;
    for (const cplx y : nodes) ok = ok && std::abs(z - y) > 0.05;
    if (ok) nodes.push_back(z);
  }
  SolverOptions o = opts;
  o.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial));
  const auto rp = gap_problem(restricted, phi, nodes);
  auto rc = cone_feasibility(rp, o);
  if (rc.status != CertStatus::Infeasible) return out;
  auto rr = verify_certificate(rc, rp, {}, o);
  if (!rr.ok) return out;
  const auto fp = gap_problem(full, phi, nodes);
  auto fc = cone_feasibility(fp, o);
  if (fc.status != CertStatus::Feasible) return out;
  auto fr = verify_certificate(fc, fp, {}, o);
  if (!fr.ok) return out;
  out.found = true;
  out.w.found = true;
  out.w.trial = trial;
  out.w.phi = std::move(phi);
  out.w.nodes = std::move(nodes);
  out.w.full = std::move(fc);
  out.w.restricted = std::move(rc);
  out.w.full_report = std::move(fr);
  out.w.restricted_report = std::move(rr);
  return out;
}

}  // namespace

GapWitness generator_gap_search(const GapConfig& config) {
  if (config.trials < 1) throw ValidationError("trials must be at least 1");
  if (config.f_size < 1) throw ValidationError("F must have at least one node");
  if (config.base.degree() < 2) throw ValidationError("A_B^0 needs N >= 2");
  const auto grid = build_grid(AlgebraTag::Constrained, config.base, config.grid);
  const std::vector<TestFunction> restricted(grid.functions.begin(), grid.functions.begin() + 2);

  // Trials run in chunks of the thread count; the lowest successful index wins.
  const int chunk = config.opts.parallel ? std::max(1, max_threads()) : 1;
  SolverOptions inner = config.opts;
  inner.parallel = chunk == 1 && config.opts.parallel;
  GapWitness best;
  for (int start = 0; start < config.trials; start += chunk) {
    const int stop = std::min(config.trials, start + chunk);
    std::vector<TrialOutcome> outs(static_cast<std::size_t>(stop - start));
#pragma omp parallel for schedule(dynamic) if (chunk > 1)
    for (int t = start; t < stop; ++t)
      outs[static_cast<std::size_t>(t - start)] = gap_trial(config, grid.functions, restricted, t, inner);
    for (auto& o : outs)
      if (o.found) {
        best = std::move(o.w);
        best.trials_run = best.trial + 1;
        return best;
      }
  }
  best.trials_run = config.trials;
  return best;
}

// ---------------------------------------------------------------- minimality

double parameter_distance(const std::vector<DiskPoint>& a, const std::vector<DiskPoint>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_infinite() != b[i].is_infinite()) return std::numeric_limits<double>::infinity();
    if (!a[i].is_infinite()) d = std::max(d, std::abs(a[i].value() - b[i].value()));
  }
  return d;
}

MinimalityResult minimality_witness(const MinimalityConfig& config) {
  const auto& b = config.base;
  const int n = b.degree();
  if (config.family == AlgebraTag::Constrained && config.psi0.size() != 1)
    throw ValidationError("one tail parameter expected for Psi_B^0");
  const TestFunction psi0 = config.family == AlgebraTag::Full
                                ? make_test_fn_AB(b, config.psi0)
                                : make_test_fn_AB0(b, TestVariant::Tail, config.psi0.front());
  auto center = config.center;
  canonical_sort(center);
  MinimalityResult res;
  res.grid_spacing = config.grid.r_max / (config.grid.radial + 1.0);
  if (config.radius < 0.0) throw ValidationError("removal radius must be nonnegative");
  if (config.radius > 0.0 && !(config.radius > res.grid_spacing))
    throw ValidationError("removal radius must exceed the radial grid spacing");

  auto grid = build_grid(config.family, b, config.grid);
  if (std::find(grid.functions.begin(), grid.functions.end(), psi0) == grid.functions.end())
    grid.functions.push_back(psi0);
  std::vector<TestFunction> kept;
  for (auto& f : grid.functions) {
    const bool has_params = f.variant == TestVariant::Extras || f.variant == TestVariant::Tail;
    if (config.radius > 0.0 && has_params && parameter_distance(f.params, center) <= config.radius) {
      ++res.removed;
      continue;
    }
    kept.push_back(std::move(f));
  }
  if (kept.empty()) throw ValidationError("removal left no generators");
  res.grid_size = kept.size();

  Rng rng(config.seed);
  while (res.nodes.size() < static_cast<std::size_t>(2 * n)) {
    const cplx z = rng.in_disk(0.9);
    bool ok = true;
    for (const cplx y : res.nodes) ok = ok && std::abs(z - y) > 0.05;
    if (ok) res.nodes.push_back(z);
  }
  ConeProblem cp;
  std::vector<cplx> vals;
  for (const cplx z : res.nodes) vals.push_back(psi0(z));
  cp.target = kernel_from_values(vals);
  cp.nodes = res.nodes;
  cp.generators = grid_kernels(kept, res.nodes, config.opts.parallel);
  SolverOptions opts = config.opts;
  opts.seed = config.seed;
  res.cert = cone_feasibility(cp, opts);
  if (res.cert.status != CertStatus::Inconclusive) res.report = verify_certificate(res.cert, cp, {}, opts);
  return res;
}

}  // namespace cdil
