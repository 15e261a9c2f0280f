#include "cdil/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cdil {

cplx cayley(cplx z) {
  if (std::abs(1.0 - z) <= 1e-300) throw DomainError("cayley: pole at z = 1");
  return (1.0 + z) / (1.0 - z);
}

cplx inverse_cayley(cplx w) {
  if (std::abs(w + 1.0) <= 1e-300) throw DomainError("inverse_cayley: pole at w = -1");
  return (w - 1.0) / (w + 1.0);
}

AtomicMeasure::AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (!std::isfinite(a.point.real()) || !std::isfinite(a.point.imag()) ||
        std::abs(std::abs(a.point) - 1.0) > kCircleTol)
      throw ValidationError("atom is not on the unit circle");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) throw ValidationError("atom mass must be positive");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j)
      if (std::abs(atoms_[i].point - atoms_[j].point) <= kMinSeparation)
        throw ValidationError("atoms are not separated");
}

double AtomicMeasure::total_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass;
  return m;
}

bool AtomicMeasure::is_probability() const {
  return std::abs(total_mass() - 1.0) <= kProbabilityTol;
}

cplx herglotz_eval(const AtomicMeasure& mu, cplx z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("herglotz_eval requires |z| < 1");
  cplx f = 0.0;
  for (const auto& a : mu.atoms()) f += a.mass * (a.point + z) / (a.point - z);
  return f;
}

BlaschkeFromMeasure measure_to_blaschke(const AtomicMeasure& mu, const Tolerances& tol) {
  const std::size_t n = mu.size();
  if (n == 0) throw ValidationError("measure has no atoms");
  // f = N_f / D with D = prod (l_j - z).
  std::vector<cplx> d{1.0};
  for (const auto& a : mu.atoms()) {
    const cplx lin[] = {a.point, -1.0};
    d = poly_mul(d, lin);
  }
  std::vector<cplx> nf(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<cplx> p{mu.atoms()[j].mass * mu.atoms()[j].point, mu.atoms()[j].mass};
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const cplx lin[] = {mu.atoms()[k].point, -1.0};
      p = poly_mul(p, lin);
    }
    for (std::size_t k = 0; k < p.size(); ++k) nf[k] += p[k];
  }
  std::vector<cplx> num(n + 1), den(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    num[k] = nf[k] - d[k];
    den[k] = nf[k] + d[k];
  }

  BlaschkeFromMeasure out;
  const auto roots = poly_roots(num, tol);
  double den_scale = 0.0;
  for (const cplx c : den) den_scale += std::abs(c);
  for (const cplx r : roots) {
    if (!(std::abs(r) < 1.0 - BlaschkeProduct::kBoundaryGuard))
      throw NumericError("measure_to_blaschke: zero on or outside the circle");
    if (std::abs(r) > 1.0 - 1e-6)
      out.warnings.push_back("zero within 1e-6 of the unit circle");
    if (std::abs(poly_eval(den, r)) <= 1e-8 * den_scale)
      out.warnings.push_back("numerator and denominator nearly share a root");
  }
  // Leading coefficient ratio: (-1)^{n-1} conj(prod l_j) = -conj(S_n(l)).
  cplx prod = 1.0;
  for (const auto& a : mu.atoms()) prod *= a.point;
  cplx c = (n % 2 == 1 ? 1.0 : -1.0) * std::conj(prod);
  c /= std::abs(c);
  out.phi = BlaschkeProduct::from_points(roots, c);
  return out;
}

MeasureFromBlaschke blaschke_to_measure(const BlaschkeProduct& phi, const Tolerances& tol) {
  const int n = phi.degree();
  if (n < 1) throw ValidationError("blaschke_to_measure needs at least one zero");
  const cplx phi0 = phi(0.0);
  if (std::abs(phi0.imag()) > 1e-9) throw ValidationError("phi(0) must be real");

  const auto num = phi.numerator();
  const auto den = phi.denominator();
  std::vector<cplx> q(num.size());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = num[k] - den[k];

  MeasureFromBlaschke out;
  const auto roots = poly_roots(q, tol);
  std::vector<Atom> atoms;
  for (const cplx r : roots) {
    if (std::abs(std::abs(r) - 1.0) > 1e-6) out.warnings.push_back("boundary root drifted off the circle");
    double theta = std::arg(r);
    // Newton on arg phi(e^{i theta}) = 0; d/dtheta arg phi = Re(l phi'(l) / phi(l)) > 0.
    for (int it = 0; it < 30; ++it) {
      const cplx l = std::polar(1.0, theta);
      const cplx v = phi(l);
      const double slope = std::real(l * phi.derivative(l, 1) / v);
      const double step = std::arg(v) / slope;
      theta -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const cplx l = std::polar(1.0, theta);
    const cplx lp = l * phi.derivative(l, 1);
    if (std::abs(lp.imag()) > 1e-8 * std::abs(lp))
      out.warnings.push_back("l phi'(l) is not real at a boundary root");
    const double mass = 1.0 / lp.real();
    if (!(mass > 0.0)) throw NumericError("blaschke_to_measure: nonpositive mass");
    if (theta < 0.0) theta += 2.0 * std::numbers::pi;
    atoms.push_back({std::polar(1.0, theta), mass});
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) {
              auto ang = [](cplx z) {
                double t = std::arg(z);
                return t < 0.0 ? t + 2.0 * std::numbers::pi : t;
              };
              return ang(a.point) < ang(b.point);
            });
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i)
    if (std::abs(atoms[i].point - atoms[i + 1].point) <= 1e-6)
      out.warnings.push_back("clustered boundary roots");
  try {
    out.mu = AtomicMeasure(std::move(atoms));
  } catch (const ValidationError& e) {
    throw NumericError(std::string("blaschke_to_measure: ") + e.what());
  }
  return out;
}

std::vector<double> constraint_residuals(const AtomicMeasure& mu, const BlaschkeProduct& b) {
  if (!b.has_zero_at_origin()) throw ValidationError("B must have a zero at the origin");
  std::vector<double> out;
  for (const auto& z : b.zeros()) {
    const bool origin = z.point == cplx{};
    const int kmax = origin ? z.multiplicity - 1 : z.multiplicity;
    for (int k = 1; k <= kmax; ++k) {
      cplx acc = 0.0;
      for (const auto& a : mu.atoms()) acc += a.mass * std::pow(a.point - z.point, -k);
      out.push_back(std::abs(acc));
    }
  }
  return out;
}

cplx KernelFunction::operator()(cplx w) const {
  double fact = 1.0;
  for (int j = 2; j <= order; ++j) fact *= j;
  return fact * std::pow(w, order) / std::pow(1.0 - std::conj(alpha) * w, order + 1);
}

cplx KernelCombination::operator()(cplx w) const {
  cplx acc = 0.0;
  for (const auto& t : terms) acc += t.coeff * t.kernel(w);
  return acc;
}

const char* to_string(AlgebraTag tag) { return tag == AlgebraTag::Full ? "AB" : "AB0"; }

AlgebraTag algebra_from_string(const std::string& s) {
  if (s == "AB") return AlgebraTag::Full;
  if (s == "AB0") return AlgebraTag::Constrained;
  throw ValidationError("unknown algebra tag: " + s);
}

namespace {

// Distinct zeros with the origin (if present) moved to the front.
std::vector<BlaschkeZero> ordered_zeros(const BlaschkeProduct& b) {
  auto zs = b.zeros();
  std::stable_partition(zs.begin(), zs.end(), [](const BlaschkeZero& z) { return z.point == cplx{}; });
  return zs;
}

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

}  // namespace

AnnihilatorBasis annihilator_basis(const BlaschkeProduct& b) {
  if (b.degree() < 2) throw ValidationError("annihilator_basis needs N >= 2");
  const auto zs = ordered_zeros(b);
  AnnihilatorBasis basis;
  for (const auto& z : zs)
    for (int i = 1; i < z.multiplicity; ++i)
      basis.functionals.push_back({{{{z.point, i}, 1.0}}});
  for (std::size_t j = 1; j < zs.size(); ++j)
    basis.functionals.push_back({{{{zs[0].point, 0}, 1.0}, {{zs[j].point, 0}, -1.0}}});
  return basis;
}

AnnihilatorBasis annihilator_basis_constrained(const BlaschkeProduct& b) {
  const int n = b.degree();
  if (n < 2) throw ValidationError("annihilator_basis_constrained needs N >= 2");
  AnnihilatorBasis basis = annihilator_basis(b);
  if (n == 2) return basis;

  // Columns: kernels k^{(j)}_{a_l} with t_l <= j <= (N-1) t_l - 1.
  struct Column {
    cplx alpha;
    int j;
  };
  std::vector<Column> cols;
  const auto zs = ordered_zeros(b);
  for (const auto& z : zs)
    for (int j = z.multiplicity; j <= (n - 1) * z.multiplicity - 1; ++j) cols.push_back({z.point, j});

  // Rows: Taylor coefficients of B^r z^s, 1 <= r <= N-2, 0 <= s <= r.
  const int rows = (n - 2) * (n + 1) / 2;
  ComplexMatrix a(static_cast<std::size_t>(rows), cols.size());
  int row = 0;
  for (int r = 1; r <= n - 2; ++r) {
    const auto br = b.power(r);
    for (int s = 0; s <= r; ++s, ++row) {
      std::size_t c = 0;
      for (const auto& z : zs) {
        const int jmax = (n - 1) * z.multiplicity - 1;
        const auto tb = br.taylor(z.point, jmax);
        // (a + h)^s
        std::vector<cplx> zs_series(static_cast<std::size_t>(s) + 1);
        double binom = 1.0;
        for (int k = 0; k <= s; ++k) {
          zs_series[static_cast<std::size_t>(k)] = binom * std::pow(z.point, s - k);
          binom = binom * (s - k) / (k + 1);
        }
        const auto prod = series_mul(tb, zs_series, jmax);
        for (int j = z.multiplicity; j <= jmax; ++j, ++c)
          a(static_cast<std::size_t>(row), c) = prod[static_cast<std::size_t>(j)];
      }
    }
  }
  // Column equilibration; the null vector is mapped back below.
  std::vector<double> scale(cols.size(), 1.0);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) m = std::max(m, std::abs(a(r, c)));
    if (m > 0.0) scale[c] = 1.0 / m;
    for (std::size_t r = 0; r < a.rows(); ++r) a(r, c) *= scale[c];
  }
  const auto ns = null_space(a);
  for (std::size_t k = 0; k < ns.cols(); ++k) {
    KernelCombination f;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const cplx v = ns(c, k) * scale[c];
      if (v == cplx{}) continue;
      // <f, coeff k^{(j)}> = conj(coeff) j! [h^j] f, so coeff = conj(v) / j!.
      f.terms.push_back({{cols[c].alpha, cols[c].j}, std::conj(v) / factorial(cols[c].j)});
    }
    basis.functionals.push_back(std::move(f));
  }
  if (basis.dimension() != static_cast<std::size_t>(n * (n - 1) / 2))
    throw NumericError("annihilator of A_B^0 has unexpected dimension");
  return basis;
}

AnnihilatorBasis annihilator_for(const BlaschkeProduct& b, AlgebraTag tag) {
  return tag == AlgebraTag::Full ? annihilator_basis(b) : annihilator_basis_constrained(b);
}

void AlgebraElement::validate() const {
  const int n = base.degree();
  if (tag == AlgebraTag::Full) {
    if (!a.empty()) throw ValidationError("A_B elements carry no a_rs coefficients");
    return;
  }
  for (const auto& co : a) {
    if (co.s < 0 || co.s > co.r || co.r > n - 2)
      throw ValidationError("a_rs index outside 0 <= s <= r <= N-2");
  }
}

cplx AlgebraElement::operator()(cplx z) const {
  const cplx bz = base(z);
  const cplx gz = poly_eval(g, z);
  if (tag == AlgebraTag::Full) return c + bz * gz;
  const int n = base.degree();
  cplx acc = c;
  for (const auto& co : a) acc += co.value * std::pow(bz, co.r) * std::pow(z, co.s);
  return acc + std::pow(bz, std::max(n - 1, 0)) * gz;
}

AlgebraElement random_algebra_element(const BlaschkeProduct& b, AlgebraTag tag, Rng& rng,
                                      int g_degree) {
  AlgebraElement e;
  e.tag = tag;
  e.base = b;
  e.c = rng.complex_normal();
  e.g.resize(static_cast<std::size_t>(std::max(g_degree, 0)) + 1);
  for (auto& v : e.g) v = rng.complex_normal();
  if (tag == AlgebraTag::Constrained)
    for (int r = 1; r <= b.degree() - 2; ++r)
      for (int s = 0; s <= r; ++s) e.a.push_back({r, s, rng.complex_normal()});
  double sup = 0.0;
  for (const cplx w : boundary_grid(512)) sup = std::max(sup, std::abs(e(w)));
  if (sup > 1.0) {
    e.c /= sup;
    for (auto& v : e.g) v /= sup;
    for (auto& co : e.a) co.value /= sup;
  }
  return e;
}

std::vector<cplx> boundary_grid(std::size_t m) {
  std::vector<cplx> w(m);
  for (std::size_t k = 0; k < m; ++k)
    w[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));
  return w;
}

namespace {

constexpr std::size_t kBlocks = 64;

struct Partial {
  cplx pair;
  double norm2 = 0.0;
};

Partial pair_range(std::span<const cplx> f, std::span<const cplx> w, const KernelCombination& l,
                   std::size_t lo, std::size_t hi) {
  Partial p;
  for (std::size_t k = lo; k < hi; ++k) {
    const cplx lv = l(w[k]);
    p.pair += f[k] * std::conj(lv);
    p.norm2 += std::norm(lv);
  }
  return p;
}

cplx finish(const Partial& p, std::size_t m) {
  const double norm = std::sqrt(p.norm2 / static_cast<double>(m));
  if (norm == 0.0) throw NumericError("annihilator functional vanishes on the grid");
  return p.pair / static_cast<double>(m) / norm;
}

}  // namespace

std::vector<cplx> annihilator_pairings_serial(std::span<const cplx> samples,
                                              const AnnihilatorBasis& basis) {
  const auto w = boundary_grid(samples.size());
  std::vector<cplx> out;
  for (const auto& l : basis.functionals)
    out.push_back(finish(pair_range(samples, w, l, 0, samples.size()), samples.size()));
  return out;
}

std::vector<cplx> annihilator_pairings(std::span<const cplx> samples, const AnnihilatorBasis& basis) {
  const std::size_t m = samples.size();
  const std::size_t nf = basis.dimension();
  const auto w = boundary_grid(m);
  // Fixed block decomposition, combined in order: result does not depend on
  // the thread count.
  std::vector<Partial> parts(nf * kBlocks);
  const auto total = static_cast<std::int64_t>(nf * kBlocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < total; ++t) {
    const std::size_t f = static_cast<std::size_t>(t) / kBlocks;
    const std::size_t blk = static_cast<std::size_t>(t) % kBlocks;
    parts[static_cast<std::size_t>(t)] =
        pair_range(samples, w, basis.functionals[f], blk * m / kBlocks, (blk + 1) * m / kBlocks);
  }
  std::vector<cplx> out(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    Partial acc;
    for (std::size_t blk = 0; blk < kBlocks; ++blk) {
      acc.pair += parts[f * kBlocks + blk].pair;
      acc.norm2 += parts[f * kBlocks + blk].norm2;
    }
    out[f] = finish(acc, m);
  }
  return out;
}

ComplexMatrix annihilator_gram(const AnnihilatorBasis& basis, std::size_t m) {
  const auto w = boundary_grid(m);
  const std::size_t d = basis.dimension();
  std::vector<std::vector<cplx>> vals(d, std::vector<cplx>(m));
  for (std::size_t a = 0; a < d; ++a) {
    double n2 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      vals[a][k] = basis.functionals[a](w[k]);
      n2 += std::norm(vals[a][k]);
    }
    const double nrm = std::sqrt(n2 / static_cast<double>(m));
    for (auto& v : vals[a]) v /= nrm;
  }
  ComplexMatrix g(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += vals[a][k] * std::conj(vals[b][k]);
      g(a, b) = acc / static_cast<double>(m);
    }
  return g.hermitian_part();
}

MembershipResult is_in_algebra(std::span<const cplx> samples, const BlaschkeProduct& b,
                               AlgebraTag tag) {
  if (samples.size() < kMinQuadraturePoints)
    throw ValidationError("boundary grid too coarse (need at least 4096 points)");
  MembershipResult res;
  for (const cplx v : samples) res.sup_norm = std::max(res.sup_norm, std::abs(v));
  for (const cplx p : annihilator_pairings(samples, annihilator_for(b, tag)))
    res.residual = std::max(res.residual, std::abs(p));
  res.member = res.residual <= 1e-6 * res.sup_norm;
  return res;
}

}  // namespace cdil
