#pragma once

// Cayley/Herglotz transforms, atomic Clark measures, and annihilators of the
// algebras A_B (= C + B H^inf) and A_B^0.

#include <optional>
#include <string>
#include <vector>

#include "cdil/blaschke.hpp"
#include "cdil/random.hpp"

namespace cdil {

/// (1 + z) / (1 - z).
cplx cayley(cplx z);
/// (w - 1) / (w + 1), the inverse of cayley.
cplx inverse_cayley(cplx w);

struct Atom {
  cplx point;
  double mass = 0.0;
};

class AtomicMeasure {
 public:
  static constexpr double kCircleTol = 1e-10;
  static constexpr double kMinSeparation = 1e-8;
  static constexpr double kProbabilityTol = 1e-9;

  AtomicMeasure() = default;
  /// Validates unimodular points, positive masses and pairwise separation.
  explicit AtomicMeasure(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;
  bool is_probability() const;

 private:
  std::vector<Atom> atoms_;
};

/// sum_j m_j (l_j + z) / (l_j - z).
cplx herglotz_eval(const AtomicMeasure& mu, cplx z);

struct BlaschkeFromMeasure {
  BlaschkeProduct phi;
  std::vector<std::string> warnings;
};

/// inverse_cayley of the Herglotz integral, as a Blaschke product of degree
/// size(mu).
BlaschkeFromMeasure measure_to_blaschke(const AtomicMeasure& mu, const Tolerances& tol = {});

struct MeasureFromBlaschke {
  AtomicMeasure mu;
  std::vector<std::string> warnings;
};

/// Clark measure at 1: atoms are the solutions of phi(l) = 1 on the circle
/// (sorted by angle in [0, 2pi)), masses 1 / (l phi'(l)). Requires phi(0) real.
MeasureFromBlaschke blaschke_to_measure(const BlaschkeProduct& phi, const Tolerances& tol = {});

/// Moment residuals |int (w - a_j)^-k dmu| (nonzero zeros, 1 <= k <= t_j) and
/// |int w^-k dmu| (zero at the origin, 1 <= k <= t_0 - 1), in zero order.
std::vector<double> constraint_residuals(const AtomicMeasure& mu, const BlaschkeProduct& b);

/// k^{(i)}_a(w) = i! w^i / (1 - conj(a) w)^{i+1}; pairing with it gives f^{(i)}(a).
struct KernelFunction {
  cplx alpha;
  int order = 0;

  cplx operator()(cplx w) const;
};

/// sum_t coeff_t k_t. The H^2 pairing <f, L> equals sum_t conj(coeff_t) f^{(i_t)}(a_t).
struct KernelCombination {
  struct Term {
    KernelFunction kernel;
    cplx coeff;
  };
  std::vector<Term> terms;

  cplx operator()(cplx w) const;
};

struct AnnihilatorBasis {
  std::vector<KernelCombination> functionals;
  std::size_t dimension() const { return functionals.size(); }
};

enum class AlgebraTag { Full, Constrained };

const char* to_string(AlgebraTag tag);
AlgebraTag algebra_from_string(const std::string& s);

/// Basis of the annihilator of A_B (dimension N - 1).
AnnihilatorBasis annihilator_basis(const BlaschkeProduct& b);
/// Basis of the annihilator of A_B^0 (dimension N(N - 1) / 2).
AnnihilatorBasis annihilator_basis_constrained(const BlaschkeProduct& b);
AnnihilatorBasis annihilator_for(const BlaschkeProduct& b, AlgebraTag tag);

/// Full: c + B g. Constrained: c + sum_{r,s} a_rs B^r z^s + B^{N-1} g with
/// 0 <= s <= r <= N - 2.
struct AlgebraElement {
  struct Coefficient {
    int r = 0;
    int s = 0;
    cplx value;
  };

  AlgebraTag tag = AlgebraTag::Full;
  BlaschkeProduct base;
  cplx c;
  std::vector<cplx> g;
  std::vector<Coefficient> a;

  void validate() const;
  cplx operator()(cplx z) const;
};

/// Gaussian coefficients (tail of degree g_degree), rescaled so that the
/// sup norm on the circle, estimated on 512 points, is at most 1.
AlgebraElement random_algebra_element(const BlaschkeProduct& b, AlgebraTag tag, Rng& rng,
                                      int g_degree = 3);

/// e^{2 pi i k / m}, k = 0..m-1.
std::vector<cplx> boundary_grid(std::size_t m);

template <class F>
std::vector<cplx> sample_boundary(F&& f, std::size_t m) {
  std::vector<cplx> out;
  out.reserve(m);
  for (const cplx w : boundary_grid(m)) out.push_back(f(w));
  return out;
}

/// Trapezoid-rule H^2 pairings (1/m) sum_k f(w_k) conj(L(w_k)) for each
/// functional, each normalised to unit H^2 norm on the same grid.
std::vector<cplx> annihilator_pairings(std::span<const cplx> samples, const AnnihilatorBasis& basis);
/// Same computation without OpenMP; reference for tests and benchmarks.
std::vector<cplx> annihilator_pairings_serial(std::span<const cplx> samples,
                                              const AnnihilatorBasis& basis);

/// Gram matrix <L_a, L_b> of the unit-normalised functionals on an m-point grid.
ComplexMatrix annihilator_gram(const AnnihilatorBasis& basis, std::size_t m = 4096);

struct MembershipResult {
  bool member = false;
  double residual = 0.0;  // max |pairing|
  double sup_norm = 0.0;  // max |f| on the grid
};

inline constexpr std::size_t kMinQuadraturePoints = 4096;

/// Numerical dual test: member iff every pairing is at most 1e-6 * sup|f|.
MembershipResult is_in_algebra(std::span<const cplx> samples, const BlaschkeProduct& b,
                               AlgebraTag tag);

}  // namespace cdil
