#pragma once

// Problem builders on top of the cone solver: Pick interpolation, the
// two-generator gap for A_B^0, the 2x2 rational-dilation counterexample and
// the minimality removal witness.

#include <functional>
#include <optional>
#include <vector>

#include "cdil/sdp.hpp"

namespace cdil {

// ---------------------------------------------------------------- Pick

struct PickProblem {
  AlgebraTag tag = AlgebraTag::Full;
  BlaschkeProduct base;
  std::vector<cplx> nodes;
  std::vector<cplx> targets;

  void validate() const;
};

/// (1 - xi(z) conj(xi(w)))_{z, w in F}.
ComplexMatrix pick_target(const PickProblem& p);
/// ((1 - xi(z) conj(xi(w))) / (1 - z conj(w)))_{z, w in F}.
ComplexMatrix classical_pick_matrix(std::span<const cplx> nodes, std::span<const cplx> targets);
std::vector<ComplexMatrix> grid_kernels(const std::vector<TestFunction>& fns, std::span<const cplx> nodes,
                                        bool parallel = true);

struct PickResult {
  Certificate cert;
  VerificationReport report;
  ComplexMatrix classical;
  bool classical_psd = false;
  std::size_t generator_count = 0;
};

PickResult pick_check(const PickProblem& problem, const TestGrid& grid, const SolverOptions& opts = {});

// ---------------------------------------------------------------- Phi

/// (1/sqrt 2) [[1, 1], [1, -1]].
ComplexMatrix default_unitary();

/// R(z) = diag(m_p1(z), 1) U diag(1, m_p2(z)).
struct RFunction {
  cplx p1;
  cplx p2;
  ComplexMatrix u;

  ComplexMatrix operator()(cplx z) const;
};

RFunction build_R(cplx p1, cplx p2, const ComplexMatrix& u = default_unitary());

/// Phi = B^power R.
struct MatrixFunction2x2 {
  BlaschkeProduct base;
  int power = 1;
  RFunction r;

  ComplexMatrix operator()(cplx z) const;
  /// max ||Phi|| over m boundary points.
  double sampled_sup(std::size_t m = 1024) const;
};

/// power = 1 for A_B, N - 1 for A_B^0. Validates p1 != p2, p_i in the disk,
/// p_i not 0 and not a zero of B, and that U is unitary with nonzero
/// off-diagonal entries.
MatrixFunction2x2 build_Phi(const BlaschkeProduct& b, AlgebraTag tag, cplx p1, cplx p2,
                            const ComplexMatrix& u = default_unitary());

// ---------------------------------------------------------------- S

struct NodeSetS {
  std::vector<cplx> points;              // p1, p2, zero slots, fill
  std::vector<std::size_t> zero_slots;   // indices into points
  std::vector<std::size_t> fill;         // indices of S'
  double vandermonde_min_sv = 0.0;
  int attempts = 0;
};

inline constexpr double kRepeatedZeroOffset = 1e-3;
inline constexpr double kFillRadius = 0.9;

/// 2 N^2 - 3 N + 5.
std::size_t node_set_size(int n);
/// Smallest singular value of the square Vandermonde matrix (z_i^k), k < |pts|.
double vandermonde_min_singular_value(std::span<const cplx> pts);
NodeSetS build_S(const BlaschkeProduct& b, cplx p1, cplx p2, std::uint64_t seed);

// ---------------------------------------------------------------- Delta

using MatrixValued = std::function<ComplexMatrix(cplx)>;

/// Block (i, j) = I - F(z_i) F(z_j)^*, laid out as index = node * b + component.
ComplexMatrix delta_matrix(const MatrixValued& f, std::span<const cplx> nodes);
ComplexMatrix delta_matrix(const MatrixFunction2x2& phi, std::span<const cplx> nodes);

struct DilationConfig {
  BlaschkeProduct base;
  AlgebraTag tag = AlgebraTag::Full;
  cplx p1{0.3, 0.0};
  cplx p2{0.0, -0.4};
  ComplexMatrix u = default_unitary();
  GridResolution grid{8, 16};
  int verify_factor = 4;
  std::uint64_t seed = 0;
  SolverOptions opts;
  /// Replace Phi by psi I_2 (negative control).
  std::optional<TestFunction> scalar_override;
  /// Configurations outside the theorem's hypotheses run with a label instead of an error.
  bool exploratory = false;
};

struct DilationResult {
  Certificate cert;
  VerificationReport report;       // on the solve grid
  VerificationReport fine_report;  // solve grid plus the refined grid
  GridResolution fine_grid;
  NodeSetS nodes;
  ComplexMatrix delta;
  std::size_t generator_count = 0;
  bool exploratory = false;
  double sup_norm = 0.0;
  /// 1 - fine margin / solve margin.
  double margin_degradation = 0.0;
};

DilationConfig default_dilation_config();
DilationResult dilation_certify(const DilationConfig& config);

// ---------------------------------------------------------------- KV gap

struct GapConfig {
  BlaschkeProduct base;
  std::size_t f_size = 8;
  int trials = 500;
  GridResolution grid{4, 8};
  double node_radius = 0.9;
  double safety = 1.05;  // divide sampled sup norm by this factor again
  std::uint64_t seed = 0;
  SolverOptions opts;
};

struct GapWitness {
  bool found = false;
  int trial = -1;
  int trials_run = 0;
  AlgebraElement phi;
  std::vector<cplx> nodes;
  Certificate full;
  Certificate restricted;
  VerificationReport full_report;
  VerificationReport restricted_report;
};

/// scale * c B^{N-1} m_alpha as an element of A_B^0 (m_alpha as a truncated
/// Taylor series), normalised so the value at 1 is `scale`.
AlgebraElement tail_algebra_element(const BlaschkeProduct& b, const DiskPoint& alpha, double scale = 1.0);

/// Even trials sample shrunk tail generators, odd trials generic elements.
/// Restricted generators: gen_B and gen_zB.
GapWitness generator_gap_search(const GapConfig& config);
/// Both cone problems for a given phi and node set (exposed for tests).
ConeProblem gap_problem(const std::vector<TestFunction>& fns, const AlgebraElement& phi,
                        std::span<const cplx> nodes);

// ---------------------------------------------------------------- minimality

struct MinimalityConfig {
  BlaschkeProduct base;
  AlgebraTag family = AlgebraTag::Full;
  /// Parameters of psi_0 (N - 1 extras for Psi_B, one tail point for Psi_B^0).
  std::vector<DiskPoint> psi0;
  /// Remove every grid function whose parameters lie within `radius` of this tuple.
  std::vector<DiskPoint> center;
  double radius = 0.2;
  GridResolution grid{4, 8};
  std::uint64_t seed = 0;
  SolverOptions opts;
};

struct MinimalityResult {
  Certificate cert;
  VerificationReport report;
  std::vector<cplx> nodes;
  std::size_t grid_size = 0;
  std::size_t removed = 0;
  double grid_spacing = 0.0;
};

/// Max-distance between parameter tuples; infinity only matches infinity.
double parameter_distance(const std::vector<DiskPoint>& a, const std::vector<DiskPoint>& b);
MinimalityResult minimality_witness(const MinimalityConfig& config);

}  // namespace cdil
