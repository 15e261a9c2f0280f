#pragma once

// Certified feasibility for  target = sum_m Q_m o K~_m,  Q_m >= 0.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cdil/numerics.hpp"
#include "cdil/testfns.hpp"

namespace cdil {

/// K(z, w) = 1 - psi(z) conj(psi(w)) from the values psi(z_i).
ComplexMatrix kernel_from_values(std::span<const cplx> values);
/// Same, evaluating psi at the nodes (which must lie in the open disk).
ComplexMatrix assemble_kernel(const TestFunction& psi, std::span<const cplx> nodes);
/// K~[i, j] = K[i / b, j / b].
ComplexMatrix expand_kernel(const ComplexMatrix& k, std::size_t block);

struct ConeProblem {
  ComplexMatrix target;                 // (b n) x (b n), Hermitian
  std::vector<ComplexMatrix> generators;  // scalar n x n kernels
  std::size_t block = 1;
  std::vector<cplx> nodes;  // informational; may be empty

  std::size_t n() const { return generators.empty() ? 0 : generators.front().rows(); }
  std::size_t dim() const { return block * n(); }
  void validate() const;
};

struct SolverOptions {
  Tolerances tol;
  std::uint64_t seed = 0;
  bool dykstra = true;
  /// Nesterov extrapolation with adaptive restart; Dykstra is ignored when set.
  bool accelerate = true;
  /// Before iterating, test each generator alone (exact entrywise division).
  bool single_check = true;
  /// Uniform step r / max(s) instead of the exact entrywise projection r / s.
  /// Slower to converge on feasible problems but the separator read off the
  /// residual is much closer to the optimal one.
  bool scalar_step = true;
  bool parallel = true;
  int check_every = 50;
  int stall_window = 500;
  double stall_rel = 1e-12;
  double margin_min = 1e-4;
  double verify_tol = 1e-8;
  /// Called at every check: iteration, residual, repaired margin, worst lambda_max.
  std::function<void(std::int64_t, double, double, double)> trace;
};

enum class CertStatus { Feasible, Infeasible, Inconclusive };
const char* to_string(CertStatus s);

struct Certificate {
  CertStatus status = CertStatus::Inconclusive;
  // Feasible side.
  std::vector<ComplexMatrix> weights;
  double residual = 0.0;
  // Infeasible side: ||W||_F = 1, margin = <W, target>.
  ComplexMatrix w;
  double margin = 0.0;
  double shift = 0.0;                 // diagonal shift applied during repair
  std::vector<double> generator_lmax;  // lambda_max(W o conj K~_m)
  // Trace.
  std::int64_t iterations = 0;
  std::uint64_t seed = 0;
  std::string note;
};

Certificate cone_feasibility(const ConeProblem& problem, const SolverOptions& opts = {});

/// Candidate separating functional from an affine multiplier Y: Hermitian
/// part, normalised, shifted by -tau I until every lambda_max(W o conj K~_m)
/// is at most -verify_tol / 2, then renormalised. Empty if no positive margin.
struct Separation {
  ComplexMatrix w;
  double margin = 0.0;
  double shift = 0.0;
  std::vector<double> lmax;
};
Separation repair_separator(const ComplexMatrix& y, const ConeProblem& problem,
                            const SolverOptions& opts);

struct VerificationReport {
  bool ok = false;
  double residual = 0.0;            // feasible
  double min_weight_eig = 0.0;      // feasible: smallest eigenvalue over Q_m (relative)
  double margin = 0.0;              // infeasible: <W, target> / ||W||_F
  double worst_lmax = 0.0;          // infeasible: over the problem's generators
  double worst_lmax_fine = 0.0;     // infeasible: over the extra generators
  std::size_t fine_count = 0;
  std::vector<std::string> failures;
};

/// Rechecks a certificate from scratch. `fine_generators` (scalar kernels on
/// the same nodes) are checked in addition for infeasible certificates.
VerificationReport verify_certificate(const Certificate& cert, const ConeProblem& problem,
                                      const std::vector<ComplexMatrix>& fine_generators = {},
                                      const SolverOptions& opts = {});

/// lambda_max(W o conj K~) for each kernel; OpenMP over kernels.
std::vector<double> separator_lmax(const ComplexMatrix& w, const std::vector<ComplexMatrix>& kernels,
                                   std::size_t block, bool parallel = true);

}  // namespace cdil
