#include "cdil/sdp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>

namespace cdil {

ComplexMatrix kernel_from_values(std::span<const cplx> values) {
  const std::size_t n = values.size();
  ComplexMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) k(i, j) = 1.0 - values[i] * std::conj(values[j]);
  for (std::size_t i = 0; i < n; ++i) k(i, i) = k(i, i).real();
  return k;
}

ComplexMatrix assemble_kernel(const TestFunction& psi, std::span<const cplx> nodes) {
  std::vector<cplx> vals;
  vals.reserve(nodes.size());
  for (const cplx z : nodes) {
    if (!(std::abs(z) < 1.0)) throw ValidationError("kernel node outside the open disk");
    vals.push_back(psi(z));
  }
  return kernel_from_values(vals);
}

ComplexMatrix expand_kernel(const ComplexMatrix& k, std::size_t block) {
  const std::size_t n = k.rows() * block;
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = k(i / block, j / block);
  return out;
}

void ConeProblem::validate() const {
  if (generators.empty()) throw ValidationError("cone problem needs at least one generator");
  if (block < 1) throw ValidationError("block size must be positive");
  const std::size_t nn = generators.front().rows();
  for (const auto& g : generators)
    if (g.rows() != nn || g.cols() != nn || !g.all_finite() || !g.is_hermitian(1e-10))
      throw ValidationError("generator kernels must be Hermitian and of equal size");
  if (target.rows() != block * nn || target.cols() != block * nn)
    throw ValidationError("target dimension does not match block * |S|");
  if (!target.all_finite() || !target.is_hermitian(1e-12))
    throw ValidationError("target must be Hermitian");
  if (!nodes.empty() && nodes.size() != nn) throw ValidationError("node count mismatch");
}

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Feasible: return "feasible";
    case CertStatus::Infeasible: return "infeasible";
    case CertStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

// W o conj(K~) with K~ expanded from the scalar kernel on the fly.
ComplexMatrix twisted(const ComplexMatrix& w, const ComplexMatrix& k, std::size_t block) {
  ComplexMatrix out(w.rows(), w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) out(i, j) = w(i, j) * std::conj(k(i / block, j / block));
  return out.hermitian_part();
}

// target - sum_m Q_m o K~_m, summed in generator order.
ComplexMatrix affine_residual(const ConeProblem& p, const std::vector<ComplexMatrix>& kt,
                              const std::vector<ComplexMatrix>& q) {
  ComplexMatrix r = p.target;
  auto rd = r.data();
  for (std::size_t m = 0; m < q.size(); ++m) {
    const auto qd = q[m].data();
    const auto kd = kt[m].data();
    for (std::size_t e = 0; e < rd.size(); ++e) rd[e] -= qd[e] * kd[e];
  }
  return r;
}

// target = Q o K~_m has the unique solution Q = target / K~_m (entrywise);
// accept it when it is PSD. Catches targets built from one generator.
std::vector<ComplexMatrix> single_generator(const ConeProblem& p, const std::vector<ComplexMatrix>& kt,
                                            const SolverOptions& opts) {
  const std::size_t dim = p.dim();
  for (std::size_t m = 0; m < kt.size(); ++m) {
    ComplexMatrix qm(dim, dim);
    bool ok = true;
    for (std::size_t i = 0; i < dim && ok; ++i)
      for (std::size_t j = 0; j < dim && ok; ++j) {
        const cplx k = kt[m](i, j);
        if (std::abs(k) < 1e-12) ok = false;
        else qm(i, j) = p.target(i, j) / k;
      }
    if (!ok) continue;
    qm = qm.hermitian_part();
    if (!is_psd(qm, opts.tol)) continue;
    std::vector<ComplexMatrix> w(kt.size(), ComplexMatrix(dim, dim));
    w[m] = std::move(qm);
    if (affine_residual(p, kt, w).frobenius_norm() <= opts.tol.residual_tol) return w;
  }
  return {};
}

}  // namespace

std::vector<double> separator_lmax(const ComplexMatrix& w, const std::vector<ComplexMatrix>& kernels,
                                   std::size_t block, bool parallel) {
  std::vector<double> out(kernels.size());
  const auto total = static_cast<std::int64_t>(kernels.size());
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t m = 0; m < total; ++m) {
    try {
      out[static_cast<std::size_t>(m)] = lambda_max(twisted(w, kernels[static_cast<std::size_t>(m)], block));
    } catch (...) {
      failed = true;
    }
  }
  if (failed) throw NumericError("eigensolver failed during separator check");
  return out;
}

Separation repair_separator(const ComplexMatrix& y, const ConeProblem& problem,
                            const SolverOptions& opts) {
  Separation sep;
  ComplexMatrix w = y.hermitian_part();
  double nrm = w.frobenius_norm();
  if (!(nrm > 0.0) || !std::isfinite(nrm)) return sep;
  w *= 1.0 / nrm;
  const auto lmax = separator_lmax(w, problem.generators, problem.block, opts.parallel);
  double tau = 0.0;
  for (std::size_t m = 0; m < lmax.size(); ++m) {
    const auto& k = problem.generators[m];
    double dmin = k(0, 0).real();
    for (std::size_t i = 1; i < k.rows(); ++i) dmin = std::min(dmin, k(i, i).real());
    if (!(dmin > 0.0)) return sep;  // shift cannot help
    // Aim slightly below zero so the renormalised check has headroom.
    tau = std::max(tau, (lmax[m] + 0.5 * opts.verify_tol) / dmin);
  }
  for (std::size_t i = 0; i < w.rows(); ++i) w(i, i) -= tau;
  nrm = w.frobenius_norm();
  w *= 1.0 / nrm;
  sep.margin = inner_real(w, problem.target);
  sep.shift = tau;
  sep.lmax = separator_lmax(w, problem.generators, problem.block, opts.parallel);
  sep.w = std::move(w);
  return sep;
}

Certificate cone_feasibility(const ConeProblem& problem, const SolverOptions& opts) {
  problem.validate();
  opts.tol.validate();
  const std::size_t dim = problem.dim();
  const std::size_t mcount = problem.generators.size();

  std::vector<ComplexMatrix> kt;
  kt.reserve(mcount);
  for (const auto& g : problem.generators) kt.push_back(expand_kernel(g, problem.block));
  // s_ij = sum_m |K~_m,ij|^2
  std::vector<double> s(dim * dim, 0.0);
  for (const auto& k : kt) {
    const auto kd = k.data();
    for (std::size_t e = 0; e < s.size(); ++e) s[e] += std::norm(kd[e]);
  }

  if (opts.single_check) {
    auto w = single_generator(problem, kt, opts);
    if (!w.empty()) {
      Certificate cert;
      cert.status = CertStatus::Feasible;
      cert.seed = opts.seed;
      cert.residual = affine_residual(problem, kt, w).frobenius_norm();
      cert.weights = std::move(w);
      cert.note = "single-generator decomposition";
      return cert;
    }
  }
  const bool momentum = opts.accelerate;
  const bool dykstra = opts.dykstra && !momentum;
  std::vector<ComplexMatrix> q(mcount, ComplexMatrix(dim, dim));
  std::vector<ComplexMatrix> v(momentum ? mcount : 0, ComplexMatrix(dim, dim));  // extrapolated point
  std::vector<ComplexMatrix> corr(dykstra ? mcount : 0, ComplexMatrix(dim, dim));

  Certificate cert;
  cert.seed = opts.seed;
  std::deque<double> history;  // best residual at each check
  const int window_checks = std::max(1, opts.stall_window / std::max(1, opts.check_every));
  const double tol = opts.tol.residual_tol;

  ComplexMatrix r = affine_residual(problem, kt, q);  // at q
  ComplexMatrix rv = r;                               // at the point being projected
  double res = r.frobenius_norm();
  double best = res;
  double t = 1.0;
  ComplexMatrix ymul(dim, dim);
  const double smax = *std::max_element(s.begin(), s.end());
  auto multiplier = [&](const ComplexMatrix& rr) {
    const auto rd = rr.data();
    auto yd = ymul.data();
    for (std::size_t e = 0; e < rd.size(); ++e)
      yd[e] = opts.scalar_step ? rd[e] / smax : (s[e] > 0.0 ? rd[e] / s[e] : cplx{});
  };

  for (std::int64_t it = 1; it <= opts.tol.max_iter; ++it) {
    // Affine projection X_m = V_m + conj(K~_m) o Y, then the PSD projection.
    multiplier(rv);
    const auto yd = ymul.data();
    const auto& base = momentum ? v : q;
    std::vector<ComplexMatrix> qn(mcount);
    const auto total = static_cast<std::int64_t>(mcount);
    std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
    for (std::int64_t mi = 0; mi < total; ++mi) {
      const auto m = static_cast<std::size_t>(mi);
      ComplexMatrix xm(dim, dim);
      auto xd = xm.data();
      const auto bd = base[m].data();
      const auto kd = kt[m].data();
      for (std::size_t e = 0; e < xd.size(); ++e) xd[e] = bd[e] + std::conj(kd[e]) * yd[e];
      try {
        if (dykstra) {
          xm += corr[m];
          qn[m] = psd_project(xm.hermitian_part());
          corr[m] = xm - qn[m];
        } else {
          qn[m] = psd_project(xm.hermitian_part());
        }
      } catch (...) {
        failed = true;
      }
    }
    if (failed) {
      cert.status = CertStatus::Inconclusive;
      cert.note = "eigensolver failure inside the PSD projection";
      cert.iterations = it;
      return cert;
    }
    ComplexMatrix rn = affine_residual(problem, kt, qn);
    const double resn = rn.frobenius_norm();
    cert.iterations = it;

    if (momentum) {
      if (resn > res) {
        // Adaptive restart: drop the momentum and project from the new point.
        t = 1.0;
        v = qn;
        rv = rn;
      } else {
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / tn;
        t = tn;
        for (std::size_t m = 0; m < mcount; ++m) {
          auto vd = v[m].data();
          const auto nd = qn[m].data();
          const auto od = q[m].data();
          for (std::size_t e = 0; e < vd.size(); ++e) vd[e] = nd[e] + beta * (nd[e] - od[e]);
        }
        // The residual is affine in Q, so extrapolate it the same way.
        auto rvd = rv.data();
        const auto nd = rn.data();
        const auto od = r.data();
        for (std::size_t e = 0; e < rvd.size(); ++e) rvd[e] = nd[e] + beta * (nd[e] - od[e]);
      }
    } else {
      rv = rn;
    }
    q = std::move(qn);
    r = std::move(rn);
    res = resn;
    best = std::min(best, res);

    if (res <= tol) {
      cert.status = CertStatus::Feasible;
      cert.residual = res;
      cert.weights = std::move(q);
      return cert;
    }
    if (it % opts.check_every != 0) continue;

    if (res > 10.0 * tol) {
      multiplier(r);
      const auto sep = repair_separator(ymul, problem, opts);
      if (opts.trace)
        opts.trace(it, res, sep.margin,
                   sep.lmax.empty() ? 0.0 : *std::max_element(sep.lmax.begin(), sep.lmax.end()));
      if (!sep.lmax.empty() && sep.margin >= opts.margin_min &&
          *std::max_element(sep.lmax.begin(), sep.lmax.end()) <= opts.verify_tol) {
        cert.status = CertStatus::Infeasible;
        cert.w = sep.w;
        cert.margin = sep.margin;
        cert.shift = sep.shift;
        cert.generator_lmax = sep.lmax;
        cert.residual = res;
        return cert;
      }
    }
    history.push_back(best);
    if (static_cast<int>(history.size()) > window_checks) {
      const double old = history.front();
      history.pop_front();
      if (old - best < opts.stall_rel * old) {
        cert.status = CertStatus::Inconclusive;
        cert.residual = res;
        cert.note = "stalled above the residual tolerance without a verified separator";
        return cert;
      }
    }
  }
  cert.status = CertStatus::Inconclusive;
  cert.residual = res;
  cert.note = "iteration cap reached";
  return cert;
}

VerificationReport verify_certificate(const Certificate& cert, const ConeProblem& problem,
                                      const std::vector<ComplexMatrix>& fine_generators,
                                      const SolverOptions& opts) {
  VerificationReport rep;
  problem.validate();
  if (cert.status == CertStatus::Inconclusive) {
    rep.failures.push_back("certificate is inconclusive");
    return rep;
  }
  if (cert.status == CertStatus::Feasible) {
    if (cert.weights.size() != problem.generators.size()) {
      rep.failures.push_back("weight count does not match generator count");
      return rep;
    }
    ComplexMatrix r = problem.target;
    for (std::size_t m = 0; m < cert.weights.size(); ++m)
      r -= schur_product(cert.weights[m], expand_kernel(problem.generators[m], problem.block));
    rep.residual = r.frobenius_norm();
    if (rep.residual > opts.tol.residual_tol) rep.failures.push_back("residual exceeds tolerance");
    rep.min_weight_eig = 0.0;
    for (const auto& qm : cert.weights) {
      if (!qm.is_hermitian(1e-12)) {
        rep.failures.push_back("weight is not Hermitian");
        break;
      }
      const auto ev = herm_eigvals(qm);
      const double rel = ev.front() / (1.0 + std::max(std::abs(ev.front()), std::abs(ev.back())));
      rep.min_weight_eig = std::min(rep.min_weight_eig, rel);
      if (!is_psd(qm, opts.tol)) {
        rep.failures.push_back("weight is not PSD");
        break;
      }
    }
    rep.ok = rep.failures.empty();
    return rep;
  }
  const auto& w = cert.w;
  if (w.rows() != problem.dim() || !w.is_hermitian(1e-12)) {
    rep.failures.push_back("separator has wrong shape or is not Hermitian");
    return rep;
  }
  const double nrm = w.frobenius_norm();
  rep.margin = inner_real(w, problem.target) / nrm;
  if (rep.margin < opts.margin_min) rep.failures.push_back("<W, target> below the required margin");
  ComplexMatrix wn = w;
  wn *= 1.0 / nrm;
  const auto lm = separator_lmax(wn, problem.generators, problem.block, opts.parallel);
  rep.worst_lmax = lm.empty() ? 0.0 : *std::max_element(lm.begin(), lm.end());
  if (rep.worst_lmax > opts.verify_tol) rep.failures.push_back("W o conj(K~) not negative on a generator");
  if (!fine_generators.empty()) {
    const auto lf = separator_lmax(wn, fine_generators, problem.block, opts.parallel);
    rep.fine_count = lf.size();
    rep.worst_lmax_fine = *std::max_element(lf.begin(), lf.end());
    if (rep.worst_lmax_fine > opts.verify_tol)
      rep.failures.push_back("W o conj(K~) not negative on a refinement generator");
  }
  rep.ok = rep.failures.empty();
  return rep;
}

}  // namespace cdil
