#include "cdil/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace cdil {

void Tolerances::validate() const {
  if (!(psd_tol > 0) || !(residual_tol > 0) || !(root_tol > 0))
    throw ValidationError("tolerances must be strictly positive");
  if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::from_rows(const std::vector<std::vector<cplx>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  ComplexMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw ValidationError("ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

ComplexMatrix ComplexMatrix::conj() const {
  ComplexMatrix out = *this;
  for (auto& v : out.data_) v = std::conj(v);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!square()) return false;
  double dev = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      dev = std::max(dev, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
  return dev <= tol * (1.0 + max_abs());
}

ComplexMatrix ComplexMatrix::hermitian_part() const {
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("dimension mismatch in +=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw ValidationError("dimension mismatch in -=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("dimension mismatch in matrix product");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("dimension mismatch in Schur product");
  ComplexMatrix c(a.rows(), a.cols());
  auto cd = c.data();
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < cd.size(); ++k) cd[k] = ad[k] * bd[k];
  return c;
}

cplx inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("dimension mismatch in inner product");
  cplx s{};
  auto ad = a.data();
  auto bd = b.data();
  for (std::size_t k = 0; k < ad.size(); ++k) s += std::conj(ad[k]) * bd[k];
  return s;
}

double inner_real(const ComplexMatrix& a, const ComplexMatrix& b) { return inner(a, b).real(); }

namespace {

void require_hermitian(const ComplexMatrix& h) {
  if (!h.square()) throw ValidationError("matrix is not square");
  if (!h.all_finite()) throw ValidationError("matrix has non-finite entries");
  if (!h.is_hermitian(1e-12)) throw ValidationError("matrix is not Hermitian");
}

using EigenMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::SelfAdjointEigenSolver<EigenMat> eigen_solve(const ComplexMatrix& h, bool vectors) {
  const auto n = static_cast<Eigen::Index>(h.rows());
  const Eigen::Map<const EigenMat> m(h.data().data(), n, n);
  // Only the lower triangle is read; symmetrise first so both halves count.
  const EigenMat sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<EigenMat> es(sym, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
  return es;
}

}  // namespace

HermitianEigen herm_eig(const ComplexMatrix& h) {
  require_hermitian(h);
  const std::size_t n = h.rows();
  HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
  if (n == 0) return out;
  const auto es = eigen_solve(h, true);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = es.eigenvalues()(static_cast<Eigen::Index>(k));
    for (std::size_t r = 0; r < n; ++r)
      out.vectors(r, k) = es.eigenvectors()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k));
  }
  return out;
}

std::vector<double> herm_eigvals(const ComplexMatrix& h) {
  require_hermitian(h);
  const std::size_t n = h.rows();
  std::vector<double> vals(n);
  if (n == 0) return vals;
  const auto es = eigen_solve(h, false);
  for (std::size_t k = 0; k < n; ++k) vals[k] = es.eigenvalues()(static_cast<Eigen::Index>(k));
  return vals;
}

bool is_psd(const ComplexMatrix& h, const Tolerances& tol) {
  const auto vals = herm_eigvals(h);
  if (vals.empty()) return true;
  const double spread = std::max(std::abs(vals.front()), std::abs(vals.back()));
  return vals.front() >= -tol.psd_tol * (1.0 + spread);
}

double lambda_max(const ComplexMatrix& h) {
  const auto vals = herm_eigvals(h);
  return vals.empty() ? 0.0 : vals.back();
}

ComplexMatrix psd_project(const ComplexMatrix& h) {
  const auto eig = herm_eig(h);
  const std::size_t n = h.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = eig.values[k];
    if (lam <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx vi = lam * eig.vectors(i, k);
      for (std::size_t j = 0; j < n; ++j) out(i, j) += vi * std::conj(eig.vectors(j, k));
    }
  }
  return out.hermitian_part();
}

namespace {

// Parlett-Reinsch balancing by powers of two.
void balance(ComplexMatrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix * radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix * radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        for (std::size_t j = 0; j < n; ++j) a(i, j) /= f;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

void to_hessenberg(ComplexMatrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    for (std::size_t i = k + 2; i < n; ++i) {
      const cplx x = a(k + 1, k);
      const cplx y = a(i, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      if (r == 0.0 || std::abs(y) == 0.0) continue;
      const cplx c = x / r;
      const cplx s = y / r;
      for (std::size_t j = 0; j < n; ++j) {
        const cplx u = a(k + 1, j);
        const cplx w = a(i, j);
        a(k + 1, j) = std::conj(c) * u + std::conj(s) * w;
        a(i, j) = -s * u + c * w;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const cplx u = a(j, k + 1);
        const cplx w = a(j, i);
        a(j, k + 1) = u * c + w * s;
        a(j, i) = -u * std::conj(s) + w * std::conj(c);
      }
    }
  }
}

}  // namespace

std::vector<cplx> general_eigvals(ComplexMatrix a) {
  if (!a.square()) throw ValidationError("eigenvalues need a square matrix");
  if (!a.all_finite()) throw ValidationError("matrix has non-finite entries");
  const std::size_t n = a.rows();
  std::vector<cplx> eig;
  eig.reserve(n);
  if (n == 0) return eig;
  balance(a);
  to_hessenberg(a);
  const double eps = std::numeric_limits<double>::epsilon();

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  int iter = 0;
  int total = 0;
  std::vector<cplx> cs(n);
  std::vector<cplx> ss(n);
  while (hi >= 0) {
    if (hi == 0) {
      eig.push_back(a(0, 0));
      break;
    }
    std::ptrdiff_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(a(lo, lo - 1));
      const double diag = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
      if (sub <= eps * (diag == 0.0 ? 1.0 : diag)) {
        a(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig.push_back(a(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++total > 100 * static_cast<int>(n) + 200)
      throw NumericError("Hessenberg QR did not converge");
    ++iter;

    cplx mu;
    if (iter % 11 == 0) {
      mu = a(hi, hi) + 0.75 * std::abs(a(hi, hi - 1));
    } else {
      const cplx p = a(hi - 1, hi - 1);
      const cplx q = a(hi - 1, hi);
      const cplx r = a(hi, hi - 1);
      const cplx d = a(hi, hi);
      const cplx half = 0.5 * (p - d);
      const cplx disc = std::sqrt(half * half + q * r);
      const cplx m1 = d - q * r / (half + disc);
      const cplx m2 = d - q * r / (half - disc);
      const bool m1_ok = std::isfinite(m1.real()) && std::isfinite(m1.imag());
      const bool m2_ok = std::isfinite(m2.real()) && std::isfinite(m2.imag());
      if (m1_ok && (!m2_ok || std::abs(m1 - d) <= std::abs(m2 - d)))
        mu = m1;
      else if (m2_ok)
        mu = m2;
      else
        mu = d;
    }

    for (std::ptrdiff_t k = lo; k <= hi; ++k) a(k, k) -= mu;
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const cplx x = a(k, k);
      const cplx y = a(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      cplx c = 1.0;
      cplx s = 0.0;
      if (r != 0.0) {
        c = x / r;
        s = y / r;
      }
      cs[k] = c;
      ss[k] = s;
      for (std::ptrdiff_t j = k; j <= hi; ++j) {
        const cplx u = a(k, j);
        const cplx w = a(k + 1, j);
        a(k, j) = std::conj(c) * u + std::conj(s) * w;
        a(k + 1, j) = -s * u + c * w;
      }
    }
    for (std::ptrdiff_t k = lo; k < hi; ++k) {
      const cplx c = cs[k];
      const cplx s = ss[k];
      const std::ptrdiff_t top = std::min(k + 1, hi);
      for (std::ptrdiff_t i = lo; i <= top; ++i) {
        const cplx u = a(i, k);
        const cplx w = a(i, k + 1);
        a(i, k) = u * c + w * s;
        a(i, k + 1) = -u * std::conj(s) + w * std::conj(c);
      }
    }
    for (std::ptrdiff_t k = lo; k <= hi; ++k) a(k, k) += mu;
  }
  return eig;
}

cplx poly_eval(std::span<const cplx> coeffs, cplx z) {
  cplx acc{};
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}

cplx poly_deriv_eval(std::span<const cplx> coeffs, cplx z) {
  cplx acc{};
  for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * coeffs[k];
  return acc;
}

std::vector<cplx> poly_mul(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<cplx> c(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

std::vector<cplx> poly_from_roots(std::span<const cplx> roots) {
  std::vector<cplx> p{1.0};
  for (const cplx r : roots) {
    std::vector<cplx> next(p.size() + 1);
    for (std::size_t k = 0; k < p.size(); ++k) {
      next[k + 1] += p[k];
      next[k] -= r * p[k];
    }
    p = std::move(next);
  }
  return p;
}

double root_residual(std::span<const cplx> coeffs, cplx root) {
  double scale = 0.0;
  double pw = 1.0;
  const double rz = std::abs(root);
  for (const cplx c : coeffs) {
    scale += std::abs(c) * pw;
    pw *= rz;
  }
  if (scale == 0.0) return 0.0;
  return std::abs(poly_eval(coeffs, root)) / scale;
}

std::vector<cplx> poly_roots(std::span<const cplx> coeffs, const Tolerances& tol,
                             const RootOptions& opts) {
  std::size_t deg = coeffs.size();
  while (deg > 0 && coeffs[deg - 1] == cplx{}) --deg;
  if (deg == 0) throw ValidationError("zero polynomial has no well-defined roots");
  --deg;  // degree
  std::vector<cplx> roots;
  if (deg == 0) return roots;
  const auto p = coeffs.first(deg + 1);

  // Exact zero roots are peeled off first; the companion block is then nonsingular.
  std::size_t shift = 0;
  while (shift < deg && p[shift] == cplx{}) ++shift;
  roots.assign(shift, cplx{});

  const std::size_t m = deg - shift;
  if (m > 0) {
    const cplx lead = p[deg];
    ComplexMatrix comp(m, m);
    for (std::size_t j = 0; j < m; ++j) comp(0, j) = -p[deg - 1 - j] / lead;
    for (std::size_t i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    auto ev = general_eigvals(std::move(comp));
    roots.insert(roots.end(), ev.begin(), ev.end());
  }

  // Cluster near-coincident roots (multiple zeros split under rounding).
  const std::size_t n = roots.size();
  std::vector<int> cluster(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = next;
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (cluster[j] >= 0) continue;
        for (std::size_t k = 0; k < n; ++k) {
          if (cluster[k] != next) continue;
          if (std::abs(roots[j] - roots[k]) <= opts.cluster_tol * (1.0 + std::abs(roots[k]))) {
            cluster[j] = next;
            grew = true;
            break;
          }
        }
      }
    }
    ++next;
  }
  std::vector<cplx> out(n);
  for (int c = 0; c < next; ++c) {
    cplx mean{};
    int count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (cluster[i] == c) {
        mean += roots[i];
        ++count;
      }
    mean /= static_cast<double>(count);
    if (count == 1) {
      // Newton polish on the original coefficients.
      cplx z = mean;
      double best = root_residual(p, z);
      for (int it = 0; it < opts.polish_steps && best > 0.1 * tol.root_tol * 1e-6; ++it) {
        const cplx d = poly_deriv_eval(p, z);
        if (d == cplx{}) break;
        const cplx cand = z - poly_eval(p, z) / d;
        const double res = root_residual(p, cand);
        if (!(res < best)) break;
        z = cand;
        best = res;
      }
      mean = z;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (cluster[i] == c) out[i] = mean;
  }
  return out;
}

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!a.square() || a.rows() != b.rows()) throw ValidationError("solve: shape mismatch");
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  ComplexMatrix x = b;
  const double scale = std::max(a.max_abs(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (std::abs(lu(piv, k)) <= 1e-14 * scale) throw NumericError("solve: singular matrix");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(piv, j));
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = lu(i, k) / lu(k, k);
      if (f == cplx{}) continue;
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      cplx acc = x(kk, j);
      for (std::size_t m = kk + 1; m < n; ++m) acc -= lu(kk, m) * x(m, j);
      x(kk, j) = acc / lu(kk, kk);
    }
  }
  return x;
}

cplx determinant(const ComplexMatrix& a) {
  if (!a.square()) throw ValidationError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  ComplexMatrix lu = a;
  cplx det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
    if (lu(piv, k) == cplx{}) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
      det = -det;
    }
    det *= lu(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = lu(i, k) / lu(k, k);
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }
  return det;
}

ComplexMatrix inverse(const ComplexMatrix& a) { return solve(a, ComplexMatrix::identity(a.rows())); }

namespace {

using Vec = std::vector<cplx>;

cplx dot(const Vec& u, const Vec& v) {  // u* v
  cplx acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += std::conj(u[k]) * v[k];
  return acc;
}

double vnorm(const Vec& v) { return std::sqrt(std::real(dot(v, v))); }

// Two passes of modified Gram-Schmidt against an orthonormal set.
void orthogonalize(Vec& v, const std::vector<Vec>& basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const cplx c = dot(q, v);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= c * q[k];
    }
}

}  // namespace

ComplexMatrix null_space(const ComplexMatrix& a, double rank_tol) {
  const std::size_t n = a.cols();
  // A v = 0 iff v is orthogonal to every conj(row).
  std::vector<Vec> basis;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Vec r(n);
    for (std::size_t j = 0; j < n; ++j) r[j] = std::conj(a(i, j));
    const double before = vnorm(r);
    if (before == 0.0) continue;
    orthogonalize(r, basis);
    const double after = vnorm(r);
    if (after <= rank_tol * before) continue;
    for (auto& v : r) v /= after;
    basis.push_back(std::move(r));
  }
  const std::size_t rank = basis.size();
  // Complete with the unit vector that has the largest residual each round.
  while (basis.size() < n) {
    Vec best;
    double best_norm = -1.0;
    for (std::size_t k = 0; k < n; ++k) {
      Vec e(n);
      e[k] = 1.0;
      orthogonalize(e, basis);
      const double nv = vnorm(e);
      if (nv > best_norm) {
        best_norm = nv;
        best = std::move(e);
      }
    }
    for (auto& v : best) v /= best_norm;
    basis.push_back(std::move(best));
  }
  ComplexMatrix out(n, n - rank);
  for (std::size_t c = 0; c < n - rank; ++c)
    for (std::size_t k = 0; k < n; ++k) out(k, c) = basis[rank + c][k];
  return out;
}

}  // namespace cdil
