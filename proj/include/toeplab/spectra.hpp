#pragma once
// Dense Hermitian and tridiagonal spectral kernels, plus the counting-function
// calculus on singular-value sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toeplab/common.hpp"
#include "toeplab/matrix.hpp"

namespace toeplab {

// Thrown when an iterative eigensolve exhausts its rotation budget; carries
// the best iterate so callers can inspect partial progress.
class EigenSolveError : public std::runtime_error {
 public:
  EigenSolveError(const std::string& what, std::vector<double> best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const std::vector<double>& best_values() const { return best_; }

 private:
  std::vector<double> best_;
};

struct SingularSpectrum {
  std::vector<double> values;  // descending, >= 0
  std::size_t source_dim = 0;
};

struct SignedSpectrum {
  std::vector<double> positives;  // descending
  std::vector<double> negatives;  // moduli, descending
  std::size_t source_dim = 0;
};

struct CountingProfile {
  std::vector<double> s;            // log-spaced grid, ascending
  std::vector<std::size_t> count;   // n(s), non-increasing in s
  std::vector<std::size_t> shifted; // n(s) + 2
  std::vector<double> scaled;       // s^{1/gamma} log(n(s)+2)
  double gamma = 1.0;
};

struct GammaFunctionalEstimate {
  double Delta_hat = 0.0;  // window max of the scaled profile
  double delta_hat = 0.0;  // window min
  double s_lo = 0.0;
  double s_hi = 0.0;
  std::size_t points = 0;
};

struct AsymptoticFit {
  double c_hat = 0.0;     // slope of s_n against 1/(log(n+1))^gamma
  std::size_t n_lo = 0;   // window, 1-based inclusive
  std::size_t n_hi = 0;
  double residual = 0.0;  // relative RMS misfit over the window
  double endpoint = 0.0;  // (log(n_hi+1))^gamma * s_{n_hi}
  double gamma = 0.0;
};

namespace detail {

// counts[k] = #{eigenvalues < shifts[k]} of the symmetric tridiagonal (d, e),
// e2 = squared off-diagonal.  Shifts are processed in fixed-width batches so
// the divide-heavy recurrence vectorizes.
inline std::vector<std::size_t> sturm_counts(const std::vector<double>& d,
                                             const std::vector<double>& e2,
                                             const std::vector<double>& shifts,
                                             double pivmin) {
  const std::size_t n = d.size();
  const std::size_t m = shifts.size();
  std::vector<std::size_t> counts(m, 0);
  constexpr std::size_t kBatch = 16;
  for (std::size_t base = 0; base < m; base += kBatch) {
    const std::size_t width = std::min(kBatch, m - base);
    double s[kBatch];
    double q[kBatch];
    unsigned cnt[kBatch];
    for (std::size_t b = 0; b < kBatch; ++b)
      s[b] = shifts[base + (b < width ? b : width - 1)];
    for (std::size_t b = 0; b < kBatch; ++b) {
      double qq = d[0] - s[b];
      if (std::fabs(qq) < pivmin) qq = -pivmin;
      q[b] = qq;
      cnt[b] = qq < 0.0 ? 1u : 0u;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double di = d[i];
      const double e2i = e2[i - 1];
      for (std::size_t b = 0; b < kBatch; ++b) {
        double qq = di - s[b] - e2i / q[b];
        if (std::fabs(qq) < pivmin) qq = -pivmin;
        q[b] = qq;
        cnt[b] += qq < 0.0 ? 1u : 0u;
      }
    }
    for (std::size_t b = 0; b < width; ++b) counts[base + b] = cnt[b];
  }
  return counts;
}

}  // namespace detail

// All eigenvalues of a real symmetric tridiagonal matrix by Sturm bisection,
// ascending, to absolute tolerance 1e-12 * max|entry|.
inline std::vector<double> sturm_eigenvalues(const std::vector<double>& diag,
                                             const std::vector<double>& offdiag) {
  const std::size_t n = diag.size();
  if (n == 0) throw std::invalid_argument("sturm_eigenvalues: empty diagonal");
  if (offdiag.size() + 1 != n)
    throw std::invalid_argument("sturm_eigenvalues: offdiagonal length must be N-1");
  for (double x : diag)
    if (!std::isfinite(x)) throw std::invalid_argument("sturm_eigenvalues: non-finite entry");
  for (double x : offdiag)
    if (!std::isfinite(x)) throw std::invalid_argument("sturm_eigenvalues: non-finite entry");
  if (n == 1) return {diag[0]};

  double scale = 0.0;
  for (double x : diag) scale = std::max(scale, std::fabs(x));
  for (double x : offdiag) scale = std::max(scale, std::fabs(x));
  if (scale == 0.0) return std::vector<double>(n, 0.0);

  bool diagonal_only = true;
  for (double x : offdiag)
    if (x != 0.0) {
      diagonal_only = false;
      break;
    }
  if (diagonal_only) {
    std::vector<double> out(diag);
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<double> e2(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) e2[i] = offdiag[i] * offdiag[i];

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(offdiag[i - 1]) : 0.0) +
                     (i + 1 < n ? std::fabs(offdiag[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double tol = 1e-12 * scale;
  const double eps = std::numeric_limits<double>::epsilon();
  const double pad = eps * (std::fabs(lo) + std::fabs(hi)) + 2.0 * tol;
  lo -= pad;
  hi += pad;
  const double pivmin = std::sqrt(std::numeric_limits<double>::min());

  struct Interval {
    double a, b;
    std::size_t na, nb;  // eigenvalue counts below a and below b
  };
  std::vector<double> out;
  out.reserve(n);
  auto settle = [&](const Interval& iv, std::vector<Interval>& next) {
    const double width = iv.b - iv.a;
    const double floor_w = std::max(tol, 2.0 * eps * std::max(std::fabs(iv.a), std::fabs(iv.b)));
    if (width <= floor_w) {
      const double mid = 0.5 * (iv.a + iv.b);
      for (std::size_t r = iv.na; r < iv.nb; ++r) out.push_back(mid);
    } else {
      next.push_back(iv);
    }
  };

  std::vector<Interval> active;
  {
    std::vector<Interval> seed;
    settle({lo, hi, 0, n}, seed);
    active.swap(seed);
  }
  std::vector<double> mids;
  std::vector<Interval> next;
  while (!active.empty()) {
    mids.clear();
    for (const Interval& iv : active) mids.push_back(0.5 * (iv.a + iv.b));
    const std::vector<std::size_t> cm = detail::sturm_counts(diag, e2, mids, pivmin);
    next.clear();
    for (std::size_t k = 0; k < active.size(); ++k) {
      const Interval& iv = active[k];
      const std::size_t nm = std::clamp(cm[k], iv.na, iv.nb);
      if (nm > iv.na) settle({iv.a, mids[k], iv.na, nm}, next);
      if (iv.nb > nm) settle({mids[k], iv.b, nm, iv.nb}, next);
    }
    active.swap(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Implicit-shift QL on a symmetric tridiagonal, eigenvalues only, ascending.
// rotation_budget = 0 selects the default 30*N^2 contract.
inline std::vector<double> ql_eigenvalues(std::vector<double> d, std::vector<double> e,
                                          std::size_t rotation_budget = 0) {
  const std::size_t n = d.size();
  if (n == 0) return {};
  if (e.size() + 1 != n)
    throw std::invalid_argument("ql_eigenvalues: offdiagonal length must be N-1");
  if (rotation_budget == 0) rotation_budget = 30 * n * n;
  e.push_back(0.0);
  std::size_t rotations = 0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    for (;;) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (rotations >= rotation_budget) {
        std::vector<double> best(d);
        std::sort(best.begin(), best.end());
        throw EigenSolveError("ql_eigenvalues: rotation budget exhausted", std::move(best));
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        ++rotations;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
  std::sort(d.begin(), d.end());
  return d;
}

// Unitary reduction of a Hermitian matrix to real symmetric tridiagonal form.
// Reads only the upper triangle (plus real diagonal parts); destroys `a`.
inline void householder_tridiagonalize(ComplexMatrix& a, std::vector<double>& d,
                                       std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  if (n == 0) return;
  if (n == 1) {
    d[0] = a(0, 0).real();
    return;
  }
  std::vector<complex> v(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    d[k] = a(k, k).real();
    double scale = 0.0;
    for (std::size_t j = k + 1; j < n; ++j)
      scale += std::fabs(a(k, j).real()) + std::fabs(a(k, j).imag());
    if (scale == 0.0) {
      e[k] = 0.0;
      continue;
    }
    const double inv_scale = 1.0 / scale;
    double sig2 = 0.0;
    for (std::size_t j = k + 1; j < n; ++j) {
      v[j] = std::conj(a(k, j)) * inv_scale;  // v = x / scale with x the column under the diagonal
      sig2 += std::norm(v[j]);
    }
    const double sigma = std::sqrt(sig2);
    e[k] = scale * sigma;
    const complex alpha = v[k + 1];
    const double aabs = std::abs(alpha);
    const complex phase = aabs == 0.0 ? complex(1.0, 0.0) : alpha / aabs;
    const double beta = 1.0 / (sigma * (sigma + aabs));
    v[k + 1] += phase * sigma;

    // u = beta * A22 * v using one triangle of the trailing Hermitian block.
    for (std::size_t i = k + 1; i < n; ++i) w[i] = complex(0.0, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) {
      const complex vi = v[i];
      complex acc = a(i, i).real() * vi;
      for (std::size_t j = i + 1; j < n; ++j) {
        const complex aij = a(i, j);
        acc += aij * v[j];
        w[j] += std::conj(aij) * vi;
      }
      w[i] += acc;
    }
    double uhv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      w[i] *= beta;
      uhv += (std::conj(w[i]) * v[i]).real();
    }
    const double half = 0.5 * beta * uhv;
    for (std::size_t i = k + 1; i < n; ++i) w[i] -= half * v[i];

    // A22 <- A22 - v w^H - w v^H, upper triangle only.
    for (std::size_t i = k + 1; i < n; ++i) {
      const complex vi = v[i];
      const complex wi = w[i];
      for (std::size_t j = i; j < n; ++j)
        a(i, j) -= vi * std::conj(w[j]) + wi * std::conj(v[j]);
    }
  }
  d[n - 2] = a(n - 2, n - 2).real();
  d[n - 1] = a(n - 1, n - 1).real();
  e[n - 2] = std::abs(a(n - 2, n - 1));
}

// Detects exactly-real symmetric tridiagonal content so assembled banded
// truncations can skip the dense reduction.
inline bool extract_real_tridiagonal(const ComplexMatrix& a, std::vector<double>& d,
                                     std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const complex z = a(i, j);
      if (z.imag() != 0.0) return false;
      if (j > i + 1 && z.real() != 0.0) return false;
      if (j > i && a(j, i) != z) return false;
    }
    d[i] = a(i, i).real();
    if (i + 1 < n) e[i] = a(i, i + 1).real();
  }
  return true;
}

inline void require_finite(const ComplexMatrix& a, const char* who) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const complex z = a(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::invalid_argument(std::string(who) + ": non-finite entry");
    }
}

}  // namespace detail

// All eigenvalues of a Hermitian matrix, ascending.  Real symmetric
// tridiagonal inputs dispatch to the Sturm kernel; the general path is a
// Householder reduction followed by implicit-shift QL.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("hermitian_eigenvalues: square matrix required");
  detail::require_finite(a, "hermitian_eigenvalues");
  if (a.hermitian_defect() > 1e-10)
    throw std::invalid_argument("hermitian_eigenvalues: non-Hermitian input");
  std::vector<double> d, e;
  if (detail::extract_real_tridiagonal(a, d, e)) return sturm_eigenvalues(d, e);
  ComplexMatrix work = a;
  detail::householder_tridiagonalize(work, d, e);
  return detail::ql_eigenvalues(std::move(d), std::move(e));
}

// Singular values, descending.  Hermitian inputs go through the eigensolve
// directly; general inputs through the Gram matrix.  For a rows x cols input
// the result lists cols values (rank-deficiency shows up as zeros).
inline SingularSpectrum singular_values(const ComplexMatrix& a) {
  detail::require_finite(a, "singular_values");
  std::vector<double> vals;
  std::size_t dim = a.cols();
  if (a.rows() == a.cols() && a.hermitian_defect() <= 1e-10) {
    vals = hermitian_eigenvalues(a);
    for (double& x : vals) x = std::fabs(x);
    dim = a.rows();
  } else {
    vals = hermitian_eigenvalues(gram(a));
    for (double& x : vals) x = std::sqrt(std::max(x, 0.0));
  }
  std::sort(vals.begin(), vals.end(), std::greater<double>());
  return {std::move(vals), dim};
}

// Signed eigenvalue families of a Hermitian matrix; each side sorted by
// modulus descending.  Exact zeros belong to neither side.
inline SignedSpectrum eigen_signed(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.hermitian_defect() > 1e-10)
    throw std::invalid_argument("eigen_signed: non-Hermitian input");
  const std::vector<double> lam = hermitian_eigenvalues(a);
  SignedSpectrum out;
  out.source_dim = a.rows();
  for (double x : lam) {
    if (x > 0.0) out.positives.push_back(x);
    else if (x < 0.0) out.negatives.push_back(-x);
  }
  std::sort(out.positives.begin(), out.positives.end(), std::greater<double>());
  std::sort(out.negatives.begin(), out.negatives.end(), std::greater<double>());
  return out;
}

// Eigenvalue moduli of a real symmetric tridiagonal matrix, descending.
inline SingularSpectrum tridiagonal_eigenvalues(const std::vector<double>& diag,
                                                const std::vector<double>& offdiag) {
  std::vector<double> lam = sturm_eigenvalues(diag, offdiag);
  for (double& x : lam) x = std::fabs(x);
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return {std::move(lam), diag.size()};
}

// n(s) = #{n : s_n > s} (strict) and the shifted count n(s) + 2.
inline std::pair<std::size_t, std::size_t> counting(const std::vector<double>& values,
                                                    double s) {
  if (!(s > 0.0)) throw std::domain_error("counting: threshold must be positive");
  std::size_t n = 0;
  for (double v : values)
    if (v > s) ++n;
  return {n, n + 2};
}

// Counting profile on a log-spaced s-grid; gamma scales the shifted count as
// s^{1/gamma} log(n(s)+2).
inline CountingProfile counting_profile(const std::vector<double>& values, GammaExponent gamma,
                                        double s_lo, double s_hi, std::size_t points) {
  if (gamma.value <= 0.0)
    throw std::domain_error("counting_profile: positive gamma required");
  if (!(s_lo > 0.0) || !(s_hi > s_lo))
    throw std::invalid_argument("counting_profile: need 0 < s_lo < s_hi");
  if (points < 2) throw std::invalid_argument("counting_profile: need at least 2 points");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  CountingProfile out;
  out.gamma = gamma.value;
  out.s.reserve(points);
  const double ratio = std::log(s_hi / s_lo);
  const double inv_gamma = 1.0 / gamma.value;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const double s = s_lo * std::exp(ratio * t);
    // first index with value <= s equals the strict count
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), s, std::greater<double>());
    const std::size_t n = static_cast<std::size_t>(it - sorted.begin());
    out.s.push_back(s);
    out.count.push_back(n);
    out.shifted.push_back(n + 2);
    out.scaled.push_back(std::pow(s, inv_gamma) * std::log(static_cast<double>(n + 2)));
  }
  return out;
}

// Window max/min of s^{1/gamma} log(n(s)+2).  The window is clipped to stay
// above the truncation floor s_{N/8}; an empty clipped window is an error.
inline GammaFunctionalEstimate gamma_functionals(const std::vector<double>& values,
                                                 GammaExponent gamma, double s_lo, double s_hi,
                                                 std::size_t points = 64) {
  if (gamma.value <= 0.0)
    throw std::domain_error("gamma_functionals: positive gamma required");
  const std::size_t n = values.size();
  if (n < 16) throw std::invalid_argument("gamma_functionals: too few values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double floor_s = sorted[n / 8 - 1];
  const double lo = std::max(s_lo, std::nextafter(floor_s, std::numeric_limits<double>::infinity()));
  if (!(lo < s_hi))
    throw std::invalid_argument("gamma_functionals: window empty after floor guard");
  points = std::max<std::size_t>(points, 64);
  const CountingProfile prof = counting_profile(values, gamma, lo, s_hi, points);
  GammaFunctionalEstimate out;
  out.s_lo = lo;
  out.s_hi = s_hi;
  out.points = points;
  out.Delta_hat = *std::max_element(prof.scaled.begin(), prof.scaled.end());
  out.delta_hat = *std::min_element(prof.scaled.begin(), prof.scaled.end());
  return out;
}

// Default window: from just above the truncation floor s_{N/8} up to s_8.
inline GammaFunctionalEstimate gamma_functionals(const std::vector<double>& values,
                                                 GammaExponent gamma, std::size_t points = 64) {
  const std::size_t n = values.size();
  if (n < 72) throw std::invalid_argument("gamma_functionals: too few values");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const double hi = sorted[7];
  return gamma_functionals(values, gamma, std::numeric_limits<double>::min(), hi, points);
}

// Least-squares fit of s_n against x_n = 1/(log(n+1))^gamma over a 1-based
// index window inside [8, N/8]; no free offset, so c_hat stays identifiable
// at small N.  Also reports the raw endpoint estimator.
inline AsymptoticFit fit_limit(const std::vector<double>& values, GammaExponent gamma,
                               std::size_t n_lo, std::size_t n_hi) {
  const std::size_t n = values.size();
  if (n_lo < 8 || n_hi <= n_lo || n_hi > n / 8)
    throw std::invalid_argument("fit_limit: window must satisfy 8 <= n_lo < n_hi <= N/8");
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = n_lo; k <= n_hi; ++k) {
    const double x = std::pow(std::log(static_cast<double>(k + 1)), -gamma.value);
    const double y = values[k - 1];
    sxx += x * x;
    sxy += x * y;
  }
  AsymptoticFit fit;
  fit.gamma = gamma.value;
  fit.n_lo = n_lo;
  fit.n_hi = n_hi;
  fit.c_hat = sxy / sxx;
  double rss = 0.0, yss = 0.0;
  for (std::size_t k = n_lo; k <= n_hi; ++k) {
    const double x = std::pow(std::log(static_cast<double>(k + 1)), -gamma.value);
    const double y = values[k - 1];
    const double r = y - fit.c_hat * x;
    rss += r * r;
    yss += y * y;
  }
  fit.residual = yss > 0.0 ? std::sqrt(rss / yss) : 0.0;
  fit.endpoint = std::pow(std::log(static_cast<double>(n_hi + 1)), gamma.value) * values[n_hi - 1];
  return fit;
}

// (log(n+1))^gamma s_n for the 1-based sequence values[0..N-1].
inline std::vector<double> scaled_sequence(const std::vector<double>& values,
                                           GammaExponent gamma) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = std::pow(std::log(static_cast<double>(i + 2)), gamma.value) * values[i];
  return out;
}

}  // namespace toeplab
