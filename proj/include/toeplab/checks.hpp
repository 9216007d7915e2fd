#pragma once
// Property checks for the operator-class calculus: counting-functional
// subadditivity, perturbation stability, product classes, block embeddings,
// a combinatorial tuple inequality, cross-term orthogonality diagnostics,
// decay of compactly supported symbols, and the radial envelope bound.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "toeplab/assembly.hpp"
#include "toeplab/spectra.hpp"

namespace toeplab {

// Verdict record of a single property check.  Metrics keep insertion order so
// serialized reports are deterministic.
struct CheckReport {
  std::string check;
  std::string params;
  std::uint64_t seed = 0;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;

  void set(std::string key, double value) { metrics.emplace_back(std::move(key), value); }

  double metric(const std::string& key) const {
    for (const auto& kv : metrics)
      if (kv.first == key) return kv.second;
    throw std::out_of_range("CheckReport: no metric named " + key);
  }
};

// Synthetic singular-value sequences used as check inputs.
inline std::vector<double> log_decay_sequence(std::size_t count, double scale,
                                              GammaExponent gamma) {
  if (count == 0 || !(scale > 0.0))
    throw std::invalid_argument("log_decay_sequence: positive count and scale required");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = scale / std::pow(std::log(static_cast<double>(i) + 2.0), gamma.value);
  return out;
}

inline std::vector<double> exponential_sequence(std::size_t count, double ratio = 0.5) {
  if (count == 0 || !(ratio > 0.0) || !(ratio < 1.0))
    throw std::invalid_argument("exponential_sequence: ratio in (0,1) required");
  std::vector<double> out(count);
  double v = ratio;
  for (std::size_t i = 0; i < count; ++i, v *= ratio) out[i] = v;
  return out;
}

inline std::vector<double> finite_rank_sequence(std::size_t count, std::size_t rank,
                                                double value) {
  if (rank > count || !(value > 0.0))
    throw std::invalid_argument("finite_rank_sequence: rank <= count and value > 0 required");
  std::vector<double> out(count, 0.0);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(rank), value);
  return out;
}

namespace detail {

inline void require_spectrum(const std::vector<double>& s, const char* who) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || s[i] < 0.0)
      throw std::invalid_argument(std::string(who) + ": sequence must be finite non-negative");
    if (i > 0 && s[i] > s[i - 1])
      throw std::invalid_argument(std::string(who) + ": sequence must be non-increasing");
  }
}

// Windowed functional estimate that degrades gracefully on sequences the
// plain estimator cannot window: a vanishing tail means the functionals are
// 0, and a flat head (floor equal to the window top, e.g. constant
// sequences) collapses the window to a single probe just below the jump.
inline GammaFunctionalEstimate functional_or_zero(const std::vector<double>& values,
                                                  GammaExponent gamma) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  const std::size_t probe = std::min<std::size_t>(7, sorted.empty() ? 0 : sorted.size() - 1);
  if (sorted.empty() || !(sorted[probe] > 0.0)) return GammaFunctionalEstimate{};
  const double hi = sorted[probe];
  const double floor_s = sorted[sorted.size() / 8 == 0 ? 0 : sorted.size() / 8 - 1];
  if (std::nextafter(floor_s, std::numeric_limits<double>::infinity()) >= hi) {
    const double s = std::nextafter(hi, 0.0);
    const std::size_t shifted = counting(sorted, s).second;
    GammaFunctionalEstimate e;
    e.Delta_hat = e.delta_hat =
        std::pow(s, 1.0 / gamma.value) * std::log(static_cast<double>(shifted));
    e.s_lo = e.s_hi = s;
    e.points = 1;
    return e;
  }
  return gamma_functionals(sorted, gamma);
}

// Haar-like random unitary via twice-iterated Gram-Schmidt on a Gaussian
// matrix; adequate for basis-invariance cross-checks.
inline ComplexMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix u(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = complex(g(rng), g(rng));
  for (std::size_t pass = 0; pass < 2; ++pass)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < j; ++k) {
        complex proj(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(u(i, k)) * u(i, j);
        for (std::size_t i = 0; i < n; ++i) u(i, j) -= proj * u(i, k);
      }
      double nrm = 0.0;
      for (std::size_t i = 0; i < n; ++i) nrm += std::norm(u(i, j));
      nrm = std::sqrt(nrm);
      if (!(nrm > 0.0)) throw std::runtime_error("random_unitary: degenerate column");
      for (std::size_t i = 0; i < n; ++i) u(i, j) /= nrm;
    }
  return u;
}

inline ComplexMatrix conjugate_diagonal(const ComplexMatrix& u, const std::vector<double>& d) {
  const std::size_t n = d.size();
  ComplexMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      complex acc(0.0, 0.0);
      for (std::size_t k = 0; k < n; ++k) acc += u(i, k) * d[k] * std::conj(u(j, k));
      out(i, j) = acc;
    }
  return out;
}

inline std::string format_params(const char* fmt, ...) {
  char buf[160];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

// Least-squares line through (x_i, y_i); returns slope, intercept, r^2.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace detail

// Subadditivity of the upper counting functional under the gamma/(1+gamma)
// power.  Sequences are realized as aligned diagonals, the extremal case for
// the sum; a nonzero seed additionally cross-checks basis invariance by
// conjugating the leading block with a random common unitary.
inline CheckReport check_p1_subadditivity(const std::vector<double>& a,
                                          const std::vector<double>& b, GammaExponent gamma,
                                          std::uint64_t seed = 0) {
  detail::require_spectrum(a, "check_p1_subadditivity");
  detail::require_spectrum(b, "check_p1_subadditivity");
  if (a.size() != b.size() || a.size() < 72)
    throw std::invalid_argument("check_p1_subadditivity: equal lengths >= 72 required");
  if (!(gamma.value > 0.0))
    throw std::invalid_argument("check_p1_subadditivity: positive gamma required");

  std::vector<double> sum(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) sum[i] = a[i] + b[i];

  const double da = detail::functional_or_zero(a, gamma).Delta_hat;
  const double db = detail::functional_or_zero(b, gamma).Delta_hat;
  const double ds = detail::functional_or_zero(sum, gamma).Delta_hat;
  const double t = gamma.value / (1.0 + gamma.value);
  const double lhs = std::pow(ds, t);
  const double rhs = std::pow(da, t) + std::pow(db, t);

  CheckReport r;
  r.check = "p1_subadditivity";
  r.params = detail::format_params("gamma=%g n=%zu", gamma.value, a.size());
  r.seed = seed;
  r.set("Delta_a", da);
  r.set("Delta_b", db);
  r.set("Delta_sum", ds);
  r.set("lhs", lhs);
  r.set("rhs", rhs);
  r.pass = lhs <= rhs * 1.10 + 1e-12;

  if (seed != 0) {
    const std::size_t m = std::min<std::size_t>(64, a.size());
    std::mt19937_64 rng(seed);
    const ComplexMatrix u = detail::random_unitary(m, rng);
    std::vector<double> head(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(m));
    const std::vector<double> eig = hermitian_eigenvalues(detail::conjugate_diagonal(u, head));
    double defect = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      defect = std::max(defect, std::fabs(eig[m - 1 - i] - head[i]));
    r.set("unitary_defect", defect);
    r.pass = r.pass && defect <= 1e-9 * std::max(1.0, head[0]);
  }
  return r;
}

// Stability of both counting functionals under a vanishing-class
// perturbation: Delta and delta of A+B match those of A within the estimator
// tolerance.  The perturbation may be shorter than A; it is zero-padded.
inline CheckReport check_p2_kyfan(const std::vector<double>& a, const std::vector<double>& b,
                                  GammaExponent gamma) {
  detail::require_spectrum(a, "check_p2_kyfan");
  detail::require_spectrum(b, "check_p2_kyfan");
  if (b.size() > a.size() || a.size() < 72)
    throw std::invalid_argument("check_p2_kyfan: need len(b) <= len(a), len(a) >= 72");
  if (!(gamma.value > 0.0))
    throw std::invalid_argument("check_p2_kyfan: positive gamma required");

  std::vector<double> sum(a);
  for (std::size_t i = 0; i < b.size(); ++i) sum[i] += b[i];

  const GammaFunctionalEstimate fa = detail::functional_or_zero(a, gamma);
  const GammaFunctionalEstimate fs = detail::functional_or_zero(sum, gamma);

  CheckReport r;
  r.check = "p2_kyfan";
  r.params = detail::format_params("gamma=%g n=%zu pert=%zu", gamma.value, a.size(), b.size());
  r.set("Delta_a", fa.Delta_hat);
  r.set("Delta_sum", fs.Delta_hat);
  r.set("delta_a", fa.delta_hat);
  r.set("delta_sum", fs.delta_hat);
  const double dev_upper = std::fabs(fs.Delta_hat - fa.Delta_hat);
  const double dev_lower = std::fabs(fs.delta_hat - fa.delta_hat);
  r.set("dev_upper", dev_upper);
  r.set("dev_lower", dev_lower);
  r.pass = dev_upper <= 0.10 * std::max(fa.Delta_hat, 1e-12) &&
           dev_lower <= 0.10 * std::max(fa.delta_hat, 1e-12);
  return r;
}

// Product rule in the commuting realization: the doubled-exponent functional
// of the entrywise product obeys Delta_2g(AB) <= Delta_g(A) + Delta_g(B).
// A vanishing-class factor is flagged; it drives the product functional to 0.
inline CheckReport check_p3_products(const std::vector<double>& a, const std::vector<double>& b,
                                     GammaExponent gamma) {
  detail::require_spectrum(a, "check_p3_products");
  detail::require_spectrum(b, "check_p3_products");
  if (a.size() != b.size() || a.size() < 72)
    throw std::invalid_argument("check_p3_products: equal lengths >= 72 required");
  if (!(gamma.value > 0.0))
    throw std::invalid_argument("check_p3_products: positive gamma required");

  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];

  const double da = detail::functional_or_zero(a, gamma).Delta_hat;
  const double db = detail::functional_or_zero(b, gamma).Delta_hat;
  const double dp = detail::functional_or_zero(prod, GammaExponent(2.0 * gamma.value)).Delta_hat;

  // A factor whose scaled sequence collapses across the window is in the
  // vanishing class; record which, if any.
  const auto vanishing = [&](const std::vector<double>& s) {
    const std::size_t lo = 7, hi = s.size() / 8;
    if (hi <= lo) return false;
    const double head = std::pow(std::log(static_cast<double>(lo) + 2.0), gamma.value) * s[lo];
    const double tail = std::pow(std::log(static_cast<double>(hi) + 1.0), gamma.value) * s[hi - 1];
    return tail < 0.2 * head;
  };

  CheckReport r;
  r.check = "p3_products";
  r.params = detail::format_params("gamma=%g n=%zu", gamma.value, a.size());
  r.set("Delta_a", da);
  r.set("Delta_b", db);
  r.set("Delta2_prod", dp);
  r.set("vanishing_factor", (vanishing(a) || vanishing(b)) ? 1.0 : 0.0);
  r.pass = dp <= (da + db) * 1.10 + 1e-12;
  return r;
}

// Block-embedding identities: the summed product form, the Gram block
// structure, the shared nonzero spectrum of both forms, and exact counting
// additivity of the block-diagonal realization.
inline CheckReport check_p4_blocks(const BlockFamily& family) {
  const std::size_t d = detail::checked_block_dim(family, "check_p4_blocks");
  const std::size_t L = family.blocks.size();
  const BlockProducts p = block_embed_products(family);

  // (i) summed form.
  ComplexMatrix sum_form(d, d);
  for (const ComplexMatrix& blk : family.blocks) {
    const ComplexMatrix term = multiply(blk, blk.adjoint());
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) sum_form(i, j) += term(i, j);
  }
  double dev_sum = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      dev_sum = std::max(dev_sum, std::abs(sum_form(i, j) - p.cogram_form(i, j)));

  // (ii) Gram blocks.
  double dev_blocks = 0.0;
  for (std::size_t bj = 0; bj < L; ++bj)
    for (std::size_t bk = 0; bk < L; ++bk) {
      const ComplexMatrix blk = multiply(family.blocks[bj].adjoint(), family.blocks[bk]);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          dev_blocks = std::max(dev_blocks,
                                std::abs(blk(i, j) - p.gram_form(bj * d + i, bk * d + j)));
    }

  // (iii) shared nonzero spectrum.
  const std::vector<double> eig_big = hermitian_eigenvalues(p.gram_form);
  const std::vector<double> eig_small = hermitian_eigenvalues(p.cogram_form);
  const double scale = std::max(1.0, std::fabs(eig_small.back()));
  double dev_spectra = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    dev_spectra = std::max(
        dev_spectra, std::fabs(eig_big[L * d - 1 - i] - eig_small[d - 1 - i]));
  for (std::size_t i = 0; i + d < L * d; ++i)
    dev_spectra = std::max(dev_spectra, std::fabs(eig_big[i]));

  // (iv) counting additivity at generic thresholds: midpoints of well
  // separated gaps in the block-diagonal spectrum cannot collide with any
  // singular value, so the strict counts must match exactly.
  const SingularSpectrum s0 = singular_values(block_diagonal(family));
  std::vector<SingularSpectrum> parts;
  parts.reserve(L);
  for (const ComplexMatrix& blk : family.blocks) parts.push_back(singular_values(blk));
  std::vector<double> grid;
  grid.push_back(s0.values.front() + 1.0);
  for (std::size_t i = 0; i + 1 < s0.values.size() && grid.size() < 8; ++i)
    if (s0.values[i] - s0.values[i + 1] > 1e-8 * std::max(1.0, s0.values.front()))
      grid.push_back(0.5 * (s0.values[i] + s0.values[i + 1]));
  if (s0.values.back() > 0.0) grid.push_back(0.5 * s0.values.back());
  std::size_t count_mismatch = 0;
  for (double s : grid) {
    std::size_t split = 0;
    for (const SingularSpectrum& part : parts) split += counting(part.values, s).first;
    if (counting(s0.values, s).first != split) ++count_mismatch;
  }

  CheckReport r;
  r.check = "p4_blocks";
  r.params = detail::format_params("L=%zu dim=%zu", L, d);
  r.set("dev_sum_form", dev_sum);
  r.set("dev_gram_blocks", dev_blocks);
  r.set("dev_spectra", dev_spectra);
  r.set("count_mismatch", static_cast<double>(count_mismatch));
  const double in_scale = std::max(1.0, p.cogram_form.max_abs());
  r.pass = dev_sum <= 1e-12 * in_scale && dev_blocks <= 1e-12 * in_scale &&
           dev_spectra <= 1e-10 * scale && count_mismatch == 0;
  return r;
}

// Combinatorial tuple inequality: the two chained products of adjacent sums
// dominate (max r)^2 times the full product with one maximal and one minimal
// factor dropped.  Radii are sampled log-uniformly over [1e-6, 1] to stress
// the near-degenerate regime.
inline CheckReport check_lemma44(std::size_t l, std::size_t samples, std::uint64_t seed) {
  if (l < 2 || l > 5) throw std::invalid_argument("check_lemma44: l in {2..5} required");
  if (samples == 0) throw std::invalid_argument("check_lemma44: positive sample count required");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t width = 2 * l;
  std::vector<double> rr(width), sorted(width);
  std::size_t violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < samples; ++it) {
    for (double& v : rr) v = std::pow(10.0, -6.0 * unif(rng));

    double lhs = (rr[0] + rr[1]);
    for (std::size_t j = 2; j <= l - 1; ++j) lhs *= rr[j - 1] + rr[j];
    lhs *= rr[l - 1] + rr[l];
    lhs *= rr[0] + rr[l + 1];
    for (std::size_t j = l + 2; j <= width - 1; ++j) lhs *= rr[j - 1] + rr[j];
    lhs *= rr[width - 1] + rr[l];

    sorted = rr;
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double rhs = sorted[0] * sorted[0];
    for (std::size_t i = 1; i + 1 < width; ++i) rhs *= sorted[i];

    if (lhs < rhs * (1.0 - 1e-12)) ++violations;
    min_ratio = std::min(min_ratio, lhs / rhs);
  }

  CheckReport r;
  r.check = "lemma44";
  r.params = detail::format_params("l=%zu samples=%zu", l, samples);
  r.seed = seed;
  r.set("violations", static_cast<double>(violations));
  r.set("min_ratio", min_ratio);
  r.pass = violations == 0;
  return r;
}

// Singular-value inequalities for products: s_n(BA) <= ||B|| s_n(A) for every
// n, and the counting bound n(s1 s2, AB) <= n(s1, A) + n(s2, B) on a grid of
// split thresholds.  Matrices are dense complex Gaussians.
inline CheckReport check_weyl(std::size_t max_dim, std::size_t pairs, std::uint64_t seed) {
  if (max_dim < 2 || pairs == 0)
    throw std::invalid_argument("check_weyl: max_dim >= 2 and pairs >= 1 required");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> dims(2, max_dim);

  std::size_t bad_norm = 0, bad_count = 0;
  const double grid1[] = {0.4, 1.0, 2.5};
  const double grid2[] = {0.3, 1.5};

  for (std::size_t it = 0; it < pairs; ++it) {
    const std::size_t n = dims(rng);
    ComplexMatrix a(n, n), b(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) = complex(g(rng), g(rng));
        b(i, j) = complex(g(rng), g(rng));
      }
    const SingularSpectrum sa = singular_values(a);
    const SingularSpectrum sb = singular_values(b);
    const SingularSpectrum sba = singular_values(multiply(b, a));
    const double norm_b = sb.values.front();
    const double slack = 1e-10 * std::max(1.0, norm_b * sa.values.front());
    for (std::size_t i = 0; i < n; ++i)
      if (sba.values[i] > norm_b * sa.values[i] + slack) ++bad_norm;

    const SingularSpectrum sab = singular_values(multiply(a, b));
    for (double f1 : grid1)
      for (double f2 : grid2) {
        const double s1 = f1 * sa.values.front();
        const double s2 = f2 * sb.values.front();
        const std::size_t lhs = counting(sab.values, s1 * s2).first;
        const std::size_t rhs = counting(sa.values, s1).first + counting(sb.values, s2).first;
        if (lhs > rhs) ++bad_count;
      }
  }

  CheckReport r;
  r.check = "weyl";
  r.params = detail::format_params("max_dim=%zu pairs=%zu", max_dim, pairs);
  r.seed = seed;
  r.set("violations_norm", static_cast<double>(bad_norm));
  r.set("violations_count", static_cast<double>(bad_count));
  r.pass = bad_norm == 0 && bad_count == 0;
  return r;
}

// One pairwise arc product: cyclic gap 0 is the self product (the
// non-vanishing control), gap 1 an adjacent pair, gap >= 2 a distant pair.
struct CrossTermPair {
  std::size_t j = 0;  // 1-based arc indices, j <= k
  std::size_t k = 0;
  std::size_t gap = 0;
  double top_singular = 0.0;            // largest singular value at dim
  double hs_norm = 0.0;                 // Hilbert-Schmidt norm at dim
  double hs_norm_refined = 0.0;         // at 2*dim; NaN unless distant
  double hs_rel_change = 0.0;           // |refined - base| / base; NaN unless distant
  std::vector<double> scaled_window;    // (log(n+1))^{2 gamma} s_n, ranks window_lo..window_hi
};

struct CrossTermReport {
  std::size_t arcs = 0;
  double gamma = 0.0;
  std::size_t dim = 0;
  std::size_t window_lo = 0;  // 1-based ranks, inclusive
  std::size_t window_hi = 0;
  std::vector<CrossTermPair> pairs;

  const CrossTermPair& pair(std::size_t j, std::size_t k) const {
    for (const CrossTermPair& p : pairs)
      if ((p.j == j && p.k == k) || (p.j == k && p.k == j)) return p;
    throw std::out_of_range("CrossTermReport: no such pair");
  }
};

// Pairwise products of arc-restricted truncations.  Distant pairs get their
// Hilbert-Schmidt norm recomputed on the doubled truncation; adjacent pairs
// and self products carry scaled singular-value windows.  Conjugating a
// product swaps (j, k) and preserves singular values, so pairs are reported
// once with j <= k.
inline CrossTermReport cross_term_diagnostic(std::size_t arcs, GammaExponent gamma,
                                             std::size_t n) {
  if (arcs < 3) throw std::invalid_argument("cross_term_diagnostic: need at least 3 arcs");
  if (n < 256) throw std::invalid_argument("cross_term_diagnostic: need n >= 256");
  if (n > 1024)
    throw std::runtime_error("cross_term_diagnostic: n above computational budget");
  if (!(gamma.value > 0.0))
    throw std::invalid_argument("cross_term_diagnostic: positive gamma required");

  const std::vector<ToeplitzTruncation> fam = assemble_arc_family(arcs, gamma, n);
  std::vector<ToeplitzTruncation> fam2;

  CrossTermReport report;
  report.arcs = arcs;
  report.gamma = gamma.value;
  report.dim = n;
  report.window_lo = 16;
  report.window_hi = n / 8;
  const GammaExponent doubled(2.0 * gamma.value);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t j = 1; j <= arcs; ++j)
    for (std::size_t k = j; k <= arcs; ++k) {
      CrossTermPair entry;
      entry.j = j;
      entry.k = k;
      entry.gap = std::min(k - j, arcs - (k - j));
      const ComplexMatrix prod =
          multiply(fam[k - 1].entries.adjoint(), fam[j - 1].entries);
      entry.hs_norm = prod.frobenius_norm();
      const SingularSpectrum sv = singular_values(prod);
      entry.top_singular = sv.values.front();
      const std::vector<double> scaled = scaled_sequence(sv.values, doubled);
      entry.scaled_window.assign(scaled.begin() + static_cast<std::ptrdiff_t>(report.window_lo - 1),
                                 scaled.begin() + static_cast<std::ptrdiff_t>(report.window_hi));
      if (entry.gap >= 2) {
        if (fam2.empty()) fam2 = assemble_arc_family(arcs, gamma, 2 * n);
        const ComplexMatrix prod2 =
            multiply(fam2[k - 1].entries.adjoint(), fam2[j - 1].entries);
        entry.hs_norm_refined = prod2.frobenius_norm();
        entry.hs_rel_change =
            std::fabs(entry.hs_norm_refined - entry.hs_norm) / std::max(entry.hs_norm, 1e-300);
      } else {
        entry.hs_norm_refined = nan;
        entry.hs_rel_change = nan;
      }
      report.pairs.push_back(std::move(entry));
    }
  return report;
}

// Exponential decay of a truncation whose symbol is supported in a closed
// sub-disk: log s_n falls linearly.  The full-circle cutoff decays with slope
// 2 log(1 - delta), matching the support bound; restricting to a proper arc
// steepens the decay, so the bound stays one-sided.  The uncut operator
// serves as the control; its singular values decay only logarithmically, so
// the exponential fit must reject it.
inline CheckReport check_compact_support_decay(double delta, std::size_t n,
                                               std::size_t arcs = 1,
                                               GammaExponent gamma = GammaExponent(1.0)) {
  if (!(delta > 0.0) || !(delta <= 0.5))
    throw std::invalid_argument("check_compact_support_decay: delta in (0, 1/2] required");
  if (n < 32) throw std::invalid_argument("check_compact_support_decay: n >= 32 required");
  if (arcs == 0) throw std::invalid_argument("check_compact_support_decay: arcs >= 1 required");

  const SeparableSymbol radial(AngularFactor(ConstantAngular{complex(1.0, 0.0)}), gamma);
  const SeparableSymbol arc_sym = arc_restriction(radial, ArcPartition(arcs, 1));
  AssemblyOptions opts;
  opts.radial_cutoff = 1.0 - delta;
  const SingularSpectrum cut = singular_values(assemble_toeplitz(arc_sym, n, opts).entries);
  const SingularSpectrum full = singular_values(assemble_toeplitz(arc_sym, n).entries);

  // Fit window: skip the first ranks, stop at the numerical floor.
  const double floor_value = 1e-13 * cut.values.front();
  std::vector<double> xs, ys, xf, yf;
  for (std::size_t i = 3; i < n; ++i) {
    if (cut.values[i] > floor_value) {
      xs.push_back(static_cast<double>(i + 1));
      ys.push_back(std::log(cut.values[i]));
    }
    if (full.values[i] > 1e-13 * full.values.front()) {
      xf.push_back(static_cast<double>(i + 1));
      yf.push_back(std::log(full.values[i]));
    }
  }

  CheckReport r;
  r.check = "compact_support_decay";
  r.params = detail::format_params("delta=%g n=%zu arcs=%zu gamma=%g", delta, n, arcs,
                                   gamma.value);
  const double predicted = 2.0 * std::log1p(-delta);
  r.set("predicted_slope", predicted);
  r.set("points", static_cast<double>(xs.size()));
  if (xs.size() < 8) {
    r.set("slope", 0.0);
    r.set("slope_ratio", 0.0);
    r.set("r2", 0.0);
    r.pass = false;
    return r;
  }
  const detail::LineFit fit = detail::fit_line(xs, ys);
  const detail::LineFit control = detail::fit_line(xf, yf);
  const bool control_rejected =
      control.r2 < 0.98 || std::fabs(control.slope) < 0.1 * std::fabs(predicted);
  r.set("slope", fit.slope);
  r.set("slope_ratio", fit.slope / predicted);
  r.set("r2", fit.r2);
  r.set("control_slope", control.slope);
  r.set("control_r2", control.r2);
  r.set("control_rejected", control_rejected ? 1.0 : 0.0);
  r.pass = fit.slope <= 0.9 * predicted && fit.r2 >= 0.98 && control_rejected;
  return r;
}

// Radial envelope near the boundary point 1.  The corrected form is the
// radial weight evaluated at modulus 1 - r; the literal published form is
// kept selectable for comparison and is evaluated as printed.
enum class Psi0Form { shifted_log, reciprocal_log };

inline double psi0(double r, GammaExponent gamma, Psi0Form form = Psi0Form::shifted_log) {
  if (!(r > 0.0) || !(r < 1.0)) throw std::domain_error("psi0: r in (0, 1) required");
  if (form == Psi0Form::shifted_log) return std::pow(1.0 + std::log(1.0 / r), -gamma.value);
  return std::pow(1.0 + 1.0 / std::log(r), -gamma.value);
}

// Pointwise envelope bound phi0(|z|) <= psi0(|1 - z|) on the lens
// {z = 1 - r e^{i theta}: 0 < r < min(sqrt(2) delta, 2 cos theta),
//  theta in (0, pi/2)}.  Holds because 1 - |z| <= |1 - z| and the weight is
// monotone; the literal published envelope fails it on most of the range.
inline CheckReport check_psi0_bound(GammaExponent gamma, std::size_t samples,
                                    std::uint64_t seed, double delta = 0.45,
                                    Psi0Form form = Psi0Form::shifted_log) {
  if (samples == 0) throw std::invalid_argument("check_psi0_bound: positive samples required");
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("check_psi0_bound: delta in (0, 1/2) required");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double reach = std::sqrt(2.0) * delta;

  std::size_t violations = 0;
  double max_ratio = 0.0;
  for (std::size_t it = 0; it < samples; ++it) {
    const double theta = 0.5 * pi * unif(rng);
    const double rmax = std::min(reach, 2.0 * std::cos(theta));
    const double r = std::max(1e-12, unif(rng)) * rmax;
    const complex z = complex(1.0, 0.0) - std::polar(r, theta);
    const double modulus = std::abs(z);
    const double phi = radial_weight(modulus, gamma);
    const double psi = psi0(r, gamma, form);
    if (!(phi <= psi + 1e-15 + 1e-12 * std::fabs(psi))) ++violations;
    if (psi > 0.0) max_ratio = std::max(max_ratio, phi / psi);
  }

  CheckReport r;
  r.check = "psi0_bound";
  r.params = detail::format_params("gamma=%g samples=%zu delta=%g form=%s", gamma.value,
                                   samples, delta,
                                   form == Psi0Form::shifted_log ? "shifted" : "reciprocal");
  r.seed = seed;
  r.set("violations", static_cast<double>(violations));
  r.set("max_ratio", max_ratio);
  r.pass = violations == 0;
  return r;
}

}  // namespace toeplab
