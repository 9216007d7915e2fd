#pragma once
// Finite matrix builders: Toeplitz truncations in the weighted monomial
// basis e_n = sqrt(n+1) z^n, arc-restricted families, block embeddings, and
// banded matrices with logarithmically decaying entries.
//
// Entry formula: A(m, n) = 2 sqrt((n+1)(m+1)) * hat(phi1)(m-n) * M(n+m+1)
// with M(p) the radial moment.  Entries depend on m+n only through M, so one
// moment table of length 2N-1 is shared by the whole matrix.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "toeplab/common.hpp"
#include "toeplab/matrix.hpp"
#include "toeplab/moments.hpp"
#include "toeplab/symbol.hpp"

namespace toeplab {

struct AssemblyOptions {
  double radial_cutoff = 1.0;  // upper integration radius for the moments
};

struct ToeplitzTruncation {
  std::size_t dim = 0;
  ComplexMatrix entries;
  std::string symbol_meta;
  bool hermitian = false;
};

namespace detail {

inline std::string gamma_tag(double gamma) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "gamma=%g", gamma);
  return buf;
}

// Moment table with convergence checked per power, so a quadrature failure
// surfaces as an error instead of a silently bad matrix.
inline std::vector<double> checked_moment_table(std::size_t max_power, GammaExponent gamma,
                                                const RadialProfile& profile,
                                                double upper_radius) {
  std::vector<double> table(max_power + 1);
  for (std::size_t p = 0; p <= max_power; ++p) {
    const MomentResult r = moment_quadrature(p, gamma, profile, upper_radius);
    if (!r.converged)
      throw std::runtime_error("assemble: moment quadrature did not converge at power " +
                               std::to_string(p));
    table[p] = r.value;
  }
  return table;
}

inline ToeplitzTruncation assemble_from_table(const AngularFactor& angular,
                                              GammaExponent gamma,
                                              const RadialProfile& profile, std::size_t n,
                                              const std::vector<double>& table,
                                              double cutoff) {
  const long kmax = static_cast<long>(n) - 1;
  const std::vector<complex> hats = fourier_coefficients(angular, kmax);
  ToeplitzTruncation out;
  out.dim = n;
  out.entries = ComplexMatrix(n, n);
  out.hermitian = angular_is_real(angular);
  out.symbol_meta = angular_label(angular) + ", " + gamma_tag(gamma.value) +
                    ", g=" + profile.label();
  if (cutoff < 1.0) {
    char buf[48];
    std::snprintf(buf, sizeof buf, ", cutoff=%g", cutoff);
    out.symbol_meta += buf;
  }
  ComplexMatrix& a = out.entries;
  detail::for_each_row_block(n, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t m = lo; m < hi; ++m) {
      complex* row = a.row(m);
      const double mf = static_cast<double>(m) + 1.0;
      for (std::size_t c = 0; c < n; ++c) {
        const complex hat = hats[static_cast<std::size_t>(
            static_cast<long>(m) - static_cast<long>(c) + kmax)];
        if (hat == complex(0.0, 0.0)) continue;  // exact zeros stay exact
        const double factor =
            2.0 * std::sqrt((static_cast<double>(c) + 1.0) * mf) * table[m + c + 1];
        row[c] = factor * hat;
      }
    }
  });
  return out;
}

}  // namespace detail

// N x N truncation of the Toeplitz operator with separable symbol
// phi1(theta) phi0_gamma(r) g(r).  Sampled angular factors need grid
// M >= 4N so every required coefficient sits below the aliasing bound.
inline ToeplitzTruncation assemble_toeplitz(const SeparableSymbol& sym, std::size_t n,
                                            const AssemblyOptions& opts = {}) {
  if (n < 1) throw std::invalid_argument("assemble_toeplitz: N >= 1 required");
  if (const auto* sampled = std::get_if<SampledContinuous>(&sym.angular)) {
    if (sampled->samples.size() < 4 * n)
      throw std::invalid_argument(
          "assemble_toeplitz: sampled angular factor needs grid M >= 4N");
  }
  const std::vector<double> table =
      detail::checked_moment_table(2 * n - 1, sym.gamma, sym.profile, opts.radial_cutoff);
  return detail::assemble_from_table(sym.angular, sym.gamma, sym.profile, n, table,
                                     opts.radial_cutoff);
}

// Arc family T_1..T_L of the radial symbol cut to the L equal arcs; the
// moment table is computed once and shared across the family.
inline std::vector<ToeplitzTruncation> assemble_arc_family(
    std::size_t arcs, GammaExponent gamma, std::size_t n,
    const RadialProfile& profile = RadialProfile::one(), const AssemblyOptions& opts = {}) {
  if (arcs < 1) throw std::invalid_argument("assemble_arc_family: L >= 1 required");
  if (n < 1) throw std::invalid_argument("assemble_arc_family: N >= 1 required");
  const SeparableSymbol radial(AngularFactor(ConstantAngular{complex(1.0, 0.0)}), gamma,
                               profile);
  const std::vector<double> table =
      detail::checked_moment_table(2 * n - 1, gamma, profile, opts.radial_cutoff);
  std::vector<ToeplitzTruncation> out;
  out.reserve(arcs);
  for (std::size_t j = 1; j <= arcs; ++j) {
    const SeparableSymbol arc = arc_restriction(radial, ArcPartition(arcs, j));
    out.push_back(detail::assemble_from_table(arc.angular, gamma, profile, n, table,
                                              opts.radial_cutoff));
  }
  return out;
}

// L operators on a common N-dimensional space.
struct BlockFamily {
  std::vector<ComplexMatrix> blocks;
};

namespace detail {

inline std::size_t checked_block_dim(const BlockFamily& f, const char* who) {
  if (f.blocks.empty()) throw std::invalid_argument(std::string(who) + ": empty family");
  const std::size_t n = f.blocks.front().rows();
  for (const ComplexMatrix& b : f.blocks)
    if (b.rows() != n || b.cols() != n)
      throw std::invalid_argument(std::string(who) + ": blocks must share one square dimension");
  return n;
}

}  // namespace detail

// diag{A_1, ..., A_L} as a dense LN x LN matrix.
inline ComplexMatrix block_diagonal(const BlockFamily& f) {
  const std::size_t n = detail::checked_block_dim(f, "block_diagonal");
  const std::size_t l = f.blocks.size();
  ComplexMatrix out(l * n, l * n);
  for (std::size_t k = 0; k < l; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(k * n + i, k * n + j) = f.blocks[k](i, j);
  return out;
}

struct BlockProducts {
  ComplexMatrix sum;          // sum_k A_k            (N x N)
  ComplexMatrix gram_form;    // [(A_j^* A_k)]_{jk}   (LN x LN)
  ComplexMatrix cogram_form;  // sum_k A_k A_k^*      (N x N)
};

// The two product forms of the block embedding: the LN x LN Gram matrix of
// the wide concatenation [A_1 ... A_L] and its N x N partner; their nonzero
// spectra coincide.
inline BlockProducts block_embed_products(const BlockFamily& f) {
  const std::size_t n = detail::checked_block_dim(f, "block_embed_products");
  const std::size_t l = f.blocks.size();
  ComplexMatrix wide(n, l * n);
  for (std::size_t k = 0; k < l; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) wide(i, k * n + j) = f.blocks[k](i, j);
  BlockProducts out{f.blocks.front(), gram(wide), gram(wide.adjoint())};
  for (std::size_t k = 1; k < l; ++k) out.sum = out.sum + f.blocks[k];
  return out;
}

// epsilon_j(m): per-diagonal vanishing perturbation, j the diagonal offset
// and m the smaller of the two indices.
using DiagonalPerturbation = std::function<double(long, std::size_t)>;

// Banded matrix with entries b_j (1 + eps_j(m)) / (log(m + m0))^gamma on the
// j-th diagonal, where m is the smaller of row and column.  Scaling by the
// smaller index keeps palindromic coefficient stencils exactly symmetric;
// relative to scaling by the row index this is a (1 + o(1)) change, inside
// the stated entry freedom.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t dim, std::size_t half_bandwidth, std::vector<complex> coefficients,
               GammaExponent gamma, std::size_t offset = 2,
               DiagonalPerturbation perturbation = {})
      : dim_(dim), half_(half_bandwidth), coeffs_(std::move(coefficients)), gamma_(gamma),
        offset_(offset) {
    if (dim_ < 1) throw std::invalid_argument("BandedMatrix: dimension >= 1 required");
    if (half_ > dim_ - 1)
      throw std::invalid_argument("BandedMatrix: half bandwidth exceeds N-1");
    if (coeffs_.size() != 2 * half_ + 1)
      throw std::invalid_argument("BandedMatrix: need 2*half_bandwidth+1 coefficients");
    if (offset_ < 2) throw std::invalid_argument("BandedMatrix: offset m0 >= 2 required");
    const std::size_t width = 2 * half_ + 1;
    band_.assign(dim_ * width, complex(0.0, 0.0));
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = (i > half_ ? i - half_ : 0); j < std::min(dim_, i + half_ + 1);
           ++j) {
        const long off = static_cast<long>(j) - static_cast<long>(i);
        const std::size_t m = std::min(i, j);
        const double w =
            std::pow(std::log(static_cast<double>(m + offset_)), -gamma_.value);
        const double eps = perturbation ? perturbation(off, m) : 0.0;
        band_[i * width + static_cast<std::size_t>(off + static_cast<long>(half_))] =
            coeffs_[static_cast<std::size_t>(off + static_cast<long>(half_))] * w *
            (1.0 + eps);
      }
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t half_bandwidth() const { return half_; }
  const std::vector<complex>& coefficients() const { return coeffs_; }
  GammaExponent gamma() const { return gamma_; }
  std::size_t offset() const { return offset_; }

  complex entry(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) throw std::out_of_range("BandedMatrix::entry");
    const long off = static_cast<long>(j) - static_cast<long>(i);
    if (off < -static_cast<long>(half_) || off > static_cast<long>(half_))
      return complex(0.0, 0.0);
    return band_[i * (2 * half_ + 1) + static_cast<std::size_t>(off + static_cast<long>(half_))];
  }

  ComplexMatrix to_dense() const {
    ComplexMatrix a(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = (i > half_ ? i - half_ : 0); j < std::min(dim_, i + half_ + 1);
           ++j)
        a(i, j) = entry(i, j);
    return a;
  }

  // Extracts (d, e) when the matrix is exactly real symmetric tridiagonal,
  // the shape the Sturm kernel wants for large-N runs.
  bool tridiagonal_real(std::vector<double>& d, std::vector<double>& e) const {
    if (half_ > 1) return false;
    d.assign(dim_, 0.0);
    e.assign(dim_ > 0 ? dim_ - 1 : 0, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
      const complex di = entry(i, i);
      if (di.imag() != 0.0) return false;
      d[i] = di.real();
      if (i + 1 < dim_) {
        const complex up = entry(i, i + 1);
        const complex dn = entry(i + 1, i);
        if (up.imag() != 0.0 || dn != up) return false;
        e[i] = up.real();
      }
    }
    return true;
  }

 private:
  std::size_t dim_, half_;
  std::vector<complex> coeffs_;
  GammaExponent gamma_;
  std::size_t offset_;
  std::vector<complex> band_;
};

inline BandedMatrix assemble_banded(std::size_t dim, std::size_t half_bandwidth,
                                    const std::vector<complex>& coefficients,
                                    GammaExponent gamma, std::size_t offset = 2,
                                    DiagonalPerturbation perturbation = {}) {
  return BandedMatrix(dim, half_bandwidth, coefficients, gamma, offset,
                      std::move(perturbation));
}

// D - P_N T_phi P_N where phi pairs the band stencil's trigonometric symbol
// with the standard radial factor at the same gamma.
inline ComplexMatrix banded_minus_toeplitz(const BandedMatrix& banded,
                                           const AssemblyOptions& opts = {}) {
  const SeparableSymbol sym(AngularFactor(TrigPolynomial(banded.coefficients())),
                            banded.gamma());
  const ToeplitzTruncation t = assemble_toeplitz(sym, banded.dim(), opts);
  return banded.to_dense() - t.entries;
}

}  // namespace toeplab
