// Matrix assembly: entry formula against quadrature and Monte Carlo oracles,
// structural invariants, arc families, block embeddings, banded matrices.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "toeplab/assembly.hpp"
#include "toeplab/spectra.hpp"

using namespace toeplab;

namespace {

// Monte Carlo mean of phi(z) e_n(z) conj(e_m(z)) over the uniform unit disk;
// equals the (m, n) matrix entry.  Returns (mean, sigma_of_mean).
std::pair<complex, double> mc_entry(const SeparableSymbol& sym, std::size_t m, std::size_t n,
                                    std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double amp = std::sqrt((static_cast<double>(n) + 1.0) * (static_cast<double>(m) + 1.0));
  complex acc(0.0, 0.0);
  double acc2 = 0.0;
  for (std::size_t it = 0; it < samples; ++it) {
    const double r = std::sqrt(unif(rng));
    const double t = two_pi * unif(rng);
    const double radial = amp * std::pow(r, static_cast<double>(n + m));
    const complex v = eval_symbol(sym, r, t) * radial *
                      std::polar(1.0, (static_cast<double>(n) - static_cast<double>(m)) * t);
    acc += v;
    acc2 += std::norm(v);
  }
  const complex mean = acc / static_cast<double>(samples);
  const double var = std::max(0.0, acc2 / static_cast<double>(samples) - std::norm(mean));
  return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace

TEST_CASE("gamma zero radial symbol assembles to the identity") {
  const SeparableSymbol sym(AngularFactor(ConstantAngular{complex(1.0, 0.0)}),
                            GammaExponent(0.0));
  const ToeplitzTruncation t = assemble_toeplitz(sym, 8);
  CHECK(t.dim == 8);
  CHECK(t.hermitian);
  const ComplexMatrix diff = t.entries - ComplexMatrix::identity(8);
  CHECK(diff.max_abs() < 1e-12);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      if (i != j) CHECK(t.entries(i, j) == complex(0.0, 0.0));
}

TEST_CASE("radial diagonal matches the per-entry quadrature") {
  const GammaExponent gamma(1.0);
  const SeparableSymbol sym(AngularFactor(ConstantAngular{complex(1.0, 0.0)}), gamma);
  const ToeplitzTruncation t = assemble_toeplitz(sym, 4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(t.entries(i, i).real() == Catch::Approx(diag_entry(i, gamma)).epsilon(1e-14));

  // Scaled constant angular factor multiplies the diagonal.
  const SeparableSymbol scaled(AngularFactor(ConstantAngular{complex(2.5, 0.0)}), gamma);
  const ToeplitzTruncation ts = assemble_toeplitz(scaled, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(ts.entries(i, i).real() ==
          Catch::Approx(2.5 * diag_entry(i, gamma)).epsilon(1e-13));
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) CHECK(ts.entries(i, j) == complex(0.0, 0.0));
  }
}

TEST_CASE("one-sided trig factor fills exactly one subdiagonal") {
  // phi1 = e^{i theta}: coefficient vector (b_{-1}, b_0, b_1) = (0, 0, 1).
  const SeparableSymbol sym(
      AngularFactor(TrigPolynomial({0.0, 0.0, 1.0})), GammaExponent(1.0));
  const std::size_t n = 6;
  const ToeplitzTruncation t = assemble_toeplitz(sym, n);
  CHECK_FALSE(t.hermitian);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j + 1) {
        const double want = 2.0 *
                            std::sqrt((static_cast<double>(j) + 1.0) *
                                      (static_cast<double>(j) + 2.0)) *
                            moment_quadrature(2 * j + 2, GammaExponent(1.0)).value;
        CHECK(t.entries(i, j).real() == Catch::Approx(want).epsilon(1e-13));
        CHECK(t.entries(i, j).imag() == 0.0);
      } else {
        CHECK(t.entries(i, j) == complex(0.0, 0.0));
      }
    }
}

TEST_CASE("entries agree with the Monte Carlo disk integral") {
  const SeparableSymbol shift(
      AngularFactor(TrigPolynomial({0.0, 0.0, 1.0})), GammaExponent(1.0));
  const ToeplitzTruncation t = assemble_toeplitz(shift, 4);
  {
    const auto [mean, sigma] = mc_entry(shift, 3, 2, 2000000, 99173u);
    CHECK(std::abs(t.entries(3, 2) - mean) < 4.0 * sigma + 1e-12);
    CHECK(sigma < 0.01);
  }
  const SeparableSymbol radial(AngularFactor(ConstantAngular{complex(1.0, 0.0)}),
                               GammaExponent(1.0));
  const ToeplitzTruncation tr = assemble_toeplitz(radial, 4);
  {
    const auto [mean, sigma] = mc_entry(radial, 2, 2, 2000000, 40995u);
    CHECK(std::abs(tr.entries(2, 2) - mean) < 4.0 * sigma + 1e-12);
  }
}

TEST_CASE("real angular factors give Hermitian truncations") {
  const StepFunction two_step({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(0.5, 0.0)});
  const SeparableSymbol sym(AngularFactor(two_step), GammaExponent(1.0));
  const ToeplitzTruncation t = assemble_toeplitz(sym, 32);
  CHECK(t.hermitian);
  CHECK(t.entries.hermitian_defect() <= 1e-12);

  const SeparableSymbol skew(
      AngularFactor(TrigPolynomial({complex(0.0, 0.5), 1.0, complex(0.0, 0.5)})),
      GammaExponent(1.0));
  CHECK_FALSE(assemble_toeplitz(skew, 8).hermitian);
}

TEST_CASE("truncations nest exactly") {
  const StepFunction two_step({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(0.5, 0.0)});
  const SeparableSymbol sym(AngularFactor(two_step), GammaExponent(1.0));
  const ToeplitzTruncation small = assemble_toeplitz(sym, 24);
  const ToeplitzTruncation big = assemble_toeplitz(sym, 48);
  for (std::size_t i = 0; i < 24; ++i)
    for (std::size_t j = 0; j < 24; ++j)
      CHECK(big.entries(i, j) == small.entries(i, j));
}

TEST_CASE("sampled angular factors require a 4N grid") {
  std::vector<complex> samples(64);
  for (std::size_t k = 0; k < 64; ++k)
    samples[k] = 2.0 + std::cos(two_pi * static_cast<double>(k) / 64.0);
  const SeparableSymbol sym(AngularFactor(SampledContinuous(samples)), GammaExponent(1.0));
  CHECK_NOTHROW(assemble_toeplitz(sym, 16));
  CHECK_THROWS_AS(assemble_toeplitz(sym, 17), std::invalid_argument);
}

TEST_CASE("arc family sums to the radial operator") {
  const GammaExponent gamma(1.0);
  const std::vector<ToeplitzTruncation> fam = assemble_arc_family(4, gamma, 64);
  REQUIRE(fam.size() == 4);
  const SeparableSymbol radial(AngularFactor(ConstantAngular{complex(1.0, 0.0)}), gamma);
  const ToeplitzTruncation whole = assemble_toeplitz(radial, 64);
  ComplexMatrix sum = fam[0].entries;
  for (std::size_t j = 1; j < 4; ++j) sum = sum + fam[j].entries;
  CHECK((sum - whole.entries).max_abs() < 1e-10);

  // Single-arc family is the radial operator itself.
  const std::vector<ToeplitzTruncation> single = assemble_arc_family(1, gamma, 16);
  const ToeplitzTruncation whole16 = assemble_toeplitz(radial, 16);
  CHECK((single[0].entries - whole16.entries).max_abs() == 0.0);
}

TEST_CASE("arc blocks are rotations of each other") {
  const GammaExponent gamma(1.0);
  const std::size_t n = 16, arcs = 3;
  const std::vector<ToeplitzTruncation> fam = assemble_arc_family(arcs, gamma, n);

  // Entrywise: T_j(m, c) = T_1(m, c) e^{-i 2 pi (j-1)(m-c)/L}.
  for (std::size_t j = 2; j <= arcs; ++j)
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t c = 0; c < n; ++c) {
        const double ang = -two_pi * static_cast<double>(j - 1) *
                           (static_cast<double>(m) - static_cast<double>(c)) /
                           static_cast<double>(arcs);
        const complex want = fam[0].entries(m, c) * std::polar(1.0, ang);
        CHECK(std::abs(fam[j - 1].entries(m, c) - want) < 1e-12);
      }

  // Spectral consequence at a larger size: singular values coincide.
  const std::vector<ToeplitzTruncation> fam4 = assemble_arc_family(4, gamma, 64);
  const SingularSpectrum ref = singular_values(fam4[0].entries);
  for (std::size_t j = 1; j < 4; ++j) {
    const SingularSpectrum sj = singular_values(fam4[j].entries);
    for (std::size_t i = 0; i < 64; ++i)
      CHECK(sj.values[i] == Catch::Approx(ref.values[i]).margin(1e-8));
  }
}

TEST_CASE("block embedding product forms share their nonzero spectra") {
  BlockFamily fam;
  fam.blocks.push_back(ComplexMatrix::identity(2));
  fam.blocks.push_back(ComplexMatrix::identity(2));
  const BlockProducts p = block_embed_products(fam);
  CHECK((p.cogram_form - complex(2.0, 0.0) * ComplexMatrix::identity(2)).max_abs() < 1e-14);
  CHECK(p.gram_form.rows() == 4);

  std::mt19937_64 rng(55021u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BlockFamily rnd;
  for (int k = 0; k < 3; ++k) {
    ComplexMatrix b(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) b(i, j) = complex(u(rng), u(rng));
    rnd.blocks.push_back(std::move(b));
  }
  const BlockProducts q = block_embed_products(rnd);
  const std::vector<double> big = hermitian_eigenvalues(q.gram_form);     // 9 values
  const std::vector<double> small = hermitian_eigenvalues(q.cogram_form); // 3 values
  // Descending: top three of the 9x9 form are the 3x3 spectrum; rest vanish.
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(big[8 - i] == Catch::Approx(small[2 - i]).margin(1e-10));
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::fabs(big[i]) < 1e-10);

  // Block-diagonal counting is additive.
  const ComplexMatrix bd = block_diagonal(rnd);
  const SingularSpectrum sbd = singular_values(bd);
  for (double s : {0.5, 1.3}) {
    std::size_t parts = 0;
    for (const ComplexMatrix& b : rnd.blocks) parts += counting(singular_values(b).values, s).first;
    CHECK(counting(sbd.values, s).first == parts);
  }

  BlockFamily bad;
  bad.blocks.push_back(ComplexMatrix::identity(2));
  bad.blocks.push_back(ComplexMatrix::identity(3));
  CHECK_THROWS_AS(block_embed_products(bad), std::invalid_argument);
}

TEST_CASE("banded assembly closed forms") {
  const BandedMatrix single = assemble_banded(4, 1, {0.0, 1.0, 0.0}, GammaExponent(1.0));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(single.entry(i, i).real() ==
          Catch::Approx(1.0 / std::log(static_cast<double>(i) + 2.0)).epsilon(1e-15));
    for (std::size_t j = 0; j < 4; ++j)
      if (i != j) CHECK(single.entry(i, j) == complex(0.0, 0.0));
  }

  const BandedMatrix tri = assemble_banded(64, 1, {1.0, 2.0, 1.0}, GammaExponent(1.0));
  std::vector<double> d, e;
  REQUIRE(tri.tridiagonal_real(d, e));
  for (std::size_t i = 0; i < 64; ++i) {
    const double w = 1.0 / std::log(static_cast<double>(i) + 2.0);
    CHECK(d[i] == Catch::Approx(2.0 * w).epsilon(1e-15));
    if (i + 1 < 64) CHECK(e[i] == Catch::Approx(w).epsilon(1e-15));
  }
  CHECK(sup_norm_angular(AngularFactor(TrigPolynomial(tri.coefficients()))) ==
        Catch::Approx(4.0).epsilon(1e-10));

  CHECK_THROWS_AS(assemble_banded(4, 1, {1.0, 2.0}, GammaExponent(1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_banded(4, 1, {1.0, 2.0, 1.0}, GammaExponent(1.0), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(assemble_banded(2, 3, {1., 1., 1., 1., 1., 1., 1.}, GammaExponent(1.0)),
                  std::invalid_argument);
}

TEST_CASE("vanishing perturbations stay in the small class") {
  const GammaExponent gamma(1.0);
  const auto eps = [](long, std::size_t m) {
    return 1.0 / std::log(static_cast<double>(m) + 2.0);
  };
  const BandedMatrix plain = assemble_banded(512, 1, {1.0, 2.0, 1.0}, gamma);
  const BandedMatrix bumped = assemble_banded(512, 1, {1.0, 2.0, 1.0}, gamma, 2, eps);
  const ComplexMatrix diff = bumped.to_dense() - plain.to_dense();
  const SingularSpectrum sv = singular_values(diff);
  const std::vector<double> scaled = scaled_sequence(sv.values, gamma);
  CHECK(scaled[15] > scaled[31]);
  CHECK(scaled[31] > scaled[63]);
  CHECK(scaled[63] > scaled[127]);
  CHECK(scaled[127] / scaled[15] < 0.7);
}

TEST_CASE("banded minus toeplitz difference diagnostics") {
  // Zero stencil: both sides vanish identically.
  const ComplexMatrix zero =
      banded_minus_toeplitz(assemble_banded(8, 1, {0.0, 0.0, 0.0}, GammaExponent(1.0)));
  CHECK(zero.max_abs() == 0.0);

  // gamma = 0, single diagonal: D = I and T is the identity to quadrature
  // accuracy, so the difference is tiny.
  const ComplexMatrix near_zero =
      banded_minus_toeplitz(assemble_banded(8, 1, {0.0, 1.0, 0.0}, GammaExponent(0.0)));
  CHECK(near_zero.max_abs() < 1e-10);

  // b = (1,2,1), gamma = 1: the scaled singular values of D - T decrease
  // across [16, 128], the small-class trend.
  const ComplexMatrix diff =
      banded_minus_toeplitz(assemble_banded(512, 1, {1.0, 2.0, 1.0}, GammaExponent(1.0)));
  const SingularSpectrum sv = singular_values(diff);
  const std::vector<double> scaled = scaled_sequence(sv.values, GammaExponent(1.0));
  CHECK(scaled[15] > scaled[31]);
  CHECK(scaled[31] > scaled[63]);
  CHECK(scaled[63] > scaled[127]);
}
