// Angular families: evaluation, sup norms, Fourier closed forms, signed
// parts, products, and arc restrictions.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "toeplab/symbol.hpp"

using namespace toeplab;

namespace {

// Brute-force sup of |phi1| on a dense grid with parabolic refinement,
// independent of the library's Newton-polish path.
double brute_sup(const AngularFactor& f, std::size_t grid = 2000000) {
  double best = 0.0;
  double tbest = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = two_pi * static_cast<double>(i) / grid;
    const double v = std::abs(eval_angular(f, t));
    if (v > best) {
      best = v;
      tbest = t;
    }
  }
  const double h = two_pi / grid;
  const double fm = std::abs(eval_angular(f, tbest - h));
  const double fp = std::abs(eval_angular(f, tbest + h));
  const double denom = fm - 2.0 * best + fp;
  if (denom < 0.0) {
    const double shift = 0.5 * h * (fm - fp) / denom;
    best = std::max(best, std::abs(eval_angular(f, tbest + shift)));
  }
  return best;
}

}  // namespace

TEST_CASE("sup norm across families") {
  CHECK(sup_norm_angular(ConstantAngular{complex(-3.0, 4.0)}) == Catch::Approx(5.0));

  const TrigPolynomial t({1.0, 2.0, 1.0});  // 2 + 2 cos theta
  CHECK(sup_norm_angular(t) == Catch::Approx(4.0).epsilon(1e-10));

  const StepFunction s({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(-2.5, 0.0)});
  CHECK(sup_norm_angular(s) == Catch::Approx(2.5));

  const TrigPolynomial fancy({complex(0.0, 0.25), 0.3, 1.0, 0.3, complex(0.0, -0.25)});
  CHECK(sup_norm_angular(fancy) ==
        Catch::Approx(brute_sup(fancy)).epsilon(1e-10));
}

TEST_CASE("fourier coefficients: closed forms") {
  // Indicator of [0, pi): hat(1) = -i/pi, hat(0) = 1/2.
  const StepFunction ind({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(0.0, 0.0)});
  const complex c1 = fourier_coefficient(AngularFactor(ind), 1);
  CHECK(std::abs(c1 - complex(0.0, -1.0 / pi)) < 1e-14);
  CHECK(std::abs(fourier_coefficient(AngularFactor(ind), 0) - complex(0.5, 0.0)) < 1e-14);
  // Even nonzero frequencies vanish for this arc.
  CHECK(std::abs(fourier_coefficient(AngularFactor(ind), 2)) < 1e-14);

  const TrigPolynomial t({0.5, 2.0, 0.5});
  CHECK(fourier_coefficient(AngularFactor(t), 0) == complex(2.0, 0.0));
  CHECK(fourier_coefficient(AngularFactor(t), -1) == complex(0.5, 0.0));
  CHECK(fourier_coefficient(AngularFactor(t), 4) == complex(0.0, 0.0));

  CHECK(fourier_coefficient(AngularFactor(ConstantAngular{complex(3.0, 1.0)}), 0) ==
        complex(3.0, 1.0));
  CHECK(fourier_coefficient(AngularFactor(ConstantAngular{complex(3.0, 1.0)}), 2) ==
        complex(0.0, 0.0));
}

TEST_CASE("fourier coefficients: sampled FFT matches a known band") {
  // f = 2 + cos theta + 0.5 sin 3 theta sampled on 64 points.
  std::vector<complex> samples(64);
  for (std::size_t k = 0; k < 64; ++k) {
    const double t = two_pi * static_cast<double>(k) / 64.0;
    samples[k] = 2.0 + std::cos(t) + 0.5 * std::sin(3.0 * t);
  }
  const AngularFactor f{SampledContinuous(samples)};
  auto expect = [](long k) -> complex {
    if (k == 0) return complex(2.0, 0.0);
    if (k == 1 || k == -1) return complex(0.5, 0.0);
    if (k == 3) return complex(0.0, -0.25);
    if (k == -3) return complex(0.0, 0.25);
    return complex(0.0, 0.0);
  };
  for (long k = -10; k <= 10; ++k)
    CHECK(std::abs(fourier_coefficient(f, k) - expect(k)) < 1e-12);

  CHECK_THROWS_AS(fourier_coefficient(f, 32), std::domain_error);
  CHECK_THROWS_AS(fourier_coefficient(f, -32), std::domain_error);
  CHECK_NOTHROW(fourier_coefficient(f, 31));
}

TEST_CASE("coefficient bound |hat(k)| <= sup |phi1|") {
  std::mt19937_64 rng(7041u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<complex> c(5);
    for (complex& z : c) z = complex(u(rng), u(rng));
    const AngularFactor t{TrigPolynomial(c)};
    const double sup_t = sup_norm_angular(t);
    for (long k = -4; k <= 4; ++k)
      CHECK(std::abs(fourier_coefficient(t, k)) <= sup_t * (1.0 + 1e-9));

    const StepFunction s({0.0, 1.0, 2.5, two_pi},
                         {complex(u(rng), u(rng)), complex(u(rng), u(rng)),
                          complex(u(rng), u(rng))});
    const AngularFactor sf{s};
    const double sup_s = sup_norm_angular(sf);
    for (long k = -8; k <= 8; ++k)
      CHECK(std::abs(fourier_coefficient(sf, k)) <= sup_s * (1.0 + 1e-9));
  }
}

TEST_CASE("signed parts") {
  auto [p0, n0] = pos_neg_parts(AngularFactor(ConstantAngular{complex(-1.0, 0.0)}));
  CHECK(std::get<ConstantAngular>(p0).value == complex(0.0, 0.0));
  CHECK(std::get<ConstantAngular>(n0).value == complex(1.0, 0.0));

  const StepFunction s({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(-2.0, 0.0)});
  auto [ps, ns] = pos_neg_parts(AngularFactor(s));
  CHECK(sup_norm_angular(ps) == Catch::Approx(1.0));
  CHECK(sup_norm_angular(ns) == Catch::Approx(2.0));
  const auto& psv = std::get<StepFunction>(ps);
  CHECK(psv.values[0] == complex(1.0, 0.0));
  CHECK(psv.values[1] == complex(0.0, 0.0));

  // cos theta on 8 samples: positive part vanishes where cos < 0.
  std::vector<complex> cs(8);
  for (std::size_t k = 0; k < 8; ++k)
    cs[k] = std::cos(two_pi * static_cast<double>(k) / 8.0);
  auto [pc, nc] = pos_neg_parts(AngularFactor(SampledContinuous(cs)));
  const auto& pcv = std::get<SampledContinuous>(pc);
  const auto& ncv = std::get<SampledContinuous>(nc);
  for (std::size_t k = 0; k < 8; ++k) {
    const double c = std::cos(two_pi * static_cast<double>(k) / 8.0);
    CHECK(pcv.samples[k].real() == Catch::Approx(std::max(c, 0.0)).margin(1e-15));
    CHECK(ncv.samples[k].real() == Catch::Approx(std::max(-c, 0.0)).margin(1e-15));
  }

  // Trig polynomials are sampled; parts must recombine to f on the grid.
  const TrigPolynomial cosine({0.5, 0.0, 0.5});
  auto [pt, nt] = pos_neg_parts(AngularFactor(cosine), 1024);
  const auto& ptv = std::get<SampledContinuous>(pt);
  REQUIRE(ptv.samples.size() == 1024);
  for (std::size_t k = 0; k < 1024; k += 37) {
    const double t = two_pi * static_cast<double>(k) / 1024.0;
    const double f = std::cos(t);
    const double diff = std::abs(eval_angular(pt, t) - eval_angular(nt, t) - complex(f, 0.0));
    CHECK(diff < 1e-12);
  }

  CHECK_THROWS_AS(pos_neg_parts(AngularFactor(ConstantAngular{complex(1.0, 0.5)})),
                  std::domain_error);
}

TEST_CASE("symbol evaluation") {
  const SeparableSymbol sym(AngularFactor(TrigPolynomial({0.5, 2.0, 0.5})),
                            GammaExponent(1.0));
  CHECK_THROWS_AS(eval_symbol(sym, 1.0, 0.3), std::domain_error);
  CHECK_THROWS_AS(eval_symbol(sym, -0.1, 0.3), std::domain_error);

  // gamma = 0 collapses the radial factor.
  const SeparableSymbol flat(AngularFactor(TrigPolynomial({0.5, 2.0, 0.5})),
                             GammaExponent(0.0));
  CHECK(std::abs(eval_symbol(flat, 0.9, 1.3) - eval_angular(flat.angular, 1.3)) <
        1e-14);

  // |phi| <= sup|phi1| when g == 1 (phi0 <= 1).
  const double sup = sup_norm_angular(sym.angular);
  for (double r : {0.0, 0.3, 0.9, 0.999})
    for (double t : {0.0, 1.0, 3.0, 6.0})
      CHECK(std::abs(eval_symbol(sym, r, t)) <= sup * (1.0 + 1e-12));

  // Step pieces are half-open on the right.
  const StepFunction s({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(5.0, 0.0)});
  CHECK(eval_angular(AngularFactor(s), 0.0) == complex(1.0, 0.0));
  CHECK(eval_angular(AngularFactor(s), pi) == complex(5.0, 0.0));
  CHECK(eval_angular(AngularFactor(s), two_pi) == complex(1.0, 0.0));

  // Sampled evaluation interpolates linearly between grid points.
  std::vector<complex> lin = {0.0, 1.0, 2.0, 1.0};
  const AngularFactor sf{SampledContinuous(lin)};
  CHECK(std::abs(eval_angular(sf, 0.5 * (two_pi / 4.0)) - complex(0.5, 0.0)) < 1e-14);
}

TEST_CASE("arc restriction and partition completeness") {
  const SeparableSymbol radial(AngularFactor(ConstantAngular{complex(1.0, 0.0)}),
                               GammaExponent(1.0));
  // L = 1 leaves the symbol untouched.
  const SeparableSymbol same = arc_restriction(radial, ArcPartition(1, 1));
  CHECK(std::holds_alternative<ConstantAngular>(same.angular));

  // The four arc indicators resum to the constant: sum_j hat_j(k) = delta_k0.
  const std::size_t L = 4;
  for (long k : {0L, 1L, -1L, 5L, -7L}) {
    complex sum(0.0, 0.0);
    for (std::size_t j = 1; j <= L; ++j) {
      const SeparableSymbol arc = arc_restriction(radial, ArcPartition(L, j));
      sum += fourier_coefficient(arc.angular, k);
    }
    const complex want = k == 0 ? complex(1.0, 0.0) : complex(0.0, 0.0);
    CHECK(std::abs(sum - want) < 1e-10);
  }

  // Rotation covariance: hat_j(k) = hat_1(k) e^{-ik 2pi (j-1)/L}.
  for (std::size_t j = 2; j <= L; ++j) {
    const SeparableSymbol arc1 = arc_restriction(radial, ArcPartition(L, 1));
    const SeparableSymbol arcj = arc_restriction(radial, ArcPartition(L, j));
    for (long k : {1L, 2L, -3L, 9L}) {
      const complex rot =
          std::polar(1.0, -static_cast<double>(k) * two_pi *
                              static_cast<double>(j - 1) / static_cast<double>(L));
      CHECK(std::abs(fourier_coefficient(arcj.angular, k) -
                     fourier_coefficient(arc1.angular, k) * rot) < 1e-12);
    }
  }

  CHECK_THROWS_AS(ArcPartition(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(ArcPartition(4, 5), std::invalid_argument);
}

TEST_CASE("angular products") {
  const TrigPolynomial a({0.5, 2.0, 0.5});
  const TrigPolynomial b({complex(0.0, 1.0), 1.0, complex(0.0, -1.0)});
  const AngularFactor prod = angular_product(AngularFactor(a), AngularFactor(b));
  for (double t : {0.1, 1.7, 4.4})
    CHECK(std::abs(eval_angular(prod, t) -
                   eval_angular(AngularFactor(a), t) * eval_angular(AngularFactor(b), t)) <
          1e-12);

  const StepFunction s1({0.0, pi, two_pi}, {complex(1.0, 0.0), complex(0.5, 0.0)});
  const StepFunction s2({0.0, pi / 2.0, two_pi}, {complex(2.0, 0.0), complex(3.0, 0.0)});
  const AngularFactor sp = angular_product(AngularFactor(s1), AngularFactor(s2));
  for (double t : {0.2, 1.0, 2.0, 4.0, 6.0})
    CHECK(std::abs(eval_angular(sp, t) -
                   eval_angular(AngularFactor(s1), t) * eval_angular(AngularFactor(s2), t)) <
          1e-12);

  const AngularFactor scaled =
      angular_product(AngularFactor(ConstantAngular{complex(2.0, 0.0)}), AngularFactor(a));
  CHECK(std::get<TrigPolynomial>(scaled).coeff(0) == complex(4.0, 0.0));

  CHECK_THROWS_AS(angular_product(AngularFactor(a), AngularFactor(s1)),
                  std::invalid_argument);
}

TEST_CASE("construction guards") {
  CHECK_THROWS_AS(TrigPolynomial({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0, 1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0, 2.0, 1.0 + two_pi}, {complex(1.0, 0.0), complex(2.0, 0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(StepFunction({0.0, 1.0, 6.0}, {complex(1.0, 0.0), complex(2.0, 0.0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SampledContinuous({complex(1.0, 0.0), complex(2.0, 0.0)}),
                  std::invalid_argument);
  std::vector<complex> twelve(12, complex(1.0, 0.0));
  CHECK_THROWS_AS(SampledContinuous(twelve), std::invalid_argument);
}
