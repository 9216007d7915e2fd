// Property-check engine: closed-form oracles for the tuple inequality and
// the synthetic functional identities, structural oracles for cross terms,
// decay fits, and the radial envelope.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "toeplab/checks.hpp"

using namespace toeplab;

namespace {

// Independent evaluation of the tuple inequality sides for hand-checked
// values; mirrors the statement, not the implementation.
double tuple_lhs(const std::vector<double>& r, std::size_t l) {
  auto at = [&](std::size_t one_based) { return r[one_based - 1]; };
  double v = (at(1) + at(2)) * (at(l) + at(l + 1)) * (at(1) + at(l + 2)) *
             (at(2 * l) + at(l + 1));
  for (std::size_t j = 2; j + 1 <= l; ++j) v *= at(j) + at(j + 1);
  for (std::size_t j = l + 2; j + 1 <= 2 * l; ++j) v *= at(j) + at(j + 1);
  return v;
}

double tuple_rhs(std::vector<double> r) {
  std::sort(r.begin(), r.end());
  double v = r.back() * r.back();
  for (std::size_t i = 1; i + 1 < r.size(); ++i) v *= r[i];
  return v;
}

}  // namespace

TEST_CASE("tuple inequality closed forms and sampling") {
  CHECK(tuple_lhs({1, 1, 1, 1}, 2) == 16.0);
  CHECK(tuple_rhs({1, 1, 1, 1}) == 1.0);
  CHECK(tuple_lhs({2, 1, 1, 1}, 2) == 36.0);
  CHECK(tuple_rhs({2, 1, 1, 1}) == 4.0);

  // Near-degenerate tuple: one large radius, the rest tiny.
  const std::vector<double> spike = {1.0, 1e-6, 1e-6, 1e-6};
  CHECK(tuple_lhs(spike, 2) >= tuple_rhs(spike));
  CHECK(tuple_lhs(spike, 2) / tuple_rhs(spike) == Catch::Approx(4.0).epsilon(0.01));

  for (std::size_t l : {2u, 3u, 4u, 5u}) {
    const CheckReport rep = check_lemma44(l, 100000, 1234 + l);
    CHECK(rep.pass);
    CHECK(rep.metric("violations") == 0.0);
    CHECK(rep.metric("min_ratio") >= 1.0);
  }
  CHECK_THROWS_AS(check_lemma44(1, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(check_lemma44(6, 10, 1), std::invalid_argument);
}

TEST_CASE("subadditivity check on synthetic spectra") {
  const GammaExponent one(1.0);
  const std::vector<double> a = log_decay_sequence(100000, 1.0, one);

  // Zero perturbation collapses to equality.
  const std::vector<double> zero(a.size(), 0.0);
  const CheckReport trivial = check_p1_subadditivity(a, zero, one);
  CHECK(trivial.pass);
  CHECK(trivial.metric("Delta_b") == 0.0);
  CHECK(trivial.metric("lhs") == Catch::Approx(trivial.metric("rhs")).epsilon(1e-14));

  // Doubling: Delta(2A) = 2^{1/gamma} Delta(A), inequality strictly slack.
  const CheckReport doubled = check_p1_subadditivity(a, a, one, 7);
  CHECK(doubled.pass);
  CHECK(doubled.metric("Delta_sum") ==
        Catch::Approx(2.0 * doubled.metric("Delta_a")).epsilon(0.07));
  CHECK(doubled.metric("lhs") < doubled.metric("rhs"));
  CHECK(doubled.metric("unitary_defect") <= 1e-9 * 2.0 * a.front());

  // Generic pair, gamma = 2.
  const GammaExponent two(2.0);
  const CheckReport generic = check_p1_subadditivity(
      log_decay_sequence(100000, 1.3, two), log_decay_sequence(100000, 0.6, two), two);
  CHECK(generic.pass);

  std::vector<double> rising = {1.0, 2.0};
  CHECK_THROWS_AS(check_p1_subadditivity(rising, rising, one), std::invalid_argument);
}

TEST_CASE("perturbation stability check") {
  const GammaExponent one(1.0);
  const std::vector<double> a = log_decay_sequence(100000, 1.0, one);

  const CheckReport trivial = check_p2_kyfan(a, std::vector<double>(a.size(), 0.0), one);
  CHECK(trivial.pass);
  CHECK(trivial.metric("dev_upper") == 0.0);
  CHECK(trivial.metric("dev_lower") == 0.0);

  const CheckReport expo = check_p2_kyfan(a, exponential_sequence(a.size()), one);
  CHECK(expo.pass);
  CHECK(expo.metric("Delta_sum") == Catch::Approx(expo.metric("Delta_a")).epsilon(0.10));

  const CheckReport spike = check_p2_kyfan(a, finite_rank_sequence(3, 3, 10.0), one);
  CHECK(spike.pass);

  CHECK_THROWS_AS(check_p2_kyfan(finite_rank_sequence(8, 2, 1.0), a, one),
                  std::invalid_argument);
}

TEST_CASE("product class check") {
  const GammaExponent one(1.0);
  const std::vector<double> a = log_decay_sequence(100000, 1.0, one);

  // Squaring: the doubled-exponent functional of A^2 returns Delta(A).
  const CheckReport square = check_p3_products(a, a, one);
  CHECK(square.pass);
  CHECK(square.metric("Delta2_prod") ==
        Catch::Approx(square.metric("Delta_a")).epsilon(0.10));
  CHECK(square.metric("vanishing_factor") == 0.0);

  const CheckReport scaled = check_p3_products(a, std::vector<double>(a.size(), 0.01), one);
  CHECK(scaled.pass);

  const CheckReport expo = check_p3_products(a, exponential_sequence(a.size()), one);
  CHECK(expo.pass);
  CHECK(expo.metric("vanishing_factor") == 1.0);
  // The limit is 0; the finite window reads off at most ~sqrt(s_8) log n(s_8).
  CHECK(expo.metric("Delta2_prod") < 0.15);
  CHECK(expo.metric("Delta2_prod") < 0.15 * (expo.metric("Delta_a") + expo.metric("Delta_b")));
}

TEST_CASE("block embedding check over random families") {
  std::mt19937_64 rng(90125u);
  std::normal_distribution<double> g(0.0, 1.0);

  BlockFamily twin;
  twin.blocks.push_back(ComplexMatrix::identity(2));
  twin.blocks.push_back(ComplexMatrix::identity(2));
  const CheckReport id2 = check_p4_blocks(twin);
  CHECK(id2.pass);
  CHECK(id2.metric("dev_sum_form") == 0.0);
  CHECK(id2.metric("count_mismatch") == 0.0);

  // Coordinate projections have exactly orthogonal ranges.
  BlockFamily proj;
  for (std::size_t k = 0; k < 3; ++k) {
    ComplexMatrix e(3, 3);
    e(k, k) = complex(1.0, 0.0);
    proj.blocks.push_back(std::move(e));
  }
  const CheckReport orth = check_p4_blocks(proj);
  CHECK(orth.pass);
  CHECK(orth.metric("dev_gram_blocks") == 0.0);

  std::uniform_int_distribution<std::size_t> pick_l(2, 4), pick_d(2, 5);
  for (int fam = 0; fam < 100; ++fam) {
    const std::size_t L = pick_l(rng), d = pick_d(rng);
    BlockFamily f;
    for (std::size_t k = 0; k < L; ++k) {
      ComplexMatrix b(d, d);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) b(i, j) = complex(g(rng), g(rng));
      f.blocks.push_back(std::move(b));
    }
    const CheckReport rep = check_p4_blocks(f);
    INFO("family " << fam << " L=" << L << " d=" << d);
    REQUIRE(rep.pass);
  }

  BlockFamily bad;
  bad.blocks.push_back(ComplexMatrix::identity(2));
  bad.blocks.push_back(ComplexMatrix::identity(3));
  CHECK_THROWS_AS(check_p4_blocks(bad), std::invalid_argument);
}

TEST_CASE("singular value product inequalities hold on random pairs") {
  const CheckReport rep = check_weyl(16, 100, 777u);
  CHECK(rep.pass);
  CHECK(rep.metric("violations_norm") == 0.0);
  CHECK(rep.metric("violations_count") == 0.0);
  CHECK_THROWS_AS(check_weyl(1, 10, 1), std::invalid_argument);
}

TEST_CASE("cross term products are conjugate symmetric") {
  const GammaExponent one(1.0);
  const std::vector<ToeplitzTruncation> fam = assemble_arc_family(3, one, 64);
  const ComplexMatrix ab = multiply(fam[1].entries.adjoint(), fam[0].entries);
  const ComplexMatrix ba = multiply(fam[0].entries.adjoint(), fam[1].entries);
  const SingularSpectrum sab = singular_values(ab);
  const SingularSpectrum sba = singular_values(ba);
  for (std::size_t i = 0; i < 64; ++i)
    CHECK(sab.values[i] == Catch::Approx(sba.values[i]).margin(1e-10));
}

TEST_CASE("cross term diagnostic structure") {
  CHECK_THROWS_AS(cross_term_diagnostic(2, GammaExponent(1.0), 256), std::invalid_argument);
  CHECK_THROWS_AS(cross_term_diagnostic(4, GammaExponent(1.0), 128), std::invalid_argument);
  CHECK_THROWS_AS(cross_term_diagnostic(4, GammaExponent(1.0), 2048), std::runtime_error);

  const CrossTermReport rep = cross_term_diagnostic(4, GammaExponent(1.0), 256);
  CHECK(rep.pairs.size() == 10);
  CHECK(rep.window_lo == 16);
  CHECK(rep.window_hi == 32);

  // Rotation covariance forces equal Hilbert-Schmidt norms per cyclic gap.
  const double hs_adj = rep.pair(1, 2).hs_norm;
  for (auto [j, k] : {std::pair<std::size_t, std::size_t>{2, 3}, {3, 4}, {1, 4}}) {
    CHECK(rep.pair(j, k).gap == 1);
    CHECK(rep.pair(j, k).hs_norm == Catch::Approx(hs_adj).epsilon(1e-9));
  }
  CHECK(rep.pair(1, 3).gap == 2);
  CHECK(rep.pair(2, 4).hs_norm == Catch::Approx(rep.pair(1, 3).hs_norm).epsilon(1e-9));

  // Distant pairs carry the doubled-truncation norm; others do not.
  CHECK(std::isfinite(rep.pair(1, 3).hs_rel_change));
  CHECK(std::isfinite(rep.pair(2, 4).hs_norm_refined));
  CHECK_FALSE(std::isfinite(rep.pair(1, 2).hs_rel_change));
  CHECK_FALSE(std::isfinite(rep.pair(1, 1).hs_norm_refined));

  // Scaled windows: the self product is the non-vanishing control, adjacent
  // products drift down.
  const std::vector<double>& self_win = rep.pair(2, 2).scaled_window;
  REQUIRE(self_win.size() == 17);
  CHECK(self_win.back() > 0.3 * self_win.front());
  const std::vector<double>& adj_win = rep.pair(1, 2).scaled_window;
  CHECK(adj_win.back() <= 1.05 * adj_win.front());

  // Symmetric lookup returns the canonical pair.
  CHECK(&rep.pair(3, 1) == &rep.pair(1, 3));
  CHECK_THROWS_AS(rep.pair(1, 5), std::out_of_range);
}

TEST_CASE("compactly supported symbols decay exponentially") {
  const CheckReport rep = check_compact_support_decay(0.5, 128);
  INFO("slope " << rep.metric("slope") << " predicted " << rep.metric("predicted_slope")
                << " ratio " << rep.metric("slope_ratio") << " r2 " << rep.metric("r2"));
  CHECK(rep.pass);
  CHECK(rep.metric("slope_ratio") == Catch::Approx(1.0).margin(0.10));
  CHECK(rep.metric("control_rejected") == 1.0);

  // Shallow cutoff: still exponential, much flatter.
  const CheckReport shallow = check_compact_support_decay(0.05, 128);
  CHECK(shallow.metric("slope") < 0.0);
  CHECK(shallow.metric("slope") > rep.metric("slope"));

  // Restricting the angular support steepens the decay; the support bound
  // stays valid one-sided.
  const CheckReport quarter = check_compact_support_decay(0.5, 128, 4);
  CHECK(quarter.pass);
  CHECK(quarter.metric("slope_ratio") > 1.2);

  CHECK_THROWS_AS(check_compact_support_decay(0.6, 128), std::invalid_argument);
  CHECK_THROWS_AS(check_compact_support_decay(0.5, 16), std::invalid_argument);
}

TEST_CASE("radial envelope bound") {
  const GammaExponent one(1.0);

  // On the real slice the envelope is the weight itself.
  for (double r : {0.1, 0.3, 0.6}) {
    for (double gv : {0.5, 1.0, 2.0}) {
      const GammaExponent g(gv);
      CHECK(radial_weight(1.0 - r, g) == Catch::Approx(psi0(r, g)).epsilon(1e-12));
    }
  }

  // Off the real axis the modulus recedes from the boundary: strict bound.
  {
    const double r = 0.3;
    const complex z = complex(1.0, 0.0) - std::polar(r, pi / 4.0);
    CHECK(radial_weight(std::abs(z), one) < psi0(r, one));
  }

  for (double gv : {0.5, 1.0, 2.0}) {
    const CheckReport rep = check_psi0_bound(GammaExponent(gv), 10000, 4242u);
    CHECK(rep.pass);
    CHECK(rep.metric("violations") == 0.0);
    CHECK(rep.metric("max_ratio") <= 1.0 + 1e-12);
  }

  // The literal published envelope is negative beyond 1/e and fails.
  CHECK(psi0(0.5, one, Psi0Form::reciprocal_log) ==
        Catch::Approx(-2.2589).epsilon(1e-4));
  const CheckReport printed =
      check_psi0_bound(one, 10000, 4242u, 0.45, Psi0Form::reciprocal_log);
  CHECK_FALSE(printed.pass);
  CHECK(printed.metric("violations") > 0.0);

  CHECK_THROWS_AS(psi0(0.0, one), std::domain_error);
  CHECK_THROWS_AS(psi0(1.0, one), std::domain_error);
}

TEST_CASE("synthetic sequence factories") {
  const GammaExponent one(1.0);
  CHECK(log_decay_sequence(5, 2.0, one)[0] == Catch::Approx(2.0 / std::log(2.0)).epsilon(1e-15));
  CHECK(exponential_sequence(3)[2] == 0.125);
  const std::vector<double> fr = finite_rank_sequence(5, 2, 3.0);
  CHECK(fr == std::vector<double>{3.0, 3.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(log_decay_sequence(0, 1.0, one), std::invalid_argument);
  CHECK_THROWS_AS(exponential_sequence(3, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(finite_rank_sequence(2, 3, 1.0), std::invalid_argument);

  CheckReport rep;
  rep.set("x", 1.0);
  CHECK(rep.metric("x") == 1.0);
  CHECK_THROWS_AS(rep.metric("y"), std::out_of_range);
}
