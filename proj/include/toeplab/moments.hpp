#pragma once
// moments.hpp -- radial moment integrals of the log-decaying weight.
//
// The workhorse quantity is
//
//     M(p) = integral_0^1 r^p * phi0_gamma(r) * g(r) dr,
//     phi0_gamma(r) = (1 + log(1/(1-r)))^{-gamma},
//
// evaluated after the substitution u = -log(1-r), r = 1 - e^{-u}:
//
//     M(p) = integral_0^inf (1-e^{-u})^p e^{-u} (1+u)^{-gamma} g(1-e^{-u}) du.
//
// The u-domain integrand is smooth with a single shoulder near u = log p,
// so bisection-adaptive Gauss-Legendre panels of fixed order 32 resolve it
// to ~1e-12 relative with a few dozen panels even for p ~ 10^6.
//
// Large-p behaviour: M(p) = g(1) / (p (log p)^gamma) * (1 + o(1)), the
// boundary-dominated first-order form offered by moment_asymptotic.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "toeplab/common.hpp"

namespace toeplab {

struct MomentResult {
  double value = 0.0;
  double error_estimate = 0.0;  // self-reported; heuristic, not a bound proof
  int panels = 0;
  bool converged = true;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton iteration
// on the Legendre recurrence.  Converges to machine precision.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

struct GL32 {
  std::vector<double> x, w;
  GL32() { gauss_legendre(32, x, w); }
};

inline const GL32& gl32_table() {
  static const GL32 t;
  return t;
}

template <class F>
double gl32(F&& f, double a, double b) {
  const GL32& t = gl32_table();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 32; ++i) s += t.w[i] * f(c + h * t.x[i]);
  return s * h;
}

struct AdaptiveResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = true;
};

// Bisection-adaptive GL32.  A panel is accepted when the coarse/fine
// discrepancy fits inside a width-proportional share of the global budget,
// which keeps the panel schedule deterministic.
template <class F>
AdaptiveResult adaptive_gl32(F&& f, double a, double b, double rel_tol,
                             int max_panels) {
  AdaptiveResult res;
  const double width = b - a;
  double scale = 0.0;
  std::array<double, 4> quarter{};
  for (int q = 0; q < 4; ++q) {
    quarter[q] = gl32(f, a + width * q / 4.0, a + width * (q + 1) / 4.0);
    scale += std::abs(quarter[q]);
  }
  res.panels = 4;
  if (scale == 0.0) scale = 1e-300;

  struct Frame {
    double a, b, coarse;
    int depth;
  };
  std::vector<Frame> stack;
  for (int q = 3; q >= 0; --q)
    stack.push_back({a + width * q / 4.0, a + width * (q + 1) / 4.0,
                     quarter[q], 0});

  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double mid = 0.5 * (fr.a + fr.b);
    const double left = gl32(f, fr.a, mid);
    const double right = gl32(f, mid, fr.b);
    res.panels += 2;
    const double fine = left + right;
    const double err = std::abs(fine - fr.coarse);
    const double share = rel_tol * scale * ((fr.b - fr.a) / width);
    if (err <= share || fr.depth >= 48) {
      res.value += fine;
      res.error += err;
      continue;
    }
    if (res.panels >= max_panels) {
      // Budget exhausted: fold in the best available estimates and flag.
      res.converged = false;
      res.value += fine;
      res.error += err;
      for (const Frame& rest : stack) {
        res.value += rest.coarse;
        res.error += std::abs(rest.coarse) * 1e-6;
      }
      stack.clear();
      continue;
    }
    stack.push_back({mid, fr.b, right, fr.depth + 1});
    stack.push_back({fr.a, mid, left, fr.depth + 1});
  }
  return res;
}

// u-domain integrand of M(p).  r and log r are formed from expm1/log1p so
// the r -> 1 endpoint keeps full precision.
struct MomentIntegrand {
  double p;
  double gamma;
  const RadialProfile* g;

  double operator()(double u) const {
    if (u <= 0.0) return 0.0;
    const double r = -std::expm1(-u);
    double t = -u;  // log(r^p e^{-u}) accumulated in log space
    if (p > 0.0) {
      const double logr = (u < 0.5) ? std::log(r) : std::log1p(-std::exp(-u));
      t += p * logr;
    }
    double v = std::exp(t);
    if (gamma != 0.0) v *= std::pow(1.0 + u, -gamma);
    if (!g->is_one()) v *= (*g)(r);
    return v;
  }
};

}  // namespace detail

// Quadrature for M(n) = integral_0^upper r^n phi0 g dr.  upper_radius < 1
// integrates a radially cut-off symbol (the compact-support diagnostics).
inline MomentResult moment_quadrature(std::uint64_t n, GammaExponent gamma,
                                      const RadialProfile& profile = RadialProfile::one(),
                                      double upper_radius = 1.0) {
  if (n >= 100000000ull)
    throw std::invalid_argument(
        "moment_quadrature: refused for n >= 1e8 (panel budget); "
        "use moment_asymptotic");
  if (!(upper_radius > 0.0) || upper_radius > 1.0)
    throw std::domain_error("moment_quadrature: upper_radius must be in (0, 1]");

  const bool full = upper_radius == 1.0;
  const double u_hi = full
      ? std::max(60.0, 40.0 + 2.0 * std::log(static_cast<double>(n) + 2.0))
      : -std::log1p(-upper_radius);

  detail::MomentIntegrand f{static_cast<double>(n), gamma.value, &profile};
  detail::AdaptiveResult ad = detail::adaptive_gl32(f, 0.0, u_hi, 1e-12, 20000);

  MomentResult res;
  res.value = ad.value;
  res.error_estimate = ad.error;
  res.panels = ad.panels;
  res.converged = ad.converged;
  if (full) {
    // Truncated tail of the u-integral; integrand <= e^{-u} out there.
    res.error_estimate += std::exp(-u_hi) *
                          std::max(1.0, std::abs(profile.limit_at_one()));
  }
  return res;
}

// First-order boundary asymptotic M(n) ~ g(1) / (n (log n)^gamma), n >= 2.
// The error heuristic is the size of the next correction term.
inline MomentResult moment_asymptotic(std::uint64_t n, GammaExponent gamma,
                                      const RadialProfile& profile = RadialProfile::one()) {
  if (n < 2)
    throw std::domain_error("moment_asymptotic: requires n >= 2");
  const double g1 = profile.limit_at_one();
  const double ln = std::log(static_cast<double>(n));
  MomentResult res;
  res.value = g1 / (static_cast<double>(n) * std::pow(ln, gamma.value));
  res.error_estimate = std::abs(g1) * gamma.value /
                       (static_cast<double>(n) * std::pow(ln, gamma.value + 1.0));
  res.converged = true;
  return res;
}

// Diagonal matrix element of the radial operator in the weighted monomial
// basis: 2 (n+1) M(2n+1).
inline double diag_entry(std::uint64_t n, GammaExponent gamma) {
  return 2.0 * (static_cast<double>(n) + 1.0) *
         moment_quadrature(2 * n + 1, gamma).value;
}

namespace detail {

// log B(a, b) for large a and modest b.  Differencing lgamma at two huge
// arguments loses ~a*eps absolutely, so for a >= 30 the difference
// lgamma(a) - lgamma(a+b) is formed from the Stirling series directly,
// with the leading cancellation removed analytically.
inline double log_beta_large_a(double a, double b) {
  if (a < 30.0) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  auto stirling_tail = [](double z) {
    const double z2 = z * z;
    return (1.0 / 12.0) / z - (1.0 / 360.0) / (z * z2) +
           (1.0 / 1260.0) / (z2 * z2 * z) - (1.0 / 1680.0) / (z2 * z2 * z2 * z);
  };
  const double c = b - (a - 0.5) * std::log1p(b / a);
  const double delta = c - b * std::log(a + b) + stirling_tail(a) - stirling_tail(a + b);
  return std::lgamma(b) + delta;
}

}  // namespace detail

// Power-weight comparison sequence: with weight (1-r)^gamma the moments are
// Beta functions, 2 (n+1) B(2n+2, gamma+1), evaluated in log space.
inline double power_weight_moment(std::uint64_t n, GammaExponent gamma) {
  const double a = 2.0 * static_cast<double>(n) + 2.0;
  const double b = gamma.value + 1.0;
  return 2.0 * (static_cast<double>(n) + 1.0) *
         std::exp(detail::log_beta_large_a(a, b));
}

// M(p) for p = 0..max_power inclusive, one quadrature per power.  Shared by
// every matrix entry with the same (gamma, profile, cutoff).
inline std::vector<double> moment_table(std::size_t max_power, GammaExponent gamma,
                                        const RadialProfile& profile = RadialProfile::one(),
                                        double upper_radius = 1.0) {
  std::vector<double> table(max_power + 1);
  for (std::size_t p = 0; p <= max_power; ++p)
    table[p] = moment_quadrature(p, gamma, profile, upper_radius).value;
  return table;
}

}  // namespace toeplab
