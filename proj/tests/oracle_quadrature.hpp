#pragma once
// oracle_quadrature.hpp -- independent reference integrator for the tests.
//
// Deliberately disjoint from the library's adaptive engine: fixed composite
// Gauss-Legendre panels, long double arithmetic, no shared helpers.  Used to
// freeze expected moment values and to cross-check the u-substitution
// against direct r-domain integration with endpoint-graded panels.

#include <cmath>
#include <vector>

namespace oracle {

inline void gauss_legendre_ld(int n, std::vector<long double>& x,
                              std::vector<long double>& w) {
  const long double pi_ld = 3.14159265358979323846264338327950288L;
  x.assign(n, 0.0L);
  w.assign(n, 0.0L);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double z = std::cos(pi_ld * (i + 0.75L) / (n + 0.5L));
    long double pp = 0.0L;
    for (int it = 0; it < 200; ++it) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (int j = 0; j < n; ++j) {
        long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j + 1.0L) * z * p2 - j * p3) / (j + 1.0L);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      long double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs((double)(z - z1)) < 1e-19) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0L / ((1.0L - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

template <class F>
long double composite_gl_ld(F&& f, long double a, long double b, int panels,
                            int order) {
  std::vector<long double> x, w;
  gauss_legendre_ld(order, x, w);
  long double total = 0.0L;
  const long double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const long double lo = a + h * p;
    const long double c = lo + 0.5L * h;
    long double s = 0.0L;
    for (int i = 0; i < order; ++i) s += w[i] * f(c + 0.5L * h * x[i]);
    total += s * 0.5L * h;
  }
  return total;
}

// integral_0^{u_hi} (1-e^{-u})^p e^{-u} (1+u)^{-gamma} g(1-e^{-u}) du
// on a fixed uniform 5000-panel grid.
template <class G>
long double moment_u_domain(long double p, long double gamma, G&& g,
                            long double u_hi = 60.0L, int panels = 5000) {
  auto f = [&](long double u) -> long double {
    if (u <= 0.0L) return 0.0L;
    const long double r = -std::expm1(-u);
    long double t = -u;
    if (p > 0.0L) t += p * std::log1p(-std::exp(-u));
    long double v = std::exp(t);
    if (gamma != 0.0L) v *= std::pow(1.0L + u, -gamma);
    return v * g(r);
  };
  return composite_gl_ld(f, 0.0L, u_hi, panels, 32);
}

// integral_0^1 r^p (1 + log(1/(1-r)))^{-gamma} g(r) dr with dyadic panels
// accumulating toward r = 1, each split into 4 GL32 subpanels.
template <class G>
long double moment_r_domain(long double p, long double gamma, G&& g,
                            int levels = 60) {
  auto f = [&](long double r) -> long double {
    long double v = (p > 0.0L) ? std::exp(p * std::log(r)) : 1.0L;
    if (gamma != 0.0L) v *= std::pow(1.0L - std::log1p(-r), -gamma);
    return v * g(r);
  };
  long double total = composite_gl_ld(f, 0.0L, 0.5L, 4, 32);
  for (int k = 1; k <= levels; ++k) {
    const long double lo = 1.0L - std::pow(0.5L, (long double)k);
    const long double hi = 1.0L - std::pow(0.5L, (long double)(k + 1));
    total += composite_gl_ld(f, lo, hi, 4, 32);
  }
  return total;
}

}  // namespace oracle
