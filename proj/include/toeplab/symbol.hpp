#pragma once
// symbol.hpp -- separable symbols phi(z) = phi1(e^{i theta}) phi0_gamma(r) g(r).
//
// The angular factor phi1 comes in four closed families.  Fourier
// coefficients use the convention
//
//     phi1_hat(k) = (1/2pi) integral_0^{2pi} phi1(e^{i theta}) e^{-ik theta} d theta,
//
// with exact formulas per family (FFT for the sampled family, valid for
// |k| < M/2 only).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "toeplab/common.hpp"

namespace toeplab {

struct ConstantAngular {
  complex value;
};

// Sum of b_j e^{i j theta}, j = -degree..degree; coefficients stored low to
// high, size 2*degree + 1.
struct TrigPolynomial {
  std::vector<complex> coefficients;

  explicit TrigPolynomial(std::vector<complex> c) : coefficients(std::move(c)) {
    if (coefficients.empty() || coefficients.size() % 2 == 0)
      throw std::invalid_argument(
          "TrigPolynomial: coefficient count must be odd (b_{-d}..b_d)");
  }
  int degree() const { return (static_cast<int>(coefficients.size()) - 1) / 2; }
  complex coeff(int j) const {
    const int d = degree();
    if (j < -d || j > d) return complex(0.0, 0.0);
    return coefficients[static_cast<std::size_t>(j + d)];
  }
};

// Piecewise constant on [theta_0, theta_0 + 2pi): value j on
// [breakpoints[j], breakpoints[j+1]).  Breakpoints strictly increase and
// span exactly one period.
struct StepFunction {
  std::vector<double> breakpoints;
  std::vector<complex> values;

  StepFunction(std::vector<double> bp, std::vector<complex> vals)
      : breakpoints(std::move(bp)), values(std::move(vals)) {
    if (values.empty() || breakpoints.size() != values.size() + 1)
      throw std::invalid_argument("StepFunction: need L+1 breakpoints for L values");
    for (std::size_t j = 0; j + 1 < breakpoints.size(); ++j)
      if (!(breakpoints[j] < breakpoints[j + 1]))
        throw std::invalid_argument("StepFunction: breakpoints must strictly increase");
    const double span = breakpoints.back() - breakpoints.front();
    if (std::abs(span - two_pi) > 1e-12)
      throw std::invalid_argument("StepFunction: breakpoints must span 2pi");
  }
};

// Uniform samples y_k = phi1(e^{2pi i k/M}), M a power of two, M >= 4.
// Evaluation interpolates linearly on the circle.
struct SampledContinuous {
  std::vector<complex> samples;

  explicit SampledContinuous(std::vector<complex> s) : samples(std::move(s)) {
    const std::size_t m = samples.size();
    if (m < 4 || (m & (m - 1)) != 0)
      throw std::invalid_argument(
          "SampledContinuous: sample count must be a power of two >= 4");
  }
};

using AngularFactor =
    std::variant<ConstantAngular, TrigPolynomial, StepFunction, SampledContinuous>;

// Arc j (1-based) of the uniform L-partition of the circle:
// I_j = [2pi (j-1)/L, 2pi j/L).
struct ArcPartition {
  std::size_t count;
  std::size_t index;

  ArcPartition(std::size_t L, std::size_t j) : count(L), index(j) {
    if (L < 1 || j < 1 || j > L)
      throw std::invalid_argument("ArcPartition: need 1 <= j <= L");
  }
};

struct SeparableSymbol {
  AngularFactor angular;
  GammaExponent gamma;
  RadialProfile profile;

  SeparableSymbol(AngularFactor a, GammaExponent g,
                  RadialProfile p = RadialProfile::one())
      : angular(std::move(a)), gamma(g), profile(std::move(p)) {}
};

namespace detail {

inline double reduce_angle(double theta, double origin) {
  double t = std::fmod(theta - origin, two_pi);
  if (t < 0.0) t += two_pi;
  return origin + t;
}

// In-place radix-2 decimation-in-time FFT, X_k = sum_m x_m e^{-2pi i km/M}.
inline void fft_pow2(std::vector<complex>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -two_pi / static_cast<double>(len);
    const complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const complex u = a[i + j];
        const complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

}  // namespace detail

inline complex eval_angular(const AngularFactor& f, double theta) {
  return std::visit(
      [theta](const auto& g) -> complex {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) {
          return g.value;
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          complex s(0.0, 0.0);
          const int d = g.degree();
          for (int j = -d; j <= d; ++j)
            s += g.coeff(j) * std::polar(1.0, j * theta);
          return s;
        } else if constexpr (std::is_same_v<T, StepFunction>) {
          const double t = detail::reduce_angle(theta, g.breakpoints.front());
          auto it = std::upper_bound(g.breakpoints.begin(), g.breakpoints.end(), t);
          std::size_t j = static_cast<std::size_t>(it - g.breakpoints.begin());
          if (j == 0) j = 1;
          if (j > g.values.size()) j = g.values.size();
          return g.values[j - 1];
        } else {
          const std::size_t m = g.samples.size();
          double t = detail::reduce_angle(theta, 0.0) / (two_pi / m);
          std::size_t k = static_cast<std::size_t>(t);
          if (k >= m) k = m - 1;
          const double frac = t - static_cast<double>(k);
          return (1.0 - frac) * g.samples[k] + frac * g.samples[(k + 1) % m];
        }
      },
      f);
}

inline complex eval_symbol(const SeparableSymbol& sym, double r, double theta) {
  if (!(r >= 0.0) || r >= 1.0)
    throw std::domain_error("eval_symbol: r must lie in [0, 1)");
  return eval_angular(sym.angular, theta) * radial_weight(r, sym.gamma) *
         sym.profile(r);
}

// Essential sup of |phi1| on the circle.  Exact for the discrete families;
// for trigonometric polynomials a dense grid is refined by one Newton step
// on the derivative of |f|^2 at each grid-local maximum.
inline double sup_norm_angular(const AngularFactor& f) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) {
          return std::abs(g.value);
        } else if constexpr (std::is_same_v<T, StepFunction>) {
          double m = 0.0;
          for (const complex& v : g.values) m = std::max(m, std::abs(v));
          return m;
        } else if constexpr (std::is_same_v<T, SampledContinuous>) {
          double m = 0.0;
          for (const complex& v : g.samples) m = std::max(m, std::abs(v));
          return m;
        } else {
          const int d = g.degree();
          const std::size_t grid = 4096u * static_cast<std::size_t>(2 * d + 1);
          auto fval = [&g, d](double t) {
            complex s(0.0, 0.0), s1(0.0, 0.0), s2(0.0, 0.0);
            for (int j = -d; j <= d; ++j) {
              const complex e = g.coeff(j) * std::polar(1.0, j * t);
              s += e;
              s1 += complex(0.0, j) * e;
              s2 += -static_cast<double>(j) * static_cast<double>(j) * e;
            }
            struct R { complex f, f1, f2; };
            return R{s, s1, s2};
          };
          std::vector<double> h(grid);
          for (std::size_t i = 0; i < grid; ++i) {
            const auto r = fval(two_pi * static_cast<double>(i) / grid);
            h[i] = std::norm(r.f);
          }
          double best = 0.0;
          for (std::size_t i = 0; i < grid; ++i) {
            const double prev = h[(i + grid - 1) % grid];
            const double next = h[(i + 1) % grid];
            if (h[i] < prev || h[i] < next) continue;
            double t = two_pi * static_cast<double>(i) / grid;
            const auto r = fval(t);
            // One Newton step on d|f|^2/dtheta.
            const double h1 = 2.0 * std::real(r.f1 * std::conj(r.f));
            const double h2 =
                2.0 * std::real(r.f2 * std::conj(r.f)) + 2.0 * std::norm(r.f1);
            if (h2 < 0.0) {
              const double t2 = t - h1 / h2;
              best = std::max(best, std::abs(fval(t2).f));
            }
            best = std::max(best, std::sqrt(h[i]));
          }
          return best;
        }
      },
      f);
}

inline complex fourier_coefficient(const AngularFactor& f, long k);

// All coefficients for |k| <= kmax in one pass, indexed k + kmax.
inline std::vector<complex> fourier_coefficients(const AngularFactor& f, long kmax) {
  if (kmax < 0) throw std::invalid_argument("fourier_coefficients: kmax < 0");
  return std::visit(
      [kmax, &f](const auto& g) -> std::vector<complex> {
        using T = std::decay_t<decltype(g)>;
        std::vector<complex> out(static_cast<std::size_t>(2 * kmax + 1));
        if constexpr (std::is_same_v<T, SampledContinuous>) {
          const long m = static_cast<long>(g.samples.size());
          if (kmax >= m / 2)
            throw std::domain_error(
                "fourier_coefficients: |k| >= M/2 is not resolved by M samples");
          std::vector<complex> x = g.samples;
          detail::fft_pow2(x);
          for (long k = -kmax; k <= kmax; ++k) {
            const long idx = k >= 0 ? k : m + k;
            out[static_cast<std::size_t>(k + kmax)] =
                x[static_cast<std::size_t>(idx)] / static_cast<double>(m);
          }
        } else {
          for (long k = -kmax; k <= kmax; ++k)
            out[static_cast<std::size_t>(k + kmax)] = fourier_coefficient(f, k);
        }
        return out;
      },
      f);
}

inline complex fourier_coefficient(const AngularFactor& f, long k) {
  return std::visit(
      [k, &f](const auto& g) -> complex {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) {
          return k == 0 ? g.value : complex(0.0, 0.0);
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          if (k < -g.degree() || k > g.degree()) return complex(0.0, 0.0);
          return g.coeff(static_cast<int>(k));
        } else if constexpr (std::is_same_v<T, StepFunction>) {
          if (k == 0) {
            complex s(0.0, 0.0);
            for (std::size_t j = 0; j < g.values.size(); ++j)
              s += g.values[j] * (g.breakpoints[j + 1] - g.breakpoints[j]);
            return s / two_pi;
          }
          complex s(0.0, 0.0);
          const double kd = static_cast<double>(k);
          for (std::size_t j = 0; j < g.values.size(); ++j) {
            const complex lo = std::polar(1.0, -kd * g.breakpoints[j]);
            const complex hi = std::polar(1.0, -kd * g.breakpoints[j + 1]);
            s += g.values[j] * (lo - hi);
          }
          return s / (two_pi * complex(0.0, kd));
        } else {
          const long m = static_cast<long>(g.samples.size());
          if (k <= -m / 2 || k >= m / 2)
            throw std::domain_error(
                "fourier_coefficient: |k| >= M/2 is not resolved by M samples");
          const auto all = fourier_coefficients(f, std::abs(k));
          return all[static_cast<std::size_t>(k + std::abs(k))];
        }
      },
      f);
}

// True when phi1 is real-valued within tol (family-specific criterion).
inline bool angular_is_real(const AngularFactor& f, double tol = 1e-12) {
  return std::visit(
      [tol](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) {
          return std::abs(g.value.imag()) <= tol;
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          const int d = g.degree();
          for (int j = 0; j <= d; ++j)
            if (std::abs(g.coeff(-j) - std::conj(g.coeff(j))) > tol) return false;
          return true;
        } else if constexpr (std::is_same_v<T, StepFunction>) {
          for (const complex& v : g.values)
            if (std::abs(v.imag()) > tol) return false;
          return true;
        } else {
          for (const complex& v : g.samples)
            if (std::abs(v.imag()) > tol) return false;
          return true;
        }
      },
      f);
}

// Splits a real-valued phi1 into (phi1_plus, phi1_minus), both nonnegative,
// phi1 = plus - minus.  Discrete families split exactly; trigonometric
// polynomials are sampled (sample_count a power of two) since max(f, 0)
// leaves the family.
inline std::pair<AngularFactor, AngularFactor> pos_neg_parts(
    const AngularFactor& f, std::size_t sample_count = 4096) {
  if (!angular_is_real(f))
    throw std::domain_error("pos_neg_parts: angular factor must be real-valued");
  auto split = [](double x) {
    return std::make_pair(std::max(x, 0.0), std::max(-x, 0.0));
  };
  return std::visit(
      [&](const auto& g) -> std::pair<AngularFactor, AngularFactor> {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) {
          auto [p, n] = split(g.value.real());
          return {ConstantAngular{p}, ConstantAngular{n}};
        } else if constexpr (std::is_same_v<T, StepFunction>) {
          std::vector<complex> p, n;
          for (const complex& v : g.values) {
            auto [a, b] = split(v.real());
            p.emplace_back(a);
            n.emplace_back(b);
          }
          return {StepFunction(g.breakpoints, p), StepFunction(g.breakpoints, n)};
        } else if constexpr (std::is_same_v<T, SampledContinuous>) {
          std::vector<complex> p, n;
          for (const complex& v : g.samples) {
            auto [a, b] = split(v.real());
            p.emplace_back(a);
            n.emplace_back(b);
          }
          return {SampledContinuous(p), SampledContinuous(n)};
        } else {
          std::vector<complex> p(sample_count), n(sample_count);
          for (std::size_t i = 0; i < sample_count; ++i) {
            const double t = two_pi * static_cast<double>(i) / sample_count;
            auto [a, b] = split(eval_angular(f, t).real());
            p[i] = a;
            n[i] = b;
          }
          return {SampledContinuous(std::move(p)), SampledContinuous(std::move(n))};
        }
      },
      f);
}

// Closed-form pointwise product where the families allow it.
inline AngularFactor angular_product(const AngularFactor& a, const AngularFactor& b) {
  if (const auto* ca = std::get_if<ConstantAngular>(&a)) {
    const complex s = ca->value;
    return std::visit(
        [s](const auto& g) -> AngularFactor {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, ConstantAngular>) {
            return ConstantAngular{s * g.value};
          } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
            auto c = g.coefficients;
            for (complex& z : c) z *= s;
            return TrigPolynomial(std::move(c));
          } else if constexpr (std::is_same_v<T, StepFunction>) {
            auto v = g.values;
            for (complex& z : v) z *= s;
            return StepFunction(g.breakpoints, std::move(v));
          } else {
            auto v = g.samples;
            for (complex& z : v) z *= s;
            return SampledContinuous(std::move(v));
          }
        },
        b);
  }
  if (std::holds_alternative<ConstantAngular>(b)) return angular_product(b, a);

  if (const auto* ta = std::get_if<TrigPolynomial>(&a)) {
    if (const auto* tb = std::get_if<TrigPolynomial>(&b)) {
      const int da = ta->degree(), db = tb->degree();
      std::vector<complex> c(static_cast<std::size_t>(2 * (da + db) + 1),
                             complex(0.0, 0.0));
      for (int i = -da; i <= da; ++i)
        for (int j = -db; j <= db; ++j)
          c[static_cast<std::size_t>(i + j + da + db)] +=
              ta->coeff(i) * tb->coeff(j);
      return TrigPolynomial(std::move(c));
    }
  }
  if (const auto* sa = std::get_if<StepFunction>(&a)) {
    if (const auto* sb = std::get_if<StepFunction>(&b)) {
      // Merge breakpoint sets over a common period starting at sa's origin.
      const double origin = sa->breakpoints.front();
      std::vector<double> bp = sa->breakpoints;
      for (double t : sb->breakpoints) {
        const double r = detail::reduce_angle(t, origin);
        bp.push_back(r);
        bp.push_back(r + two_pi);
      }
      std::sort(bp.begin(), bp.end());
      std::vector<double> merged;
      for (double t : bp) {
        if (t < origin - 1e-14 || t > origin + two_pi + 1e-14) continue;
        if (!merged.empty() && t - merged.back() < 1e-13) continue;
        merged.push_back(t);
      }
      if (std::abs(merged.back() - origin - two_pi) < 1e-12)
        merged.back() = origin + two_pi;
      std::vector<complex> vals;
      for (std::size_t j = 0; j + 1 < merged.size(); ++j) {
        const double mid = 0.5 * (merged[j] + merged[j + 1]);
        vals.push_back(eval_angular(a, mid) * eval_angular(b, mid));
      }
      return StepFunction(std::move(merged), std::move(vals));
    }
  }
  if (const auto* pa = std::get_if<SampledContinuous>(&a)) {
    if (const auto* pb = std::get_if<SampledContinuous>(&b)) {
      if (pa->samples.size() != pb->samples.size())
        throw std::invalid_argument(
            "angular_product: sampled factors need matching sample counts");
      std::vector<complex> v(pa->samples.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = pa->samples[i] * pb->samples[i];
      return SampledContinuous(std::move(v));
    }
  }
  throw std::invalid_argument(
      "angular_product: no closed-form product for this family combination");
}

// Indicator of arc j in the uniform L-partition, as a step function.
inline StepFunction arc_indicator(ArcPartition part) {
  const double lo = two_pi * static_cast<double>(part.index - 1) /
                    static_cast<double>(part.count);
  const double hi =
      two_pi * static_cast<double>(part.index) / static_cast<double>(part.count);
  std::vector<double> bp;
  std::vector<complex> vals;
  if (part.index == 1) {
    bp = {0.0, hi, two_pi};
    vals = {complex(1.0, 0.0), complex(0.0, 0.0)};
    if (part.count == 1) {
      bp = {0.0, two_pi};
      vals = {complex(1.0, 0.0)};
    }
  } else if (part.index == part.count) {
    bp = {0.0, lo, two_pi};
    vals = {complex(0.0, 0.0), complex(1.0, 0.0)};
  } else {
    bp = {0.0, lo, hi, two_pi};
    vals = {complex(0.0, 0.0), complex(1.0, 0.0), complex(0.0, 0.0)};
  }
  return StepFunction(std::move(bp), std::move(vals));
}

// Restriction of a symbol to arc j: multiplies the angular factor by the
// arc indicator.  L = 1 is the full circle and returns the symbol as is.
inline SeparableSymbol arc_restriction(const SeparableSymbol& sym, ArcPartition part) {
  if (part.count == 1) return sym;
  return SeparableSymbol(angular_product(sym.angular, AngularFactor(arc_indicator(part))),
                         sym.gamma, sym.profile);
}

inline std::string angular_label(const AngularFactor& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ConstantAngular>) return "constant";
        else if constexpr (std::is_same_v<T, TrigPolynomial>) return "trig";
        else if constexpr (std::is_same_v<T, StepFunction>) return "step";
        else return "sampled";
      },
      f);
}

}  // namespace toeplab
