#pragma once
// common.hpp -- shared vocabulary types for the laboratory.
//
// Symbols studied here factor as phi(z) = phi1(e^{i theta}) * phi0_gamma(r) * g(r)
// with phi0_gamma(r) = (1 + log(1/(1-r)))^{-gamma}.  The decay exponent gamma
// and the bounded radial profile g recur in every module, so they get small
// value types with their invariants enforced at construction.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace toeplab {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double two_pi = 2.0 * pi;

// Decay exponent gamma >= 0.  gamma = 0 collapses the radial weight to 1.
struct GammaExponent {
  double value;

  explicit GammaExponent(double g) : value(g) {
    if (!std::isfinite(g) || g < 0.0)
      throw std::domain_error("GammaExponent: gamma must be finite and >= 0");
  }
};

// phi0_gamma(r) = (1 + log(1/(1-r)))^{-gamma}, defined for 0 <= r < 1.
inline double radial_weight(double r, GammaExponent gamma) {
  if (!(r >= 0.0) || r >= 1.0)
    throw std::domain_error("radial_weight: r must lie in [0, 1)");
  if (gamma.value == 0.0) return 1.0;
  return std::pow(1.0 + std::log1p(r / (1.0 - r)), -gamma.value);
}

// Bounded weight profile g on [0,1) with a declared boundary limit g(1).
// The limit feeds the moment asymptotics, so it is part of the value, not
// something we try to extrapolate numerically.
class RadialProfile {
 public:
  static RadialProfile one() {
    return RadialProfile([](double) { return 1.0; }, 1.0, "one", true);
  }
  static RadialProfile constant(double c) {
    return RadialProfile([c](double) { return c; }, c,
                         "constant(" + format_short(c) + ")", false);
  }
  // g(r) = 1/(1+r), limit 1/2.
  static RadialProfile inverse_one_plus_r() {
    return RadialProfile([](double r) { return 1.0 / (1.0 + r); }, 0.5,
                         "inverse_one_plus_r", false);
  }
  static RadialProfile custom(std::function<double(double)> f,
                              double limit_at_one, std::string label) {
    if (!f) throw std::invalid_argument("RadialProfile: null function");
    return RadialProfile(std::move(f), limit_at_one, std::move(label), false);
  }

  double operator()(double r) const { return f_(r); }
  double limit_at_one() const { return limit_; }
  const std::string& label() const { return label_; }
  bool is_one() const { return is_one_; }

 private:
  RadialProfile(std::function<double(double)> f, double limit,
                std::string label, bool is_one)
      : f_(std::move(f)), limit_(limit), label_(std::move(label)),
        is_one_(is_one) {}

  static std::string format_short(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
  }

  std::function<double(double)> f_;
  double limit_;
  std::string label_;
  bool is_one_;
};

// Module parallelism knob.  Kernels consult this; 1 means fully serial.
// Outputs are identical for any setting: no cross-thread reductions exist.
void set_thread_count(unsigned n);
unsigned thread_count();

namespace detail {
inline unsigned& thread_count_ref() {
  static unsigned n = 1;
  return n;
}
}  // namespace detail

inline void set_thread_count(unsigned n) {
  detail::thread_count_ref() = n == 0 ? 1 : n;
}
inline unsigned thread_count() { return detail::thread_count_ref(); }

}  // namespace toeplab
