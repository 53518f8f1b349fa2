#pragma once

// Univariate circular distributions: von Mises VM(mu, kappa), wrapped Cauchy
// WC(mu, rho) and the uniform law on [0, 2*pi).
//
// CDFs are measured from the location parameter: cdf(theta) is
// P(0 <= (Theta - mu) mod 2*pi <= (theta - mu) mod 2*pi), and quantile() is
// its inverse mapped back to [0, 2*pi). For the centered marginals used by
// the Wehrly-Johnson constructions this is the ordinary CDF on [0, 2*pi).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"
#include "dirdep/rng.hpp"

namespace dirdep {

/// Draws from VM(mu, kappa) by the Best-Fisher rejection scheme, in the
/// numerically stable parametrization r = s + sqrt(1 + s^2), s = 1/(2 kappa).
/// Returns an angle in [0, 2*pi).
template <class URBG>
double sample_von_mises(double mu, double kappa, URBG& g) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("von Mises concentration must be finite and >= 0");
  }
  if (kappa < 1e-8) return kTwoPi * uniform01(g);
  if (kappa > 1e6) {
    // Wrapped normal limit; the rejection loop loses precision here.
    std::normal_distribution<double> z(0.0, 1.0 / std::sqrt(kappa));
    return wrap_angle(mu + z(g));
  }
  const double s = 0.5 / kappa;
  const double r = s + std::sqrt(1.0 + s * s);
  double w = 0.0;
  for (std::uint64_t tries = 0;; ++tries) {
    if (tries >= 1'000'000) throw SamplerError("von Mises sampler exceeded 1e6 proposals");
    const double u = uniform01(g);
    const double z = std::cos(std::numbers::pi * u);
    w = (1.0 + r * z) / (r + z);
    const double y = kappa * (r - w);
    const double v = uniform01(g);
    if (y * (2.0 - y) - v >= 0.0 || std::log(y / v) + 1.0 - y >= 0.0) break;
  }
  double theta = std::acos(std::clamp(w, -1.0, 1.0));
  if (uniform01(g) < 0.5) theta = -theta;
  return wrap_angle(mu + theta);
}

/// CDF and quantile of VM(0, kappa) on [0, 2*pi): adaptive Gauss-Kronrod
/// quadrature of the density, inverted by TOMS 748 bracketing.
class VonMisesCdf {
 public:
  explicit VonMisesCdf(double kappa) : kappa_(kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
      throw ConfigError("von Mises concentration must be finite and >= 0");
    }
    if (kappa_ > 0.0) norm_ = integrate(0.0, kTwoPi);
  }

  double kappa() const noexcept { return kappa_; }

  double operator()(double theta) const {
    theta = wrap_angle(theta);
    if (kappa_ == 0.0) return theta / kTwoPi;
    // Integrate over the shorter side of pi for accuracy near 2*pi.
    if (theta <= std::numbers::pi) return integrate(0.0, theta) / norm_;
    return 1.0 - integrate(theta, kTwoPi) / norm_;
  }

  /// Smallest theta in [0, 2*pi) with cdf(theta) = u, to 1e-10 in theta.
  double quantile(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
    if (kappa_ == 0.0) return wrap_angle(kTwoPi * u);
    if (u == 0.0) return 0.0;
    if (u == 1.0) return 0.0;
    auto f = [this, u](double t) { return cdf_unwrapped(t) - u; };
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        f, 0.0, kTwoPi, -u, 1.0 - u,
        [](double a, double b) { return std::abs(b - a) <= 1e-10; }, max_iter);
    return wrap_angle(0.5 * (lo + hi));
  }

 private:
  double integrate(double a, double b) const {
    if (b <= a) return 0.0;
    auto density = [k = kappa_](double t) { return std::exp(k * (std::cos(t) - 1.0)); };
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(density, a, b, 12, 1e-13);
  }

  // CDF on the closed interval [0, 2*pi] without wrapping 2*pi to 0.
  double cdf_unwrapped(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= kTwoPi) return 1.0;
    if (t <= std::numbers::pi) return integrate(0.0, t) / norm_;
    return 1.0 - integrate(t, kTwoPi) / norm_;
  }

  double kappa_;
  double norm_ = kTwoPi;
};

/// CDF of WC(0, rho) on [0, 2*pi): atan2(c sin(t/2), cos(t/2)) / pi with
/// c = (1 + rho) / (1 - rho).
inline double wrapped_cauchy_cdf(double theta, double rho) {
  theta = wrap_angle(theta);
  const double c = (1.0 + rho) / (1.0 - rho);
  return std::atan2(c * std::sin(0.5 * theta), std::cos(0.5 * theta)) / std::numbers::pi;
}

/// Inverse of wrapped_cauchy_cdf: 2 atan2(sin(pi u), c cos(pi u)).
inline double wrapped_cauchy_quantile(double u, double rho) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  const double c = (1.0 + rho) / (1.0 - rho);
  return wrap_angle(2.0 * std::atan2(std::sin(std::numbers::pi * u),
                                     c * std::cos(std::numbers::pi * u)));
}

/// One of VM(mu, kappa), WC(mu, rho), Unif.
class CircularMarginal {
 public:
  enum class Family { von_mises, wrapped_cauchy, uniform };

  static CircularMarginal von_mises(double mu, double kappa) {
    if (!std::isfinite(mu)) throw ConfigError("VM location must be finite");
    return CircularMarginal(Family::von_mises, wrap_angle(mu), kappa);
  }
  static CircularMarginal wrapped_cauchy(double mu, double rho) {
    if (!std::isfinite(mu)) throw ConfigError("WC location must be finite");
    if (!(rho >= 0.0 && rho < 1.0)) {
      std::ostringstream os;
      os << "wrapped Cauchy concentration rho must lie in [0, 1), got " << rho;
      throw ConfigError(os.str());
    }
    return CircularMarginal(Family::wrapped_cauchy, wrap_angle(mu), rho);
  }
  static CircularMarginal uniform() { return CircularMarginal(Family::uniform, 0.0, 0.0); }

  Family family() const noexcept { return family_; }
  double location() const noexcept { return mu_; }
  /// kappa for VM, rho for WC, 0 for Unif.
  double concentration() const noexcept { return param_; }

  template <class URBG>
  double sample(URBG& g) const {
    switch (family_) {
      case Family::von_mises:
        return sample_von_mises(mu_, param_, g);
      case Family::wrapped_cauchy:
        return wrap_angle(mu_ + wrapped_cauchy_quantile(uniform01(g), param_));
      case Family::uniform:
        return kTwoPi * uniform01(g);
    }
    return 0.0;
  }

  double pdf(double theta) const {
    switch (family_) {
      case Family::von_mises:
        return std::exp(param_ * (std::cos(theta - mu_) - 1.0)) /
               (kTwoPi * std::cyl_bessel_i(0.0, param_) * std::exp(-param_));
      case Family::wrapped_cauchy:
        return (1.0 - param_ * param_) /
               (kTwoPi * (1.0 + param_ * param_ - 2.0 * param_ * std::cos(theta - mu_)));
      case Family::uniform:
        return 1.0 / kTwoPi;
    }
    return 0.0;
  }

  double cdf(double theta) const {
    const double t = wrap_angle(theta - mu_);
    switch (family_) {
      case Family::von_mises: return vm_cdf_(t);
      case Family::wrapped_cauchy: return wrapped_cauchy_cdf(t, param_);
      case Family::uniform: return t / kTwoPi;
    }
    return 0.0;
  }

  double quantile(double u) const {
    switch (family_) {
      case Family::von_mises: return wrap_angle(mu_ + vm_cdf_.quantile(u));
      case Family::wrapped_cauchy: return wrap_angle(mu_ + wrapped_cauchy_quantile(u, param_));
      case Family::uniform:
        if (!(u >= 0.0 && u <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
        return wrap_angle(kTwoPi * u);
    }
    return 0.0;
  }

  std::string to_string() const {
    std::ostringstream os;
    os.precision(15);
    switch (family_) {
      case Family::von_mises: os << "VM(" << mu_ << "," << param_ << ")"; break;
      case Family::wrapped_cauchy: os << "WC(" << mu_ << "," << param_ << ")"; break;
      case Family::uniform: os << "Unif"; break;
    }
    return os.str();
  }

 private:
  CircularMarginal(Family f, double mu, double param)
      : family_(f), mu_(mu), param_(param),
        vm_cdf_(f == Family::von_mises ? param : 0.0) {}

  Family family_;
  double mu_;
  double param_;
  VonMisesCdf vm_cdf_;
};

/// n i.i.d. draws from a circular marginal.
template <class URBG>
AngleVector sample_circular(const CircularMarginal& f, std::size_t n, URBG& g) {
  std::vector<double> a(n);
  for (auto& v : a) v = f.sample(g);
  return AngleVector(std::move(a));
}

}  // namespace dirdep
