#pragma once

// Strongly negative definite kernels K(x, y) = k(||x - y||) and dense Gram
// matrices built from them:
//
//   energy(a): d^a,  a in (0, 2)
//   ratio:     d / (1 + d)
//   log:       log(1 + d^2)

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"

namespace dirdep {

class Kernel {
 public:
  enum class Family { energy, ratio, log };

  /// Energy kernel d^a; the documented default exponent is 1.
  static Kernel energy(double a = 1.0) {
    if (!(a > 0.0 && a < 2.0)) {
      std::ostringstream os;
      os << "energy kernel exponent must lie in (0, 2), got " << a;
      throw ConfigError(os.str());
    }
    return Kernel(Family::energy, a);
  }
  static Kernel ratio() { return Kernel(Family::ratio, 0.0); }
  static Kernel log() { return Kernel(Family::log, 0.0); }

  /// Parses `energy:<a>` | `energy` | `ratio` | `log`.
  static Kernel parse(std::string_view spec) {
    if (spec == "ratio") return ratio();
    if (spec == "log") return log();
    if (spec == "energy") return energy(1.0);
    constexpr std::string_view prefix = "energy:";
    if (spec.starts_with(prefix)) {
      const auto num = spec.substr(prefix.size());
      double a = 0.0;
      const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), a);
      if (ec != std::errc() || ptr != num.data() + num.size() || num.empty()) {
        throw ConfigError("invalid energy exponent in kernel spec '" + std::string(spec) + "'");
      }
      return energy(a);
    }
    throw ConfigError("unknown kernel spec '" + std::string(spec) +
                      "' (expected energy:<a>, ratio or log)");
  }

  Family family() const noexcept { return family_; }
  double exponent() const noexcept { return a_; }

  double operator()(double dist) const noexcept {
    switch (family_) {
      case Family::energy:
        return a_ == 1.0 ? dist : std::pow(dist, a_);
      case Family::ratio:
        return dist / (1.0 + dist);
      case Family::log:
        return std::log1p(dist * dist);
    }
    return 0.0;
  }

  /// Canonical spec string, parseable by Kernel::parse.
  std::string spec() const {
    switch (family_) {
      case Family::energy:
        return "energy:" + format_exponent();
      case Family::ratio:
        return "ratio";
      case Family::log:
        return "log";
    }
    return {};
  }

  /// Short column label: D0.25, D1, Dk, Dl.
  std::string label() const {
    switch (family_) {
      case Family::energy:
        return "D" + format_exponent();
      case Family::ratio:
        return "Dk";
      case Family::log:
        return "Dl";
    }
    return {};
  }

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  Kernel(Family f, double a) : family_(f), a_(a) {}

  std::string format_exponent() const {
    std::ostringstream os;
    os.precision(15);
    os << a_;
    return os.str();
  }

  Family family_;
  double a_;
};

inline double kernel_eval(const Kernel& k, double dist) {
  if (!(dist >= 0.0)) throw InputError("kernel_eval: distance must be >= 0");
  return k(dist);
}

/// Number of Gram matrices built since process start. Instrumentation for
/// the "Grams are built once per test" regression check.
inline std::atomic<std::uint64_t>& gram_build_count() {
  static std::atomic<std::uint64_t> count{0};
  return count;
}

/// Dense symmetric matrix of pairwise kernel values.
class GramMatrix {
 public:
  GramMatrix(DenseMatrix values, Kernel kernel) : values_(std::move(values)), kernel_(kernel) {
    if (values_.rows() != values_.cols()) throw InputError("Gram matrix must be square");
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  const DenseMatrix& values() const noexcept { return values_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  DenseMatrix values_;
  Kernel kernel_;
};

/// G[i][j] = k(||s_i - s_j||). Each entry is computed independently, so the
/// result does not depend on evaluation order.
inline GramMatrix gram(const Kernel& k, const DirectionalSample& s) {
  gram_build_count().fetch_add(1, std::memory_order_relaxed);
  const auto n = static_cast<Eigen::Index>(s.size());
  DenseMatrix g = DenseMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto xi = s.row(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = k(chord_distance(xi, s.row(static_cast<std::size_t>(j))));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return GramMatrix(std::move(g), k);
}

}  // namespace dirdep
