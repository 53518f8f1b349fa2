#pragma once

// Permutation-ready statistics.
//
// An evaluator precomputes everything that does not depend on the pairing of
// X and Y (Gram matrices, row sums, marginal normalizers) and then evaluates
// the statistic for any relabeling sigma of Y by index indirection alone:
// permuted(sigma) is the statistic on (X_i, Y_sigma(i)). Kernels are never
// re-evaluated. observed() is permuted(identity) through the same code path,
// so ties with the identity permutation are exact.

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"
#include "dirdep/kernels.hpp"
#include "dirdep/statistics.hpp"

namespace dirdep {

template <class S>
concept PermutationStatistic = requires(const S& s, std::span<const std::size_t> sigma) {
  { s.size() } -> std::convertible_to<std::size_t>;
  { s.observed() } -> std::convertible_to<double>;
  { s.permuted(sigma) } -> std::convertible_to<double>;
  { s.name() } -> std::convertible_to<std::string>;
};

/// Statistic identifier: `dcor[:<kernel>]`, `dcov[:<kernel>]`, `ccor`,
/// `trig[:<lambda>]`, `nk[:<kernel>]`.
class StatisticSpec {
 public:
  enum class Kind { dcor, dcov, ccor, trig, nk };

  static StatisticSpec dcor(Kernel k) { return StatisticSpec(Kind::dcor, k, 0.0); }
  static StatisticSpec dcov(Kernel k) { return StatisticSpec(Kind::dcov, k, 0.0); }
  static StatisticSpec nk(Kernel k) { return StatisticSpec(Kind::nk, k, 0.0); }
  static StatisticSpec ccor() { return StatisticSpec(Kind::ccor, Kernel::energy(1.0), 0.0); }
  static StatisticSpec trig(double lambda = 1.0) {
    detail::require_positive_lambda(lambda);
    return StatisticSpec(Kind::trig, Kernel::energy(1.0), lambda);
  }

  static StatisticSpec parse(std::string_view id) {
    const auto colon = id.find(':');
    const auto head = id.substr(0, colon);
    const auto tail = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
    auto kernel_or_default = [&] { return tail.empty() ? Kernel::energy(1.0) : Kernel::parse(tail); };
    if (head == "dcor") return dcor(kernel_or_default());
    if (head == "dcov") return dcov(kernel_or_default());
    if (head == "nk") return nk(kernel_or_default());
    if (head == "ccor") {
      if (!tail.empty()) throw ConfigError("ccor takes no parameter: '" + std::string(id) + "'");
      return ccor();
    }
    if (head == "trig") {
      if (tail.empty()) return trig(1.0);
      double lambda = 0.0;
      const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), lambda);
      if (ec != std::errc() || ptr != tail.data() + tail.size()) {
        throw ConfigError("invalid lambda in statistic '" + std::string(id) + "'");
      }
      return trig(lambda);
    }
    throw ConfigError("unknown statistic '" + std::string(id) +
                      "' (expected dcor[:kernel], dcov[:kernel], ccor, trig[:lambda], nk[:kernel])");
  }

  Kind kind() const noexcept { return kind_; }
  const Kernel& kernel() const noexcept { return kernel_; }
  double lambda() const noexcept { return lambda_; }
  bool uses_kernel() const noexcept {
    return kind_ == Kind::dcor || kind_ == Kind::dcov || kind_ == Kind::nk;
  }

  /// Canonical identifier, parseable by StatisticSpec::parse.
  std::string id() const {
    switch (kind_) {
      case Kind::dcor: return "dcor:" + kernel_.spec();
      case Kind::dcov: return "dcov:" + kernel_.spec();
      case Kind::nk: return "nk:" + kernel_.spec();
      case Kind::ccor: return "ccor";
      case Kind::trig: return "trig:" + format(lambda_);
    }
    return {};
  }

  /// Table column label: C, T1, D0.25, Dk, Dl, V1, N1, ...
  std::string label() const {
    switch (kind_) {
      case Kind::dcor: return kernel_.label();
      case Kind::dcov: return "V" + kernel_.label().substr(1);
      case Kind::nk: return "N" + kernel_.label().substr(1);
      case Kind::ccor: return "C";
      case Kind::trig: return "T" + format(lambda_);
    }
    return {};
  }

  friend bool operator==(const StatisticSpec&, const StatisticSpec&) = default;

 private:
  StatisticSpec(Kind kind, Kernel k, double lambda) : kind_(kind), kernel_(k), lambda_(lambda) {}

  static std::string format(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
  }

  Kind kind_;
  Kernel kernel_;
  double lambda_;
};

/// The eleven statistics compared on toroidal data.
inline std::vector<StatisticSpec> circular_battery() {
  std::vector<StatisticSpec> out{StatisticSpec::ccor(), StatisticSpec::trig(1.0)};
  for (double a : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}) {
    out.push_back(StatisticSpec::dcor(Kernel::energy(a)));
  }
  out.push_back(StatisticSpec::dcor(Kernel::ratio()));
  out.push_back(StatisticSpec::dcor(Kernel::log()));
  return out;
}

/// The nine kernel distance correlation statistics.
inline std::vector<StatisticSpec> kernel_battery() {
  auto all = circular_battery();
  return {all.begin() + 2, all.end()};
}

/// V-form statistic over a pair of symmetric matrices: raw V (dcov),
/// V normalized by the marginal V's (dcor), or n * V (trig).
class VStatEvaluator {
 public:
  enum class Scale { raw, normalized, times_n };

  VStatEvaluator(DenseMatrix x, DenseMatrix y, Scale scale, std::string name)
      : x_(std::move(x)), y_(std::move(y)), scale_(scale), name_(std::move(name)) {
    detail::require_same_size(x_, y_, "statistic");
    parts_ = detail::VFormParts(x_, y_);
    if (scale_ == Scale::normalized) {
      const double vxx = detail::v_stat(x_, x_);
      const double vyy = detail::v_stat(y_, y_);
      if (vxx <= kDegenerateEpsilon || vyy <= kDegenerateEpsilon) {
        throw DegenerateMarginal("distance correlation undefined: a marginal sample is constant");
      }
      denom_ = std::sqrt(vxx * vyy);
    }
    observed_ = apply_scale(detail::v_form(x_, y_, parts_, [](std::size_t i) { return i; }));
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  double observed() const noexcept { return observed_; }
  const std::string& name() const noexcept { return name_; }

  double permuted(std::span<const std::size_t> sigma) const {
    return apply_scale(detail::v_form(x_, y_, parts_, [sigma](std::size_t i) { return sigma[i]; }));
  }

 private:
  double apply_scale(double v) const noexcept {
    switch (scale_) {
      case Scale::raw: return v;
      case Scale::normalized: return v / denom_;
      case Scale::times_n: return static_cast<double>(x_.rows()) * v;
    }
    return v;
  }

  DenseMatrix x_, y_;
  detail::VFormParts parts_;
  Scale scale_;
  double denom_ = 1.0;
  double observed_ = 0.0;
  std::string name_;
};

inline VStatEvaluator make_dcor_evaluator(GramMatrix a, GramMatrix b) {
  const auto name = "dcor:" + b.kernel().spec();
  return VStatEvaluator(a.values(), b.values(), VStatEvaluator::Scale::normalized, name);
}

inline VStatEvaluator make_dcov_evaluator(GramMatrix a, GramMatrix b) {
  const auto name = "dcov:" + b.kernel().spec();
  return VStatEvaluator(a.values(), b.values(), VStatEvaluator::Scale::raw, name);
}

inline VStatEvaluator make_trig_evaluator(const AngleVector& theta, const AngleVector& phi,
                                          double lambda = 1.0) {
  detail::require_positive_lambda(lambda);
  if (theta.size() != phi.size()) throw InputError("trig_moment_stat: samples differ in length");
  return VStatEvaluator(detail::trig_matrix(theta, lambda), detail::trig_matrix(phi, lambda),
                        VStatEvaluator::Scale::times_n,
                        StatisticSpec::trig(lambda).id());
}

/// |circ_cor|; the two-sided competitor is calibrated on its absolute value.
class CircCorEvaluator {
 public:
  CircCorEvaluator(const AngleVector& theta, const AngleVector& phi) {
    if (theta.size() != phi.size()) throw InputError("circ_cor: samples differ in length");
    if (theta.size() < 2) throw InputError("circ_cor: needs at least two observations");
    double saa = 0.0, sbb = 0.0;
    a_ = detail::centered_sines(theta, saa);
    b_ = detail::centered_sines(phi, sbb);
    denom_ = std::sqrt(saa * sbb);
    std::vector<std::size_t> id(a_.size());
    std::iota(id.begin(), id.end(), std::size_t{0});
    observed_ = permuted(id);
  }

  std::size_t size() const noexcept { return a_.size(); }
  double observed() const noexcept { return observed_; }
  std::string name() const { return "ccor"; }

  double permuted(std::span<const std::size_t> sigma) const {
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * b_[sigma[i]];
    return std::abs(s) / denom_;
  }

 private:
  std::vector<double> a_, b_;
  double denom_ = 1.0;
  double observed_ = 0.0;
};

/// Two-sample kernel distance on the pooled sample; a permutation reassigns
/// group labels: positions sigma(0..nx-1) form the first group.
class TwoSampleEvaluator {
 public:
  TwoSampleEvaluator(const Kernel& k, const DirectionalSample& x, const DirectionalSample& y)
      : nx_(x.size()), ny_(y.size()), name_("nk:" + k.spec()) {
    if (x.ambient_dim() != y.ambient_dim()) {
      throw InputError("nk_distance: samples live in different ambient dimensions");
    }
    DenseMatrix pooled(static_cast<Eigen::Index>(nx_ + ny_), x.ambient_dim());
    pooled.topRows(static_cast<Eigen::Index>(nx_)) = x.points();
    pooled.bottomRows(static_cast<Eigen::Index>(ny_)) = y.points();
    const auto n = static_cast<Eigen::Index>(nx_ + ny_);
    pooled_ = DenseMatrix::Zero(n, n);
    gram_build_count().fetch_add(1, std::memory_order_relaxed);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const double v = k((pooled.row(i) - pooled.row(j)).norm());
        pooled_(i, j) = v;
        pooled_(j, i) = v;
      }
    }
    std::vector<std::size_t> id(nx_ + ny_);
    std::iota(id.begin(), id.end(), std::size_t{0});
    observed_ = permuted(id);
  }

  std::size_t size() const noexcept { return nx_ + ny_; }
  double observed() const noexcept { return observed_; }
  const std::string& name() const noexcept { return name_; }

  double permuted(std::span<const std::size_t> sigma) const {
    const std::size_t n = nx_ + ny_;
    std::vector<unsigned char> in_x(n, 0);
    for (std::size_t i = 0; i < nx_; ++i) in_x[sigma[i]] = 1;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    const double* g = pooled_.data();
    for (std::size_t i = 0; i < n; ++i) {
      const double* gi = g + i * n;
      for (std::size_t j = 0; j < i; ++j) {
        if (in_x[i] && in_x[j]) sxx += gi[j];
        else if (!in_x[i] && !in_x[j]) syy += gi[j];
        else sxy += gi[j];
      }
    }
    const double fx = static_cast<double>(nx_), fy = static_cast<double>(ny_);
    return 2.0 * sxy / (fx * fy) - 2.0 * sxx / (fx * fx) - 2.0 * syy / (fy * fy);
  }

 private:
  std::size_t nx_, ny_;
  DenseMatrix pooled_;
  double observed_ = 0.0;
  std::string name_;
};

/// Type-erased evaluator for statistics chosen at run time.
class AnyStatistic {
 public:
  template <class S>
    requires PermutationStatistic<S> &&
             (std::same_as<S, VStatEvaluator> || std::same_as<S, CircCorEvaluator> ||
              std::same_as<S, TwoSampleEvaluator>)
  AnyStatistic(S s) : impl_(std::move(s)) {}  // NOLINT(google-explicit-constructor)

  std::size_t size() const {
    return std::visit([](const auto& s) { return s.size(); }, impl_);
  }
  double observed() const {
    return std::visit([](const auto& s) { return s.observed(); }, impl_);
  }
  double permuted(std::span<const std::size_t> sigma) const {
    return std::visit([sigma](const auto& s) { return s.permuted(sigma); }, impl_);
  }
  std::string name() const {
    return std::visit([](const auto& s) { return std::string(s.name()); }, impl_);
  }

 private:
  std::variant<VStatEvaluator, CircCorEvaluator, TwoSampleEvaluator> impl_;
};

namespace detail {

inline void require_circular(const DirectionalSample& s, const StatisticSpec& spec) {
  if (!s.kind().is_circle()) {
    throw ConfigError("statistic '" + spec.id() + "' needs circular data, got " +
                      s.kind().to_string());
  }
}

/// Distance matrices and Grams shared by all statistics on one data pair.
class GramCache {
 public:
  explicit GramCache(const DirectionalSample& s) : sample_(&s) {}

  const GramMatrix& get(const Kernel& k) {
    for (const auto& g : grams_) {
      if (g.kernel() == k) return g;
    }
    if (!distances_) distances_ = pairwise_distances(*sample_);
    gram_build_count().fetch_add(1, std::memory_order_relaxed);
    DenseMatrix v = distances_->unaryExpr([&k](double d) { return k(d); });
    grams_.emplace_back(std::move(v), k);
    return grams_.back();
  }

 private:
  const DirectionalSample* sample_;
  std::optional<DenseMatrix> distances_;
  std::vector<GramMatrix> grams_;
};

}  // namespace detail

/// Builds evaluators for several statistics on one (X, Y) pair; every Gram
/// matrix and distance matrix is computed once.
inline std::vector<AnyStatistic> make_evaluators(std::span<const StatisticSpec> specs,
                                                 const DirectionalSample& x,
                                                 const DirectionalSample& y) {
  using Kind = StatisticSpec::Kind;
  if (specs.empty()) throw ConfigError("no statistics requested");
  const bool pairs = std::any_of(specs.begin(), specs.end(),
                                 [](const StatisticSpec& s) { return s.kind() != Kind::nk; });
  if (pairs && x.size() != y.size()) {
    throw InputError("paired statistics need equally many X and Y observations (" +
                     std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
  detail::GramCache gx(x), gy(y);
  std::optional<AngleVector> tx, ty;
  std::vector<AnyStatistic> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    switch (spec.kind()) {
      case Kind::dcor:
        out.emplace_back(VStatEvaluator(gx.get(spec.kernel()).values(),
                                        gy.get(spec.kernel()).values(),
                                        VStatEvaluator::Scale::normalized, spec.id()));
        break;
      case Kind::dcov:
        out.emplace_back(VStatEvaluator(gx.get(spec.kernel()).values(),
                                        gy.get(spec.kernel()).values(), VStatEvaluator::Scale::raw,
                                        spec.id()));
        break;
      case Kind::ccor:
      case Kind::trig:
        detail::require_circular(x, spec);
        detail::require_circular(y, spec);
        if (!tx) {
          tx = sample_to_angles(x);
          ty = sample_to_angles(y);
        }
        if (spec.kind() == Kind::ccor) {
          out.emplace_back(CircCorEvaluator(*tx, *ty));
        } else {
          out.emplace_back(make_trig_evaluator(*tx, *ty, spec.lambda()));
        }
        break;
      case Kind::nk:
        if (x.kind() != y.kind()) {
          throw ConfigError("two-sample statistic needs both samples of the same kind");
        }
        out.emplace_back(TwoSampleEvaluator(spec.kernel(), x, y));
        break;
    }
  }
  return out;
}

inline AnyStatistic make_evaluator(const StatisticSpec& spec, const DirectionalSample& x,
                                   const DirectionalSample& y) {
  auto v = make_evaluators(std::span(&spec, 1), x, y);
  return std::move(v.front());
}

}  // namespace dirdep
