#pragma once

// Random generation for every joint model of the power study.
//
//  product(F,G)        independent circular marginals
//  PB(p)               theta1, U ~ Unif; theta2 = 2 (p theta1^2 + (1-p) U^2) / (4 pi),
//                      the range [0, 8 pi^2) mapped linearly onto [0, 2 pi)
//  PBmod(p)            same raw value reduced mod 2pi
//  BvM(k1,k2,mug,kg)   Wehrly-Johnson, VM(0,k1) x VM(0,k2) marginals, VM(mug,kg) binding
//  BWC(r1,r2,r)        Wehrly-Johnson, WC(0,r1) x WC(0,r2) marginals, WC(0,|r|) binding
//  BCvM(k1,k2,k3)      density prop. to exp(k1 cos t1 + k2 cos t2 + k3 cos(t1 - t2))
//  Mix(F,G,p)          theta1 ~ F; theta2 = theta1 w.p. p, else theta2 ~ G
//  vMFMix(dim;p,k)     X ~ vMF(e1, 0) on S^{dim-1}; Y = X w.p. p, else Y ~ vMF(e1, k)
//  PN(d;s12,s13,s23)   (X, Z) ~ N_{d+1}(0, Sigma); returns (X/|X|, Z)
//  VMC(k)              von Mises copula, circular 2 pi u and linear v on [0, 1]
//
// Single-parameter shorthands: BvM(x) = BvM(1,1,0,x), BWC(x) =
// BWC(e^-1,e^-1,x), BCvM(x) = BCvM(1,1,x).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "dirdep/distributions.hpp"
#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"
#include "dirdep/rng.hpp"

namespace dirdep {

inline constexpr std::uint64_t kMaxRejectionProposals = 1'000'000;

struct PairedSample {
  DirectionalSample x;
  DirectionalSample y;
};

// ---------------------------------------------------------------------------
// von Mises-Fisher

namespace detail {

template <class URBG>
Eigen::VectorXd standard_normal_vector(Eigen::Index d, URBG& g) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = z(g);
  return v;
}

template <class URBG>
Eigen::VectorXd uniform_on_sphere(Eigen::Index d, URBG& g) {
  for (;;) {
    Eigen::VectorXd v = standard_normal_vector(d, g);
    const double norm = v.norm();
    if (norm > 1e-300) return v / norm;
  }
}

inline void require_unit(const Eigen::VectorXd& mu) {
  if (mu.size() < 2) throw InputError("vMF mean direction needs at least two coordinates");
  if (std::abs(mu.norm() - 1.0) > kUnitNormTolerance) {
    std::ostringstream os;
    os << "vMF mean direction must have unit norm, got " << mu.norm();
    throw InputError(os.str());
  }
}

}  // namespace detail

/// One vMF(mu, kappa) draw by the tangent-normal decomposition: the component
/// w = mu'x is drawn by Wood's rejection scheme, the tangent direction
/// uniformly on the sphere orthogonal to mu.
template <class URBG>
Eigen::VectorXd sample_vmf_point(const Eigen::VectorXd& mu, double kappa, URBG& g) {
  const Eigen::Index d = mu.size();
  if (kappa == 0.0) return detail::uniform_on_sphere(d, g);
  const double m1 = static_cast<double>(d - 1);
  const double b = m1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m1 * m1));
  const double x0 = (1.0 - b) / (1.0 + b);
  const double c = kappa * x0 + m1 * std::log(1.0 - x0 * x0);
  std::gamma_distribution<double> ga(0.5 * m1, 1.0);
  double w = 0.0;
  for (std::uint64_t tries = 0;; ++tries) {
    if (tries >= kMaxRejectionProposals) {
      throw SamplerError("vMF sampler exceeded 1e6 proposals");
    }
    const double g1 = ga(g), g2 = ga(g);
    const double z = g1 / (g1 + g2);
    w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
    const double u = uniform01(g);
    if (kappa * w + m1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
  }
  Eigen::VectorXd v;
  for (;;) {
    v = detail::standard_normal_vector(d, g);
    v -= v.dot(mu) * mu;
    const double norm = v.norm();
    if (norm > 1e-12) {
      v /= norm;
      break;
    }
  }
  Eigen::VectorXd x = w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * v;
  return x / x.norm();
}

/// n i.i.d. vMF(mu, kappa) draws on S^{d-1}, d = mu.size().
template <class URBG>
DirectionalSample sample_vmf(const Eigen::VectorXd& mu, double kappa, std::size_t n, URBG& g) {
  detail::require_unit(mu);
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw ConfigError("vMF concentration must be finite and >= 0");
  }
  if (n == 0) throw InputError("sample size must be >= 1");
  const Eigen::Index d = mu.size();
  DenseMatrix pts(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) pts.row(i) = sample_vmf_point(mu, kappa, g).transpose();
  return DirectionalSample(std::move(pts), SampleKind::sphere(static_cast<int>(d - 1)));
}

// ---------------------------------------------------------------------------
// Model specifications

struct ProductModel {
  CircularMarginal first, second;
};
struct ParabolicModel {
  double p;
  bool wrapped = false;  // reduce mod 2pi instead of rescaling the range
};
struct BivariateVonMisesModel {
  double kappa1, kappa2, mu_g, kappa_g;
};
struct BivariateWrappedCauchyModel {
  double rho1, rho2, rho;
};
struct BivariateCosineModel {
  double kappa1, kappa2, kappa3;
};
struct MixtureModel {
  CircularMarginal first, second;
  double p;
};
struct VmfMixturePairModel {
  int dim;  // ambient dimension; points live on S^{dim-1}
  double p;
  double kappa;
};
struct ProjectedNormalModel {
  int d;  // X has d coordinates and is projected onto S^{d-1}
  double s12, s13, s23;
};
struct VonMisesCopulaModel {
  double kappa;
};

/// A validated joint model.
class ModelSpec {
 public:
  using Variant = std::variant<ProductModel, ParabolicModel, BivariateVonMisesModel,
                               BivariateWrappedCauchyModel, BivariateCosineModel, MixtureModel,
                               VmfMixturePairModel, ProjectedNormalModel, VonMisesCopulaModel>;

  static ModelSpec product(CircularMarginal f, CircularMarginal g) {
    return ModelSpec(ProductModel{f, g});
  }
  static ModelSpec parabolic(double p, bool wrapped = false) {
    require_probability(p, "PB");
    return ModelSpec(ParabolicModel{p, wrapped});
  }
  static ModelSpec bivariate_von_mises(double k1, double k2, double mu_g, double k_g) {
    require_concentration(k1, "BvM kappa1");
    require_concentration(k2, "BvM kappa2");
    require_concentration(k_g, "BvM binding kappa");
    if (!std::isfinite(mu_g)) throw ConfigError("BvM binding location must be finite");
    return ModelSpec(BivariateVonMisesModel{k1, k2, mu_g, k_g});
  }
  static ModelSpec bivariate_von_mises(double k_g) { return bivariate_von_mises(1.0, 1.0, 0.0, k_g); }
  static ModelSpec bivariate_wrapped_cauchy(double r1, double r2, double r) {
    require_rho(r1, "BWC rho1");
    require_rho(r2, "BWC rho2");
    if (!(r > -1.0 && r < 1.0)) throw ConfigError("BWC dependence rho must lie in (-1, 1)");
    return ModelSpec(BivariateWrappedCauchyModel{r1, r2, r});
  }
  static ModelSpec bivariate_wrapped_cauchy(double r) {
    return bivariate_wrapped_cauchy(std::exp(-1.0), std::exp(-1.0), r);
  }
  static ModelSpec bivariate_cosine(double k1, double k2, double k3) {
    require_concentration(k1, "BCvM kappa1");
    require_concentration(k2, "BCvM kappa2");
    if (!std::isfinite(k3)) throw ConfigError("BCvM kappa3 must be finite");
    return ModelSpec(BivariateCosineModel{k1, k2, k3});
  }
  static ModelSpec bivariate_cosine(double k3) { return bivariate_cosine(1.0, 1.0, k3); }
  static ModelSpec mixture(CircularMarginal f, CircularMarginal g, double p) {
    require_probability(p, "Mix");
    return ModelSpec(MixtureModel{f, g, p});
  }
  static ModelSpec vmf_mixture_pair(int dim, double p, double kappa) {
    if (dim < 2) throw ConfigError("vMFMix ambient dimension must be >= 2");
    require_probability(p, "vMFMix");
    require_concentration(kappa, "vMFMix kappa");
    return ModelSpec(VmfMixturePairModel{dim, p, kappa});
  }
  static ModelSpec projected_normal(int d, double s12, double s13, double s23) {
    if (d < 2) throw ConfigError("PN dimension must be >= 2");
    ModelSpec m(ProjectedNormalModel{d, s12, s13, s23});
    if (m.pn_cholesky().info() != Eigen::Success) {
      throw ConfigError("PN covariance matrix is not positive definite");
    }
    return m;
  }
  static ModelSpec von_mises_copula(double kappa) {
    require_concentration(kappa, "VMC kappa");
    return ModelSpec(VonMisesCopulaModel{kappa});
  }

  const Variant& model() const noexcept { return model_; }

  SampleKind x_kind() const {
    if (auto* v = std::get_if<VmfMixturePairModel>(&model_)) return SampleKind::sphere(v->dim - 1);
    if (auto* v = std::get_if<ProjectedNormalModel>(&model_)) return SampleKind::sphere(v->d - 1);
    return SampleKind::sphere(1);
  }
  SampleKind y_kind() const {
    if (auto* v = std::get_if<VmfMixturePairModel>(&model_)) return SampleKind::sphere(v->dim - 1);
    if (std::holds_alternative<ProjectedNormalModel>(model_) ||
        std::holds_alternative<VonMisesCopulaModel>(model_)) {
      return SampleKind::linear();
    }
    return SampleKind::sphere(1);
  }

  /// Covariance of (X_1..X_d, Z): identity plus the three stated
  /// off-diagonals (X_1,X_2), (X_1,Z), (X_2,Z).
  Eigen::MatrixXd pn_covariance() const {
    const auto& m = std::get<ProjectedNormalModel>(model_);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m.d + 1, m.d + 1);
    s(0, 1) = s(1, 0) = m.s12;
    s(0, m.d) = s(m.d, 0) = m.s13;
    s(1, m.d) = s(m.d, 1) = m.s23;
    return s;
  }
  Eigen::LLT<Eigen::MatrixXd> pn_cholesky() const { return Eigen::LLT<Eigen::MatrixXd>(pn_covariance()); }

  /// Canonical text form, accepted by parse_model.
  std::string to_string() const;

 private:
  explicit ModelSpec(Variant v) : model_(std::move(v)) {}

  static void require_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError(std::string(what) + " probability must lie in [0, 1]");
    }
  }
  static void require_concentration(double k, const char* what) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw ConfigError(std::string(what) + " must be finite and >= 0");
    }
  }
  static void require_rho(double r, const char* what) {
    if (!(r >= 0.0 && r < 1.0)) throw ConfigError(std::string(what) + " must lie in [0, 1)");
  }

  Variant model_;
};

inline std::string ModelSpec::to_string() const {
  std::ostringstream os;
  os.precision(15);
  std::visit(
      [&os](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProductModel>) {
          os << "product(" << m.first.to_string() << "," << m.second.to_string() << ")";
        } else if constexpr (std::is_same_v<T, ParabolicModel>) {
          os << (m.wrapped ? "PBmod(" : "PB(") << m.p << ")";
        } else if constexpr (std::is_same_v<T, BivariateVonMisesModel>) {
          os << "BvM(" << m.kappa1 << "," << m.kappa2 << "," << m.mu_g << "," << m.kappa_g << ")";
        } else if constexpr (std::is_same_v<T, BivariateWrappedCauchyModel>) {
          os << "BWC(" << m.rho1 << "," << m.rho2 << "," << m.rho << ")";
        } else if constexpr (std::is_same_v<T, BivariateCosineModel>) {
          os << "BCvM(" << m.kappa1 << "," << m.kappa2 << "," << m.kappa3 << ")";
        } else if constexpr (std::is_same_v<T, MixtureModel>) {
          os << "Mix(" << m.first.to_string() << "," << m.second.to_string() << "," << m.p << ")";
        } else if constexpr (std::is_same_v<T, VmfMixturePairModel>) {
          os << "vMFMix(" << m.dim << ";" << m.p << "," << m.kappa << ")";
        } else if constexpr (std::is_same_v<T, ProjectedNormalModel>) {
          os << "PN(" << m.d << ";" << m.s12 << "," << m.s13 << "," << m.s23 << ")";
        } else if constexpr (std::is_same_v<T, VonMisesCopulaModel>) {
          os << "VMC(" << m.kappa << ")";
        }
      },
      model_);
  return os.str();
}

// ---------------------------------------------------------------------------
// Joint samplers

namespace detail {

inline double wrap_unit(double u) {
  u -= std::floor(u);
  return u >= 1.0 ? 0.0 : u;
}

/// Wehrly-Johnson: U1 = F1(theta1), omega ~ binding, U2 = (U1 - omega/2pi)
/// mod 1 (or (omega/2pi - U1) mod 1 for negative association),
/// theta2 = F2^{-1}(U2).
template <class URBG>
std::pair<AngleVector, AngleVector> wehrly_johnson(const CircularMarginal& f1,
                                                   const CircularMarginal& f2,
                                                   const CircularMarginal& binding, bool negative,
                                                   std::size_t n, URBG& g) {
  std::vector<double> t1(n), t2(n);
  for (std::size_t i = 0; i < n; ++i) {
    t1[i] = f1.sample(g);
    const double u1 = f1.cdf(t1[i]);
    const double w = binding.sample(g) / kTwoPi;
    const double u2 = wrap_unit(negative ? w - u1 : u1 - w);
    t2[i] = f2.quantile(u2);
  }
  return {AngleVector(std::move(t1)), AngleVector(std::move(t2))};
}

inline PairedSample circular_pair(const AngleVector& a, const AngleVector& b) {
  return PairedSample{angles_to_sample(a), angles_to_sample(b)};
}

}  // namespace detail

/// Rejection sampler for the bivariate cosine model over the flat torus with
/// envelope exp(k1 + k2 + |k3|). Returns the number of proposals used.
template <class URBG>
std::uint64_t sample_bivariate_cosine(const BivariateCosineModel& m, std::size_t n, URBG& g,
                                      std::vector<double>& t1, std::vector<double>& t2) {
  const double envelope = m.kappa1 + m.kappa2 + std::abs(m.kappa3);
  t1.resize(n);
  t2.resize(n);
  std::uint64_t proposals = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::uint64_t tries = 0;; ++tries) {
      if (tries >= kMaxRejectionProposals) {
        throw SamplerError("BCvM rejection sampler exceeded 1e6 proposals for one draw");
      }
      ++proposals;
      const double a = kTwoPi * uniform01(g);
      const double b = kTwoPi * uniform01(g);
      const double logf = m.kappa1 * std::cos(a) + m.kappa2 * std::cos(b) +
                          m.kappa3 * std::cos(a - b) - envelope;
      if (std::log(uniform01(g)) <= logf) {
        t1[i] = a;
        t2[i] = b;
        break;
      }
    }
  }
  return proposals;
}

/// n i.i.d. pairs from a joint model.
template <class URBG>
PairedSample sample_joint(const ModelSpec& spec, std::size_t n, URBG& g) {
  if (n == 0) throw InputError("sample size must be >= 1");
  return std::visit(
      [n, &g, &spec](const auto& m) -> PairedSample {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ProductModel>) {
          auto a = sample_circular(m.first, n, g);
          auto b = sample_circular(m.second, n, g);
          return detail::circular_pair(a, b);
        } else if constexpr (std::is_same_v<T, ParabolicModel>) {
          std::vector<double> t1(n), t2(n);
          for (std::size_t i = 0; i < n; ++i) {
            t1[i] = kTwoPi * uniform01(g);
            const double u = kTwoPi * uniform01(g);
            const double raw = 2.0 * (m.p * t1[i] * t1[i] + (1.0 - m.p) * u * u);
            // raw lies in [0, 8 pi^2)
            t2[i] = m.wrapped ? raw : raw / (4.0 * std::numbers::pi);
          }
          return detail::circular_pair(AngleVector(std::move(t1)), AngleVector(std::move(t2)));
        } else if constexpr (std::is_same_v<T, BivariateVonMisesModel>) {
          const auto f1 = CircularMarginal::von_mises(0.0, m.kappa1);
          const auto f2 = CircularMarginal::von_mises(0.0, m.kappa2);
          const auto bind = CircularMarginal::von_mises(m.mu_g, m.kappa_g);
          auto [a, b] = detail::wehrly_johnson(f1, f2, bind, false, n, g);
          return detail::circular_pair(a, b);
        } else if constexpr (std::is_same_v<T, BivariateWrappedCauchyModel>) {
          const auto f1 = CircularMarginal::wrapped_cauchy(0.0, m.rho1);
          const auto f2 = CircularMarginal::wrapped_cauchy(0.0, m.rho2);
          const auto bind = CircularMarginal::wrapped_cauchy(0.0, std::abs(m.rho));
          auto [a, b] = detail::wehrly_johnson(f1, f2, bind, m.rho < 0.0, n, g);
          return detail::circular_pair(a, b);
        } else if constexpr (std::is_same_v<T, BivariateCosineModel>) {
          std::vector<double> t1, t2;
          sample_bivariate_cosine(m, n, g, t1, t2);
          return detail::circular_pair(AngleVector(std::move(t1)), AngleVector(std::move(t2)));
        } else if constexpr (std::is_same_v<T, MixtureModel>) {
          std::vector<double> t1(n), t2(n);
          for (std::size_t i = 0; i < n; ++i) {
            t1[i] = m.first.sample(g);
            t2[i] = uniform01(g) < m.p ? t1[i] : m.second.sample(g);
          }
          return detail::circular_pair(AngleVector(std::move(t1)), AngleVector(std::move(t2)));
        } else if constexpr (std::is_same_v<T, VmfMixturePairModel>) {
          Eigen::VectorXd e1 = Eigen::VectorXd::Zero(m.dim);
          e1(0) = 1.0;
          DenseMatrix x(static_cast<Eigen::Index>(n), m.dim), y(static_cast<Eigen::Index>(n), m.dim);
          for (Eigen::Index i = 0; i < x.rows(); ++i) {
            x.row(i) = sample_vmf_point(e1, 0.0, g).transpose();
            if (uniform01(g) < m.p) {
              y.row(i) = x.row(i);
            } else {
              y.row(i) = sample_vmf_point(e1, m.kappa, g).transpose();
            }
          }
          const auto kind = spec.x_kind();
          return PairedSample{DirectionalSample(std::move(x), kind),
                              DirectionalSample(std::move(y), kind)};
        } else if constexpr (std::is_same_v<T, ProjectedNormalModel>) {
          const Eigen::MatrixXd l = spec.pn_cholesky().matrixL();
          DenseMatrix x(static_cast<Eigen::Index>(n), m.d), z(static_cast<Eigen::Index>(n), 1);
          for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (;;) {
              const Eigen::VectorXd v = l * detail::standard_normal_vector(m.d + 1, g);
              const double norm = v.head(m.d).norm();
              if (norm <= 1e-300) continue;
              x.row(i) = (v.head(m.d) / norm).transpose();
              z(i, 0) = v(m.d);
              break;
            }
          }
          return PairedSample{DirectionalSample(std::move(x), SampleKind::sphere(m.d - 1)),
                              DirectionalSample(std::move(z), SampleKind::linear())};
        } else if constexpr (std::is_same_v<T, VonMisesCopulaModel>) {
          std::vector<double> theta(n), v(n);
          for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform01(g);
            const double w = sample_von_mises(0.0, m.kappa, g) / kTwoPi;
            theta[i] = kTwoPi * u;
            v[i] = detail::wrap_unit(u - w);
          }
          return PairedSample{angles_to_sample(AngleVector(std::move(theta))), linear_sample(v)};
        }
      },
      spec.model());
}

}  // namespace dirdep
