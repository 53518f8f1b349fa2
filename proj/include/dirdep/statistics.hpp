#pragma once

// Kernel distance covariance and correlation, the two-sample kernel distance
// and the two circular competitor statistics.
//
// For Gram matrices A, B of size n with row sums r, s the empirical distance
// covariance is the V-statistic
//
//   V(A, B) = (1/n^2) sum_ij A_ij B_ij
//           + (1/n^4) (sum_ij A_ij) (sum_ij B_ij)
//           - (2/n^3) sum_i r_i s_i,
//
// where the last term uses sum_ijk A_ij B_ik = sum_i r_i s_i, so the whole
// statistic costs O(n^2). Diagonal terms are kept (no U-statistic correction).

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"
#include "dirdep/kernels.hpp"

namespace dirdep {

/// Marginal V-statistics at or below this value are treated as degenerate.
inline constexpr double kDegenerateEpsilon = 1e-14;

/// A named statistic value.
struct StatValue {
  double value = 0.0;
  std::string name;
  std::size_t n = 0;
};

namespace detail {

inline std::vector<double> row_sums(const DenseMatrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = m.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j];
    r[i] = acc;
  }
  return r;
}

inline double total(std::span<const double> row_sums) {
  double t = 0.0;
  for (double v : row_sums) t += v;
  return t;
}

/// Precomputed pieces of V(A, B) that do not change when B is relabeled.
struct VFormParts {
  std::vector<double> ra, rb;
  double ta = 0.0, tb = 0.0;

  VFormParts() = default;
  VFormParts(const DenseMatrix& a, const DenseMatrix& b)
      : ra(row_sums(a)), rb(row_sums(b)), ta(total(ra)), tb(total(rb)) {}
};

/// V(A, B') with B'_ij = B[idx(i)][idx(j)]; A and B must be symmetric.
template <class Index>
double v_form(const DenseMatrix& a, const DenseMatrix& b, const VFormParts& p, Index idx) {
  const auto n = static_cast<std::size_t>(a.rows());
  const double* pa = a.data();
  const double* pb = b.data();
  double off = 0.0, diag = 0.0, rs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = pa + i * n;
    const std::size_t si = idx(i);
    const double* bi = pb + si * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += ai[j] * bi[idx(j)];
    off += acc;
    diag += ai[i] * bi[si];
    rs += p.ra[i] * p.rb[si];
  }
  const double nn = static_cast<double>(n);
  const double n2 = nn * nn;
  return (2.0 * off + diag) / n2 + (p.ta * p.tb) / (n2 * n2) - 2.0 * rs / (n2 * nn);
}

inline void require_same_size(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InputError(std::string(what) + ": matrix size mismatch (" + std::to_string(a.rows()) +
                     " vs " + std::to_string(b.rows()) + ")");
  }
}

inline double v_stat(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_size(a, b, "v_stat");
  return v_form(a, b, VFormParts(a, b), [](std::size_t i) { return i; });
}

/// J(t) = cos(lambda sin t) exp(lambda (cos t - 1)).
inline double trig_weight(double t, double lambda) {
  return std::cos(lambda * std::sin(t)) * std::exp(lambda * (std::cos(t) - 1.0));
}

inline DenseMatrix trig_matrix(const AngleVector& theta, double lambda) {
  const auto n = static_cast<Eigen::Index>(theta.size());
  DenseMatrix j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    j(r, r) = 1.0;
    for (Eigen::Index c = 0; c < r; ++c) {
      // J is even in its argument, so the matrix is symmetric.
      const double v = trig_weight(theta[static_cast<std::size_t>(r)] -
                                       theta[static_cast<std::size_t>(c)],
                                   lambda);
      j(r, c) = v;
      j(c, r) = v;
    }
  }
  return j;
}

inline void require_positive_lambda(double lambda) {
  if (!(lambda > 0.0)) throw ConfigError("trigonometric moment statistic needs lambda > 0");
}

/// sin(theta_i - mean direction), raising DegenerateMarginal if the mean
/// direction or the spread is undefined.
inline std::vector<double> centered_sines(const AngleVector& theta, double& sum_sq) {
  double s = 0.0, c = 0.0;
  for (double t : theta.values()) {
    s += std::sin(t);
    c += std::cos(t);
  }
  if (std::hypot(s, c) <= 1e-12 * static_cast<double>(theta.size())) {
    throw DegenerateMarginal("circular mean direction undefined (zero resultant)");
  }
  const double mean = std::atan2(s, c);
  std::vector<double> out(theta.size());
  sum_sq = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out[i] = std::sin(theta[i] - mean);
    sum_sq += out[i] * out[i];
  }
  if (sum_sq <= kDegenerateEpsilon) {
    throw DegenerateMarginal("circular sample has no spread around its mean direction");
  }
  return out;
}

}  // namespace detail

/// Empirical kernel distance covariance, O(n^2).
inline double v_stat(const GramMatrix& a, const GramMatrix& b) {
  return detail::v_stat(a.values(), b.values());
}

/// Literal O(n^3) transcription of the triple sum; test oracle for v_stat.
inline double v_stat_naive(const GramMatrix& a, const GramMatrix& b) {
  if (a.size() != b.size()) throw InputError("v_stat_naive: matrix size mismatch");
  const std::size_t n = a.size();
  double s1 = 0.0, sa = 0.0, sb = 0.0, s3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      s1 += a(i, j) * b(i, j);
      sa += a(i, j);
      sb += b(i, j);
      for (std::size_t k = 0; k < n; ++k) s3 += a(i, j) * b(i, k);
    }
  }
  const double nn = static_cast<double>(n);
  return s1 / (nn * nn) + sa * sb / (nn * nn * nn * nn) - 2.0 * s3 / (nn * nn * nn);
}

/// Normalized statistic V(A,B) / sqrt(V(A,A) V(B,B)).
inline double dcor_stat(const GramMatrix& a, const GramMatrix& b) {
  const double vab = v_stat(a, b);
  const double vaa = v_stat(a, a);
  const double vbb = v_stat(b, b);
  if (vaa <= kDegenerateEpsilon || vbb <= kDegenerateEpsilon) {
    throw DegenerateMarginal("distance correlation undefined: a marginal sample is constant");
  }
  return vab / std::sqrt(vaa * vbb);
}

/// Plug-in two-sample kernel distance
///   2 mean K(X_i, Y_j) - mean K(X_i, X_j) - mean K(Y_i, Y_j),
/// all means over ordered pairs with the diagonal included.
inline double nk_distance(const Kernel& k, const DirectionalSample& x, const DirectionalSample& y) {
  if (x.ambient_dim() != y.ambient_dim()) {
    throw InputError("nk_distance: samples live in different ambient dimensions (" +
                     std::to_string(x.ambient_dim()) + " vs " + std::to_string(y.ambient_dim()) +
                     ")");
  }
  auto mean_between = [&k](const DirectionalSample& p, const DirectionalSample& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = 0; j < q.size(); ++j) s += k(chord_distance(p.row(i), q.row(j)));
    }
    return s / (static_cast<double>(p.size()) * static_cast<double>(q.size()));
  };
  return 2.0 * mean_between(x, y) - mean_between(x, x) - mean_between(y, y);
}

/// Circular correlation coefficient of two angle samples.
inline double circ_cor(const AngleVector& theta, const AngleVector& phi) {
  if (theta.size() != phi.size()) throw InputError("circ_cor: samples differ in length");
  if (theta.size() < 2) throw InputError("circ_cor: needs at least two observations");
  double saa = 0.0, sbb = 0.0;
  const auto a = detail::centered_sines(theta, saa);
  const auto b = detail::centered_sines(phi, sbb);
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sab += a[i] * b[i];
  return sab / std::sqrt(saa * sbb);
}

/// Trigonometric-moment independence statistic T_{n,lambda}; equals
/// n * V(J_theta, J_phi) with J_theta[j][k] = J(theta_j - theta_k).
inline double trig_moment_stat(const AngleVector& theta, const AngleVector& phi,
                               double lambda = 1.0) {
  detail::require_positive_lambda(lambda);
  if (theta.size() != phi.size()) throw InputError("trig_moment_stat: samples differ in length");
  if (theta.size() == 0) throw InputError("trig_moment_stat: empty sample");
  const auto jt = detail::trig_matrix(theta, lambda);
  const auto jp = detail::trig_matrix(phi, lambda);
  return static_cast<double>(theta.size()) * detail::v_stat(jt, jp);
}

}  // namespace dirdep
