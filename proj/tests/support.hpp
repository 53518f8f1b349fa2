#pragma once

// Independent reference computations for the test suite. Nothing here calls
// into the statistics code under test.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dirdep/geometry.hpp"

namespace testing_support {

using Matrix = Eigen::MatrixXd;

/// Uniform points on S^d (d >= 1) or standard normal values (d == 0, linear).
inline dirdep::DirectionalSample random_sample(int d, std::size_t n, std::mt19937_64& g) {
  std::normal_distribution<double> z(0.0, 1.0);
  if (d == 0) {
    std::vector<double> v(n);
    for (auto& x : v) x = z(g);
    return dirdep::linear_sample(v);
  }
  dirdep::DenseMatrix m(static_cast<Eigen::Index>(n), d + 1);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = z(g);
    m.row(i) /= m.row(i).norm();
  }
  return dirdep::DirectionalSample(m, dirdep::SampleKind::sphere(d));
}

inline Matrix distances(const dirdep::DirectionalSample& s) {
  const auto& p = s.points();
  Matrix d(p.rows(), p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.rows(); ++j) d(i, j) = (p.row(i) - p.row(j)).norm();
  return d;
}

inline Matrix apply(const Matrix& d, const std::string& kernel, double a = 1.0) {
  Matrix k = d;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double x = d.data()[i];
    if (kernel == "energy") k.data()[i] = std::pow(x, a);
    else if (kernel == "ratio") k.data()[i] = x / (1.0 + x);
    else k.data()[i] = std::log1p(x * x);
  }
  return k;
}

/// Double-centering form: mean of (HAH) .* (HBH).
inline double dcov_centered(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  const Matrix h = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix ca = h * a * h, cb = h * b * h;
  return ca.cwiseProduct(cb).sum() / static_cast<double>(n * n);
}

/// Literal triple-sum V-statistic.
inline double v_triple_sum(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  const double nd = static_cast<double>(n);
  double s1 = 0, sa = 0, sb = 0, s3 = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      s1 += a(i, j) * b(i, j);
      sa += a(i, j);
      sb += b(i, j);
      for (Eigen::Index k = 0; k < n; ++k) s3 += a(i, j) * b(i, k);
    }
  return s1 / (nd * nd) + sa * sb / (nd * nd * nd * nd) - 2.0 * s3 / (nd * nd * nd);
}

inline double trig_weight(double t, double lambda) {
  return std::cos(lambda * std::sin(t)) * std::exp(lambda * (std::cos(t) - 1.0));
}

/// n * V(J_theta, J_phi) summed literally over index triples.
inline double trig_triple_sum(const std::vector<double>& th, const std::vector<double>& ph,
                              double lambda) {
  const auto n = static_cast<Eigen::Index>(th.size());
  Matrix a(n, n), b(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = trig_weight(th[i] - th[j], lambda);
      b(i, j) = trig_weight(ph[i] - ph[j], lambda);
    }
  return static_cast<double>(n) * v_triple_sum(a, b);
}

/// Kuiper statistic V = D+ + D- of a sample against a CDF on [0, 2 pi).
template <class Cdf>
double kuiper_statistic(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double dp = 0, dm = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    dp = std::max(dp, (static_cast<double>(i) + 1) / n - f);
    dm = std::max(dm, f - static_cast<double>(i) / n);
  }
  return dp + dm;
}

/// Asymptotic Kuiper tail probability with Stephens' small-sample correction.
inline double kuiper_p_value(double v, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lam = (sn + 0.155 + 0.24 / sn) * v;
  double p = 0;
  for (int j = 1; j <= 100; ++j) {
    const double t = static_cast<double>(j) * lam;
    p += 2.0 * (4.0 * t * t - 1.0) * std::exp(-2.0 * t * t);
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Trapezoid integral on a fine uniform grid.
template <class F>
double trapezoid(F f, double a, double b, int steps = 200000) {
  const double h = (b - a) / steps;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < steps; ++i) s += f(a + h * i);
  return s * h;
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing_support
