#pragma once

// Points on spheres, angular <-> Cartesian conversion, chord distances.
//
// Every sample is stored as an n x m row-major matrix. Sphere-valued samples
// on S^d have m = d + 1 and unit-norm rows; linear samples have m = 1 and no
// norm constraint. Distances are always Euclidean (chord) distances in the
// ambient space.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dirdep/errors.hpp"

namespace dirdep {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kUnitNormTolerance = 1e-9;

/// Reduces an angle to [0, 2*pi).
inline double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline double degrees_to_radians(double deg) { return deg * (std::numbers::pi / 180.0); }

/// Where the observations of a sample live.
class SampleKind {
 public:
  enum class Tag { sphere, linear };

  static SampleKind sphere(int d) {
    if (d < 1) throw ConfigError("sphere dimension must be >= 1, got " + std::to_string(d));
    return SampleKind(Tag::sphere, d);
  }
  static SampleKind linear() { return SampleKind(Tag::linear, 0); }

  Tag tag() const noexcept { return tag_; }
  bool is_sphere() const noexcept { return tag_ == Tag::sphere; }
  bool is_circle() const noexcept { return tag_ == Tag::sphere && dim_ == 1; }
  /// Intrinsic sphere dimension d (0 for linear).
  int sphere_dim() const noexcept { return dim_; }
  /// Number of coordinates per observation.
  int ambient_dim() const noexcept { return tag_ == Tag::sphere ? dim_ + 1 : 1; }

  std::string to_string() const {
    return tag_ == Tag::sphere ? "sphere(" + std::to_string(dim_) + ")" : "linear";
  }

  friend bool operator==(const SampleKind&, const SampleKind&) = default;

 private:
  SampleKind(Tag t, int d) : tag_(t), dim_(d) {}
  Tag tag_;
  int dim_;
};

/// n observations on S^d (or on the real line), one per row.
class DirectionalSample {
 public:
  /// Validates the rows; off-sphere rows are rejected unless `renormalize`.
  DirectionalSample(DenseMatrix points, SampleKind kind, bool renormalize = false)
      : points_(std::move(points)), kind_(kind) {
    if (points_.rows() < 1) throw InputError("sample must contain at least one observation");
    if (points_.cols() != kind_.ambient_dim()) {
      std::ostringstream os;
      os << "sample of kind " << kind_.to_string() << " needs " << kind_.ambient_dim()
         << " coordinates per row, got " << points_.cols();
      throw InputError(os.str());
    }
    for (Eigen::Index i = 0; i < points_.rows(); ++i) {
      for (Eigen::Index j = 0; j < points_.cols(); ++j) {
        if (!std::isfinite(points_(i, j))) {
          throw InputError("non-finite coordinate in row " + std::to_string(i));
        }
      }
      if (!kind_.is_sphere()) continue;
      const double norm = points_.row(i).norm();
      if (std::abs(norm - 1.0) > kUnitNormTolerance) {
        if (!renormalize || norm == 0.0) {
          std::ostringstream os;
          os << "row " << i << " has norm " << norm << ", expected 1 within "
             << kUnitNormTolerance;
          throw InputError(os.str());
        }
        points_.row(i) /= norm;
      }
    }
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  int ambient_dim() const noexcept { return static_cast<int>(points_.cols()); }
  const SampleKind& kind() const noexcept { return kind_; }
  const DenseMatrix& points() const noexcept { return points_; }

  std::span<const double> row(std::size_t i) const {
    return {points_.data() + i * points_.cols(), static_cast<std::size_t>(points_.cols())};
  }

 private:
  DenseMatrix points_;
  SampleKind kind_;
};

/// Circular observations in radians, normalized to [0, 2*pi) on construction.
class AngleVector {
 public:
  AngleVector() = default;
  explicit AngleVector(std::vector<double> radians) : angles_(std::move(radians)) {
    for (std::size_t i = 0; i < angles_.size(); ++i) {
      if (!std::isfinite(angles_[i])) {
        throw InputError("non-finite angle at position " + std::to_string(i));
      }
      angles_[i] = wrap_angle(angles_[i]);
    }
  }

  static AngleVector from_degrees(std::span<const double> degrees) {
    std::vector<double> r;
    r.reserve(degrees.size());
    for (std::size_t i = 0; i < degrees.size(); ++i) {
      if (!std::isfinite(degrees[i])) {
        throw InputError("non-finite angle at position " + std::to_string(i));
      }
      r.push_back(degrees_to_radians(degrees[i]));
    }
    return AngleVector(std::move(r));
  }

  std::size_t size() const noexcept { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  std::span<const double> values() const noexcept { return angles_; }

 private:
  std::vector<double> angles_;
};

/// Embeds circular data: row i = (cos theta_i, sin theta_i).
inline DirectionalSample angles_to_sample(const AngleVector& angles) {
  if (angles.size() == 0) throw InputError("sample must contain at least one observation");
  DenseMatrix pts(static_cast<Eigen::Index>(angles.size()), 2);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    pts(r, 0) = std::cos(angles[i]);
    pts(r, 1) = std::sin(angles[i]);
  }
  return DirectionalSample(std::move(pts), SampleKind::sphere(1));
}

/// Inverse of angles_to_sample for circular samples.
inline AngleVector sample_to_angles(const DirectionalSample& s) {
  if (!s.kind().is_circle()) {
    throw InputError("angular view requires circular data, got " + s.kind().to_string());
  }
  std::vector<double> a(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    a[i] = std::atan2(s.points()(r, 1), s.points()(r, 0));
  }
  return AngleVector(std::move(a));
}

inline DirectionalSample linear_sample(std::span<const double> values) {
  DenseMatrix pts(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = values[i];
  return DirectionalSample(std::move(pts), SampleKind::linear());
}

/// Euclidean distance ||x - y||.
inline double chord_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw InputError("chord_distance: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Symmetric n x n matrix of chord distances with zero diagonal.
inline DenseMatrix pairwise_distances(const DirectionalSample& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  DenseMatrix d = DenseMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = chord_distance(s.row(static_cast<std::size_t>(i)),
                                      s.row(static_cast<std::size_t>(j)));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace dirdep
