#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dirdep/errors.hpp"
#include "dirdep/geometry.hpp"

using namespace dirdep;

TEST(DirectionalSample, RejectsOffSphereRowAndNamesIt) {
  DenseMatrix m(3, 2);
  m << 1, 0, 0, 1, 0.5, 0.5;
  try {
    DirectionalSample s(m, SampleKind::sphere(1));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(DirectionalSample, RenormalizeRescalesRows) {
  DenseMatrix m(2, 3);
  m << 2, 0, 0, 0, 3, 4;
  DirectionalSample s(m, SampleKind::sphere(2), true);
  EXPECT_NEAR(s.points().row(1).norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.points()(1, 1), 0.6);
}

TEST(DirectionalSample, ZeroRowCannotBeRenormalized) {
  DenseMatrix m(2, 2);
  m << 1, 0, 0, 0;
  EXPECT_THROW(DirectionalSample(m, SampleKind::sphere(1), true), InputError);
}

TEST(DirectionalSample, ColumnCountMustMatchKind) {
  DenseMatrix m(2, 2);
  m << 1, 0, 0, 1;
  EXPECT_THROW(DirectionalSample(m, SampleKind::sphere(2)), InputError);
}

TEST(DirectionalSample, NonFiniteCoordinateRejected) {
  DenseMatrix m(2, 1);
  m << 1, std::nan("");
  EXPECT_THROW(DirectionalSample(m, SampleKind::linear()), InputError);
}

TEST(AngleVector, WrapsIntoHalfOpenInterval) {
  AngleVector a(std::vector<double>{-0.5, kTwoPi, 7.0});
  EXPECT_NEAR(a[0], kTwoPi - 0.5, 1e-15);
  EXPECT_EQ(a[1], 0.0);
  EXPECT_NEAR(a[2], 7.0 - kTwoPi, 1e-15);
  for (double v : a.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, kTwoPi);
  }
}

TEST(AngleVector, DegreesConvertToRadians) {
  std::vector<double> deg{0, 90, 180, 360, -90};
  const auto a = AngleVector::from_degrees(deg);
  EXPECT_NEAR(a[1], std::numbers::pi / 2, 1e-15);
  EXPECT_NEAR(a[2], std::numbers::pi, 1e-15);
  EXPECT_EQ(a[3], 0.0);
  EXPECT_NEAR(a[4], 1.5 * std::numbers::pi, 1e-15);
}

TEST(AngleVector, RoundTripThroughUnitVectors) {
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> v(200);
  for (auto& x : v) x = u(g);
  const AngleVector a(v);
  const auto back = sample_to_angles(angles_to_sample(a));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::abs(back[i] - a[i]);
    EXPECT_LT(std::min(d, kTwoPi - d), 1e-12);
  }
}

TEST(ChordDistance, CircleMatchesHalfAngleFormula) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int k = 0; k < 100; ++k) {
    const double a = u(g), b = u(g);
    const double x[2] = {std::cos(a), std::sin(a)};
    const double y[2] = {std::cos(b), std::sin(b)};
    EXPECT_NEAR(chord_distance(x, y), 2.0 * std::abs(std::sin((a - b) / 2)), 1e-12);
  }
}

TEST(ChordDistance, AntipodalPointsAreTwoApart) {
  const double x[3] = {0, 0, 1}, y[3] = {0, 0, -1};
  EXPECT_DOUBLE_EQ(chord_distance(x, y), 2.0);
}

TEST(ChordDistance, DimensionMismatchThrows) {
  const double x[2] = {1, 0}, y[3] = {1, 0, 0};
  EXPECT_THROW(chord_distance(x, y), InputError);
}

TEST(PairwiseDistances, SymmetricWithZeroDiagonal) {
  std::vector<double> v{0.1, 1.0, 2.5, 4.0};
  const auto d = pairwise_distances(angles_to_sample(AngleVector(v)));
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(d(i, i), 0.0);
    for (int j = 0; j < 4; ++j) EXPECT_EQ(d(i, j), d(j, i));
  }
}

TEST(SampleKind, Descriptions) {
  EXPECT_TRUE(SampleKind::sphere(1).is_circle());
  EXPECT_FALSE(SampleKind::sphere(2).is_circle());
  EXPECT_EQ(SampleKind::sphere(2).ambient_dim(), 3);
  EXPECT_EQ(SampleKind::linear().ambient_dim(), 1);
  EXPECT_EQ(SampleKind::sphere(3).to_string(), "sphere(3)");
}
