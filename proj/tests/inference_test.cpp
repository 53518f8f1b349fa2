#include <gtest/gtest.h>

#include <random>

#include "dirdep/errors.hpp"
#include "dirdep/inference.hpp"
#include "support.hpp"

using namespace dirdep;
namespace ts = testing_support;

TEST(PValue, UsesPlusOneRule) {
  EXPECT_DOUBLE_EQ(permutation_p_value(0, 999), 0.001);
  EXPECT_DOUBLE_EQ(permutation_p_value(999, 999), 1.0);
  EXPECT_DOUBLE_EQ(permutation_p_value(9, 199), 0.05);
}

TEST(Permutation, DrawsAreValidAndSeeded) {
  std::vector<std::size_t> a(30), b(30), c(30);
  permutation_for_draw(77, 3, a);
  permutation_for_draw(77, 3, b);
  permutation_for_draw(77, 4, c);
  EXPECT_TRUE(is_permutation(a));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Permutation, InverseAndValidation) {
  std::vector<std::size_t> s{2, 0, 3, 1};
  const auto inv = inverse_permutation(s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(inv[s[i]], i);
  std::vector<std::size_t> bad{0, 0, 1};
  EXPECT_FALSE(is_permutation(bad));
}

TEST(PermuteGram, ReindexesBothAxes) {
  std::mt19937_64 g(1);
  const auto s = ts::random_sample(1, 6, g);
  const auto k = gram(Kernel::energy(), s);
  std::vector<std::size_t> sigma{5, 3, 1, 0, 2, 4};
  const auto p = permute_gram(k, sigma);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(p(i, j), k(sigma[i], sigma[j]));
  std::vector<std::size_t> bad{0, 1, 2, 3, 4, 4};
  EXPECT_THROW(permute_gram(k, bad), InputError);
}

TEST(PermutationTest, PValueBoundsAndDeterminism) {
  std::mt19937_64 g(2);
  const auto x = ts::random_sample(2, 20, g);
  const auto y = ts::random_sample(1, 20, g);
  const auto gx = gram(Kernel::energy(), x), gy = gram(Kernel::energy(), y);
  const auto r1 = permutation_test(gx, gy, "dcor", 199, 123, 1);
  const auto r2 = permutation_test(gx, gy, "dcor", 199, 123, 3);
  EXPECT_EQ(r1, r2);
  EXPECT_GE(r1.p_value, 1.0 / 200);
  EXPECT_LE(r1.p_value, 1.0);
  EXPECT_EQ(r1.B, 199u);
  EXPECT_EQ(r1.n, 20u);
  EXPECT_DOUBLE_EQ(r1.p_value, (1.0 + static_cast<double>(r1.exceed_count)) / 200.0);
}

TEST(PermutationTest, RejectsBadArguments) {
  std::mt19937_64 g(3);
  const auto gx = gram(Kernel::energy(), ts::random_sample(1, 8, g));
  const auto gy = gram(Kernel::energy(), ts::random_sample(1, 8, g));
  EXPECT_THROW(permutation_test(gx, gy, "dcor", 0, 1), ConfigError);
  EXPECT_THROW(permutation_test(gx, gy, "hsic", 10, 1), ConfigError);
  const auto gz = gram(Kernel::energy(), ts::random_sample(1, 9, g));
  EXPECT_THROW(permutation_test(gx, gz, "dcor", 10, 1), InputError);
}

TEST(PermutationTest, StrongDependenceGivesSmallestPValue) {
  std::mt19937_64 g(4);
  const auto x = ts::random_sample(1, 30, g);
  const auto gx = gram(Kernel::energy(), x);
  const auto r = permutation_test(gx, gx, "dcor", 499, 5);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 500);
}

TEST(PermutationTest, ApproximatesExhaustiveEnumeration) {
  std::mt19937_64 g(5);
  const auto x = ts::random_sample(1, 7, g);
  const auto y = ts::random_sample(2, 7, g);
  const auto e = make_dcor_evaluator(gram(Kernel::energy(0.5), x), gram(Kernel::energy(0.5), y));
  const double exact = exhaustive_p_value(e);
  const auto mc = permutation_test(e, 20000, 9);
  EXPECT_NEAR(mc.p_value, exact, 0.012);
}

TEST(PermutationTest, ExhaustiveLimitedToSmallSamples) {
  std::mt19937_64 g(6);
  const auto x = ts::random_sample(1, 10, g);
  const auto e = make_dcor_evaluator(gram(Kernel::energy(), x), gram(Kernel::energy(), x));
  EXPECT_THROW(exhaustive_p_value(e), ConfigError);
}

TEST(PermutationTest, SizeUnderIndependence) {
  // 400 independent data sets, B = 99: rejection count is Binomial(400, 0.05).
  std::mt19937_64 g(7);
  int rejections = 0;
  for (int r = 0; r < 400; ++r) {
    const auto x = ts::random_sample(1, 15, g);
    const auto y = ts::random_sample(0, 15, g);
    const auto res = test_independence(StatisticSpec::dcor(Kernel::energy()), x, y, 99,
                                       static_cast<std::uint64_t>(r));
    if (res.p_value <= 0.05) ++rejections;
  }
  EXPECT_GE(rejections, 8);
  EXPECT_LE(rejections, 34);
}

TEST(PermutationTest, PValuesRoughlyUniformUnderIndependence) {
  std::mt19937_64 g(8);
  int below_half = 0;
  for (int r = 0; r < 300; ++r) {
    const auto x = ts::random_sample(2, 12, g);
    const auto y = ts::random_sample(2, 12, g);
    const auto res = test_independence(StatisticSpec::dcor(Kernel::log()), x, y, 99,
                                       static_cast<std::uint64_t>(r) + 1000);
    if (res.p_value <= 0.5) ++below_half;
  }
  EXPECT_GT(below_half, 120);
  EXPECT_LT(below_half, 180);
}

TEST(Battery, GramMatricesBuiltOncePerKernelAndSample) {
  std::mt19937_64 g(9);
  const auto x = ts::random_sample(1, 25, g);
  const auto y = ts::random_sample(1, 25, g);
  const auto specs = circular_battery();
  const auto before = gram_build_count().load();
  const auto res = test_independence(specs, x, y, 99, 1);
  // 9 kernels x 2 samples; ccor and trig build no kernel Gram.
  EXPECT_EQ(gram_build_count().load() - before, 18u);
  ASSERT_EQ(res.size(), 11u);
}

TEST(Battery, MatchesIndividualTestsWithSameSeed) {
  std::mt19937_64 g(10);
  const auto x = ts::random_sample(1, 18, g);
  const auto y = ts::random_sample(1, 18, g);
  const auto specs = kernel_battery();
  const auto all = test_independence(specs, x, y, 149, 31);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto one = test_independence(specs[k], x, y, 149, 31);
    EXPECT_EQ(one.exceed_count, all[k].exceed_count) << specs[k].id();
  }
}

TEST(TwoSample, SameDistributionIsNotRejectedOften) {
  std::mt19937_64 g(11);
  int rej = 0;
  for (int r = 0; r < 100; ++r) {
    const auto x = ts::random_sample(2, 15, g);
    const auto y = ts::random_sample(2, 12, g);
    const auto res = test_independence(StatisticSpec::nk(Kernel::energy()), x, y, 99,
                                       static_cast<std::uint64_t>(r));
    EXPECT_NEAR(res.statistic, nk_distance(Kernel::energy(), x, y), 1e-12);
    if (res.p_value <= 0.05) ++rej;
  }
  EXPECT_LE(rej, 13);
}
