#pragma once

// Permutation calibration of independence statistics.
//
// The X sample is held fixed and Y is relabeled by B uniformly random
// permutations (drawn with replacement from the symmetric group). With
// exceed = #{b : T*_b >= T_obs}, ties counted as exceedances, the p-value is
// (1 + exceed) / (B + 1); the test rejects at level alpha when p <= alpha.
// Permutation b (1-based) is drawn from SplitMix64(derive_seed(seed, b)), so
// results do not depend on how the B evaluations are scheduled.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dirdep/errors.hpp"
#include "dirdep/evaluators.hpp"
#include "dirdep/kernels.hpp"
#include "dirdep/parallel.hpp"
#include "dirdep/rng.hpp"

namespace dirdep {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::uint64_t B = 0;
  std::size_t n = 0;
  std::uint64_t exceed_count = 0;
  std::uint64_t seed = 0;
  std::string statistic_name;

  friend bool operator==(const TestResult&, const TestResult&) = default;
};

inline double permutation_p_value(std::uint64_t exceed, std::uint64_t B) {
  return static_cast<double>(1 + exceed) / static_cast<double>(B + 1);
}

inline bool is_permutation(std::span<const std::size_t> sigma) {
  std::vector<unsigned char> seen(sigma.size(), 0);
  for (auto s : sigma) {
    if (s >= sigma.size() || seen[s]) return false;
    seen[s] = 1;
  }
  return true;
}

inline std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> sigma) {
  if (!is_permutation(sigma)) throw InputError("not a permutation");
  std::vector<std::size_t> inv(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) inv[sigma[i]] = i;
  return inv;
}

/// out[i][j] = G[sigma(i)][sigma(j)]. Evaluators do this lazily; the explicit
/// form exists for checks and callers that need the matrix.
inline GramMatrix permute_gram(const GramMatrix& g, std::span<const std::size_t> sigma) {
  if (sigma.size() != g.size() || !is_permutation(sigma)) {
    throw InputError("permute_gram: sigma is not a permutation of 0.." +
                     std::to_string(g.size() == 0 ? 0 : g.size() - 1));
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  DenseMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = g(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
    }
  }
  return GramMatrix(std::move(out), g.kernel());
}

/// The permutation used for draw b (1-based) of a test seeded with `seed`.
inline void permutation_for_draw(std::uint64_t seed, std::uint64_t b, std::span<std::size_t> out) {
  SplitMix64 g(derive_seed(seed, b));
  random_permutation(out, g);
}

/// Runs one permutation test per statistic, all sharing the same B
/// permutations. Every statistic must have the same size().
template <PermutationStatistic S>
std::vector<TestResult> permutation_test_battery(std::span<const S> stats, std::uint64_t B,
                                                 std::uint64_t seed, unsigned jobs = 1) {
  if (B < 1) throw ConfigError("number of permutations B must be >= 1");
  if (stats.empty()) return {};
  const std::size_t n = stats.front().size();
  for (const auto& s : stats) {
    if (s.size() != n) throw InputError("statistics in a battery must share the sample size");
  }
  const std::size_t m = stats.size();
  std::vector<double> observed(m);
  for (std::size_t k = 0; k < m; ++k) observed[k] = stats[k].observed();

  // Contiguous chunks of draws per worker; integer counts are summed in
  // chunk order, which is exact and order-independent anyway.
  jobs = std::max(1u, jobs);
  const std::uint64_t n_chunks = std::min<std::uint64_t>(B, jobs);
  std::vector<std::vector<std::uint64_t>> counts(n_chunks, std::vector<std::uint64_t>(m, 0));
  parallel_for(n_chunks, jobs, [&](std::size_t c) {
    const std::uint64_t lo = 1 + B * c / n_chunks;
    const std::uint64_t hi = 1 + B * (c + 1) / n_chunks;
    std::vector<std::size_t> sigma(n);
    for (std::uint64_t b = lo; b < hi; ++b) {
      permutation_for_draw(seed, b, sigma);
      for (std::size_t k = 0; k < m; ++k) {
        if (stats[k].permuted(sigma) >= observed[k]) ++counts[c][k];
      }
    }
  });

  std::vector<TestResult> out(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::uint64_t exceed = 0;
    for (const auto& c : counts) exceed += c[k];
    out[k] = TestResult{observed[k], permutation_p_value(exceed, B), B, n, exceed, seed,
                        std::string(stats[k].name())};
  }
  return out;
}

template <PermutationStatistic S>
TestResult permutation_test(const S& stat, std::uint64_t B, std::uint64_t seed,
                            unsigned jobs = 1) {
  return permutation_test_battery(std::span<const S>(&stat, 1), B, seed, jobs).front();
}

/// Permutation test of a Gram pair: `stat` is "dcor" or "dcov".
inline TestResult permutation_test(const GramMatrix& a, const GramMatrix& b, std::string_view stat,
                                   std::uint64_t B, std::uint64_t seed, unsigned jobs = 1) {
  if (a.size() != b.size()) throw InputError("permutation_test: Gram sizes differ");
  if (B < 1) throw ConfigError("number of permutations B must be >= 1");
  if (stat == "dcor") return permutation_test(make_dcor_evaluator(a, b), B, seed, jobs);
  if (stat == "dcov") return permutation_test(make_dcov_evaluator(a, b), B, seed, jobs);
  throw ConfigError("permutation_test on Gram matrices supports dcor and dcov, got '" +
                    std::string(stat) + "'");
}

/// Exact permutation p-value over all n! relabelings (identity included):
/// #{sigma : T_sigma >= T_obs} / n!. Oracle for small n only.
template <PermutationStatistic S>
double exhaustive_p_value(const S& stat) {
  const std::size_t n = stat.size();
  if (n > 9) throw ConfigError("exhaustive enumeration is limited to n <= 9");
  std::vector<std::size_t> sigma(n);
  std::iota(sigma.begin(), sigma.end(), std::size_t{0});
  const double t = stat.observed();
  std::uint64_t total = 0, ge = 0;
  do {
    ++total;
    if (stat.permuted(sigma) >= t) ++ge;
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return static_cast<double>(ge) / static_cast<double>(total);
}

/// Independence test for one statistic on raw samples; Grams are built once.
inline TestResult test_independence(const StatisticSpec& spec, const DirectionalSample& x,
                                    const DirectionalSample& y, std::uint64_t B,
                                    std::uint64_t seed, unsigned jobs = 1) {
  if (B < 1) throw ConfigError("number of permutations B must be >= 1");
  return permutation_test(make_evaluator(spec, x, y), B, seed, jobs);
}

inline std::vector<TestResult> test_independence(std::span<const StatisticSpec> specs,
                                                 const DirectionalSample& x,
                                                 const DirectionalSample& y, std::uint64_t B,
                                                 std::uint64_t seed, unsigned jobs = 1) {
  if (B < 1) throw ConfigError("number of permutations B must be >= 1");
  const auto evals = make_evaluators(specs, x, y);
  return permutation_test_battery(std::span<const AnyStatistic>(evals), B, seed, jobs);
}

}  // namespace dirdep
