#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace convominer {

/// Thrown for constant series or series shorter than three values.
class DegenerateInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CorrelationReport {
  double pearson = 0.0;
  double spearman = 0.0;
  double kendall = 0.0;
  double pearson_p = 1.0;
  double spearman_p = 1.0;
  double kendall_p = 1.0;
};

inline constexpr std::uint64_t kDefaultPermutationSeed = 20240527;
inline constexpr std::size_t kDefaultPermutations = 10000;

double pearson(std::span<const double> xs, std::span<const double> ys);
/// Pearson on mid-ranks.
double spearman(std::span<const double> xs, std::span<const double> ys);
/// Kendall tau-b with tie correction.
double kendall_tau_b(std::span<const double> xs, std::span<const double> ys);

/// 1-based ranks; tied values share the average of their ranks.
std::vector<double> mid_ranks(std::span<const double> values);

/// Uniform integer in [0, bound) from raw 64-bit engine output by rejection,
/// so permutations are reproducible independent of the standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// All three coefficients plus two-sided permutation p-values. The generator is
/// advanced by the test; pass a freshly seeded one for reproducible results.
/// p = (1 + #{|stat_perm| >= |stat_obs|}) / (1 + permutations).
CorrelationReport correlation_suite(std::span<const double> xs, std::span<const double> ys,
                                    std::mt19937_64& rng,
                                    std::size_t permutations = kDefaultPermutations);

/// Convenience overload seeded with kDefaultPermutationSeed.
CorrelationReport correlation_suite(std::span<const double> xs, std::span<const double> ys,
                                    std::size_t permutations = kDefaultPermutations);

}  // namespace convominer
