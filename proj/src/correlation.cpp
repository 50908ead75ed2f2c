#include "convominer/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace convominer {

namespace {

void check_pair(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("correlation: series lengths differ");
  if (xs.size() < 3) throw DegenerateInputError("correlation: need at least 3 values");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(xs) || constant(ys)) throw DegenerateInputError("correlation: constant series");
}

double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

double pearson_unchecked(std::span<const double> xs, std::span<const double> ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

double tied_pairs_sorted(const std::vector<double>& sorted) {
  double ties = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * (t - 1.0) / 2.0;
    i = j;
  }
  return ties;
}

double pair_count(std::size_t n) { return static_cast<double>(n) * (static_cast<double>(n) - 1.0) / 2.0; }

// n0 - n1 where n1 counts tied pairs.
double untied_pairs(std::span<const double> v) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  return pair_count(v.size()) - tied_pairs_sorted(sorted);
}

// Inversions by merge sort; equal elements are not inversions.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf) {
  std::uint64_t swaps = 0;
  const std::size_t n = v.size();
  buf.resize(n);
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n), hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

// Concordant minus discordant pairs (Knight's algorithm).
class KendallNumerator {
 public:
  explicit KendallNumerator(std::span<const double> xs) : xs_(xs.begin(), xs.end()), order_(xs.size()) {
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return xs_[a] < xs_[b]; });
    std::vector<double> sx(xs.begin(), xs.end());
    std::sort(sx.begin(), sx.end());
    x_ties_ = tied_pairs_sorted(sx);
  }

  double operator()(std::span<const double> ys) {
    const std::size_t n = order_.size();
    y_sorted_.resize(n);
    for (std::size_t i = 0; i < n; ++i) y_sorted_[i] = ys[order_[i]];
    // Within each x tie group order by y, then count joint ties.
    double joint = 0.0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && xs_[order_[j]] == xs_[order_[i]]) ++j;
      std::sort(y_sorted_.begin() + static_cast<std::ptrdiff_t>(i), y_sorted_.begin() + static_cast<std::ptrdiff_t>(j));
      for (std::size_t a = i; a < j;) {
        std::size_t b = a;
        while (b < j && y_sorted_[b] == y_sorted_[a]) ++b;
        joint += pair_count(b - a);
        a = b;
      }
      i = j;
    }
    const double swaps = static_cast<double>(count_inversions(y_sorted_, buf_));
    const double y_ties = tied_pairs_sorted(y_sorted_);  // y_sorted_ is fully sorted now
    return pair_count(n) - x_ties_ - y_ties + joint - 2.0 * swaps;
  }

 private:
  std::vector<double> xs_;
  std::vector<std::size_t> order_;
  double x_ties_ = 0.0;
  std::vector<double> y_sorted_, buf_;
};

}  // namespace

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  return pearson_unchecked(xs, ys);
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  const auto rx = mid_ranks(xs), ry = mid_ranks(ys);
  return pearson_unchecked(rx, ry);
}

double kendall_tau_b(std::span<const double> xs, std::span<const double> ys) {
  check_pair(xs, ys);
  KendallNumerator numerator(xs);
  return clamp_unit(numerator(ys) / std::sqrt(untied_pairs(xs) * untied_pairs(ys)));
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

CorrelationReport correlation_suite(std::span<const double> xs, std::span<const double> ys,
                                    std::mt19937_64& rng, std::size_t permutations) {
  check_pair(xs, ys);
  CorrelationReport report;
  const auto rx = mid_ranks(xs);
  const auto ry = mid_ranks(ys);
  const double kendall_denom = std::sqrt(untied_pairs(xs) * untied_pairs(ys));
  KendallNumerator kendall_numerator(xs);

  report.pearson = pearson_unchecked(xs, ys);
  report.spearman = pearson_unchecked(rx, ry);
  report.kendall = clamp_unit(kendall_numerator(ys) / kendall_denom);

  // Permuting ys permutes its ranks identically, and neither the marginals nor
  // the tie structure change, so each round only recomputes the numerators.
  std::vector<std::size_t> perm(xs.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> py(ys.size()), pry(ys.size());
  constexpr double kSlack = 1e-12;
  std::size_t hits_p = 0, hits_s = 0, hits_k = 0;
  for (std::size_t round = 0; round < permutations; ++round) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::swap(perm[i], perm[uniform_below(rng, i + 1)]);
    }
    for (std::size_t i = 0; i < perm.size(); ++i) {
      py[i] = ys[perm[i]];
      pry[i] = ry[perm[i]];
    }
    if (std::abs(pearson_unchecked(xs, py)) >= std::abs(report.pearson) - kSlack) ++hits_p;
    if (std::abs(pearson_unchecked(rx, pry)) >= std::abs(report.spearman) - kSlack) ++hits_s;
    if (std::abs(kendall_numerator(py) / kendall_denom) >= std::abs(report.kendall) - kSlack)
      ++hits_k;
  }
  const double denom = static_cast<double>(permutations) + 1.0;
  report.pearson_p = (1.0 + static_cast<double>(hits_p)) / denom;
  report.spearman_p = (1.0 + static_cast<double>(hits_s)) / denom;
  report.kendall_p = (1.0 + static_cast<double>(hits_k)) / denom;
  return report;
}

CorrelationReport correlation_suite(std::span<const double> xs, std::span<const double> ys,
                                    std::size_t permutations) {
  std::mt19937_64 rng(kDefaultPermutationSeed);
  return correlation_suite(xs, ys, rng, permutations);
}

}  // namespace convominer
