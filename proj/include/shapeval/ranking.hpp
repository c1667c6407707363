#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace shapeval {

// Ranks of K algorithms across a sweep of m parameter values (thresholds,
// cut-offs). Row-major K x m; every column is a permutation of 1..K.
struct RankMatrix {
  std::size_t algorithms = 0;
  std::vector<double> parameters;
  std::vector<int> ranks;

  int at(std::size_t alg, std::size_t col) const {
    return ranks[alg * parameters.size() + col];
  }
  int& at(std::size_t alg, std::size_t col) {
    return ranks[alg * parameters.size() + col];
  }

  void validate() const {
    const std::size_t m = parameters.size();
    if (ranks.size() != algorithms * m)
      throw std::invalid_argument("rank buffer does not match matrix dimensions");
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<char> seen(algorithms, 0);
      for (std::size_t i = 0; i < algorithms; ++i) {
        const int r = at(i, j);
        if (r < 1 || static_cast<std::size_t>(r) > algorithms || seen[r - 1])
          throw std::invalid_argument("each rank column must be a permutation of 1..K");
        seen[r - 1] = 1;
      }
    }
  }
};

// Ranks 1..K from scores, best first. Exact ties resolve to the lower
// algorithm index, so the result is always a full permutation.
inline std::vector<int> ranks_from_scores(const std::vector<double>& scores,
                                          bool higher_is_better) {
  const std::size_t k = scores.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
  });
  std::vector<int> ranks(k, 0);
  for (std::size_t pos = 0; pos < k; ++pos) ranks[order[pos]] = static_cast<int>(pos) + 1;
  return ranks;
}

namespace detail {

inline void require_permutation(const std::vector<int>& r) {
  std::vector<char> seen(r.size(), 0);
  for (int v : r) {
    if (v < 1 || static_cast<std::size_t>(v) > r.size() || seen[v - 1])
      throw std::invalid_argument("ranking must be a permutation of 1..K");
    seen[v - 1] = 1;
  }
}

// Inversion count by merge sort.
inline std::uint64_t count_inversions(std::vector<int>& v) {
  const std::size_t n = v.size();
  std::vector<int> tmp(n);
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (v[i] <= v[j]) {
          tmp[out++] = v[i++];
        } else {
          inversions += mid - i;
          tmp[out++] = v[j++];
        }
      }
      while (i < mid) tmp[out++] = v[i++];
      while (j < hi) tmp[out++] = v[j++];
      std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
                tmp.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

}  // namespace detail

// Fraction of discordantly ordered pairs between two rankings, in [0, 1]:
// 0 for identical rankings, 1 for exact reversal.
inline double kendall_tau_normalized(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("rankings must cover the same algorithms");
  detail::require_permutation(a);
  detail::require_permutation(b);
  const std::size_t k = a.size();
  if (k < 2) return 0.0;
  // Order the second ranking by the first; discordant pairs become inversions.
  std::vector<int> seq(k);
  for (std::size_t i = 0; i < k; ++i) seq[static_cast<std::size_t>(a[i]) - 1] = b[i];
  const std::uint64_t inv = detail::count_inversions(seq);
  const double pairs = 0.5 * static_cast<double>(k) * static_cast<double>(k - 1);
  return static_cast<double>(inv) / pairs;
}

// Mean over algorithms of (number of distinct ranks taken across the sweep
// minus one): zero when every algorithm keeps one rank throughout.
inline double avg_rank_switches(const RankMatrix& rm) {
  rm.validate();
  if (rm.algorithms == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < rm.algorithms; ++i) {
    std::set<int> distinct;
    for (std::size_t j = 0; j < rm.parameters.size(); ++j) distinct.insert(rm.at(i, j));
    total += static_cast<double>(distinct.size()) - 1.0;
  }
  return total / static_cast<double>(rm.algorithms);
}

// Mean over algorithms of the population standard deviation of their rank
// across the sweep.
inline double avg_rank_distortion(const RankMatrix& rm) {
  rm.validate();
  const std::size_t m = rm.parameters.size();
  if (rm.algorithms == 0 || m == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < rm.algorithms; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < m; ++j) mean += rm.at(i, j);
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = rm.at(i, j) - mean;
      var += d * d;
    }
    total += std::sqrt(var / static_cast<double>(m));
  }
  return total / static_cast<double>(rm.algorithms);
}

// Mean absolute rank change between consecutive sweep positions, summed over
// algorithms and normalized by (m - 1) * K. With assume_even_spacing unset,
// each change is additionally divided by the parameter gap.
inline double avg_rank_sensitivity(const RankMatrix& rm, bool assume_even_spacing = true) {
  rm.validate();
  const std::size_t m = rm.parameters.size();
  if (rm.algorithms == 0 || m < 2) return 0.0;
  const double norm = static_cast<double>(m - 1) * static_cast<double>(rm.algorithms);
  double total = 0.0;
  for (std::size_t i = 0; i < rm.algorithms; ++i) {
    for (std::size_t j = 0; j + 1 < m; ++j) {
      double change = std::abs(static_cast<double>(rm.at(i, j)) - rm.at(i, j + 1));
      if (!assume_even_spacing) {
        const double gap = rm.parameters[j + 1] - rm.parameters[j];
        if (gap == 0.0) throw std::invalid_argument("sweep parameters must be distinct");
        change /= std::abs(gap);
      }
      total += change / norm;
    }
  }
  return total;
}

}  // namespace shapeval
