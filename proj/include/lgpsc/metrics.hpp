#pragma once

// Pair-counting and information-theoretic agreement between two labelings.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lgpsc/error.hpp"
#include "lgpsc/labeling.hpp"

namespace lgpsc {

/// counts[i][j] = number of points with the i-th distinct label of a and the
/// j-th distinct label of b (distinct labels in ascending order).
struct ContingencyTable {
  std::vector<int> row_labels;
  std::vector<int> col_labels;
  std::vector<std::vector<long long>> counts;
  std::vector<long long> row_sums;
  std::vector<long long> col_sums;
  long long total = 0;

  std::size_t rows() const noexcept { return row_labels.size(); }
  std::size_t cols() const noexcept { return col_labels.size(); }
};

namespace detail {

inline std::vector<int> distinct_sorted(std::span<const int> v) {
  std::vector<int> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::size_t position(const std::vector<int>& sorted, int v) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                  sorted.begin());
}

inline double choose2(long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); }

inline double entropy(const std::vector<long long>& marginal, double n) {
  double h = 0.0;
  for (long long c : marginal) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace detail

inline ContingencyTable contingency(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw DimensionError("labelings differ in length: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  }
  ContingencyTable t;
  t.row_labels = detail::distinct_sorted(a);
  t.col_labels = detail::distinct_sorted(b);
  t.counts.assign(t.rows(), std::vector<long long>(t.cols(), 0));
  t.row_sums.assign(t.rows(), 0);
  t.col_sums.assign(t.cols(), 0);
  for (std::size_t s = 0; s < a.size(); ++s) {
    const std::size_t i = detail::position(t.row_labels, a[s]);
    const std::size_t j = detail::position(t.col_labels, b[s]);
    ++t.counts[i][j];
    ++t.row_sums[i];
    ++t.col_sums[j];
  }
  t.total = static_cast<long long>(a.size());
  return t;
}

enum class NmiNormalization {
  kGeometric,   // I / sqrt(H(a) H(b))
  kArithmetic,  // 2 I / (H(a) + H(b))
};

/// True when both labelings induce the same partition.
inline bool same_partition(const ContingencyTable& t) {
  if (t.rows() != t.cols()) return false;
  for (const auto& row : t.counts) {
    if (std::count_if(row.begin(), row.end(), [](long long c) { return c > 0; }) != 1) return false;
  }
  return true;
}

inline double nmi(std::span<const int> a, std::span<const int> b,
                  NmiNormalization norm = NmiNormalization::kGeometric) {
  if (a.empty()) throw DimensionError("nmi needs at least one point");
  const ContingencyTable t = contingency(a, b);
  if (same_partition(t)) return 1.0;
  const double n = static_cast<double>(t.total);
  const double ha = detail::entropy(t.row_sums, n);
  const double hb = detail::entropy(t.col_sums, n);
  if (ha <= 0.0 || hb <= 0.0) return 0.0;
  // Terms are summed in sorted order so that nmi(a, b) == nmi(b, a) bitwise.
  std::vector<double> terms;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const long long c = t.counts[i][j];
      if (c == 0) continue;
      const double cnt = static_cast<double>(c);
      const double outer = static_cast<double>(t.row_sums[i]) * static_cast<double>(t.col_sums[j]);
      terms.push_back(cnt / n * std::log(cnt * n / outer));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double v : terms) mi += v;
  if (mi <= 0.0) return 0.0;
  const double denom = norm == NmiNormalization::kGeometric ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
  return std::clamp(mi / denom, 0.0, 1.0);
}

inline double ari(std::span<const int> a, std::span<const int> b) {
  const ContingencyTable t = contingency(a, b);
  if (t.total < 2) throw DimensionError("ari needs at least two points");
  double pairs_both = 0.0;
  for (const auto& row : t.counts) {
    for (long long c : row) pairs_both += detail::choose2(c);
  }
  double pairs_a = 0.0;
  for (long long c : t.row_sums) pairs_a += detail::choose2(c);
  double pairs_b = 0.0;
  for (long long c : t.col_sums) pairs_b += detail::choose2(c);
  const double expected = pairs_a * pairs_b / detail::choose2(t.total);
  const double max_index = 0.5 * (pairs_a + pairs_b);
  const double denom = max_index - expected;
  if (denom == 0.0) return 1.0;
  return (pairs_both - expected) / denom;
}

}  // namespace lgpsc
