#pragma once

// Exact k-nearest-neighbour search, Gaussian kNN similarity and the
// unnormalized graph Laplacian L = D - W.

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lgpsc/data_matrix.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/numkernel.hpp"

namespace lgpsc {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct KnnGraph {
  Index k = 0;
  /// neighbors[i] lists the k nearest other points of i, nearest first.
  std::vector<std::vector<Index>> neighbors;
  /// Euclidean distances matching neighbors.
  std::vector<std::vector<double>> distances;

  Index point_count() const noexcept { return static_cast<Index>(neighbors.size()); }
};

/// Kernel bandwidth. Auto resolves to scale * (median kNN edge distance),
/// falling back to scale * 1.0 when that median is zero.
class Sigma {
 public:
  static Sigma automatic(double scale = 1.0) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw ParameterError("sigma scale must be positive, got " + std::to_string(scale));
    }
    return Sigma(true, scale);
  }
  static Sigma fixed(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ParameterError("sigma must be positive, got " + std::to_string(value));
    }
    return Sigma(false, value);
  }

  bool is_auto() const noexcept { return auto_; }
  /// Multiplier for auto, bandwidth for fixed.
  double value() const noexcept { return value_; }

  double resolve(const KnnGraph& graph) const;

  friend bool operator==(const Sigma&, const Sigma&) = default;

 private:
  Sigma(bool is_auto, double value) : auto_(is_auto), value_(value) {}
  bool auto_;
  double value_;
};

enum class Symmetrization {
  kUnion,   // edge if either endpoint lists the other
  kMutual,  // edge only if both do
};

/// Symmetric, nonnegative, zero diagonal.
struct SimilarityMatrix {
  SparseMatrix weights;
  double sigma = 0.0;  // resolved bandwidth, 0 when built directly

  Index order() const noexcept { return weights.rows(); }
  Matrix to_dense() const { return Matrix(weights); }
};

struct LaplacianMatrix {
  SparseMatrix entries;

  Index order() const noexcept { return entries.rows(); }
  Matrix to_dense() const { return Matrix(entries); }
  SymMatrix to_sym() const { return SymMatrix(to_dense()); }
};

namespace detail {

inline double squared_distance(const DataMatrix& x, Index i, Index j) {
  double s = 0.0;
  for (Index f = 0; f < x.feature_count(); ++f) {
    const double diff = x.matrix()(i, f) - x.matrix()(j, f);
    s += diff * diff;
  }
  return s;
}

inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower =
      *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace detail

inline double Sigma::resolve(const KnnGraph& graph) const {
  if (!auto_) return value_;
  std::vector<double> all;
  for (const auto& row : graph.distances) all.insert(all.end(), row.begin(), row.end());
  const double m = detail::median(std::move(all));
  return value_ * (m > 0.0 ? m : 1.0);
}

/// Brute-force Euclidean kNN; equal distances go to the lower index.
inline KnnGraph knn_search(const DataMatrix& x, Index k) {
  const Index n = x.point_count();
  if (k < 1 || k > n - 1) {
    throw ParameterError("k must be in [1, " + std::to_string(n - 1) + "], got " +
                         std::to_string(k));
  }
  KnnGraph g;
  g.k = k;
  g.neighbors.resize(static_cast<std::size_t>(n));
  g.distances.resize(static_cast<std::size_t>(n));

  std::vector<std::pair<double, Index>> cand(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) cand[c++] = {detail::squared_distance(x, i, j), j};
    }
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
    auto& nb = g.neighbors[static_cast<std::size_t>(i)];
    auto& ds = g.distances[static_cast<std::size_t>(i)];
    nb.reserve(static_cast<std::size_t>(k));
    ds.reserve(static_cast<std::size_t>(k));
    for (Index t = 0; t < k; ++t) {
      nb.push_back(cand[static_cast<std::size_t>(t)].second);
      ds.push_back(std::sqrt(cand[static_cast<std::size_t>(t)].first));
    }
  }
  return g;
}

/// W_ij = exp(-d(x_i, x_j)^2 / sigma^2) on kNN edges, 0 elsewhere.
inline SimilarityMatrix gaussian_similarity(const DataMatrix& x, const KnnGraph& g,
                                            const Sigma& sigma,
                                            Symmetrization sym = Symmetrization::kUnion) {
  const Index n = x.point_count();
  if (g.point_count() != n) {
    throw DimensionError("kNN graph has " + std::to_string(g.point_count()) +
                         " points, data has " + std::to_string(n));
  }
  const double s = sigma.resolve(g);
  const double inv_s2 = 1.0 / (s * s);

  std::vector<std::vector<bool>> listed;
  if (sym == Symmetrization::kMutual) {
    listed.assign(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
    for (Index i = 0; i < n; ++i) {
      for (Index j : g.neighbors[static_cast<std::size_t>(i)]) {
        listed[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
      }
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(2 * n * g.k));
  for (Index i = 0; i < n; ++i) {
    for (Index j : g.neighbors[static_cast<std::size_t>(i)]) {
      if (sym == Symmetrization::kMutual &&
          !listed[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        continue;
      }
      const double w = std::exp(-detail::squared_distance(x, i, j) * inv_s2);
      trips.emplace_back(i, j, w);
      trips.emplace_back(j, i, w);
    }
  }
  SimilarityMatrix out;
  out.sigma = s;
  out.weights.resize(n, n);
  // Both endpoints may list the same edge; the values are identical.
  out.weights.setFromTriplets(trips.begin(), trips.end(),
                              [](double a, double b) { return std::max(a, b); });
  return out;
}

/// L = D - W with D the diagonal of row sums.
inline LaplacianMatrix laplacian(const SimilarityMatrix& w) {
  const Index n = w.order();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(w.weights.nonZeros() + n));
  Vector degree = Vector::Zero(n);
  for (Index c = 0; c < w.weights.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(w.weights, c); it; ++it) {
      if (it.row() == it.col()) continue;
      degree(it.row()) += it.value();
      trips.emplace_back(it.row(), it.col(), -it.value());
    }
  }
  for (Index i = 0; i < n; ++i) trips.emplace_back(i, i, degree(i));
  LaplacianMatrix l;
  l.entries.resize(n, n);
  l.entries.setFromTriplets(trips.begin(), trips.end());
  return l;
}

}  // namespace lgpsc
