#pragma once

// Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lgpsc/data_matrix.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/labeling.hpp"
#include "lgpsc/random.hpp"

namespace lgpsc {

enum class KMeansInit { kPlusPlus, kUniform };

struct KMeansConfig {
  int d = 2;
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iter = 300;
  /// Stop when the relative decrease of the objective falls below tol.
  double tol = 1e-6;
  KMeansInit init = KMeansInit::kPlusPlus;

  void validate() const {
    if (d < 1) throw ParameterError("k-means cluster count must be >= 1");
    if (restarts < 1) throw ParameterError("k-means restarts must be >= 1");
    if (max_iter < 1) throw ParameterError("k-means max_iter must be >= 1");
    if (!(tol >= 0.0)) throw ParameterError("k-means tol must be >= 0");
  }
};

struct KMeansResult {
  Labeling labels;
  Matrix centroids;
  /// Within-cluster sum of squares of the returned labeling.
  double objective = 0.0;
  /// Objective after every assignment step of the winning restart.
  std::vector<double> history;
  int restart = 0;
  int iterations = 0;
};

namespace detail {

inline double sq_dist(const Matrix& y, Index i, const Matrix& c, Index j) {
  double s = 0.0;
  for (Index f = 0; f < y.cols(); ++f) {
    const double diff = y(i, f) - c(j, f);
    s += diff * diff;
  }
  return s;
}

inline Matrix seed_centroids(const Matrix& y, int d, KMeansInit init, Rng& rng) {
  const Index n = y.rows();
  Matrix c(d, y.cols());
  if (init == KMeansInit::kUniform) {
    // Partial Fisher-Yates: d distinct indices.
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < d; ++j) {
      const std::size_t pick = static_cast<std::size_t>(j) + rng.index(static_cast<std::size_t>(n - j));
      std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
      c.row(j) = y.row(idx[static_cast<std::size_t>(j)]);
    }
    return c;
  }
  c.row(0) = y.row(static_cast<Index>(rng.index(static_cast<std::size_t>(n))));
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) dist[static_cast<std::size_t>(i)] = sq_dist(y, i, c, 0);
  for (int j = 1; j < d; ++j) {
    double total = 0.0;
    for (double v : dist) total += v;
    Index chosen = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += dist[static_cast<std::size_t>(i)];
        if (acc > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Index>(rng.index(static_cast<std::size_t>(n)));
    }
    c.row(j) = y.row(chosen);
    for (Index i = 0; i < n; ++i) {
      dist[static_cast<std::size_t>(i)] =
          std::min(dist[static_cast<std::size_t>(i)], sq_dist(y, i, c, j));
    }
  }
  return c;
}

/// Nearest centroid per point (lowest index on ties); returns the objective.
inline double assign(const Matrix& y, const Matrix& c, std::vector<int>& labels) {
  double total = 0.0;
  for (Index i = 0; i < y.rows(); ++i) {
    int best = 0;
    double best_d = sq_dist(y, i, c, 0);
    for (Index j = 1; j < c.rows(); ++j) {
      const double dj = sq_dist(y, i, c, j);
      if (dj < best_d) {
        best_d = dj;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    total += best_d;
  }
  return total;
}

/// Moves the point farthest from its centroid into each empty cluster.
inline void repair_empty(const Matrix& y, Matrix& c, std::vector<int>& labels) {
  const int d = static_cast<int>(c.rows());
  std::vector<int> sizes(static_cast<std::size_t>(d), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (int e = 0; e < d; ++e) {
    if (sizes[static_cast<std::size_t>(e)] > 0) continue;
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < y.rows(); ++i) {
      const int l = labels[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(l)] < 2) continue;
      const double di = sq_dist(y, i, c, l);
      if (di > far_d) {
        far_d = di;
        far = i;
      }
    }
    if (far < 0) break;  // n < d cannot happen after validation
    --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
    labels[static_cast<std::size_t>(far)] = e;
    sizes[static_cast<std::size_t>(e)] = 1;
    c.row(e) = y.row(far);
  }
}

inline void update_centroids(const Matrix& y, Matrix& c, const std::vector<int>& labels) {
  const Index d = c.rows();
  Matrix sum = Matrix::Zero(d, y.cols());
  std::vector<Index> count(static_cast<std::size_t>(d), 0);
  for (Index i = 0; i < y.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    sum.row(l) += y.row(i);
    ++count[static_cast<std::size_t>(l)];
  }
  for (Index j = 0; j < d; ++j) {
    if (count[static_cast<std::size_t>(j)] > 0) {
      c.row(j) = sum.row(j) / static_cast<double>(count[static_cast<std::size_t>(j)]);
    }
  }
}

inline double objective(const Matrix& y, const Matrix& c, const std::vector<int>& labels) {
  double total = 0.0;
  for (Index i = 0; i < y.rows(); ++i) total += sq_dist(y, i, c, labels[static_cast<std::size_t>(i)]);
  return total;
}

inline KMeansResult lloyd(const Matrix& y, const KMeansConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  KMeansResult r;
  r.centroids = seed_centroids(y, cfg.d, cfg.init, rng);
  std::vector<int> labels(static_cast<std::size_t>(y.rows()), 0);
  double prev = assign(y, r.centroids, labels);
  r.history.push_back(prev);
  for (int it = 1; it <= cfg.max_iter; ++it) {
    r.iterations = it;
    repair_empty(y, r.centroids, labels);
    update_centroids(y, r.centroids, labels);
    std::vector<int> next = labels;
    const double cur = assign(y, r.centroids, next);
    r.history.push_back(cur);
    const bool unchanged = next == labels;
    labels = std::move(next);
    if (unchanged || prev - cur <= cfg.tol * std::max(prev, std::numeric_limits<double>::min())) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  repair_empty(y, r.centroids, labels);
  update_centroids(y, r.centroids, labels);
  r.objective = objective(y, r.centroids, labels);
  r.labels = Labeling{std::move(labels), cfg.d};
  return r;
}

}  // namespace detail

/// Full result of the best restart (lowest objective, earliest on ties).
inline KMeansResult kmeans_run(const Matrix& y, const KMeansConfig& cfg) {
  cfg.validate();
  if (y.rows() < cfg.d) {
    throw ParameterError("k-means needs at least d=" + std::to_string(cfg.d) + " points, got " +
                         std::to_string(y.rows()));
  }
  if (y.cols() < 1) throw DimensionError("k-means input has no columns");
  if (!y.allFinite()) throw InputError("k-means input contains non-finite values");

  KMeansResult best;
  for (int r = 0; r < cfg.restarts; ++r) {
    KMeansResult cur = detail::lloyd(y, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    cur.restart = r;
    if (r == 0 || cur.objective < best.objective) best = std::move(cur);
  }
  return best;
}

inline Labeling kmeans_fit(const Matrix& y, const KMeansConfig& cfg) {
  return kmeans_run(y, cfg).labels;
}

inline Labeling kmeans_fit(const DataMatrix& x, const KMeansConfig& cfg) {
  return kmeans_fit(Matrix(x.matrix()), cfg);
}

}  // namespace lgpsc
