#pragma once

// Spectral clustering models. All of them embed the points with the d
// eigenvectors belonging to the d smallest eigenvalues of a symmetric PSD
// matrix and run k-means on the embedded rows:
//
//   sc          L = D - W of the Gaussian kNN graph
//   scpca       (1 - beta)(I - G / lambda) + beta L / zeta, G the points Gram
//               matrix, lambda and zeta the largest eigenvalues of G and L
//   multilevel  L + sum over levels of A^T L' A, where L' is the Laplacian of
//               the mean-point cloud and A the accumulated mean-point
//               membership operator
//   cosine_sc   top-d left singular vectors of D^{-1/2} X on unit rows

#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <vector>

#include "lgpsc/data_matrix.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/graph.hpp"
#include "lgpsc/kmeans.hpp"
#include "lgpsc/labeling.hpp"
#include "lgpsc/numkernel.hpp"

namespace lgpsc {

struct ModelConfig {
  int d = 2;
  Index k = 10;
  /// Neighbour count on the mean-point cloud; defaults to k.
  std::optional<Index> k_prime;
  Sigma sigma = Sigma::automatic();
  /// Weight of the graph term in SC-PCA: 0 is pure PCA, 1 pure SC.
  double beta = 0.5;
  int levels = 1;
  bool center_data = true;
  /// Use H^T L' H instead of (k+1)^-2 H^T L' H for the coarse term.
  bool raw_coarse_scale = false;
  Symmetrization symmetrization = Symmetrization::kUnion;
  /// Test hook: removes every edge of the mean-point graph.
  bool drop_coarse_edges = false;
  KMeansConfig kmeans;

  Index coarse_k() const { return k_prime.value_or(k); }

  KMeansConfig kmeans_config() const {
    KMeansConfig c = kmeans;
    c.d = d;
    return c;
  }

  void validate() const {
    if (d < 1) throw ParameterError("cluster count d must be >= 1");
    if (k < 1) throw ParameterError("k must be >= 1");
    if (k_prime && *k_prime < 1) throw ParameterError("k' must be >= 1");
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw ParameterError("beta must be in [0, 1], got " + std::to_string(beta));
    }
    if (levels < 1) throw ParameterError("levels must be >= 1");
    kmeans_config().validate();
  }
};

/// Rows are embedded points; columns are orthonormal eigenvectors.
struct Embedding {
  Matrix y;
  Vector eigenvalues;
};

/// Mean of every point with its k nearest neighbours, and the 0/1
/// membership matrix H (H_ij = 1 iff j is i or one of its neighbours).
struct MeanPoints {
  DataMatrix points;
  SparseMatrix membership;
  Index k = 0;
};

namespace detail {

inline void check_fit_input(const DataMatrix& x, const ModelConfig& cfg) {
  cfg.validate();
  if (x.point_count() <= cfg.d) {
    throw ParameterError("need more points than clusters: n=" + std::to_string(x.point_count()) +
                         ", d=" + std::to_string(cfg.d));
  }
}

inline Labeling cluster_rows(const Embedding& e, const ModelConfig& cfg) {
  return kmeans_fit(e.y, cfg.kmeans_config());
}

inline DataMatrix centered(const DataMatrix& x) {
  RowMatrix c = x.matrix();
  c.rowwise() -= c.colwise().mean();
  return DataMatrix(std::move(c));
}

/// Largest eigenvalue of X X^T, computed on the smaller of X X^T and X^T X.
inline double gram_top_eigenvalue(const DataMatrix& x) {
  if (x.feature_count() < x.point_count()) {
    Matrix scatter = x.matrix().transpose() * x.matrix();
    return largest_eigenvalue(SymMatrix(std::move(scatter)));
  }
  return largest_eigenvalue(gram(x));
}

inline LaplacianMatrix knn_laplacian(const DataMatrix& x, const KnnGraph& g,
                                     const ModelConfig& cfg) {
  return laplacian(gaussian_similarity(x, g, cfg.sigma, cfg.symmetrization));
}

/// Laplacian L' of the Gaussian kNN graph on the mean points.
inline LaplacianMatrix coarse_graph_laplacian(const MeanPoints& z, const ModelConfig& cfg) {
  const KnnGraph g = knn_search(z.points, cfg.coarse_k());
  SimilarityMatrix w = gaussian_similarity(z.points, g, cfg.sigma, cfg.symmetrization);
  if (cfg.drop_coarse_edges) w.weights.setZero();
  return laplacian(w);
}

inline double membership_scale(Index k, bool raw) {
  return raw ? 1.0 : 1.0 / static_cast<double>(k + 1);
}

}  // namespace detail

/// Embedding with the d smallest eigenvectors of m.
inline Embedding spectral_embedding(const SymMatrix& m, int d) {
  EigenPairs p = sym_eig_smallest(m, d);
  return Embedding{std::move(p.vectors), std::move(p.values)};
}

// ---------------------------------------------------------------- classic SC

inline Embedding sc_embedding(const DataMatrix& x, const ModelConfig& cfg) {
  detail::check_fit_input(x, cfg);
  const KnnGraph g = knn_search(x, cfg.k);
  return spectral_embedding(detail::knn_laplacian(x, g, cfg).to_sym(), cfg.d);
}

inline Labeling sc_fit(const DataMatrix& x, const ModelConfig& cfg) {
  return detail::cluster_rows(sc_embedding(x, cfg), cfg);
}

/// SC on a precomputed similarity matrix.
inline Labeling sc_fit(const SimilarityMatrix& w, const ModelConfig& cfg) {
  cfg.validate();
  if (w.order() <= cfg.d) throw ParameterError("need more points than clusters");
  return detail::cluster_rows(spectral_embedding(laplacian(w).to_sym(), cfg.d), cfg);
}

// -------------------------------------------------------------------- SC-PCA

/// (1 - beta)(I - G / lambda) + beta L / zeta. The graph term is dropped when
/// L has no edges (zeta = 0).
inline SymMatrix scpca_matrix(const DataMatrix& x, const LaplacianMatrix& l, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ParameterError("beta must be in [0, 1], got " + std::to_string(beta));
  }
  const Index n = x.point_count();
  if (l.order() != n) throw DimensionError("Laplacian order does not match point count");

  Matrix m = Matrix::Zero(n, n);
  if (beta < 1.0) {
    const double lambda = detail::gram_top_eigenvalue(x);
    if (!(lambda > 0.0)) {
      throw DegenerateInputError("all points are zero; the Gram matrix has no spectrum");
    }
    m = -gram(x).matrix() / lambda;
    m.diagonal().array() += 1.0;
    m *= (1.0 - beta);
  }
  if (beta > 0.0) {
    const SymMatrix ls = l.to_sym();
    const double zeta = largest_eigenvalue(ls);
    if (zeta > 0.0) m += beta * (ls.matrix() / zeta);
  }
  return SymMatrix(std::move(m));
}

inline Embedding scpca_embedding(const DataMatrix& x, const ModelConfig& cfg) {
  detail::check_fit_input(x, cfg);
  const KnnGraph g = knn_search(x, cfg.k);
  const LaplacianMatrix l = detail::knn_laplacian(x, g, cfg);
  const SymMatrix m =
      cfg.center_data ? scpca_matrix(detail::centered(x), l, cfg.beta) : scpca_matrix(x, l, cfg.beta);
  return spectral_embedding(m, cfg.d);
}

inline Labeling scpca_fit(const DataMatrix& x, const ModelConfig& cfg) {
  return detail::cluster_rows(scpca_embedding(x, cfg), cfg);
}

// ---------------------------------------------------------------- multilevel

inline MeanPoints mean_points(const DataMatrix& x, const KnnGraph& g) {
  const Index n = x.point_count();
  if (g.point_count() != n) throw DimensionError("kNN graph does not match data");
  const double inv = 1.0 / static_cast<double>(g.k + 1);
  RowMatrix z(n, x.feature_count());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n * (g.k + 1)));
  for (Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd sum = x.point(i);
    trips.emplace_back(i, i, 1.0);
    for (Index j : g.neighbors[static_cast<std::size_t>(i)]) {
      sum += x.point(j);
      trips.emplace_back(i, j, 1.0);
    }
    z.row(i) = sum * inv;
  }
  SparseMatrix h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return MeanPoints{DataMatrix(std::move(z)), std::move(h), g.k};
}

/// L'' = s^2 H^T L' H with s = 1/(k+1), or s = 1 under raw_coarse_scale.
inline SymMatrix coarse_laplacian(const MeanPoints& z, const ModelConfig& cfg) {
  const LaplacianMatrix lp = detail::coarse_graph_laplacian(z, cfg);
  const double s = detail::membership_scale(z.k, cfg.raw_coarse_scale);
  const SparseMatrix pulled = SparseMatrix(z.membership.transpose()) * lp.entries * z.membership;
  return SymMatrix((s * s) * Matrix(pulled));
}

/// L plus the coarse Laplacians of every level, pulled back to the points.
inline SymMatrix multilevel_matrix(const DataMatrix& x, const ModelConfig& cfg) {
  detail::check_fit_input(x, cfg);
  const KnnGraph g0 = knn_search(x, cfg.k);
  Matrix m = detail::knn_laplacian(x, g0, cfg).to_dense();

  MeanPoints level = mean_points(x, g0);
  m += coarse_laplacian(level, cfg).matrix();

  SparseMatrix acc = detail::membership_scale(cfg.k, cfg.raw_coarse_scale) * level.membership;
  for (int l = 2; l <= cfg.levels; ++l) {
    const KnnGraph g = knn_search(level.points, cfg.k);
    level = mean_points(level.points, g);
    acc = SparseMatrix(detail::membership_scale(cfg.k, cfg.raw_coarse_scale) *
                       (level.membership * acc));
    const LaplacianMatrix lp = detail::coarse_graph_laplacian(level, cfg);
    const SparseMatrix pulled = SparseMatrix(acc.transpose()) * lp.entries * acc;
    m += Matrix(pulled);
  }
  return SymMatrix(std::move(m));
}

inline Embedding multilevel_embedding(const DataMatrix& x, const ModelConfig& cfg) {
  return spectral_embedding(multilevel_matrix(x, cfg), cfg.d);
}

inline Labeling multilevel_fit(const DataMatrix& x, const ModelConfig& cfg) {
  return detail::cluster_rows(multilevel_embedding(x, cfg), cfg);
}

// ----------------------------------------------------------------- cosine SC

/// Rows scaled to unit Euclidean length.
inline RowMatrix unit_rows(const DataMatrix& x) {
  RowMatrix u = x.matrix();
  for (Index i = 0; i < u.rows(); ++i) {
    const double norm = u.row(i).norm();
    if (!(norm > 0.0)) {
      throw DegenerateInputError("row " + std::to_string(i) + " is zero; cosine similarity undefined");
    }
    u.row(i) /= norm;
  }
  return u;
}

/// Degrees of the cosine-similarity graph, X (X^T 1), without forming X X^T.
inline Vector cosine_degrees(const RowMatrix& unit) {
  const Eigen::RowVectorXd column_sums = unit.colwise().sum();
  return unit * column_sums.transpose();
}

inline Embedding cosine_sc_embedding(const DataMatrix& x, const ModelConfig& cfg) {
  detail::check_fit_input(x, cfg);
  RowMatrix u = unit_rows(x);
  const Vector deg = cosine_degrees(u);
  for (Index i = 0; i < deg.size(); ++i) {
    if (!(deg(i) > 0.0)) {
      throw DegenerateInputError("cosine degree of point " + std::to_string(i) +
                                 " is not positive");
    }
    u.row(i) /= std::sqrt(deg(i));
  }
  return Embedding{left_singular_vectors(Matrix(u), cfg.d), Vector()};
}

inline Labeling cosine_sc_fit(const DataMatrix& x, const ModelConfig& cfg) {
  return detail::cluster_rows(cosine_sc_embedding(x, cfg), cfg);
}

}  // namespace lgpsc
