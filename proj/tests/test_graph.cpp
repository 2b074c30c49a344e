#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lgpsc/graph.hpp"
#include "oracles.hpp"

using namespace lgpsc;

namespace {

DataMatrix line(std::initializer_list<double> xs) {
  RowMatrix x(static_cast<Index>(xs.size()), 1);
  Index i = 0;
  for (double v : xs) x(i++, 0) = v;
  return DataMatrix(x);
}

SimilarityMatrix from_dense(const Matrix& w) { return SimilarityMatrix{w.sparseView(), 0.0}; }

}  // namespace

TEST(KnnSearch, LineZeroOneThree) {
  const auto g = knn_search(line({0, 1, 3}), 1);
  ASSERT_EQ(g.point_count(), 3);
  EXPECT_EQ(g.neighbors[0], std::vector<Index>{1});
  EXPECT_EQ(g.neighbors[1], std::vector<Index>{0});
  EXPECT_EQ(g.neighbors[2], std::vector<Index>{1});
  EXPECT_DOUBLE_EQ(g.distances[2][0], 2.0);
}

TEST(KnnSearch, TieGoesToLowerIndex) {
  const auto g = knn_search(line({0, 1, 2}), 1);
  EXPECT_EQ(g.neighbors[1], std::vector<Index>{0});
  const auto g2 = knn_search(line({2, 1, 0}), 1);
  EXPECT_EQ(g2.neighbors[1], std::vector<Index>{0});
}

TEST(KnnSearch, FullNeighbourhood) {
  std::mt19937_64 gen(1);
  const auto x = oracle::random_data(gen, 7, 2);
  const auto g = knn_search(x, 6);
  for (Index i = 0; i < 7; ++i) {
    auto nb = g.neighbors[i];
    std::sort(nb.begin(), nb.end());
    std::vector<Index> want;
    for (Index j = 0; j < 7; ++j)
      if (j != i) want.push_back(j);
    EXPECT_EQ(nb, want);
  }
}

TEST(KnnSearch, MatchesExhaustiveEnumeration) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_data(gen, 15, 3);
    const Index k = 1 + trial % 6;
    const auto g = knn_search(x, k);
    const auto pts = oracle::from(x);
    for (Index i = 0; i < 15; ++i) {
      std::vector<std::pair<double, Index>> all;
      for (Index j = 0; j < 15; ++j) {
        if (j == i) continue;
        double s = 0;
        for (std::size_t f = 0; f < 3; ++f) s += std::pow(pts[i][f] - pts[j][f], 2);
        all.push_back({s, j});
      }
      std::sort(all.begin(), all.end());
      ASSERT_EQ(static_cast<Index>(g.neighbors[i].size()), k);
      for (Index t = 0; t < k; ++t) {
        EXPECT_EQ(g.neighbors[i][t], all[t].second);
        EXPECT_NEAR(g.distances[i][t], std::sqrt(all[t].first), 1e-12);
        if (t > 0) {
          EXPECT_LE(g.distances[i][t - 1], g.distances[i][t]);
        }
        EXPECT_NE(g.neighbors[i][t], i);
      }
    }
  }
}

TEST(KnnSearch, RejectsBadK) {
  const auto x = line({0, 1, 3});
  EXPECT_THROW(knn_search(x, 0), ParameterError);
  EXPECT_THROW(knn_search(x, 3), ParameterError);
}

TEST(Sigma, Validation) {
  EXPECT_THROW(Sigma::fixed(0.0), ParameterError);
  EXPECT_THROW(Sigma::fixed(-1.0), ParameterError);
  EXPECT_THROW(Sigma::automatic(0.0), ParameterError);
  EXPECT_NO_THROW(Sigma::automatic(0.5));
}

TEST(Sigma, AutoIsMedianEdgeDistance) {
  // Edges of {0,1,3} with k=1: 1, 1, 2 -> median 1.
  const auto x = line({0, 1, 3});
  const auto g = knn_search(x, 1);
  EXPECT_DOUBLE_EQ(Sigma::automatic().resolve(g), 1.0);
  EXPECT_DOUBLE_EQ(Sigma::automatic(2.0).resolve(g), 2.0);
  // Duplicates: every edge has length 0, fallback bandwidth 1.
  const auto dup = knn_search(line({4, 4, 4}), 2);
  EXPECT_DOUBLE_EQ(Sigma::automatic().resolve(dup), 1.0);
  EXPECT_DOUBLE_EQ(Sigma::automatic(0.5).resolve(dup), 0.5);
}

TEST(GaussianSimilarity, DuplicatePointsGiveOne) {
  const auto x = line({2, 2, 7});
  const auto w = gaussian_similarity(x, knn_search(x, 1), Sigma::fixed(1.0)).to_dense();
  EXPECT_EQ(w(0, 1), 1.0);
  EXPECT_EQ(w(1, 0), 1.0);
}

TEST(GaussianSimilarity, DistanceEqualSigma) {
  const auto x = line({0, 0.7});
  const auto w = gaussian_similarity(x, knn_search(x, 1), Sigma::fixed(0.7)).to_dense();
  EXPECT_NEAR(w(0, 1), 0.367879441171442, 1e-12);
}

TEST(GaussianSimilarity, ThreePointUnion) {
  const auto x = line({0, 1, 3});
  const auto w = gaussian_similarity(x, knn_search(x, 1), Sigma::fixed(1.0)).to_dense();
  EXPECT_NEAR(w(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(w(1, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(w(1, 2), std::exp(-4.0), 1e-15);
  EXPECT_NEAR(w(2, 1), std::exp(-4.0), 1e-15);
  EXPECT_EQ(w(0, 2), 0.0);
  EXPECT_EQ(w(2, 0), 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(w(i, i), 0.0);
}

TEST(GaussianSimilarity, MutualDropsOneSidedEdges) {
  const auto x = line({0, 1, 3});
  const auto w = gaussian_similarity(x, knn_search(x, 1), Sigma::fixed(1.0),
                                     Symmetrization::kMutual)
                     .to_dense();
  EXPECT_NEAR(w(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_EQ(w(1, 2), 0.0);
  EXPECT_EQ(w(2, 1), 0.0);
}

TEST(GaussianSimilarity, InvariantsOnRandomData) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_data(gen, 25, 4);
    const auto w = gaussian_similarity(x, knn_search(x, 5), Sigma::automatic()).to_dense();
    EXPECT_TRUE(w == w.transpose());
    EXPECT_GE(w.minCoeff(), 0.0);
    EXPECT_LE(w.maxCoeff(), 1.0);
    EXPECT_TRUE(w.diagonal().isZero(0.0));
  }
}

TEST(GaussianSimilarity, PermutationEquivariance) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::random_data(gen, 20, 3);
    std::vector<Index> perm(20);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    RowMatrix px(20, 3);
    for (Index i = 0; i < 20; ++i) px.row(i) = x.point(perm[i]);
    const Matrix w = gaussian_similarity(x, knn_search(x, 4), Sigma::automatic()).to_dense();
    const DataMatrix xp(px);
    const Matrix wp = gaussian_similarity(xp, knn_search(xp, 4), Sigma::automatic()).to_dense();
    for (Index i = 0; i < 20; ++i)
      for (Index j = 0; j < 20; ++j) EXPECT_NEAR(wp(i, j), w(perm[i], perm[j]), 1e-14);
  }
}

TEST(Laplacian, TwoNodeGraph) {
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  Matrix want(2, 2);
  want << 1, -1, -1, 1;
  EXPECT_TRUE(laplacian(from_dense(w)).to_dense() == want);
}

TEST(Laplacian, ZeroGraph) {
  EXPECT_TRUE(laplacian(from_dense(Matrix::Zero(3, 3))).to_dense().isZero(0.0));
}

TEST(Laplacian, ThreePointExample) {
  const auto x = line({0, 1, 3});
  const Matrix l =
      laplacian(gaussian_similarity(x, knn_search(x, 1), Sigma::fixed(1.0))).to_dense();
  const double e1 = std::exp(-1.0), e4 = std::exp(-4.0);
  EXPECT_NEAR(l(0, 0), e1, 1e-15);
  EXPECT_NEAR(l(1, 1), e1 + e4, 1e-15);
  EXPECT_NEAR(l(2, 2), e4, 1e-15);
  EXPECT_NEAR(l(0, 1), -e1, 1e-15);
  EXPECT_NEAR(l(1, 2), -e4, 1e-15);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(l.row(i).sum(), 0.0, 1e-15);
}

TEST(Laplacian, Invariants) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = oracle::random_data(gen, 30, 2);
    const Matrix l =
        laplacian(gaussian_similarity(x, knn_search(x, 1 + trial % 8), Sigma::automatic()))
            .to_dense();
    EXPECT_LE((l * Vector::Ones(30)).cwiseAbs().maxCoeff(), 1e-10);
    for (Index i = 0; i < 30; ++i)
      for (Index j = 0; j < 30; ++j)
        if (i != j) {
          EXPECT_LE(l(i, j), 0.0);
        }
    EXPECT_GE(oracle::jacobi(oracle::from(l)).values.front(), -1e-9);
  }
}

TEST(Laplacian, TraceIdentity) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + trial % 7;
    const Index d = 1 + trial % 3;
    Matrix w = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < i; ++j) w(i, j) = w(j, i) = u(gen) < 0.3 ? 0.0 : u(gen);
    Matrix y(n, d);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < d; ++c) y(i, c) = 2.0 * u(gen) - 1.0;
    const Matrix l = laplacian(from_dense(w)).to_dense();
    const double lhs = (y.transpose() * l * y).trace();
    double rhs = 0.0;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) rhs += 0.5 * w(i, j) * (y.row(i) - y.row(j)).squaredNorm();
    EXPECT_LE(std::abs(lhs - rhs), 1e-9 * (1.0 + w.norm() * y.squaredNorm()));
  }
}
