#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lgpsc/metrics.hpp"
#include "oracles.hpp"

using namespace lgpsc;
using V = std::vector<int>;

TEST(Contingency, Examples) {
  auto t = contingency(V{0, 0, 1, 1}, V{0, 0, 1, 1});
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{2, 0}, {0, 2}}));
  t = contingency(V{0, 0, 1, 1}, V{0, 1, 0, 1});
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{1, 1}, {1, 1}}));
  t = contingency(V{0, 0, 0, 0}, V{0, 1, 2, 3});
  EXPECT_EQ(t.counts, (std::vector<std::vector<long long>>{{1, 1, 1, 1}}));
  EXPECT_EQ(t.total, 4);
}

TEST(Contingency, MarginalsConsistentAndSparseLabels) {
  const auto t = contingency(V{7, 3, 3, 9, 7}, V{-1, 4, 4, 4, -1});
  EXPECT_EQ(t.row_labels, (V{3, 7, 9}));
  EXPECT_EQ(t.col_labels, (V{-1, 4}));
  long long total = 0;
  for (std::size_t i = 0; i < t.rows(); ++i) {
    EXPECT_EQ(std::accumulate(t.counts[i].begin(), t.counts[i].end(), 0LL), t.row_sums[i]);
    total += t.row_sums[i];
  }
  EXPECT_EQ(total, t.total);
}

TEST(Contingency, LengthMismatch) {
  EXPECT_THROW(contingency(V{0, 1}, V{0}), DimensionError);
  EXPECT_THROW(nmi(V{0, 1}, V{0}), DimensionError);
  EXPECT_THROW(ari(V{0, 1}, V{0}), DimensionError);
}

TEST(Nmi, Examples) {
  EXPECT_EQ(nmi(V{0, 1, 1, 2}, V{0, 1, 1, 2}), 1.0);
  EXPECT_EQ(nmi(V{0, 0, 1, 1}, V{0, 1, 0, 1}), 0.0);
  const V a{0, 0, 1, 1, 2, 2}, b{0, 0, 1, 1, 1, 1};
  EXPECT_NEAR(nmi(a, b), oracle::nmi_direct(a, b), 1e-12);
  // H(a) = ln 3, H(b) = ln 3 - (2/3) ln 2, I = H(b).
  const double hb = std::log(3.0) - 2.0 / 3.0 * std::log(2.0);
  EXPECT_NEAR(nmi(a, b), hb / std::sqrt(std::log(3.0) * hb), 1e-12);
}

TEST(Nmi, DegenerateConventions) {
  EXPECT_EQ(nmi(V{0, 0, 0}, V{5, 5, 5}), 1.0);  // both constant, same partition
  EXPECT_EQ(nmi(V{0, 0, 0}, V{0, 1, 1}), 0.0);  // one entropy zero
  EXPECT_EQ(nmi(V{4}, V{2}), 1.0);
  EXPECT_THROW(nmi(V{}, V{}), DimensionError);
}

TEST(Nmi, ArithmeticNormalizer) {
  const V a{0, 0, 1, 1, 2, 2}, b{0, 0, 1, 1, 1, 1};
  const double hb = std::log(3.0) - 2.0 / 3.0 * std::log(2.0);
  EXPECT_NEAR(nmi(a, b, NmiNormalization::kArithmetic), 2.0 * hb / (std::log(3.0) + hb), 1e-12);
  EXPECT_EQ(nmi(a, a, NmiNormalization::kArithmetic), 1.0);
}

TEST(Ari, Examples) {
  EXPECT_EQ(ari(V{0, 1, 1, 2}, V{0, 1, 1, 2}), 1.0);
  EXPECT_EQ(ari(V{0, 0, 1, 1}, V{1, 1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(ari(V{0, 0, 1, 1}, V{0, 1, 0, 1}), -0.5);
  EXPECT_DOUBLE_EQ(oracle::ari_pairs(V{0, 0, 1, 1}, V{0, 1, 0, 1}), -0.5);
}

TEST(Ari, DegenerateConventions) {
  EXPECT_EQ(ari(V{0, 0, 0}, V{1, 1, 1}), 1.0);
  EXPECT_EQ(ari(V{0, 1, 2}, V{2, 0, 1}), 1.0);
  EXPECT_THROW(ari(V{0}, V{0}), DimensionError);
}

TEST(Metrics, RandomPairsAgainstOracles) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 29);
    const int ka = 1 + trial % 5, kb = 1 + (trial / 5) % 6;
    const V a = oracle::random_labels(gen, n, ka);
    const V b = oracle::random_labels(gen, n, kb);
    const double r = ari(a, b);
    EXPECT_LE(std::abs(r - oracle::ari_pairs(a, b)), 1e-12) << "trial " << trial;
    EXPECT_LE(r, 1.0);
    const double m = nmi(a, b);
    EXPECT_LE(std::abs(m - oracle::nmi_direct(a, b)), 1e-12) << "trial " << trial;
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}

TEST(Metrics, SymmetricExactly) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 60);
    const V a = oracle::random_labels(gen, n, 2 + trial % 4);
    const V b = oracle::random_labels(gen, n, 1 + trial % 7);
    EXPECT_EQ(nmi(a, b), nmi(b, a));
    EXPECT_EQ(ari(a, b), ari(b, a));
    EXPECT_EQ(nmi(a, b, NmiNormalization::kArithmetic), nmi(b, a, NmiNormalization::kArithmetic));
  }
}

TEST(Metrics, RelabelingInvariance) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 200; ++trial) {
    const V a = oracle::random_labels(gen, 40, 5);
    const V b = oracle::random_labels(gen, 40, 4);
    std::vector<int> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), gen);
    V pa = a;
    for (int& v : pa) v = perm[static_cast<std::size_t>(v)] * 3 + 11;  // also non-contiguous ids
    EXPECT_NEAR(nmi(pa, b), nmi(a, b), 1e-15);
    EXPECT_NEAR(ari(pa, b), ari(a, b), 1e-15);
  }
}
