#pragma once

// Dense symmetric eigensolvers and related primitives.
//
// The matrix is reduced to tridiagonal form by Householder reflections; the
// requested eigenvalues are isolated by Sturm-sequence bisection and their
// eigenvectors obtained by inverse iteration on the tridiagonal matrix, then
// mapped back through the reflections. Asking for the d smallest pairs of an
// n x n matrix costs the O(n^3) reduction plus O(n^2 d).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lgpsc/data_matrix.hpp"
#include "lgpsc/error.hpp"
#include "lgpsc/random.hpp"

namespace lgpsc {

/// Real symmetric matrix. Construction averages the two triangles, so the
/// stored entries are exactly symmetric.
class SymMatrix {
 public:
  explicit SymMatrix(Matrix entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) {
      throw DimensionError("symmetric matrix must be square, got " + std::to_string(m_.rows()) +
                           "x" + std::to_string(m_.cols()));
    }
    if (m_.rows() < 1) throw DimensionError("symmetric matrix must have order >= 1");
    if (!m_.allFinite()) throw InputError("symmetric matrix contains non-finite entries");
    const Index n = m_.rows();
    for (Index j = 0; j < n; ++j) {
      for (Index i = j + 1; i < n; ++i) {
        const double v = 0.5 * (m_(i, j) + m_(j, i));
        m_(i, j) = v;
        m_(j, i) = v;
      }
    }
  }

  static SymMatrix zero(Index n) { return SymMatrix(Matrix::Zero(n, n)); }
  static SymMatrix identity(Index n) { return SymMatrix(Matrix::Identity(n, n)); }

  Index order() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Matrix m_;
};

/// Ascending eigenvalues with matching unit eigenvectors as columns.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

namespace detail {

/// Index of the entry with the largest magnitude; lowest index wins ties.
inline Index argmax_abs(const Eigen::Ref<const Vector>& v) {
  Index best = 0;
  double best_abs = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return best;
}

/// Flips each column so that its largest-magnitude entry is positive.
inline void fix_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    const Index i = argmax_abs(vectors.col(c));
    if (vectors(i, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

/// Stable sort of eigenpairs on (value, argmax-index).
inline void sort_pairs(EigenPairs& pairs) {
  const Index d = pairs.values.size();
  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> lead(static_cast<std::size_t>(d));
  for (Index c = 0; c < d; ++c) lead[c] = argmax_abs(pairs.vectors.col(c));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (pairs.values(a) != pairs.values(b)) return pairs.values(a) < pairs.values(b);
    return lead[a] < lead[b];
  });
  EigenPairs sorted{Vector(d), Matrix(pairs.vectors.rows(), d)};
  for (Index c = 0; c < d; ++c) {
    sorted.values(c) = pairs.values(order[c]);
    sorted.vectors.col(c) = pairs.vectors.col(order[c]);
  }
  pairs = std::move(sorted);
}

/// Symmetric tridiagonal matrix: diag on the diagonal, off below and above.
struct Tridiagonal {
  Vector diag;
  Vector off;  // size n - 1

  Index order() const noexcept { return diag.size(); }

  double norm_bound() const {
    double b = 0.0;
    const Index n = order();
    for (Index i = 0; i < n; ++i) {
      double r = std::abs(diag(i));
      if (i > 0) r += std::abs(off(i - 1));
      if (i + 1 < n) r += std::abs(off(i));
      b = std::max(b, r);
    }
    return b;
  }

  /// Number of eigenvalues strictly below x.
  Index count_below(double x, double pivmin) const {
    Index count = 0;
    double q = diag(0) - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (Index i = 1; i < order(); ++i) {
      q = diag(i) - x - off(i - 1) * off(i - 1) / q;
      if (std::abs(q) < pivmin) q = -pivmin;
      if (q < 0.0) ++count;
    }
    return count;
  }
};

/// The j-th smallest eigenvalue (0-based) by bisection on the Sturm count.
inline double bisect_eigenvalue(const Tridiagonal& t, Index j, double lo, double hi, double pivmin) {
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 2.0 * eps * std::max(std::abs(lo), std::abs(hi)) + pivmin || mid <= lo ||
        mid >= hi) {
      break;
    }
    if (t.count_below(mid, pivmin) > j) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// LU factorization with partial pivoting of T - shift I.
class ShiftedTridiagonalLu {
 public:
  ShiftedTridiagonalLu(const Tridiagonal& t, double shift, double tiny) {
    const Index n = t.order();
    u0_ = t.diag.array() - shift;
    u1_ = Vector::Zero(n);
    u2_ = Vector::Zero(n);
    mult_ = Vector::Zero(n);
    swapped_.assign(static_cast<std::size_t>(n), false);
    if (n > 1) u1_.head(n - 1) = t.off;
    for (Index i = 0; i + 1 < n; ++i) {
      const double sub = t.off(i);
      if (std::abs(u0_(i)) >= std::abs(sub)) {
        if (u0_(i) == 0.0) u0_(i) = tiny;
        mult_(i) = sub / u0_(i);
        u0_(i + 1) -= mult_(i) * u1_(i);
      } else {
        swapped_[static_cast<std::size_t>(i)] = true;
        mult_(i) = u0_(i) / sub;
        const double old_u1 = u1_(i);
        const double next_super = (i + 2 < n) ? t.off(i + 1) : 0.0;
        u0_(i) = sub;
        u1_(i) = u0_(i + 1);
        u2_(i) = next_super;
        u0_(i + 1) = old_u1 - mult_(i) * u1_(i);
        if (i + 2 < n) u1_(i + 1) = -mult_(i) * next_super;
      }
    }
    for (Index i = 0; i < n; ++i) {
      if (std::abs(u0_(i)) < tiny) u0_(i) = u0_(i) < 0.0 ? -tiny : tiny;
    }
  }

  void solve_in_place(Vector& y) const {
    const Index n = u0_.size();
    for (Index i = 0; i + 1 < n; ++i) {
      if (swapped_[static_cast<std::size_t>(i)]) std::swap(y(i), y(i + 1));
      y(i + 1) -= mult_(i) * y(i);
    }
    for (Index i = n - 1; i >= 0; --i) {
      double v = y(i);
      if (i + 1 < n) v -= u1_(i) * y(i + 1);
      if (i + 2 < n) v -= u2_(i) * y(i + 2);
      y(i) = v / u0_(i);
    }
  }

 private:
  Vector u0_, u1_, u2_, mult_;
  std::vector<bool> swapped_;
};

/// The `count` smallest eigenpairs of t; vectors in the tridiagonal basis.
inline EigenPairs tridiagonal_smallest(const Tridiagonal& t, Index count, bool want_vectors) {
  const Index n = t.order();
  const double eps = std::numeric_limits<double>::epsilon();
  const double norm = std::max(t.norm_bound(), std::numeric_limits<double>::min());
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, norm * norm);

  EigenPairs out{Vector(count), want_vectors ? Matrix(n, count) : Matrix()};
  double lo = -norm * (1.0 + 4.0 * eps) - pivmin;
  const double hi = norm * (1.0 + 4.0 * eps) + pivmin;
  for (Index j = 0; j < count; ++j) {
    out.values(j) = bisect_eigenvalue(t, j, lo, hi, pivmin);
    lo = std::max(lo, out.values(j) - 4.0 * eps * norm);
  }
  if (!want_vectors) return out;

  // Eigenvalues closer than this are treated as a cluster and their vectors
  // are reorthogonalized against each other.
  const double cluster_gap = 1e-3 * norm;
  const double tiny = eps * norm;
  Index cluster_start = 0;
  double prev_shift = 0.0;
  for (Index j = 0; j < count; ++j) {
    if (j > 0 && out.values(j) - out.values(j - 1) > cluster_gap) cluster_start = j;
    double shift = out.values(j);
    // Separate shifts within a cluster so the solves do not coincide.
    if (j > cluster_start && shift - prev_shift < 10.0 * tiny) shift = prev_shift + 10.0 * tiny;
    prev_shift = shift;

    const ShiftedTridiagonalLu lu(t, shift, tiny);
    Rng rng(derive_seed(0x7e1d1a90ULL, static_cast<std::uint64_t>(j)));
    Vector x(n);
    for (Index i = 0; i < n; ++i) x(i) = 2.0 * rng.uniform() - 1.0;
    x.normalize();
    for (int iter = 0; iter < 4; ++iter) {
      lu.solve_in_place(x);
      for (Index c = cluster_start; c < j; ++c) x -= out.vectors.col(c).dot(x) * out.vectors.col(c);
      const double len = x.norm();
      if (!(len > 0.0) || !std::isfinite(len)) {
        throw InputError("inverse iteration failed to converge");
      }
      x /= len;
    }
    for (Index c = cluster_start; c < j; ++c) x -= out.vectors.col(c).dot(x) * out.vectors.col(c);
    x.normalize();
    out.vectors.col(j) = x;
  }
  return out;
}

}  // namespace detail

/// The `count` smallest eigenvalues, and their vectors when want_vectors.
inline EigenPairs eig_range(const SymMatrix& m, Index count, bool want_vectors) {
  const Index n = m.order();
  if (n == 1) {
    return EigenPairs{Vector::Constant(1, m(0, 0)), Matrix::Ones(1, 1)};
  }
  Eigen::Tridiagonalization<Matrix> tri(m.matrix());
  const detail::Tridiagonal t{tri.diagonal(), tri.subDiagonal()};
  EigenPairs p = detail::tridiagonal_smallest(t, count, want_vectors);
  if (want_vectors) p.vectors = tri.matrixQ() * p.vectors;
  return p;
}


/// The d algebraically smallest eigenpairs of m. Each eigenvector is signed
/// so that its largest-magnitude entry is positive.
inline EigenPairs sym_eig_smallest(const SymMatrix& m, Index d) {
  if (d < 1 || d > m.order()) {
    throw DimensionError("requested " + std::to_string(d) + " eigenpairs of a matrix of order " +
                         std::to_string(m.order()));
  }
  if (!m.matrix().allFinite()) throw InputError("matrix contains non-finite entries");
  EigenPairs pairs = eig_range(m, d, true);
  detail::fix_signs(pairs.vectors);
  detail::sort_pairs(pairs);
  return pairs;
}

inline EigenPairs sym_eig_all(const SymMatrix& m) { return sym_eig_smallest(m, m.order()); }

inline double largest_eigenvalue(const SymMatrix& m) {
  if (m.matrix().isZero(0.0)) return 0.0;
  const Index n = m.order();
  if (n == 1) return m(0, 0);
  Eigen::Tridiagonalization<Matrix> tri(m.matrix());
  const detail::Tridiagonal t{tri.diagonal(), tri.subDiagonal()};
  const double norm = t.norm_bound();
  const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, norm * norm);
  const double pad = 4.0 * std::numeric_limits<double>::epsilon() * norm + pivmin;
  return detail::bisect_eigenvalue(t, n - 1, -norm - pad, norm + pad, pivmin);
}

inline double smallest_eigenvalue(const SymMatrix& m) {
  if (m.matrix().isZero(0.0)) return 0.0;
  return eig_range(m, 1, false).values(0);
}

/// Inner products of all pairs of points (X X^T with points as rows).
inline SymMatrix gram(const DataMatrix& x) {
  const Index n = x.point_count();
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(x.matrix());
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return SymMatrix(std::move(g));
}

/// Orthonormal basis of the top-d left singular subspace of a, ordered by
/// decreasing singular value, with the same sign rule as sym_eig_smallest.
inline Matrix left_singular_vectors(const Matrix& a, Index d) {
  if (d < 1 || d > std::min(a.rows(), a.cols())) {
    throw DimensionError("requested " + std::to_string(d) + " singular vectors of a " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");
  }
  if (!a.allFinite()) throw InputError("matrix contains non-finite entries");
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  Matrix u = svd.matrixU().leftCols(d);
  detail::fix_signs(u);
  return u;
}

}  // namespace lgpsc
