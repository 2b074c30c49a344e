#pragma once

#include <Eigen/Core>
#include <string>

#include "lgpsc/error.hpp"

namespace lgpsc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n points with m features each; one point per row.
class DataMatrix {
 public:
  explicit DataMatrix(RowMatrix points) : points_(std::move(points)) {
    if (points_.rows() < 2) {
      throw DimensionError("data matrix needs at least 2 points, got " +
                           std::to_string(points_.rows()));
    }
    if (points_.cols() < 1) throw DimensionError("data matrix needs at least 1 feature");
    if (!points_.allFinite()) throw InputError("data matrix contains non-finite values");
  }

  Index point_count() const noexcept { return points_.rows(); }
  Index feature_count() const noexcept { return points_.cols(); }

  const RowMatrix& matrix() const noexcept { return points_; }
  auto point(Index i) const { return points_.row(i); }

 private:
  RowMatrix points_;
};

}  // namespace lgpsc
