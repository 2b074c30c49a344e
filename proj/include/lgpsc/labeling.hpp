#pragma once

#include <algorithm>
#include <span>
#include <vector>

namespace lgpsc {

/// Cluster id per point. Ids are in [0, clusters).
struct Labeling {
  std::vector<int> assignments;
  int clusters = 0;

  std::size_t size() const noexcept { return assignments.size(); }
  int operator[](std::size_t i) const { return assignments[i]; }
  operator std::span<const int>() const noexcept { return assignments; }

  static Labeling from(std::vector<int> ids) {
    const int c = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
    return Labeling{std::move(ids), c};
  }
};

}  // namespace lgpsc
