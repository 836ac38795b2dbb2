#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "rangeview/geometry.hpp"

namespace rangeview::detail {

// Implicit 3-d tree: points are permuted so that each index range [lo, hi)
// has its splitting point at the midpoint.
class KdTree3 {
 public:
  explicit KdTree3(const PointCloud& cloud) {
    pts_.reserve(cloud.size());
    for (const auto& p : cloud) pts_.push_back({p.x, p.y, p.z});
    axis_.assign(pts_.size(), 0);
    build(0, pts_.size());
  }

  // Squared distance to the nearest stored point.
  double nearest_squared(const std::array<double, 3>& q) const {
    double best = std::numeric_limits<double>::infinity();
    search(q, 0, pts_.size(), best);
    return best;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;

  static double sq_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return dx * dx + dy * dy + dz * dz;
  }

  void build(std::size_t lo, std::size_t hi) {
    if (hi - lo <= kLeafSize) return;
    std::array<double, 3> mn{}, mx{};
    mn.fill(std::numeric_limits<double>::infinity());
    mx.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = lo; i < hi; ++i) {
      for (int a = 0; a < 3; ++a) {
        mn[a] = std::min(mn[a], pts_[i][a]);
        mx[a] = std::max(mx[a], pts_[i][a]);
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (mx[a] - mn[a] > mx[axis] - mn[axis]) axis = a;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(pts_.begin() + std::ptrdiff_t(lo), pts_.begin() + std::ptrdiff_t(mid),
                     pts_.begin() + std::ptrdiff_t(hi),
                     [axis](const auto& a, const auto& b) { return a[axis] < b[axis]; });
    axis_[mid] = axis;
    build(lo, mid);
    build(mid + 1, hi);
  }

  void search(const std::array<double, 3>& q, std::size_t lo, std::size_t hi,
              double& best) const {
    if (hi - lo <= kLeafSize) {
      for (std::size_t i = lo; i < hi; ++i) best = std::min(best, sq_dist(q, pts_[i]));
      return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    best = std::min(best, sq_dist(q, pts_[mid]));
    const int axis = axis_[mid];
    const double delta = q[axis] - pts_[mid][axis];
    if (delta < 0.0) {
      search(q, lo, mid, best);
      if (delta * delta < best) search(q, mid + 1, hi, best);
    } else {
      search(q, mid + 1, hi, best);
      if (delta * delta < best) search(q, lo, mid, best);
    }
  }

  std::vector<std::array<double, 3>> pts_;
  std::vector<int> axis_;
};

}  // namespace rangeview::detail
