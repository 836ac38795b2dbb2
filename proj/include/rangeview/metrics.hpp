#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rangeview/geometry.hpp"
#include "rangeview/projection.hpp"

namespace rangeview {

struct BevBounds {
  double x_min = -50.0;
  double x_max = 50.0;
  double y_min = -50.0;
  double y_max = 50.0;

  bool operator==(const BevBounds&) const = default;
};

/// Square bird's-eye-view count grid; cell (ix, iy) is counts[ix * bins + iy].
struct BEVHistogram {
  std::size_t bins = 0;
  BevBounds bounds;
  std::vector<double> counts;

  double total() const;
  /// Counts divided by their sum; all zeros when the histogram is empty.
  std::vector<double> normalized() const;
  double at(std::size_t ix, std::size_t iy) const { return counts[ix * bins + iy]; }
};

inline constexpr std::size_t kDefaultBevBins = 100;

/// Counts points by (x, y) cell; z is ignored. Cells are half-open except the
/// last one on each axis, which includes the upper bound. Points outside the
/// bounds are dropped.
BEVHistogram bev_histogram(const PointCloud& cloud, const BevBounds& bounds = {},
                           std::size_t bins = kDefaultBevBins);

/// Jensen-Shannon divergence (nats) between the normalized sums of each set.
double jsd(std::span<const BEVHistogram> set_a, std::span<const BEVHistogram> set_b);

/// Median of pairwise Euclidean distances between all distinct pooled
/// samples (normalized histograms).
double median_pairwise_distance(std::span<const BEVHistogram> set_a,
                                std::span<const BEVHistogram> set_b);

/// Biased (V-statistic) squared MMD with a Gaussian kernel
/// exp(-|u - v|^2 / (2 bandwidth^2)) over per-sample normalized histograms.
/// The bandwidth defaults to the median pairwise distance (1 if that is 0).
double mmd(std::span<const BEVHistogram> set_a, std::span<const BEVHistogram> set_b,
           std::optional<double> bandwidth = std::nullopt);

/// Mean squared nearest-neighbor distance from p to q plus from q to p.
double chamfer(const PointCloud& p, const PointCloud& q);

enum class MaePolicy { all, both_valid };

/// Mean |a.range - b.range| over all pixels, or only pixels with a return in
/// both images.
double range_mae(const RangeImage& a, const RangeImage& b, MaePolicy policy = MaePolicy::all);

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::size_t n = 0;
};

/// Sample mean and unbiased covariance of the rows of `features` (n x D).
GaussianStats gaussian_stats(const Eigen::MatrixXd& features);

struct FrechetResult {
  double distance = 0.0;
  /// True when 1e-10 * I had to be added to both covariances.
  bool jitter_applied = false;
};

/// |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)).
FrechetResult frechet_distance(const GaussianStats& g1, const GaussianStats& g2);

}  // namespace rangeview
