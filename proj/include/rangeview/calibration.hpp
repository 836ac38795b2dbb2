#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rangeview/geometry.hpp"

namespace rangeview {

/// Hough grid over (height, pitch). Height bins are grid points spanning
/// [h_min, h_max] inclusive; pitch bins are half-open intervals tiling
/// [phi_min, phi_max). Defaults target HDL-64-class sensors: 2.5 mm height
/// steps and 0.02 degree pitch cells.
struct HoughConfig {
  double h_min = -0.5;
  double h_max = 0.5;
  std::size_t h_bins = 401;
  double phi_min = -30.0 * kPi / 180.0;
  double phi_max = 10.0 * kPi / 180.0;
  std::size_t phi_bins = 2000;
  std::size_t num_beams = 64;
  std::size_t suppression_radius = 3;
  /// Points closer than this to the z axis do not vote.
  double min_planar_distance = 2.0;

  /// Throws std::invalid_argument on a degenerate grid.
  void validate() const;

  double h_step() const { return (h_max - h_min) / double(h_bins - 1); }
  double phi_step() const { return (phi_max - phi_min) / double(phi_bins); }
  double h_center(std::size_t i) const { return h_min + double(i) * h_step(); }
  double phi_center(std::size_t k) const {
    return phi_min + (double(k) + 0.5) * phi_step();
  }
  /// Index of the height grid point nearest to h (clamped to the grid).
  std::size_t h_bin_of(double h) const;
  /// Index of the pitch interval containing phi; phi_bins when outside.
  std::size_t phi_bin_of(double phi) const;

  bool operator==(const HoughConfig&) const = default;
};

/// Vote counts laid out height-major: votes[i * phi_bins + k].
class HoughAccumulator {
 public:
  explicit HoughAccumulator(const HoughConfig& config);

  const HoughConfig& config() const { return config_; }
  std::uint32_t at(std::size_t h_bin, std::size_t phi_bin) const {
    return votes_[h_bin * config_.phi_bins + phi_bin];
  }
  void increment(std::size_t h_bin, std::size_t phi_bin, std::uint32_t count = 1);
  const std::vector<std::uint32_t>& votes() const { return votes_; }
  std::uint64_t total() const;

  /// Casts the votes of every point in `cloud` (see accumulate_votes).
  void add(const PointCloud& cloud);

  /// Elementwise sum; configs must match.
  HoughAccumulator& merge(const HoughAccumulator& other);

 private:
  HoughConfig config_;
  std::vector<std::uint32_t> votes_;
};

/// Each point with planar distance d above the configured minimum traces
/// phi(h) = atan2(z - h, d) and votes once per height column, in the pitch
/// cell containing the curve. Throws std::invalid_argument on an empty cloud
/// or a degenerate config.
HoughAccumulator accumulate_votes(const PointCloud& cloud, const HoughConfig& config);

/// Picks n peaks by repeated arg-max with square non-maximum suppression and
/// refines each by the vote-weighted centroid of its neighborhood. Throws
/// DataError when fewer than n non-empty peaks exist.
BeamModel extract_beams(const HoughAccumulator& acc, std::size_t n);

/// argmin_j |atan2(z - h_j, d) - phi_j|, ties to the smaller index. Throws
/// std::domain_error for points on the z axis.
std::size_t assign_beam(const Point3& p, const BeamModel& model);

/// Accumulates votes over all clouds, then extracts config.num_beams beams.
BeamModel calibrate(std::span<const PointCloud> clouds, const HoughConfig& config);

}  // namespace rangeview
