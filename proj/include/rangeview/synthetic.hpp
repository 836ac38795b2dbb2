#pragma once

#include <cstddef>
#include <vector>

#include "rangeview/diffusion.hpp"
#include "rangeview/geometry.hpp"

namespace rangeview {

enum class HeightLayout {
  uniform_random,  // i.i.d. uniform in [h_min, h_max]; beam lines may cross
  descending,      // evenly spaced from h_max down to h_min; lines never cross
};

/// n beams with pitches evenly spaced from pitch_top_deg down to
/// pitch_bottom_deg. rng is only consumed for HeightLayout::uniform_random.
BeamModel synthetic_beam_model(std::size_t n, double h_min, double h_max, double pitch_top_deg,
                               double pitch_bottom_deg, Rng& rng,
                               HeightLayout layout = HeightLayout::uniform_random);

struct ScanConfig {
  std::size_t points_per_beam = 2000;
  double min_range = 5.0;
  double max_range = 60.0;
  double range_noise = 0.0;  // std dev (m) added along the beam ray
  // When non-zero, azimuths are distinct pixel centers of a grid this wide
  // (points_per_beam <= pixel_center_width); otherwise uniform in (-pi, pi].
  std::size_t pixel_center_width = 0;
};

struct LabeledCloud {
  PointCloud cloud;
  std::vector<std::size_t> beam;  // true beam index per point
};

/// Points lie on the rays of their beams: range measured from the beam's
/// optical center, uniform in [min_range, max_range]. Intensity is uniform
/// in [0, 1].
LabeledCloud synthesize_scan(const BeamModel& model, const ScanConfig& config, Rng& rng);

}  // namespace rangeview
