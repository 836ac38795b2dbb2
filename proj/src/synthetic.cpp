#include "rangeview/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rangeview/projection.hpp"

namespace rangeview {

BeamModel synthetic_beam_model(std::size_t n, double h_min, double h_max, double pitch_top_deg,
                               double pitch_bottom_deg, Rng& rng, HeightLayout layout) {
  if (n < 1) throw std::invalid_argument("synthetic_beam_model: n must be >= 1");
  if (!(h_min <= h_max)) throw std::invalid_argument("synthetic_beam_model: h_min > h_max");
  if (n > 1 && !(pitch_top_deg > pitch_bottom_deg)) {
    throw std::invalid_argument("synthetic_beam_model: top pitch must exceed bottom pitch");
  }
  std::uniform_real_distribution<double> uh(h_min, h_max);
  std::vector<Beam> beams(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = n > 1 ? double(j) / double(n - 1) : 0.0;
    beams[j].pitch = (pitch_top_deg + t * (pitch_bottom_deg - pitch_top_deg)) * kPi / 180.0;
    beams[j].height = layout == HeightLayout::descending ? h_max + t * (h_min - h_max) : uh(rng);
  }
  return BeamModel(std::move(beams));
}

LabeledCloud synthesize_scan(const BeamModel& model, const ScanConfig& config, Rng& rng) {
  if (!(config.min_range > 0.0 && config.min_range <= config.max_range)) {
    throw std::invalid_argument("synthesize_scan: need 0 < min_range <= max_range");
  }
  if (config.range_noise < 0.0) throw std::invalid_argument("synthesize_scan: negative noise");
  const std::size_t w = config.pixel_center_width;
  if (w > 0 && config.points_per_beam > w) {
    throw std::invalid_argument("synthesize_scan: more points per beam than pixel columns");
  }

  std::uniform_real_distribution<double> ur(config.min_range, config.max_range);
  std::uniform_real_distribution<double> ua(-kPi, kPi);
  std::uniform_real_distribution<double> ui(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<std::size_t> columns(w);
  std::iota(columns.begin(), columns.end(), std::size_t{0});

  LabeledCloud out;
  out.cloud.reserve(model.size() * config.points_per_beam);
  out.beam.reserve(model.size() * config.points_per_beam);
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (w > 0) std::shuffle(columns.begin(), columns.end(), rng);
    for (std::size_t k = 0; k < config.points_per_beam; ++k) {
      const double theta = w > 0 ? column_center_azimuth(columns[k], w) : ua(rng);
      double r = ur(rng);
      if (config.range_noise > 0.0) r += config.range_noise * noise(rng);
      out.cloud.push_back(beam_spherical_to_cart({r, theta, model[j].pitch}, model[j].height,
                                                 ui(rng)));
      out.beam.push_back(j);
    }
  }
  return out;
}

}  // namespace rangeview
