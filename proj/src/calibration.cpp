#include "rangeview/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rangeview/errors.hpp"

namespace rangeview {

void HoughConfig::validate() const {
  if (!(h_min < h_max) || !(phi_min < phi_max)) {
    throw std::invalid_argument("HoughConfig: bounds must satisfy min < max");
  }
  if (h_bins < 2 || phi_bins < 2) {
    throw std::invalid_argument("HoughConfig: at least two bins per axis are required");
  }
  if (num_beams < 1) {
    throw std::invalid_argument("HoughConfig: num_beams must be >= 1");
  }
  if (!std::isfinite(min_planar_distance) || min_planar_distance < 0.0) {
    throw std::invalid_argument("HoughConfig: min_planar_distance must be >= 0");
  }
}

std::size_t HoughConfig::h_bin_of(double h) const {
  const double idx = std::round((h - h_min) / h_step());
  return static_cast<std::size_t>(std::clamp(idx, 0.0, double(h_bins - 1)));
}

std::size_t HoughConfig::phi_bin_of(double phi) const {
  if (!(phi >= phi_min) || !(phi < phi_max)) return phi_bins;
  const auto k = static_cast<std::size_t>((phi - phi_min) / phi_step());
  return std::min(k, phi_bins - 1);
}

HoughAccumulator::HoughAccumulator(const HoughConfig& config) : config_(config) {
  config_.validate();
  votes_.assign(config_.h_bins * config_.phi_bins, 0);
}

void HoughAccumulator::increment(std::size_t h_bin, std::size_t phi_bin,
                                 std::uint32_t count) {
  if (h_bin >= config_.h_bins || phi_bin >= config_.phi_bins) {
    throw std::out_of_range("HoughAccumulator: cell out of range");
  }
  votes_[h_bin * config_.phi_bins + phi_bin] += count;
}

std::uint64_t HoughAccumulator::total() const {
  std::uint64_t sum = 0;
  for (auto v : votes_) sum += v;
  return sum;
}

void HoughAccumulator::add(const PointCloud& cloud) {
  const std::size_t phi_bins = config_.phi_bins;
  std::vector<double> centers(config_.h_bins);
  for (std::size_t i = 0; i < centers.size(); ++i) centers[i] = config_.h_center(i);

  for (const auto& p : cloud) {
    const double d = planar_distance(p);
    if (!(d > config_.min_planar_distance)) continue;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const std::size_t k = config_.phi_bin_of(std::atan2(p.z - centers[i], d));
      if (k < phi_bins) ++votes_[i * phi_bins + k];
    }
  }
}

HoughAccumulator& HoughAccumulator::merge(const HoughAccumulator& other) {
  if (!(other.config_ == config_)) {
    throw std::invalid_argument("HoughAccumulator: cannot merge different grids");
  }
  for (std::size_t i = 0; i < votes_.size(); ++i) votes_[i] += other.votes_[i];
  return *this;
}

HoughAccumulator accumulate_votes(const PointCloud& cloud, const HoughConfig& config) {
  if (cloud.empty()) {
    throw std::invalid_argument("accumulate_votes: empty point cloud");
  }
  HoughAccumulator acc(config);
  acc.add(cloud);
  return acc;
}

BeamModel extract_beams(const HoughAccumulator& acc, std::size_t n) {
  if (n < 1) throw std::invalid_argument("extract_beams: n must be >= 1");
  const HoughConfig& cfg = acc.config();
  const std::size_t rows = cfg.h_bins;
  const std::size_t cols = cfg.phi_bins;
  const auto radius = static_cast<std::ptrdiff_t>(cfg.suppression_radius);

  std::vector<std::uint64_t> work(acc.votes().begin(), acc.votes().end());
  std::vector<Beam> peaks;
  peaks.reserve(n);

  for (std::size_t found = 0; found < n; ++found) {
    // First maximum in flattened order, so ties go to the lower cell index.
    const auto best = std::max_element(work.begin(), work.end());
    if (*best == 0) {
      throw DataError("extract_beams: requested " + std::to_string(n) +
                      " beams but only " + std::to_string(found) +
                      " non-empty peaks were found");
    }
    const auto flat = static_cast<std::ptrdiff_t>(best - work.begin());
    const std::ptrdiff_t pi = flat / static_cast<std::ptrdiff_t>(cols);
    const std::ptrdiff_t pk = flat % static_cast<std::ptrdiff_t>(cols);

    const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, pi - radius);
    const std::ptrdiff_t i1 = std::min<std::ptrdiff_t>(rows - 1, pi + radius);
    const std::ptrdiff_t k0 = std::max<std::ptrdiff_t>(0, pk - radius);
    const std::ptrdiff_t k1 = std::min<std::ptrdiff_t>(cols - 1, pk + radius);

    double weight = 0.0, sum_h = 0.0, sum_phi = 0.0;
    for (std::ptrdiff_t i = i0; i <= i1; ++i) {
      for (std::ptrdiff_t k = k0; k <= k1; ++k) {
        auto& cell = work[std::size_t(i) * cols + std::size_t(k)];
        const double w = double(cell);
        weight += w;
        sum_h += w * cfg.h_center(std::size_t(i));
        sum_phi += w * cfg.phi_center(std::size_t(k));
        cell = 0;
      }
    }
    peaks.push_back({sum_h / weight, sum_phi / weight});
  }

  std::sort(peaks.begin(), peaks.end(),
            [](const Beam& a, const Beam& b) { return a.pitch > b.pitch; });
  // BeamModel rejects duplicate pitches.
  return BeamModel(std::move(peaks));
}

std::size_t assign_beam(const Point3& p, const BeamModel& model) {
  const double d = planar_distance(p);
  if (d == 0.0) {
    throw std::domain_error("assign_beam: elevation undefined for a point on the z axis");
  }
  std::size_t best = 0;
  double best_err = std::abs(std::atan2(p.z - model[0].height, d) - model[0].pitch);
  for (std::size_t j = 1; j < model.size(); ++j) {
    const double err = std::abs(std::atan2(p.z - model[j].height, d) - model[j].pitch);
    if (err < best_err) {
      best_err = err;
      best = j;
    }
  }
  return best;
}

BeamModel calibrate(std::span<const PointCloud> clouds, const HoughConfig& config) {
  if (clouds.empty()) throw std::invalid_argument("calibrate: no point clouds given");
  HoughAccumulator acc(config);
  for (const auto& cloud : clouds) acc.add(cloud);
  return extract_beams(acc, config.num_beams);
}

}  // namespace rangeview
