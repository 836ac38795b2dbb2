#pragma once

#include <cstddef>
#include <vector>

#include "rangeview/geometry.hpp"
#include "rangeview/tensor.hpp"

namespace rangeview {

/// Two-channel (range, intensity) image; rows are beams, columns azimuth
/// bins. A pixel with range 0 holds no return and has intensity 0.
struct RangeImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> range;
  std::vector<double> intensity;

  RangeImage() = default;
  RangeImage(std::size_t h, std::size_t w)
      : height(h), width(w), range(h * w, 0.0), intensity(h * w, 0.0) {}

  std::size_t index(std::size_t row, std::size_t col) const { return row * width + col; }
  double range_at(std::size_t row, std::size_t col) const { return range[index(row, col)]; }
  double intensity_at(std::size_t row, std::size_t col) const {
    return intensity[index(row, col)];
  }
  void set(std::size_t row, std::size_t col, double r, double i) {
    range[index(row, col)] = r;
    intensity[index(row, col)] = i;
  }
  std::size_t valid_count() const;

  bool operator==(const RangeImage&) const = default;
};

/// floor(((theta + pi) / 2pi) * W) mod W.
std::size_t azimuth_to_column(double theta, std::size_t width);

/// Azimuth of the center of column u: (u + 0.5) / W * 2pi - pi.
double column_center_azimuth(std::size_t column, std::size_t width);

/// Rasterizes with per-beam optical centers: each point is assigned a beam,
/// converted relative to that beam, and written to (beam, azimuth column).
/// The nearest return wins a pixel. Points on the z axis are skipped.
RangeImage project(const PointCloud& cloud, const BeamModel& model, std::size_t width);

/// Shared-origin baseline: row is the beam whose pitch is closest to the
/// point's elevation seen from the sensor origin, range is the norm of the
/// point. Only the beam pitches are used.
RangeImage project_shared_origin(const PointCloud& cloud, const BeamModel& model,
                                 std::size_t width);

/// Row chosen by project_shared_origin: nearest pitch to atan2(z, d).
std::size_t shared_origin_row(const Point3& p, const BeamModel& model);

/// Emits one point per non-empty pixel at the pixel-center azimuth.
PointCloud unproject(const RangeImage& img, const BeamModel& model);

/// Circular shift of every row by k columns: out(row, (c + k) mod W) = in(row, c).
RangeImage circshift_columns(const RangeImage& img, std::ptrdiff_t k);

struct Normalizer {
  enum class Scheme { linear, log };
  Scheme scheme = Scheme::log;
  double max_range = 80.0;
};

/// Maps range and intensity to [-1, 1] as an H x W x 2 map. Ranges are
/// clamped to [0, max_range] first.
FeatureMap normalize(const RangeImage& img, const Normalizer& nz);

/// Inverse of normalize. Values are clamped to [-1, 1]; pixels decoding to
/// range 0 get intensity 0.
RangeImage denormalize(const FeatureMap& fm, const Normalizer& nz);

}  // namespace rangeview
