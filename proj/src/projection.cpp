#include "rangeview/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rangeview/calibration.hpp"

namespace rangeview {

std::size_t RangeImage::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(range.begin(), range.end(), [](double r) { return r > 0.0; }));
}

std::size_t azimuth_to_column(double theta, std::size_t width) {
  const double u = std::floor((theta + kPi) / (2.0 * kPi) * double(width));
  const auto w = static_cast<long long>(width);
  long long col = static_cast<long long>(u) % w;
  if (col < 0) col += w;
  return static_cast<std::size_t>(col);
}

double column_center_azimuth(std::size_t column, std::size_t width) {
  return (double(column) + 0.5) / double(width) * 2.0 * kPi - kPi;
}

namespace {

void check_width(std::size_t width) {
  if (width < 1) throw std::invalid_argument("project: width must be >= 1");
}

void write_nearest(RangeImage& img, std::size_t row, std::size_t col, double r,
                   double intensity) {
  const std::size_t idx = img.index(row, col);
  if (img.range[idx] == 0.0 || r < img.range[idx]) {
    img.range[idx] = r;
    img.intensity[idx] = std::clamp(intensity, 0.0, 1.0);
  }
}

}  // namespace

RangeImage project(const PointCloud& cloud, const BeamModel& model, std::size_t width) {
  check_width(width);
  RangeImage img(model.size(), width);
  for (const auto& p : cloud) {
    if (planar_distance(p) == 0.0) continue;
    const std::size_t row = assign_beam(p, model);
    const SphericalCoord s = cart_to_beam_spherical(p, row, model);
    if (!(s.r > 0.0)) continue;
    write_nearest(img, row, azimuth_to_column(s.theta, width), s.r, p.intensity);
  }
  return img;
}

std::size_t shared_origin_row(const Point3& p, const BeamModel& model) {
  const double phi = cart_to_spherical(p).phi;
  std::size_t row = 0;
  double best = std::abs(phi - model[0].pitch);
  for (std::size_t j = 1; j < model.size(); ++j) {
    const double err = std::abs(phi - model[j].pitch);
    if (err < best) {
      best = err;
      row = j;
    }
  }
  return row;
}

RangeImage project_shared_origin(const PointCloud& cloud, const BeamModel& model,
                                 std::size_t width) {
  check_width(width);
  RangeImage img(model.size(), width);
  for (const auto& p : cloud) {
    if (planar_distance(p) == 0.0) continue;
    const SphericalCoord s = cart_to_spherical(p);
    write_nearest(img, shared_origin_row(p, model), azimuth_to_column(s.theta, width), s.r,
                  p.intensity);
  }
  return img;
}

PointCloud unproject(const RangeImage& img, const BeamModel& model) {
  if (img.height != model.size()) {
    throw std::invalid_argument("unproject: image has " + std::to_string(img.height) +
                                " rows but the beam model has " +
                                std::to_string(model.size()) + " beams");
  }
  PointCloud cloud;
  cloud.reserve(img.valid_count());
  for (std::size_t row = 0; row < img.height; ++row) {
    const Beam& beam = model[row];
    for (std::size_t col = 0; col < img.width; ++col) {
      const double r = img.range_at(row, col);
      if (!(r > 0.0)) continue;
      const SphericalCoord s{r, column_center_azimuth(col, img.width), beam.pitch};
      cloud.push_back(beam_spherical_to_cart(s, beam.height, img.intensity_at(row, col)));
    }
  }
  return cloud;
}

RangeImage circshift_columns(const RangeImage& img, std::ptrdiff_t k) {
  RangeImage out(img.height, img.width);
  if (img.width == 0) return out;
  const auto w = static_cast<std::ptrdiff_t>(img.width);
  const std::ptrdiff_t shift = ((k % w) + w) % w;
  for (std::size_t row = 0; row < img.height; ++row) {
    for (std::ptrdiff_t c = 0; c < w; ++c) {
      const std::size_t dst = img.index(row, std::size_t((c + shift) % w));
      const std::size_t src = img.index(row, std::size_t(c));
      out.range[dst] = img.range[src];
      out.intensity[dst] = img.intensity[src];
    }
  }
  return out;
}

namespace {

void check_normalizer(const Normalizer& nz) {
  if (!(nz.max_range > 0.0) || !std::isfinite(nz.max_range)) {
    throw std::invalid_argument("Normalizer: max_range must be positive and finite");
  }
}

}  // namespace

FeatureMap normalize(const RangeImage& img, const Normalizer& nz) {
  check_normalizer(nz);
  FeatureMap out(img.height, img.width, 2);
  const double log_max = std::log2(nz.max_range + 1.0);
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    const double r = std::clamp(img.range[i], 0.0, nz.max_range);
    out.data[2 * i] = nz.scheme == Normalizer::Scheme::log
                          ? 2.0 * std::log2(r + 1.0) / log_max - 1.0
                          : 2.0 * r / nz.max_range - 1.0;
    out.data[2 * i + 1] = 2.0 * std::clamp(img.intensity[i], 0.0, 1.0) - 1.0;
  }
  return out;
}

RangeImage denormalize(const FeatureMap& fm, const Normalizer& nz) {
  check_normalizer(nz);
  if (fm.channels != 2) {
    throw std::invalid_argument("denormalize: expected 2 channels, got " +
                                std::to_string(fm.channels));
  }
  RangeImage img(fm.height, fm.width);
  const double log_max = std::log2(nz.max_range + 1.0);
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    const double v = std::clamp(fm.data[2 * i], -1.0, 1.0);
    double r = nz.scheme == Normalizer::Scheme::log
                   ? std::exp2((v + 1.0) * 0.5 * log_max) - 1.0
                   : (v + 1.0) * 0.5 * nz.max_range;
    r = std::clamp(r, 0.0, nz.max_range);
    img.range[i] = r;
    img.intensity[i] =
        r > 0.0 ? std::clamp((fm.data[2 * i + 1] + 1.0) * 0.5, 0.0, 1.0) : 0.0;
  }
  return img;
}

}  // namespace rangeview
