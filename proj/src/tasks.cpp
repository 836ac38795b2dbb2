#include "rangeview/tasks.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rangeview {

namespace {

void require_divides(std::size_t f, std::size_t n, const char* where) {
  if (f == 0 || n % f != 0) {
    throw std::invalid_argument(std::string(where) + ": factor " + std::to_string(f) +
                                " does not divide " + std::to_string(n));
  }
}

}  // namespace

RangeImage subsample_beams(const RangeImage& img, std::size_t factor) {
  require_divides(factor, img.height, "subsample_beams");
  RangeImage out(img.height / factor, img.width);
  for (std::size_t row = 0; row < out.height; ++row) {
    for (std::size_t col = 0; col < img.width; ++col) {
      out.set(row, col, img.range_at(row * factor, col), img.intensity_at(row * factor, col));
    }
  }
  return out;
}

BeamModel subsample_beam_model(const BeamModel& model, std::size_t factor) {
  return model.every_nth(factor);
}

MaskedImage mask_sector(const RangeImage& img, double center_deg, double width_deg) {
  if (!(width_deg > 0.0 && width_deg <= 360.0)) {
    throw std::invalid_argument("mask_sector: width_deg must lie in (0, 360]");
  }
  MaskedImage out{img, {BinaryGrid(img.height, img.width), center_deg, width_deg}};
  const double center = center_deg * kPi / 180.0;
  const double half = 0.5 * width_deg;
  for (std::size_t col = 0; col < img.width; ++col) {
    const double offset_deg =
        std::abs(wrap_angle(column_center_azimuth(col, img.width) - center)) * 180.0 / kPi;
    // Tolerance absorbs rounding for bands whose edge hits a pixel center.
    if (offset_deg > half + 1e-9) continue;
    for (std::size_t row = 0; row < img.height; ++row) {
      out.image.set(row, col, 0.0, 0.0);
      out.mask.mask.at(row, col) = 1;
    }
  }
  return out;
}

BinaryGrid direction_condition(std::size_t h, std::size_t w) {
  if (h < 1 || w < 1) throw std::invalid_argument("direction_condition: h and w must be >= 1");
  BinaryGrid grid(h, w);
  for (std::size_t row = 0; row < h; ++row) grid.at(row, 0) = 1;
  return grid;
}

FeatureMap reshape_condition(const FeatureMap& sparse, std::size_t f) {
  require_divides(f, sparse.width, "reshape_condition");
  const std::size_t c = sparse.channels;
  FeatureMap out(sparse.height, sparse.width / f, c * f);
  for (std::size_t row = 0; row < out.height; ++row) {
    for (std::size_t col = 0; col < out.width; ++col) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t k = 0; k < f; ++k) {
          out.at(row, col, ch * f + k) = sparse.at(row, col * f + k, ch);
        }
      }
    }
  }
  return out;
}

FeatureMap unreshape_condition(const FeatureMap& packed, std::size_t f) {
  require_divides(f, packed.channels, "unreshape_condition");
  const std::size_t c = packed.channels / f;
  FeatureMap out(packed.height, packed.width * f, c);
  for (std::size_t row = 0; row < packed.height; ++row) {
    for (std::size_t col = 0; col < packed.width; ++col) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        for (std::size_t k = 0; k < f; ++k) {
          out.at(row, col * f + k, ch) = packed.at(row, col, ch * f + k);
        }
      }
    }
  }
  return out;
}

BinaryGrid downsample_mask(const BinaryGrid& mask, std::size_t f) {
  require_divides(f, mask.height, "downsample_mask");
  require_divides(f, mask.width, "downsample_mask");
  BinaryGrid out(mask.height / f, mask.width / f);
  for (std::size_t row = 0; row < mask.height; ++row) {
    for (std::size_t col = 0; col < mask.width; ++col) {
      if (mask.at(row, col)) out.at(row / f, col / f) = 1;
    }
  }
  return out;
}

}  // namespace rangeview
