#pragma once

#include <cstddef>

#include "rangeview/geometry.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/tensor.hpp"

namespace rangeview {

/// Keeps rows 0, factor, 2*factor, ... Throws std::invalid_argument unless
/// factor divides the height.
RangeImage subsample_beams(const RangeImage& img, std::size_t factor);

/// The beam model matching subsample_beams.
BeamModel subsample_beam_model(const BeamModel& model, std::size_t factor);

/// 1 marks a missing (masked) pixel. Every row is identical and the masked
/// columns form one circular band.
struct SectorMask {
  BinaryGrid mask;
  double center_deg = 0.0;
  double width_deg = 0.0;
};

struct MaskedImage {
  RangeImage image;
  SectorMask mask;
};

/// Blanks every column whose pixel-center azimuth lies within +-width/2 of
/// center (circularly, degrees). Requires 0 < width_deg <= 360.
MaskedImage mask_sector(const RangeImage& img, double center_deg, double width_deg);

/// h x w grid with ones in column 0 and zeros elsewhere.
BinaryGrid direction_condition(std::size_t h, std::size_t w);

/// h x W x C to h x (W/f) x (C*f): out(r, c, ch*f + k) = in(r, c*f + k, ch).
FeatureMap reshape_condition(const FeatureMap& sparse, std::size_t f);

/// Exact inverse of reshape_condition.
FeatureMap unreshape_condition(const FeatureMap& packed, std::size_t f);

/// f x f max-pool: an output cell is 1 iff any covered input cell is 1.
BinaryGrid downsample_mask(const BinaryGrid& mask, std::size_t f);

}  // namespace rangeview
