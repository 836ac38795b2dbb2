#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "rangeview/geometry.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/tensor.hpp"

namespace rangeview {

/// Pads the width by k columns on each side with wrapped-around columns and
/// the height by `vertical` zero rows on each side.
FeatureMap circular_pad(const FeatureMap& fm, std::size_t k, std::size_t vertical = 0);

/// Cross-correlation weights laid out [out][in][kh][kw].
struct ConvKernel {
  std::size_t out_channels = 0;
  std::size_t in_channels = 0;
  std::size_t kh = 0;
  std::size_t kw = 0;
  std::vector<double> weights;

  ConvKernel() = default;
  ConvKernel(std::size_t out, std::size_t in, std::size_t h, std::size_t w, double fill = 0.0)
      : out_channels(out), in_channels(in), kh(h), kw(w), weights(out * in * h * w, fill) {}

  double& at(std::size_t o, std::size_t i, std::size_t y, std::size_t x) {
    return weights[((o * in_channels + i) * kh + y) * kw + x];
  }
  double at(std::size_t o, std::size_t i, std::size_t y, std::size_t x) const {
    return weights[((o * in_channels + i) * kh + y) * kw + x];
  }
};

/// Convolution that wraps horizontally (kw/2 columns) and, when enabled,
/// zero-pads vertically (kh/2 rows). Without vertical padding the output
/// loses kh - 1 rows. Output width always equals input width.
FeatureMap circular_conv2d(const FeatureMap& fm, const ConvKernel& kernel,
                           bool vertical_zero_pad = true);

/// Displacement of p_j expressed in the frame that places p_i on its +x
/// axis, with y along increasing azimuth and z along increasing elevation.
/// theta is azimuth, phi elevation. Its norm is the Euclidean distance
/// between the two points.
std::array<double, 3> relative_spherical_offset(const SphericalCoord& pj,
                                                const SphericalCoord& pi);

/// y = W x + b with W stored row-major [out][in].
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim)
      : in(in_dim), out(out_dim), weight(in_dim * out_dim, 0.0), bias(out_dim, 0.0) {}

  void apply(const double* x, double* y) const;
};

/// phi_hidden: 3 -> C_mid, phi_out: C_mid -> C_in (ReLU between them),
/// mix: K * C_in -> C_out.
struct MetaKernelWeights {
  DenseLayer phi_hidden;
  DenseLayer phi_out;
  DenseLayer mix;

  /// Throws std::invalid_argument unless the layers chain for the given
  /// input channel count and neighborhood size K.
  void validate(std::size_t in_channels, std::size_t neighborhood) const;
};

/// Per-pixel spherical coordinates aligned with a feature map.
struct SphericalGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<SphericalCoord> coords;

  const SphericalCoord& at(std::size_t row, std::size_t col) const {
    return coords[row * width + col];
  }
};

/// Coordinates of every pixel: measured range, pixel-center azimuth and the
/// row's beam pitch.
SphericalGrid spherical_grid(const RangeImage& img, const BeamModel& model);

/// Meta-Kernel inference over a kh x kw window (odd sizes). For each pixel i
/// and neighbor j in row-major window order, Phi(gamma(p_j, p_i)) * h_j is
/// concatenated and passed through the mix layer. Neighbors wrap
/// horizontally; neighbors above/below the image or without a return
/// (r = 0) contribute zeros.
FeatureMap meta_kernel_apply(const FeatureMap& fm, const SphericalGrid& coords,
                             const MetaKernelWeights& weights, std::size_t kh,
                             std::size_t kw);

}  // namespace rangeview
