#include "rangeview/rangeops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rangeview {

namespace {

std::size_t wrap_column(std::ptrdiff_t c, std::size_t width) {
  const auto w = static_cast<std::ptrdiff_t>(width);
  return static_cast<std::size_t>(((c % w) + w) % w);
}

}  // namespace

FeatureMap circular_pad(const FeatureMap& fm, std::size_t k, std::size_t vertical) {
  if (fm.width == 0) throw std::invalid_argument("circular_pad: empty feature map");
  FeatureMap out(fm.height + 2 * vertical, fm.width + 2 * k, fm.channels);
  for (std::size_t row = 0; row < fm.height; ++row) {
    for (std::size_t col = 0; col < out.width; ++col) {
      const std::size_t src =
          wrap_column(static_cast<std::ptrdiff_t>(col) - static_cast<std::ptrdiff_t>(k),
                      fm.width);
      for (std::size_t ch = 0; ch < fm.channels; ++ch) {
        out.at(row + vertical, col, ch) = fm.at(row, src, ch);
      }
    }
  }
  return out;
}

FeatureMap circular_conv2d(const FeatureMap& fm, const ConvKernel& kernel,
                           bool vertical_zero_pad) {
  if (kernel.kh % 2 == 0 || kernel.kw % 2 == 0) {
    throw std::invalid_argument("circular_conv2d: kernel sizes must be odd");
  }
  if (kernel.in_channels != fm.channels) {
    throw std::invalid_argument("circular_conv2d: kernel expects " +
                                std::to_string(kernel.in_channels) +
                                " input channels, feature map has " +
                                std::to_string(fm.channels));
  }
  if (kernel.weights.size() !=
      kernel.out_channels * kernel.in_channels * kernel.kh * kernel.kw) {
    throw std::invalid_argument("circular_conv2d: kernel weight count mismatch");
  }
  if (!vertical_zero_pad && fm.height < kernel.kh) {
    throw std::invalid_argument("circular_conv2d: image shorter than kernel");
  }

  const std::size_t half_h = kernel.kh / 2;
  const std::size_t half_w = kernel.kw / 2;
  const FeatureMap padded = circular_pad(fm, half_w, vertical_zero_pad ? half_h : 0);
  const std::size_t out_h = padded.height - kernel.kh + 1;
  FeatureMap out(out_h, fm.width, kernel.out_channels);

  for (std::size_t row = 0; row < out_h; ++row) {
    for (std::size_t col = 0; col < fm.width; ++col) {
      for (std::size_t o = 0; o < kernel.out_channels; ++o) {
        double acc = 0.0;
        for (std::size_t y = 0; y < kernel.kh; ++y) {
          for (std::size_t x = 0; x < kernel.kw; ++x) {
            const double* px = &padded.data[padded.index(row + y, col + x, 0)];
            for (std::size_t i = 0; i < kernel.in_channels; ++i) {
              acc += kernel.at(o, i, y, x) * px[i];
            }
          }
        }
        out.at(row, col, o) = acc;
      }
    }
  }
  return out;
}

std::array<double, 3> relative_spherical_offset(const SphericalCoord& pj,
                                                const SphericalCoord& pi) {
  // Rotate p_j by -azimuth(p_i) about z, then by elevation(p_i) about y, so
  // that p_i lands on (r_i, 0, 0). With elevation(p_i) = 0 this is exactly
  // (r_j cos de cos da - r_i, r_j cos de sin da, r_j sin de).
  const double da = pj.theta - pi.theta;
  const double cos_ej = std::cos(pj.phi), sin_ej = std::sin(pj.phi);
  const double cos_ei = std::cos(pi.phi), sin_ei = std::sin(pi.phi);
  const double x1 = pj.r * cos_ej * std::cos(da);
  const double y1 = pj.r * cos_ej * std::sin(da);
  const double z1 = pj.r * sin_ej;
  return {x1 * cos_ei + z1 * sin_ei - pi.r, y1, z1 * cos_ei - x1 * sin_ei};
}

void DenseLayer::apply(const double* x, double* y) const {
  for (std::size_t o = 0; o < out; ++o) {
    double acc = bias[o];
    const double* w = &weight[o * in];
    for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
    y[o] = acc;
  }
}

void MetaKernelWeights::validate(std::size_t in_channels, std::size_t neighborhood) const {
  auto check = [](const DenseLayer& l, const char* name) {
    if (l.weight.size() != l.in * l.out || l.bias.size() != l.out) {
      throw std::invalid_argument(std::string("MetaKernelWeights: ") + name +
                                  " has inconsistent storage");
    }
  };
  check(phi_hidden, "phi_hidden");
  check(phi_out, "phi_out");
  check(mix, "mix");
  if (phi_hidden.in != 3) {
    throw std::invalid_argument("MetaKernelWeights: phi_hidden must take 3 inputs");
  }
  if (phi_out.in != phi_hidden.out) {
    throw std::invalid_argument("MetaKernelWeights: phi_out input does not match phi_hidden output");
  }
  if (phi_out.out != in_channels) {
    throw std::invalid_argument("MetaKernelWeights: phi_out produces " +
                                std::to_string(phi_out.out) + " channels, features have " +
                                std::to_string(in_channels));
  }
  if (mix.in != neighborhood * in_channels) {
    throw std::invalid_argument("MetaKernelWeights: mix expects " + std::to_string(mix.in) +
                                " inputs, neighborhood provides " +
                                std::to_string(neighborhood * in_channels));
  }
}

SphericalGrid spherical_grid(const RangeImage& img, const BeamModel& model) {
  if (img.height != model.size()) {
    throw std::invalid_argument("spherical_grid: image rows do not match beam count");
  }
  SphericalGrid grid{img.height, img.width, {}};
  grid.coords.reserve(img.height * img.width);
  for (std::size_t row = 0; row < img.height; ++row) {
    for (std::size_t col = 0; col < img.width; ++col) {
      grid.coords.push_back({img.range_at(row, col), column_center_azimuth(col, img.width),
                             model[row].pitch});
    }
  }
  return grid;
}

FeatureMap meta_kernel_apply(const FeatureMap& fm, const SphericalGrid& coords,
                             const MetaKernelWeights& weights, std::size_t kh,
                             std::size_t kw) {
  if (kh % 2 == 0 || kw % 2 == 0) {
    throw std::invalid_argument("meta_kernel_apply: neighborhood sizes must be odd");
  }
  if (coords.height != fm.height || coords.width != fm.width ||
      coords.coords.size() != fm.height * fm.width) {
    throw std::invalid_argument("meta_kernel_apply: coordinates are not aligned with features");
  }
  const std::size_t c_in = fm.channels;
  const std::size_t k = kh * kw;
  weights.validate(c_in, k);

  const auto half_h = static_cast<std::ptrdiff_t>(kh / 2);
  const auto half_w = static_cast<std::ptrdiff_t>(kw / 2);
  const auto rows = static_cast<std::ptrdiff_t>(fm.height);

  FeatureMap out(fm.height, fm.width, weights.mix.out);
  std::vector<double> concat(k * c_in);
  std::vector<double> hidden(weights.phi_hidden.out);
  std::vector<double> gate(c_in);

  for (std::ptrdiff_t row = 0; row < rows; ++row) {
    for (std::size_t col = 0; col < fm.width; ++col) {
      const SphericalCoord& center = coords.at(std::size_t(row), col);
      std::fill(concat.begin(), concat.end(), 0.0);
      std::size_t slot = 0;
      for (std::ptrdiff_t dy = -half_h; dy <= half_h; ++dy) {
        for (std::ptrdiff_t dx = -half_w; dx <= half_w; ++dx, ++slot) {
          const std::ptrdiff_t nr = row + dy;
          if (nr < 0 || nr >= rows) continue;
          const std::size_t nc = wrap_column(static_cast<std::ptrdiff_t>(col) + dx, fm.width);
          const SphericalCoord& neighbor = coords.at(std::size_t(nr), nc);
          if (!(neighbor.r > 0.0)) continue;

          const auto offset = relative_spherical_offset(neighbor, center);
          weights.phi_hidden.apply(offset.data(), hidden.data());
          for (auto& v : hidden) v = std::max(v, 0.0);
          weights.phi_out.apply(hidden.data(), gate.data());

          const double* feat = &fm.data[fm.index(std::size_t(nr), nc, 0)];
          for (std::size_t c = 0; c < c_in; ++c) concat[slot * c_in + c] = gate[c] * feat[c];
        }
      }
      weights.mix.apply(concat.data(), &out.data[out.index(std::size_t(row), col, 0)]);
    }
  }
  return out;
}

}  // namespace rangeview
