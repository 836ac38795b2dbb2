#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rangeview {

/// Dense H x W x C grid of reals, channel-interleaved row-major (HWC).
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> data;

  FeatureMap() = default;
  FeatureMap(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), data(h * w * c, fill) {}

  std::size_t index(std::size_t row, std::size_t col, std::size_t ch) const {
    return (row * width + col) * channels + ch;
  }
  double& at(std::size_t row, std::size_t col, std::size_t ch) {
    return data[index(row, col, ch)];
  }
  double at(std::size_t row, std::size_t col, std::size_t ch) const {
    return data[index(row, col, ch)];
  }

  bool operator==(const FeatureMap&) const = default;
};

/// H x W grid of 0/1 values, row-major.
struct BinaryGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> data;

  BinaryGrid() = default;
  BinaryGrid(std::size_t h, std::size_t w, std::uint8_t fill = 0)
      : height(h), width(w), data(h * w, fill) {}

  std::uint8_t& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
  std::uint8_t at(std::size_t row, std::size_t col) const {
    return data[row * width + col];
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : data) n += v != 0;
    return n;
  }

  bool operator==(const BinaryGrid&) const = default;
};

}  // namespace rangeview
