#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "rangeview/geometry.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/rangeops.hpp"
#include "rangeview/tensor.hpp"

namespace rangeview {

// All binary formats are little-endian. Containers are a 4-byte magic, a
// fixed number of u32 extents (per magic), then the row-major payload:
//   RGIM  H, W, C   float32   range image / feature map, channel-interleaved
//   FEAT  n, D      float32   feature matrix
//   MASK  H, W      u8        binary mask
// MKWT (Meta-Kernel weights) uses its own layout, see write_meta_kernel_weights.

enum class DType { f32, u8 };

struct BinaryContainer {
  std::array<char, 4> magic{};
  std::vector<std::uint32_t> dims;
  DType dtype = DType::f32;
  std::vector<std::uint8_t> payload;

  std::size_t element_count() const;
};

std::size_t dtype_size(DType dtype);

std::vector<std::uint8_t> encode_container(const BinaryContainer& c);

/// Validates magic, extent count and payload length. `source` names the
/// input in error messages.
BinaryContainer decode_container(std::span<const std::uint8_t> bytes, std::string_view magic,
                                 std::size_t ndims, DType dtype,
                                 const std::string& source = "<memory>");

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

/// Consecutive float32 records of `stride` values (x, y, z, intensity, ...);
/// extra fields are ignored and intensity is clamped to [0, 1]. Use stride 5
/// for nuScenes sweeps.
PointCloud read_kitti_bin(const std::filesystem::path& path, std::size_t stride = 4);
PointCloud decode_point_records(std::span<const std::uint8_t> bytes, std::size_t stride,
                                const std::string& source = "<memory>");
void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud);

void write_range_image(const std::filesystem::path& path, const RangeImage& img);
RangeImage read_range_image(const std::filesystem::path& path);

/// RGIM container with arbitrary channel count.
void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm);
FeatureMap read_feature_map(const std::filesystem::path& path);

void write_features(const std::filesystem::path& path, const Eigen::MatrixXd& features);
Eigen::MatrixXd read_features(const std::filesystem::path& path);

void write_mask(const std::filesystem::path& path, const BinaryGrid& mask);
BinaryGrid read_mask(const std::filesystem::path& path);

/// "MKWT", u32 layer count (3), then (u32 out, u32 in) per layer in the order
/// phi_hidden, phi_out, mix, then per layer out*in float32 weights followed
/// by out float32 biases.
void write_meta_kernel_weights(const std::filesystem::path& path, const MetaKernelWeights& w);
MetaKernelWeights read_meta_kernel_weights(const std::filesystem::path& path);

/// Text: first line N, then N lines "h_j phi_j" (meters, radians) with 17
/// significant digits.
void write_beam_model(std::ostream& out, const BeamModel& model);
BeamModel read_beam_model(std::istream& in, const std::string& source = "<stream>");
void write_beam_model(const std::filesystem::path& path, const BeamModel& model);
BeamModel read_beam_model(const std::filesystem::path& path);

}  // namespace rangeview
