#include "rangeview/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rangeview/errors.hpp"

namespace rangeview {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw std::invalid_argument(std::string(what) + " exceeds u32 range");
  return static_cast<std::uint32_t>(v);
}

std::array<char, 4> magic_of(std::string_view m) {
  if (m.size() != 4) throw std::invalid_argument("container magic must be 4 bytes");
  return {m[0], m[1], m[2], m[3]};
}

std::string printable_magic(const std::uint8_t* p) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    const char c = static_cast<char>(p[i]);
    s += (c >= 32 && c < 127) ? c : '?';
  }
  return s;
}

}  // namespace

std::size_t dtype_size(DType dtype) { return dtype == DType::f32 ? 4 : 1; }

std::size_t BinaryContainer::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> encode_container(const BinaryContainer& c) {
  if (c.payload.size() != c.element_count() * dtype_size(c.dtype)) {
    throw std::invalid_argument("encode_container: payload length does not match extents");
  }
  std::vector<std::uint8_t> out;
  out.reserve(4 + 4 * c.dims.size() + c.payload.size());
  for (char ch : c.magic) out.push_back(static_cast<std::uint8_t>(ch));
  for (auto d : c.dims) put_u32(out, d);
  out.insert(out.end(), c.payload.begin(), c.payload.end());
  return out;
}

BinaryContainer decode_container(std::span<const std::uint8_t> bytes, std::string_view magic,
                                 std::size_t ndims, DType dtype, const std::string& source) {
  const std::size_t header = 4 + 4 * ndims;
  if (bytes.size() < header) {
    throw DataError(source + ": truncated header: expected " + std::to_string(header) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), magic.data(), 4) != 0) {
    throw DataError(source + ": bad magic '" + printable_magic(bytes.data()) + "', expected '" +
                    std::string(magic) + "'");
  }
  BinaryContainer c;
  c.magic = magic_of(magic);
  c.dtype = dtype;
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    c.dims.push_back(get_u32(bytes.data() + 4 + 4 * i));
    count *= c.dims.back();
  }
  const std::size_t expected = header + count * dtype_size(dtype);
  if (bytes.size() != expected) {
    throw DataError(source + ": payload size mismatch: expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  c.payload.assign(bytes.begin() + std::ptrdiff_t(header), bytes.end());
  return c;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw DataError(path.string() + ": read failed");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

PointCloud decode_point_records(std::span<const std::uint8_t> bytes, std::size_t stride,
                                const std::string& source) {
  if (stride < 4) throw std::invalid_argument("point records need at least 4 fields");
  const std::size_t record = 4 * stride;
  if (bytes.size() % record != 0) {
    throw DataError(source + ": size " + std::to_string(bytes.size()) +
                    " is not a multiple of the " + std::to_string(record) + "-byte record");
  }
  PointCloud cloud;
  cloud.reserve(bytes.size() / record);
  for (std::size_t i = 0; i < bytes.size() / record; ++i) {
    const std::uint8_t* p = bytes.data() + i * record;
    const float x = get_f32(p), y = get_f32(p + 4), z = get_f32(p + 8), it = get_f32(p + 12);
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(it)) {
      throw DataError(source + ": non-finite value in record " + std::to_string(i) +
                      " (byte offset " + std::to_string(i * record) + ")");
    }
    cloud.push_back({x, y, z, std::clamp(double(it), 0.0, 1.0)});
  }
  return cloud;
}

PointCloud read_kitti_bin(const std::filesystem::path& path, std::size_t stride) {
  return decode_point_records(read_file_bytes(path), stride, path.string());
}

void write_kitti_bin(const std::filesystem::path& path, const PointCloud& cloud) {
  std::vector<std::uint8_t> out;
  out.reserve(cloud.size() * 16);
  for (const auto& p : cloud) {
    put_f32(out, p.x);
    put_f32(out, p.y);
    put_f32(out, p.z);
    put_f32(out, p.intensity);
  }
  write_file_bytes(path, out);
}

namespace {

BinaryContainer f32_container(std::string_view magic, std::vector<std::uint32_t> dims,
                              std::span<const double> values) {
  BinaryContainer c;
  c.magic = magic_of(magic);
  c.dims = std::move(dims);
  c.dtype = DType::f32;
  c.payload.reserve(values.size() * 4);
  for (double v : values) put_f32(c.payload, v);
  return c;
}

std::vector<double> f32_values(const BinaryContainer& c) {
  std::vector<double> out(c.payload.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_f32(c.payload.data() + 4 * i);
  return out;
}

}  // namespace

void write_feature_map(const std::filesystem::path& path, const FeatureMap& fm) {
  const auto c = f32_container("RGIM",
                               {checked_u32(fm.height, "height"), checked_u32(fm.width, "width"),
                                checked_u32(fm.channels, "channels")},
                               fm.data);
  write_file_bytes(path, encode_container(c));
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  const auto c = decode_container(read_file_bytes(path), "RGIM", 3, DType::f32, path.string());
  FeatureMap fm(c.dims[0], c.dims[1], c.dims[2]);
  fm.data = f32_values(c);
  return fm;
}

void write_range_image(const std::filesystem::path& path, const RangeImage& img) {
  FeatureMap fm(img.height, img.width, 2);
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    fm.data[2 * i] = img.range[i];
    fm.data[2 * i + 1] = img.intensity[i];
  }
  write_feature_map(path, fm);
}

RangeImage read_range_image(const std::filesystem::path& path) {
  const FeatureMap fm = read_feature_map(path);
  if (fm.channels != 2) {
    throw DataError(path.string() + ": range image must have 2 channels, found " +
                    std::to_string(fm.channels));
  }
  RangeImage img(fm.height, fm.width);
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    img.range[i] = fm.data[2 * i];
    img.intensity[i] = fm.data[2 * i + 1];
    if (!std::isfinite(img.range[i]) || img.range[i] < 0.0) {
      throw DataError(path.string() + ": invalid range at pixel " + std::to_string(i));
    }
  }
  return img;
}

void write_features(const std::filesystem::path& path, const Eigen::MatrixXd& features) {
  // Row-major payload regardless of Eigen's storage order.
  std::vector<double> values;
  values.reserve(std::size_t(features.size()));
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) values.push_back(features(r, c));
  }
  const auto c = f32_container(
      "FEAT",
      {checked_u32(std::size_t(features.rows()), "rows"),
       checked_u32(std::size_t(features.cols()), "cols")},
      values);
  write_file_bytes(path, encode_container(c));
}

Eigen::MatrixXd read_features(const std::filesystem::path& path) {
  const auto c = decode_container(read_file_bytes(path), "FEAT", 2, DType::f32, path.string());
  const std::vector<double> values = f32_values(c);
  Eigen::MatrixXd m(c.dims[0], c.dims[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      m(r, col) = values[std::size_t(r * m.cols() + col)];
    }
  }
  return m;
}

void write_mask(const std::filesystem::path& path, const BinaryGrid& mask) {
  BinaryContainer c;
  c.magic = magic_of("MASK");
  c.dims = {checked_u32(mask.height, "height"), checked_u32(mask.width, "width")};
  c.dtype = DType::u8;
  c.payload.assign(mask.data.begin(), mask.data.end());
  write_file_bytes(path, encode_container(c));
}

BinaryGrid read_mask(const std::filesystem::path& path) {
  const auto c = decode_container(read_file_bytes(path), "MASK", 2, DType::u8, path.string());
  BinaryGrid mask(c.dims[0], c.dims[1]);
  for (std::size_t i = 0; i < c.payload.size(); ++i) {
    if (c.payload[i] > 1) {
      throw DataError(path.string() + ": mask value " + std::to_string(c.payload[i]) +
                      " at element " + std::to_string(i) + " is not 0/1");
    }
    mask.data[i] = c.payload[i];
  }
  return mask;
}

void write_meta_kernel_weights(const std::filesystem::path& path, const MetaKernelWeights& w) {
  const DenseLayer* layers[] = {&w.phi_hidden, &w.phi_out, &w.mix};
  std::vector<std::uint8_t> out;
  for (char ch : std::string_view("MKWT")) out.push_back(static_cast<std::uint8_t>(ch));
  put_u32(out, 3);
  for (const DenseLayer* l : layers) {
    if (l->weight.size() != l->in * l->out || l->bias.size() != l->out) {
      throw std::invalid_argument("write_meta_kernel_weights: inconsistent layer storage");
    }
    put_u32(out, checked_u32(l->out, "layer out"));
    put_u32(out, checked_u32(l->in, "layer in"));
  }
  for (const DenseLayer* l : layers) {
    for (double v : l->weight) put_f32(out, v);
    for (double v : l->bias) put_f32(out, v);
  }
  write_file_bytes(path, out);
}

MetaKernelWeights read_meta_kernel_weights(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  const std::string source = path.string();
  constexpr std::size_t kHeader = 4 + 4 + 3 * 8;
  if (bytes.size() < kHeader) {
    throw DataError(source + ": truncated header: expected " + std::to_string(kHeader) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), "MKWT", 4) != 0) {
    throw DataError(source + ": bad magic '" + printable_magic(bytes.data()) +
                    "', expected 'MKWT'");
  }
  if (get_u32(bytes.data() + 4) != 3) {
    throw DataError(source + ": expected 3 layers, found " +
                    std::to_string(get_u32(bytes.data() + 4)));
  }
  MetaKernelWeights w;
  DenseLayer* layers[] = {&w.phi_hidden, &w.phi_out, &w.mix};
  std::size_t expected = kHeader;
  for (int i = 0; i < 3; ++i) {
    const std::uint32_t out = get_u32(bytes.data() + 8 + 8 * i);
    const std::uint32_t in = get_u32(bytes.data() + 12 + 8 * i);
    *layers[i] = DenseLayer(in, out);
    expected += 4 * (std::size_t(in) * out + out);
  }
  if (bytes.size() != expected) {
    throw DataError(source + ": payload size mismatch: expected " + std::to_string(expected) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  const std::uint8_t* p = bytes.data() + kHeader;
  for (DenseLayer* l : layers) {
    for (double& v : l->weight) v = get_f32(p), p += 4;
    for (double& v : l->bias) v = get_f32(p), p += 4;
  }
  return w;
}

void write_beam_model(std::ostream& out, const BeamModel& model) {
  std::ostringstream text;
  text.imbue(std::locale::classic());
  text << model.size() << '\n' << std::setprecision(17);
  for (const Beam& b : model) text << b.height << ' ' << b.pitch << '\n';
  out << text.str();
}

BeamModel read_beam_model(std::istream& in, const std::string& source) {
  std::stringstream text;
  text << in.rdbuf();
  text.imbue(std::locale::classic());
  long long n = 0;
  if (!(text >> n) || n < 1) throw DataError(source + ": missing or invalid beam count");
  std::vector<Beam> beams(static_cast<std::size_t>(n));
  for (long long j = 0; j < n; ++j) {
    if (!(text >> beams[std::size_t(j)].height >> beams[std::size_t(j)].pitch)) {
      throw DataError(source + ": expected " + std::to_string(n) + " beams, could read " +
                      std::to_string(j));
    }
  }
  try {
    return BeamModel(std::move(beams));
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
}

void write_beam_model(const std::filesystem::path& path, const BeamModel& model) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  write_beam_model(out, model);
  if (!out) throw DataError(path.string() + ": write failed");
}

BeamModel read_beam_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open for reading");
  return read_beam_model(in, path.string());
}

}  // namespace rangeview
