#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "rangeview/rangeops.hpp"

using namespace rangeview;

namespace {

FeatureMap random_map(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FeatureMap fm(h, w, c);
  for (auto& v : fm.data) v = u(rng);
  return fm;
}

ConvKernel random_kernel(std::mt19937_64& rng, std::size_t o, std::size_t i, std::size_t kh,
                         std::size_t kw) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ConvKernel k(o, i, kh, kw);
  for (auto& v : k.weights) v = u(rng);
  return k;
}

SphericalGrid random_grid(std::mt19937_64& rng, std::size_t h, std::size_t w,
                          double empty_fraction = 0.0) {
  std::uniform_real_distribution<double> ur(1.0, 50.0), u01(0.0, 1.0), up(-0.4, 0.05);
  SphericalGrid g{h, w, {}};
  for (std::size_t row = 0; row < h; ++row) {
    const double pitch = 0.05 - 0.45 * double(row) / double(std::max<std::size_t>(h, 2) - 1);
    for (std::size_t col = 0; col < w; ++col) {
      const double r = u01(rng) < empty_fraction ? 0.0 : ur(rng);
      g.coords.push_back({r, column_center_azimuth(col, w), pitch});
    }
  }
  return g;
}

SphericalGrid shift_grid(const SphericalGrid& g, long k) {
  SphericalGrid out = g;
  const long W = long(g.width);
  for (std::size_t row = 0; row < g.height; ++row)
    for (long c = 0; c < W; ++c)
      out.coords[row * g.width + std::size_t(((c + k) % W + W) % W)] =
          g.coords[row * g.width + std::size_t(c)];
  return out;
}

// Phi outputs all ones; mix averages each channel over the window.
MetaKernelWeights mean_filter_weights(std::size_t channels, std::size_t kh, std::size_t kw) {
  const std::size_t k = kh * kw;
  MetaKernelWeights w{DenseLayer(3, 4), DenseLayer(4, channels), DenseLayer(k * channels, channels)};
  std::fill(w.phi_out.bias.begin(), w.phi_out.bias.end(), 1.0);
  for (std::size_t o = 0; o < channels; ++o)
    for (std::size_t s = 0; s < k; ++s) w.mix.weight[o * w.mix.in + s * channels + o] = 1.0 / double(k);
  return w;
}

MetaKernelWeights random_weights(std::mt19937_64& rng, std::size_t c_in, std::size_t k,
                                 std::size_t c_out) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  MetaKernelWeights w{DenseLayer(3, 6), DenseLayer(6, c_in), DenseLayer(k * c_in, c_out)};
  for (DenseLayer* l : {&w.phi_hidden, &w.phi_out, &w.mix}) {
    for (auto& v : l->weight) v = u(rng);
    for (auto& v : l->bias) v = u(rng);
  }
  return w;
}

}  // namespace

TEST(CircularPad, Examples) {
  FeatureMap row(1, 4, 1);
  row.data = {1, 2, 3, 4};
  EXPECT_EQ(circular_pad(row, 0), row);
  EXPECT_EQ(circular_pad(row, 1).data, (std::vector<double>{4, 1, 2, 3, 4, 1}));
  EXPECT_EQ(circular_pad(row, 4).data,
            (std::vector<double>{1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4}));
}

TEST(CircularPad, VerticalZerosAndCenterCrop) {
  std::mt19937_64 rng(1);
  const FeatureMap fm = random_map(rng, 3, 5, 2);
  const FeatureMap p = circular_pad(fm, 2, 1);
  ASSERT_EQ(p.height, 5u);
  ASSERT_EQ(p.width, 9u);
  for (std::size_t c = 0; c < p.width; ++c) {
    EXPECT_EQ(p.at(0, c, 0), 0.0);
    EXPECT_EQ(p.at(4, c, 1), 0.0);
  }
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 5; ++c)
      for (std::size_t ch = 0; ch < 2; ++ch) EXPECT_EQ(p.at(r + 1, c + 2, ch), fm.at(r, c, ch));
}

TEST(CircularConv, IdentityAndConstant) {
  std::mt19937_64 rng(2);
  const FeatureMap fm = random_map(rng, 4, 6, 3);
  ConvKernel id(3, 3, 1, 1);
  for (std::size_t c = 0; c < 3; ++c) id.at(c, c, 0, 0) = 1.0;
  EXPECT_EQ(circular_conv2d(fm, id), fm);

  const FeatureMap flat(5, 7, 1, 2.5);
  const ConvKernel avg(1, 1, 3, 3, 1.0 / 9.0);
  const FeatureMap valid = circular_conv2d(flat, avg, false);
  ASSERT_EQ(valid.height, 3u);
  for (double v : valid.data) EXPECT_NEAR(v, 2.5, 1e-14);
  const FeatureMap padded = circular_conv2d(flat, avg, true);
  for (std::size_t r = 1; r + 1 < 5; ++r)
    for (std::size_t c = 0; c < 7; ++c) EXPECT_NEAR(padded.at(r, c, 0), 2.5, 1e-14);
  EXPECT_NEAR(padded.at(0, 3, 0), 2.5 * 6.0 / 9.0, 1e-14);
}

TEST(CircularConv, MatchesDirectSum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const FeatureMap fm = random_map(rng, 5, 9, 2);
    const ConvKernel k = random_kernel(rng, 3, 2, 3, 5);
    const FeatureMap got = circular_conv2d(fm, k);
    const FeatureMap want = oracle::conv(fm, k);
    for (std::size_t i = 0; i < got.data.size(); ++i) ASSERT_NEAR(got.data[i], want.data[i], 1e-12);
  }
}

TEST(CircularConv, ShiftEquivariance) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> uk(-40, 40);
  std::uniform_int_distribution<std::size_t> uw(3, 24), uh(1, 6), uc(1, 3), uks(0, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t h = uh(rng), w = uw(rng), c = uc(rng);
    const FeatureMap fm = random_map(rng, h, w, c);
    const ConvKernel k = random_kernel(rng, uc(rng), c, 2 * uks(rng) + 1, 2 * uks(rng) + 1);
    const long s = uk(rng);
    const FeatureMap a = circular_conv2d(oracle::shift_columns(fm, s), k);
    const FeatureMap b = oracle::shift_columns(circular_conv2d(fm, k), s);
    for (std::size_t i = 0; i < a.data.size(); ++i) ASSERT_NEAR(a.data[i], b.data[i], 1e-6);
  }
}

TEST(CircularConv, Errors) {
  const FeatureMap fm(3, 3, 2);
  EXPECT_THROW(circular_conv2d(fm, ConvKernel(1, 3, 3, 3)), std::invalid_argument);
  EXPECT_THROW(circular_conv2d(fm, ConvKernel(1, 2, 2, 3)), std::invalid_argument);
}

TEST(RelativeOffset, Examples) {
  const SphericalCoord p{3.0, 0.4, -0.1};
  const auto z = relative_spherical_offset(p, p);
  EXPECT_NEAR(z[0], 0.0, 1e-15);
  EXPECT_NEAR(z[1], 0.0, 1e-15);
  EXPECT_NEAR(z[2], 0.0, 1e-15);

  const auto c = relative_spherical_offset({2.0, 0.0, 0.0}, {1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_DOUBLE_EQ(c[1], 0.0);
  EXPECT_DOUBLE_EQ(c[2], 0.0);
}

TEST(RelativeOffset, NormIsEuclideanDistance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ur(0.0, 80.0), ua(-kPi, kPi), ue(-0.6, 0.6);
  for (int i = 0; i < 10000; ++i) {
    const SphericalCoord a{ur(rng), ua(rng), ue(rng)}, b{ur(rng), ua(rng), ue(rng)};
    const auto g = relative_spherical_offset(a, b);
    const double norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    const double dist = oracle::distance(oracle::to_cartesian(a.r, a.theta, a.phi),
                                         oracle::to_cartesian(b.r, b.theta, b.phi));
    ASSERT_NEAR(norm, dist, 1e-9);
  }
}

TEST(RelativeOffset, LevelCenterMatchesComponentFormula) {
  // With the center on the horizon the offset reduces to
  // (rj cos de cos da - ri, rj cos de sin da, rj sin de).
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ur(0.1, 80.0), ua(-kPi, kPi), ue(-0.6, 0.6);
  for (int i = 0; i < 1000; ++i) {
    const SphericalCoord pj{ur(rng), ua(rng), ue(rng)}, pi{ur(rng), ua(rng), 0.0};
    const double da = pj.theta - pi.theta, de = pj.phi - pi.phi;
    const auto g = relative_spherical_offset(pj, pi);
    EXPECT_NEAR(g[0], pj.r * std::cos(de) * std::cos(da) - pi.r, 1e-9);
    EXPECT_NEAR(g[1], pj.r * std::cos(de) * std::sin(da), 1e-9);
    EXPECT_NEAR(g[2], pj.r * std::sin(de), 1e-9);
  }
}

TEST(MetaKernel, ReducesToCircularMeanFilter) {
  std::mt19937_64 rng(7);
  for (auto [kh, kw] : {std::pair<std::size_t, std::size_t>{3, 3}, {1, 5}, {3, 1}}) {
    const FeatureMap fm = random_map(rng, 6, 10, 3);
    const SphericalGrid g = random_grid(rng, 6, 10);
    const FeatureMap got = meta_kernel_apply(fm, g, mean_filter_weights(3, kh, kw), kh, kw);
    ConvKernel avg(3, 3, kh, kw);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < kh; ++y)
        for (std::size_t x = 0; x < kw; ++x) avg.at(c, c, y, x) = 1.0 / double(kh * kw);
    const FeatureMap want = circular_conv2d(fm, avg, true);
    for (std::size_t i = 0; i < got.data.size(); ++i) ASSERT_NEAR(got.data[i], want.data[i], 1e-6);
  }
}

TEST(MetaKernel, ZeroInput) {
  std::mt19937_64 rng(8);
  const FeatureMap zero(4, 6, 2);
  const SphericalGrid g = random_grid(rng, 4, 6);
  MetaKernelWeights w = random_weights(rng, 2, 9, 3);
  const FeatureMap with_bias = meta_kernel_apply(zero, g, w, 3, 3);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t o = 0; o < 3; ++o) EXPECT_EQ(with_bias.at(r, c, o), w.mix.bias[o]);
  std::fill(w.mix.bias.begin(), w.mix.bias.end(), 0.0);
  for (double v : meta_kernel_apply(zero, g, w, 3, 3).data) EXPECT_EQ(v, 0.0);
}

TEST(MetaKernel, Locality) {
  std::mt19937_64 rng(9);
  FeatureMap fm(5, 8, 2);
  fm.at(2, 0, 0) = 1.5;
  fm.at(2, 0, 1) = -0.5;
  const SphericalGrid g = random_grid(rng, 5, 8);
  MetaKernelWeights w = random_weights(rng, 2, 9, 2);
  std::fill(w.mix.bias.begin(), w.mix.bias.end(), 0.0);
  const FeatureMap out = meta_kernel_apply(fm, g, w, 3, 3);
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const bool near = r >= 1 && r <= 3 && (c <= 1 || c == 7);
      if (!near) {
        EXPECT_EQ(out.at(r, c, 0), 0.0) << r << "," << c;
        EXPECT_EQ(out.at(r, c, 1), 0.0) << r << "," << c;
      }
    }
  }
  EXPECT_NE(out.at(2, 7, 0), 0.0);  // reached across the seam
}

TEST(MetaKernel, EmptyPixelsContributeNothing) {
  std::mt19937_64 rng(10);
  const FeatureMap fm = random_map(rng, 3, 5, 1);
  SphericalGrid g = random_grid(rng, 3, 5);
  MetaKernelWeights w = random_weights(rng, 1, 9, 1);
  const FeatureMap before = meta_kernel_apply(fm, g, w, 3, 3);
  // Changing a feature under an empty pixel changes nothing.
  g.coords[1 * 5 + 2].r = 0.0;
  FeatureMap changed = fm;
  changed.at(1, 2, 0) += 10.0;
  EXPECT_EQ(meta_kernel_apply(fm, g, w, 3, 3), meta_kernel_apply(changed, g, w, 3, 3));
  EXPECT_NE(before, meta_kernel_apply(fm, g, w, 3, 3));
}

TEST(MetaKernel, ShiftEquivariance) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> uk(-20, 20);
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureMap fm = random_map(rng, 4, 9, 2);
    const SphericalGrid g = random_grid(rng, 4, 9, 0.2);
    const MetaKernelWeights w = random_weights(rng, 2, 9, 3);
    const long s = uk(rng);
    const FeatureMap a =
        meta_kernel_apply(oracle::shift_columns(fm, s), shift_grid(g, s), w, 3, 3);
    const FeatureMap b = oracle::shift_columns(meta_kernel_apply(fm, g, w, 3, 3), s);
    for (std::size_t i = 0; i < a.data.size(); ++i) ASSERT_NEAR(a.data[i], b.data[i], 1e-6);
  }
}

TEST(MetaKernel, DimensionChecks) {
  std::mt19937_64 rng(12);
  const FeatureMap fm = random_map(rng, 3, 4, 2);
  const SphericalGrid g = random_grid(rng, 3, 4);
  EXPECT_THROW(meta_kernel_apply(fm, g, random_weights(rng, 3, 9, 1), 3, 3),
               std::invalid_argument);
  EXPECT_THROW(meta_kernel_apply(fm, g, random_weights(rng, 2, 8, 1), 3, 3),
               std::invalid_argument);
  EXPECT_THROW(meta_kernel_apply(fm, random_grid(rng, 3, 5), random_weights(rng, 2, 9, 1), 3, 3),
               std::invalid_argument);
  EXPECT_THROW(meta_kernel_apply(fm, g, random_weights(rng, 2, 6, 1), 2, 3),
               std::invalid_argument);
}

TEST(SphericalGridTest, PixelCenters) {
  RangeImage img(2, 4);
  img.set(1, 3, 7.0, 0.2);
  const BeamModel m({{0.0, 0.1}, {0.0, -0.1}});
  const SphericalGrid g = spherical_grid(img, m);
  EXPECT_EQ(g.at(1, 3).r, 7.0);
  EXPECT_DOUBLE_EQ(g.at(1, 3).theta, column_center_azimuth(3, 4));
  EXPECT_EQ(g.at(1, 3).phi, -0.1);
  EXPECT_THROW(spherical_grid(RangeImage(3, 4), m), std::invalid_argument);
}
