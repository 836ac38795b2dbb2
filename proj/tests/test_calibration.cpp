#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "rangeview/calibration.hpp"
#include "rangeview/errors.hpp"
#include "rangeview/synthetic.hpp"

using namespace rangeview;

namespace {

double deg(double d) { return d * kPi / 180.0; }

// Mean |error| over beams in units of grid cells, height and pitch combined.
double cell_error(const BeamModel& est, const BeamModel& truth, const HoughConfig& cfg) {
  double e = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    e += std::abs(est[j].height - truth[j].height) / cfg.h_step() +
         std::abs(est[j].pitch - truth[j].pitch) / cfg.phi_step();
  }
  return e / double(truth.size());
}

}  // namespace

TEST(HoughConfigTest, Defaults) {
  const HoughConfig cfg;
  EXPECT_NEAR(cfg.h_step(), 0.0025, 1e-15);
  EXPECT_NEAR(cfg.phi_step(), deg(0.02), 1e-15);
  EXPECT_EQ(cfg.suppression_radius, 3u);
  EXPECT_EQ(cfg.min_planar_distance, 2.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(HoughConfigTest, Degenerate) {
  HoughConfig cfg;
  cfg.h_max = cfg.h_min;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = HoughConfig{};
  cfg.phi_bins = 1;
  EXPECT_THROW(HoughAccumulator{cfg}, std::invalid_argument);
  cfg = HoughConfig{};
  cfg.num_beams = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(AccumulateVotes, SinglePointTracesItsCurve) {
  HoughConfig cfg;
  cfg.h_min = 0.0;
  cfg.h_max = 1.0;
  cfg.h_bins = 2;  // grid {0, 1}
  const PointCloud cloud{{10.0, 0.0, 0.0}};
  const HoughAccumulator acc = accumulate_votes(cloud, cfg);
  EXPECT_EQ(acc.total(), 2u);
  EXPECT_EQ(acc.at(0, cfg.phi_bin_of(0.0)), 1u);
  EXPECT_EQ(acc.at(1, cfg.phi_bin_of(std::atan2(-1.0, 10.0))), 1u);
}

TEST(AccumulateVotes, ConservationAndBound) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-30.0, 30.0), uz(-6.0, 3.0);
  PointCloud cloud;
  for (int i = 0; i < 300; ++i) cloud.push_back({u(rng), u(rng), uz(rng)});
  cloud.push_back({0.5, 0.5, 0.0});  // too close to vote
  HoughConfig cfg;
  cfg.h_bins = 41;
  const HoughAccumulator acc = accumulate_votes(cloud, cfg);

  std::uint64_t expected = 0;
  for (const auto& p : cloud) {
    const double d = std::hypot(p.x, p.y);
    if (d <= cfg.min_planar_distance) continue;
    for (std::size_t i = 0; i < cfg.h_bins; ++i) {
      const double phi = std::atan2(p.z - (cfg.h_min + double(i) * 1.0 / 40.0), d);
      expected += (phi >= cfg.phi_min && phi < cfg.phi_max) ? 1 : 0;
    }
  }
  EXPECT_EQ(acc.total(), expected);
  EXPECT_LE(acc.total(), cloud.size() * cfg.h_bins);
}

TEST(AccumulateVotes, EmptyCloud) {
  EXPECT_THROW(accumulate_votes({}, HoughConfig{}), std::invalid_argument);
}

TEST(AccumulateVotes, MergeMatchesWholeCloud) {
  Rng rng(2);
  const BeamModel model = synthetic_beam_model(8, -0.3, 0.3, 2.0, -20.0, rng);
  ScanConfig sc;
  sc.points_per_beam = 100;
  const PointCloud cloud = synthesize_scan(model, sc, rng).cloud;
  HoughConfig cfg;
  const PointCloud a(cloud.begin(), cloud.begin() + 300), b(cloud.begin() + 300, cloud.end());

  HoughAccumulator ab = accumulate_votes(a, cfg);
  ab.merge(accumulate_votes(b, cfg));
  HoughAccumulator ba = accumulate_votes(b, cfg);
  ba.merge(accumulate_votes(a, cfg));
  const HoughAccumulator whole = accumulate_votes(cloud, cfg);
  EXPECT_EQ(ab.votes(), whole.votes());
  EXPECT_EQ(ba.votes(), whole.votes());

  HoughConfig other = cfg;
  other.h_bins = 11;
  EXPECT_THROW(ab.merge(HoughAccumulator(other)), std::invalid_argument);
}

TEST(AccumulateVotes, FourBeamPeaksNearTruth) {
  Rng rng(4);
  const BeamModel truth = BeamModel({{0.21, deg(2.0)}, {-0.12, deg(-4.0)},
                                     {0.05, deg(-11.0)}, {-0.27, deg(-19.0)}});
  ScanConfig sc;
  sc.points_per_beam = 2000;
  const HoughConfig cfg;
  const HoughAccumulator acc = accumulate_votes(synthesize_scan(truth, sc, rng).cloud, cfg);

  // Brute-force local maxima over the suppression window. A beam's ridge can
  // split its crest over two cells a couple of rows apart, so a 3x3 window
  // would count one beam twice. Equal votes go to the lower cell index.
  const long r = long(cfg.suppression_radius);
  std::vector<std::tuple<std::uint32_t, std::size_t, std::size_t>> maxima;
  for (long i = 0; i < long(cfg.h_bins); ++i) {
    for (long k = 0; k < long(cfg.phi_bins); ++k) {
      const std::uint32_t v = acc.at(std::size_t(i), std::size_t(k));
      if (v == 0) continue;
      bool is_max = true;
      for (long ii = std::max(0L, i - r); ii <= std::min(long(cfg.h_bins) - 1, i + r) && is_max; ++ii) {
        for (long kk = std::max(0L, k - r); kk <= std::min(long(cfg.phi_bins) - 1, k + r); ++kk) {
          const std::uint32_t u = acc.at(std::size_t(ii), std::size_t(kk));
          if (u > v || (u == v && (ii < i || (ii == i && kk < k)))) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) maxima.emplace_back(v, std::size_t(i), std::size_t(k));
    }
  }
  std::sort(maxima.begin(), maxima.end(), std::greater<>());
  ASSERT_GE(maxima.size(), 4u);
  for (const Beam& b : truth) {
    const long ti = long(cfg.h_bin_of(b.height)), tk = long(cfg.phi_bin_of(b.pitch));
    bool hit = false;
    for (std::size_t m = 0; m < 4; ++m) {
      const auto [v, i, k] = maxima[m];
      hit = hit || (std::abs(long(i) - ti) <= 1 && std::abs(long(k) - tk) <= 1);
    }
    EXPECT_TRUE(hit) << "no strong peak near h=" << b.height << " phi=" << b.pitch;
  }
}

TEST(ExtractBeams, SingleCell) {
  const HoughConfig cfg;
  HoughAccumulator acc(cfg);
  const std::size_t i = cfg.h_bin_of(0.1), k = cfg.phi_bin_of(-0.05);
  acc.increment(i, k, 5);
  const BeamModel m = extract_beams(acc, 1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_DOUBLE_EQ(m[0].height, cfg.h_center(i));
  EXPECT_DOUBLE_EQ(m[0].pitch, cfg.phi_center(k));
  EXPECT_NEAR(m[0].height, 0.1, 0.5 * cfg.h_step());
  EXPECT_NEAR(m[0].pitch, -0.05, cfg.phi_step());
}

TEST(ExtractBeams, TooFewPeaks) {
  const HoughConfig cfg;
  HoughAccumulator acc(cfg);
  acc.increment(100, 100);
  acc.increment(300, 1500);
  try {
    extract_beams(acc, 3);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("only 2"), std::string::npos) << e.what();
  }
}

TEST(ExtractBeams, TieGoesToLowerCellIndex) {
  const HoughConfig cfg;
  HoughAccumulator acc(cfg);
  acc.increment(10, 500, 7);
  acc.increment(5, 1500, 7);
  const BeamModel m = extract_beams(acc, 1);
  EXPECT_DOUBLE_EQ(m[0].height, cfg.h_center(5));
  EXPECT_DOUBLE_EQ(m[0].pitch, cfg.phi_center(1500));
}

TEST(ExtractBeams, CentroidRefinement) {
  const HoughConfig cfg;
  HoughAccumulator acc(cfg);
  acc.increment(200, 1000, 3);
  acc.increment(200, 1001, 1);
  acc.increment(201, 1000, 1);
  const BeamModel m = extract_beams(acc, 1);
  EXPECT_NEAR(m[0].height, (4 * cfg.h_center(200) + cfg.h_center(201)) / 5, 1e-15);
  EXPECT_NEAR(m[0].pitch, (4 * cfg.phi_center(1000) + cfg.phi_center(1001)) / 5, 1e-15);
}

TEST(ExtractBeams, SixtyFourBeamsWithinOnePitchCell) {
  Rng rng(64);
  const BeamModel truth = synthetic_beam_model(64, -0.3, 0.3, 3.0, -25.0, rng);
  ScanConfig sc;
  sc.points_per_beam = 1000;
  const HoughConfig cfg;
  const BeamModel est =
      extract_beams(accumulate_votes(synthesize_scan(truth, sc, rng).cloud, cfg), 64);
  ASSERT_EQ(est.size(), 64u);
  for (std::size_t j = 0; j < 64; ++j) {
    if (j > 0) EXPECT_LT(est[j].pitch, est[j - 1].pitch);
    EXPECT_NEAR(est[j].pitch, truth[j].pitch, cfg.phi_step()) << "beam " << j;
  }
}

TEST(AssignBeam, OnConeAndTies) {
  const BeamModel m({{0.1, 0.05}, {-0.1, -0.02}, {0.0, -0.1}});
  for (std::size_t j = 0; j < m.size(); ++j) {
    const Point3 p = beam_spherical_to_cart({25.0, 0.7, m[j].pitch}, m[j].height);
    EXPECT_EQ(assign_beam(p, m), j);
  }
  // Exactly halfway between two pitches.
  const BeamModel tie({{0.0, 0.25}, {0.0, -0.25}});
  EXPECT_EQ(assign_beam({10.0, 0.0, 0.0}, tie), 0u);
  EXPECT_THROW(assign_beam({0.0, 0.0, 1.0}, m), std::domain_error);
}

TEST(AssignBeam, SyntheticLabels) {
  Rng rng(9);
  const BeamModel model =
      synthetic_beam_model(64, -0.3, 0.3, 3.0, -25.0, rng, HeightLayout::descending);
  ScanConfig sc;
  sc.points_per_beam = 500;
  sc.min_range = 2.5;
  sc.max_range = 80.0;
  const LabeledCloud scan = synthesize_scan(model, sc, rng);
  std::size_t correct = 0;
  for (std::size_t n = 0; n < scan.cloud.size(); ++n) {
    correct += assign_beam(scan.cloud[n], model) == scan.beam[n];
  }
  EXPECT_GE(double(correct) / double(scan.cloud.size()), 0.999);
}

TEST(Calibrate, ComposesAccumulateAndExtract) {
  Rng rng(12);
  const BeamModel truth = synthetic_beam_model(16, -0.3, 0.3, 3.0, -25.0, rng);
  ScanConfig sc;
  sc.points_per_beam = 500;
  const PointCloud cloud = synthesize_scan(truth, sc, rng).cloud;
  HoughConfig cfg;
  cfg.num_beams = 16;
  const std::vector<PointCloud> clouds{cloud};
  EXPECT_EQ(calibrate(clouds, cfg), extract_beams(accumulate_votes(cloud, cfg), 16));
  EXPECT_THROW(calibrate(std::vector<PointCloud>{}, cfg), std::invalid_argument);
}

TEST(Calibrate, MoreCloudsDoNotHurt) {
  Rng rng(21);
  const BeamModel truth = synthetic_beam_model(16, -0.3, 0.3, 3.0, -25.0, rng);
  ScanConfig sc;
  sc.points_per_beam = 300;
  sc.range_noise = 0.01;
  std::vector<PointCloud> clouds;
  for (int c = 0; c < 10; ++c) clouds.push_back(synthesize_scan(truth, sc, rng).cloud);
  HoughConfig cfg;
  cfg.num_beams = 16;
  // Single-cloud error averaged over the repeats, so one lucky scan does not
  // decide the comparison.
  double single = 0.0;
  for (std::size_t c = 0; c < clouds.size(); ++c)
    single += cell_error(calibrate(std::span(clouds).subspan(c, 1), cfg), truth, cfg);
  single /= double(clouds.size());
  const double multi = cell_error(calibrate(clouds, cfg), truth, cfg);
  EXPECT_LE(multi, single);
}

TEST(Calibrate, YawInvariant) {
  Rng rng(33);
  const BeamModel truth = synthetic_beam_model(8, -0.3, 0.3, 3.0, -25.0, rng);
  ScanConfig sc;
  sc.points_per_beam = 400;
  const PointCloud cloud = synthesize_scan(truth, sc, rng).cloud;
  // Quarter turn done by coordinate swap keeps planar distance bit-exact.
  PointCloud turned;
  for (const auto& p : cloud) turned.push_back({-p.y, p.x, p.z, p.intensity});
  HoughConfig cfg;
  cfg.num_beams = 8;
  EXPECT_EQ(accumulate_votes(cloud, cfg).votes(), accumulate_votes(turned, cfg).votes());

  const BeamModel a = calibrate(std::vector<PointCloud>{cloud}, cfg);
  const BeamModel b = calibrate(std::vector<PointCloud>{rotate_z(cloud, 1.234)}, cfg);
  for (std::size_t j = 0; j < 8; ++j) {
    EXPECT_NEAR(a[j].height, b[j].height, 0.1 * cfg.h_step());
    EXPECT_NEAR(a[j].pitch, b[j].pitch, 0.1 * cfg.phi_step());
  }
}
