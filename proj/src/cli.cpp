#include "rangeview/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeview/calibration.hpp"
#include "rangeview/diffusion.hpp"
#include "rangeview/errors.hpp"
#include "rangeview/io.hpp"
#include "rangeview/metrics.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/synthetic.hpp"
#include "rangeview/tasks.hpp"

namespace fs = std::filesystem;

namespace rangeview {

std::string format_fixed(double value, int digits) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  if (!std::isfinite(value)) {
    s << value;
    return s.str();
  }
  int decimals = digits - 1;
  if (value != 0.0) {
    decimals = digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(value))));
  }
  s << std::fixed << std::setprecision(std::max(0, decimals)) << value;
  return s.str();
}

namespace {

struct NormalizerArgs {
  bool enabled = false;
  std::string scheme = "log";
  double max_range = 80.0;

  void attach(CLI::App* app) {
    app->add_flag("--normalized", enabled, "Images hold values normalized to [-1, 1]");
    app->add_option("--normalizer", scheme, "Range normalization")
        ->check(CLI::IsMember({"log", "linear"}));
    app->add_option("--max-range", max_range, "Range clamp in meters")
        ->check(CLI::PositiveNumber);
  }
  Normalizer get() const {
    return {scheme == "linear" ? Normalizer::Scheme::linear : Normalizer::Scheme::log,
            max_range};
  }
};

std::vector<fs::path> list_files(const fs::path& dir, const std::string& ext) {
  if (!fs::is_directory(dir)) throw DataError(dir.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError(dir.string() + ": no " + ext + " files");
  return files;
}

// Text output sink with the classic locale.
struct Printer {
  std::ostream& out;
  explicit Printer(std::ostream& o) : out(o) {}
  void kv(const std::string& key, double v) { out << key << '=' << format_fixed(v) << '\n'; }
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Range-view LiDAR toolkit: calibration, projection, tasks and metrics",
               "rangeview"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic beam-consistent scan");
  std::uint64_t synth_seed = 0;
  std::size_t synth_beams = 64, synth_ppb = 2000, synth_pixel_width = 0;
  double synth_hmin = -0.3, synth_hmax = 0.3, synth_top = 3.0, synth_bottom = -25.0;
  double synth_rmin = 5.0, synth_rmax = 60.0, synth_noise = 0.0;
  std::string synth_layout = "descending", synth_out, synth_model_out;
  synth->add_option("--seed", synth_seed);
  synth->add_option("--beams", synth_beams)->check(CLI::PositiveNumber);
  synth->add_option("--points-per-beam", synth_ppb);
  synth->add_option("--h-min", synth_hmin);
  synth->add_option("--h-max", synth_hmax);
  synth->add_option("--pitch-top-deg", synth_top);
  synth->add_option("--pitch-bottom-deg", synth_bottom);
  synth->add_option("--min-range", synth_rmin);
  synth->add_option("--max-range", synth_rmax);
  synth->add_option("--noise", synth_noise, "Range noise std dev (m)");
  synth->add_option("--layout", synth_layout)
      ->check(CLI::IsMember({"random", "descending"}));
  synth->add_option("--pixel-width", synth_pixel_width,
                    "Place points at distinct pixel-center azimuths of this width");
  synth->add_option("--out", synth_out, "Output point file")->required();
  synth->add_option("--model-out", synth_model_out, "Output true beam model");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Estimate per-beam height and pitch");
  HoughConfig hough;
  double phi_min_deg = -30.0, phi_max_deg = 10.0;
  std::size_t cal_stride = 4;
  std::vector<std::string> cal_inputs;
  std::string cal_out;
  cal->add_option("--beams", hough.num_beams)->check(CLI::PositiveNumber);
  cal->add_option("--h-min", hough.h_min);
  cal->add_option("--h-max", hough.h_max);
  cal->add_option("--h-bins", hough.h_bins);
  cal->add_option("--phi-min-deg", phi_min_deg);
  cal->add_option("--phi-max-deg", phi_max_deg);
  cal->add_option("--phi-bins", hough.phi_bins);
  cal->add_option("--stride", cal_stride, "Floats per point record");
  cal->add_option("--out", cal_out, "Beam model output (stdout when omitted)");
  cal->add_option("inputs", cal_inputs, "Point files")->required();

  // project
  auto* proj = app.add_subcommand("project", "Point file to range image");
  std::string proj_model, proj_in, proj_out;
  std::size_t proj_width = 1024, proj_stride = 4;
  bool proj_shared = false;
  NormalizerArgs proj_norm;
  proj->add_option("--model", proj_model)->required();
  proj->add_option("--width", proj_width)->check(CLI::PositiveNumber);
  proj->add_option("--stride", proj_stride);
  proj->add_flag("--shared-origin", proj_shared, "Use the shared-origin baseline projection");
  proj_norm.attach(proj);
  proj->add_option("input", proj_in)->required();
  proj->add_option("output", proj_out)->required();

  // unproject
  auto* unproj = app.add_subcommand("unproject", "Range image to point file");
  std::string unproj_model, unproj_in, unproj_out;
  NormalizerArgs unproj_norm;
  unproj->add_option("--model", unproj_model)->required();
  unproj_norm.attach(unproj);
  unproj->add_option("input", unproj_in)->required();
  unproj->add_option("output", unproj_out)->required();

  // subsample
  auto* sub = app.add_subcommand("subsample", "Keep every factor-th beam row");
  std::size_t sub_factor = 4;
  std::string sub_in, sub_out, sub_model, sub_model_out;
  sub->add_option("--factor", sub_factor)->check(CLI::PositiveNumber);
  sub->add_option("--model", sub_model, "Beam model to subsample alongside");
  sub->add_option("--model-out", sub_model_out)->needs("--model");
  sub->add_option("input", sub_in)->required();
  sub->add_option("output", sub_out)->required();

  // mask
  auto* msk = app.add_subcommand("mask", "Blank an azimuth sector");
  double mask_center = 0.0, mask_width = 22.5;
  std::string mask_in, mask_out, mask_file;
  msk->add_option("--center-deg", mask_center);
  msk->add_option("--width-deg", mask_width);
  msk->add_option("--mask-out", mask_file, "Write the binary mask");
  msk->add_option("input", mask_in)->required();
  msk->add_option("output", mask_out)->required();

  // bev-metrics
  auto* bev = app.add_subcommand("bev-metrics", "JSD and MMD between two sets of point files");
  std::string bev_a, bev_b;
  std::vector<double> bev_bounds{-50.0, 50.0, -50.0, 50.0};
  std::size_t bev_bins = kDefaultBevBins, bev_stride = 4;
  double bev_bandwidth = 0.0;
  bev->add_option("--set-a", bev_a)->required();
  bev->add_option("--set-b", bev_b)->required();
  bev->add_option("--bounds", bev_bounds, "x_min x_max y_min y_max")->expected(4);
  bev->add_option("--bins", bev_bins)->check(CLI::PositiveNumber);
  bev->add_option("--bandwidth", bev_bandwidth, "Kernel bandwidth (median heuristic if omitted)");
  bev->add_option("--stride", bev_stride);

  // chamfer
  auto* cham = app.add_subcommand("chamfer", "Symmetric Chamfer distance of two point files");
  std::string cham_a, cham_b;
  std::size_t cham_stride = 4;
  cham->add_option("--stride", cham_stride);
  cham->add_option("a", cham_a)->required();
  cham->add_option("b", cham_b)->required();

  // mae
  auto* mae = app.add_subcommand("mae", "Range mean absolute error of two range images");
  std::string mae_a, mae_b, mae_policy = "all";
  mae->add_option("--policy", mae_policy)->check(CLI::IsMember({"all", "both-valid"}));
  mae->add_option("a", mae_a)->required();
  mae->add_option("b", mae_b)->required();

  // frechet
  auto* fre = app.add_subcommand("frechet", "Frechet distance of two feature matrices");
  std::string fre_a, fre_b;
  fre->add_option("a", fre_a)->required();
  fre->add_option("b", fre_b)->required();

  // ddim-demo
  auto* ddim = app.add_subcommand("ddim-demo", "DDIM sampling of a Gaussian target");
  std::size_t ddim_t = 1000, ddim_steps = 50, ddim_dim = 4, ddim_n = 10000;
  std::vector<double> ddim_mean{0.0}, ddim_var{1.0};
  std::uint64_t ddim_seed = 0;
  ddim->add_option("--t", ddim_t)->check(CLI::PositiveNumber);
  ddim->add_option("--steps", ddim_steps)->check(CLI::PositiveNumber);
  ddim->add_option("--dim", ddim_dim)->check(CLI::PositiveNumber);
  ddim->add_option("--target-mean", ddim_mean, "One value or one per dimension");
  ddim->add_option("--target-var", ddim_var, "One value or one per dimension");
  ddim->add_option("--n-samples", ddim_n)->check(CLI::PositiveNumber);
  ddim->add_option("--seed", ddim_seed);

  if (argc > 1 && argv[1][0] != '-') {
    const auto subs = app.get_subcommands([](CLI::App*) { return true; });
    const bool known = std::any_of(subs.begin(), subs.end(),
                                   [&](CLI::App* s) { return s->get_name() == argv[1]; });
    if (!known) {
      err << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
      return 1;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    // Subcommand-specific usage when the subcommand itself was recognized.
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return 1;
  }

  Printer print(out);
  try {
    if (*synth) {
      Rng rng(synth_seed);
      const BeamModel model = synthetic_beam_model(
          synth_beams, synth_hmin, synth_hmax, synth_top, synth_bottom, rng,
          synth_layout == "random" ? HeightLayout::uniform_random : HeightLayout::descending);
      ScanConfig cfg;
      cfg.points_per_beam = synth_ppb;
      cfg.min_range = synth_rmin;
      cfg.max_range = synth_rmax;
      cfg.range_noise = synth_noise;
      cfg.pixel_center_width = synth_pixel_width;
      const LabeledCloud scan = synthesize_scan(model, cfg, rng);
      write_kitti_bin(synth_out, scan.cloud);
      if (!synth_model_out.empty()) write_beam_model(fs::path(synth_model_out), model);
      out << "points=" << scan.cloud.size() << '\n';
    } else if (*cal) {
      hough.phi_min = phi_min_deg * kPi / 180.0;
      hough.phi_max = phi_max_deg * kPi / 180.0;
      std::vector<PointCloud> clouds;
      for (const auto& f : cal_inputs) clouds.push_back(read_kitti_bin(f, cal_stride));
      const BeamModel model = calibrate(clouds, hough);
      if (cal_out.empty()) {
        write_beam_model(out, model);
      } else {
        write_beam_model(fs::path(cal_out), model);
      }
    } else if (*proj) {
      const BeamModel model = read_beam_model(fs::path(proj_model));
      const PointCloud cloud = read_kitti_bin(proj_in, proj_stride);
      const RangeImage img = proj_shared ? project_shared_origin(cloud, model, proj_width)
                                         : project(cloud, model, proj_width);
      if (proj_norm.enabled) {
        write_feature_map(proj_out, normalize(img, proj_norm.get()));
      } else {
        write_range_image(proj_out, img);
      }
      out << "valid_pixels=" << img.valid_count() << '\n';
    } else if (*unproj) {
      const BeamModel model = read_beam_model(fs::path(unproj_model));
      const RangeImage img = unproj_norm.enabled
                                 ? denormalize(read_feature_map(unproj_in), unproj_norm.get())
                                 : read_range_image(unproj_in);
      const PointCloud cloud = unproject(img, model);
      write_kitti_bin(unproj_out, cloud);
      out << "points=" << cloud.size() << '\n';
    } else if (*sub) {
      write_range_image(sub_out, subsample_beams(read_range_image(sub_in), sub_factor));
      if (!sub_model.empty()) {
        const BeamModel reduced =
            subsample_beam_model(read_beam_model(fs::path(sub_model)), sub_factor);
        if (sub_model_out.empty()) {
          write_beam_model(out, reduced);
        } else {
          write_beam_model(fs::path(sub_model_out), reduced);
        }
      }
    } else if (*msk) {
      const MaskedImage m = mask_sector(read_range_image(mask_in), mask_center, mask_width);
      write_range_image(mask_out, m.image);
      if (!mask_file.empty()) write_mask(mask_file, m.mask.mask);
      out << "masked_columns=" << m.mask.mask.count() / std::max<std::size_t>(1, m.mask.mask.height)
          << '\n';
    } else if (*bev) {
      const BevBounds bounds{bev_bounds[0], bev_bounds[1], bev_bounds[2], bev_bounds[3]};
      auto load = [&](const std::string& dir) {
        std::vector<BEVHistogram> hists;
        for (const auto& f : list_files(dir, ".bin")) {
          hists.push_back(bev_histogram(read_kitti_bin(f, bev_stride), bounds, bev_bins));
        }
        return hists;
      };
      const auto a = load(bev_a);
      const auto b = load(bev_b);
      const std::optional<double> bw =
          bev->count("--bandwidth") ? std::optional<double>(bev_bandwidth) : std::nullopt;
      out << "jsd=" << format_fixed(jsd(a, b)) << " mmd=" << format_fixed(mmd(a, b, bw)) << '\n';
    } else if (*cham) {
      print.kv("chamfer", chamfer(read_kitti_bin(cham_a, cham_stride),
                                  read_kitti_bin(cham_b, cham_stride)));
    } else if (*mae) {
      print.kv("mae", range_mae(read_range_image(mae_a), read_range_image(mae_b),
                                mae_policy == "all" ? MaePolicy::all : MaePolicy::both_valid));
    } else if (*fre) {
      const FrechetResult r = frechet_distance(gaussian_stats(read_features(fre_a)),
                                               gaussian_stats(read_features(fre_b)));
      if (r.jitter_applied) err << "warning: covariance jitter applied\n";
      print.kv("frd", r.distance);
    } else if (*ddim) {
      auto broadcast = [&](const std::vector<double>& v, const char* name) {
        if (v.size() == 1) return std::vector<double>(ddim_dim, v.front());
        if (v.size() != ddim_dim) {
          throw std::invalid_argument(std::string(name) + " needs 1 or " +
                                      std::to_string(ddim_dim) + " values");
        }
        return v;
      };
      const std::vector<double> mu = broadcast(ddim_mean, "--target-mean");
      const std::vector<double> var = broadcast(ddim_var, "--target-var");
      const NoiseSchedule sched = linear_schedule(ddim_t);
      const Denoiser den = analytic_gaussian_denoiser(LatentTensor({ddim_dim}, mu), var, sched);
      Rng rng(ddim_seed);
      std::vector<double> sum(ddim_dim, 0.0), sum_sq(ddim_dim, 0.0);
      for (std::size_t n = 0; n < ddim_n; ++n) {
        const LatentTensor x = ddim_sample(den, sched, ddim_steps, {ddim_dim}, rng);
        for (std::size_t d = 0; d < ddim_dim; ++d) {
          sum[d] += x.data[d];
          sum_sq[d] += x.data[d] * x.data[d];
        }
      }
      print.kv("alpha_bar_T", sched.alpha_bar(ddim_t));
      const double n = double(ddim_n);
      for (std::size_t d = 0; d < ddim_dim; ++d) {
        const double mean = sum[d] / n;
        const double variance = ddim_n > 1 ? (sum_sq[d] - n * mean * mean) / (n - 1.0) : 0.0;
        out << "dim=" << d << " mean=" << format_fixed(mean) << " var=" << format_fixed(variance)
            << '\n';
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace rangeview
