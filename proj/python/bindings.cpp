#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeview/calibration.hpp"
#include "rangeview/diffusion.hpp"
#include "rangeview/errors.hpp"
#include "rangeview/geometry.hpp"
#include "rangeview/io.hpp"
#include "rangeview/losses.hpp"
#include "rangeview/metrics.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/rangeops.hpp"
#include "rangeview/synthetic.hpp"
#include "rangeview/tasks.hpp"

namespace py = pybind11;
using namespace rangeview;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (N, 3) or (N, 4) array -> cloud; a missing intensity column reads as 0.
PointCloud to_cloud(const Array& a) {
  if (a.ndim() != 2 || (a.shape(1) != 3 && a.shape(1) != 4)) {
    throw std::invalid_argument("point cloud must be an (N, 3) or (N, 4) array");
  }
  const auto v = a.unchecked<2>();
  const bool has_i = a.shape(1) == 4;
  PointCloud cloud(std::size_t(a.shape(0)));
  for (py::ssize_t n = 0; n < a.shape(0); ++n) {
    cloud[std::size_t(n)] = {v(n, 0), v(n, 1), v(n, 2), has_i ? v(n, 3) : 0.0};
  }
  return cloud;
}

Array from_cloud(const PointCloud& cloud) {
  Array a({py::ssize_t(cloud.size()), py::ssize_t(4)});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t n = 0; n < cloud.size(); ++n) {
    v(n, 0) = cloud[n].x;
    v(n, 1) = cloud[n].y;
    v(n, 2) = cloud[n].z;
    v(n, 3) = cloud[n].intensity;
  }
  return a;
}

FeatureMap to_feature_map(const Array& a) {
  if (a.ndim() != 3) throw std::invalid_argument("feature map must be an (H, W, C) array");
  FeatureMap fm(std::size_t(a.shape(0)), std::size_t(a.shape(1)), std::size_t(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), fm.data.begin());
  return fm;
}

Array from_feature_map(const FeatureMap& fm) {
  Array a({py::ssize_t(fm.height), py::ssize_t(fm.width), py::ssize_t(fm.channels)});
  std::copy(fm.data.begin(), fm.data.end(), a.mutable_data());
  return a;
}

// Range images cross the boundary as (H, W, 2): range, intensity.
RangeImage to_range_image(const Array& a) {
  if (a.ndim() != 3 || a.shape(2) != 2) {
    throw std::invalid_argument("range image must be an (H, W, 2) array");
  }
  RangeImage img(std::size_t(a.shape(0)), std::size_t(a.shape(1)));
  const double* p = a.data();
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    img.range[i] = p[2 * i];
    img.intensity[i] = p[2 * i + 1];
  }
  return img;
}

Array from_range_image(const RangeImage& img) {
  Array a({py::ssize_t(img.height), py::ssize_t(img.width), py::ssize_t(2)});
  double* p = a.mutable_data();
  for (std::size_t i = 0; i < img.range.size(); ++i) {
    p[2 * i] = img.range[i];
    p[2 * i + 1] = img.intensity[i];
  }
  return a;
}

py::array_t<std::uint8_t> from_grid(const BinaryGrid& g) {
  py::array_t<std::uint8_t> a({py::ssize_t(g.height), py::ssize_t(g.width)});
  std::copy(g.data.begin(), g.data.end(), a.mutable_data());
  return a;
}

BinaryGrid to_grid(const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("mask must be a 2-D array");
  BinaryGrid g(std::size_t(a.shape(0)), std::size_t(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), g.data.begin());
  return g;
}

std::vector<BEVHistogram> histograms(const std::vector<Array>& clouds, const BevBounds& bounds,
                                     std::size_t bins) {
  std::vector<BEVHistogram> out;
  out.reserve(clouds.size());
  for (const auto& c : clouds) out.push_back(bev_histogram(to_cloud(c), bounds, bins));
  return out;
}

BevBounds bounds_from(const std::vector<double>& b) {
  if (b.size() != 4) throw std::invalid_argument("bounds must be [x_min, x_max, y_min, y_max]");
  return {b[0], b[1], b[2], b[3]};
}

Normalizer::Scheme scheme_from(const std::string& s) {
  if (s == "log") return Normalizer::Scheme::log;
  if (s == "linear") return Normalizer::Scheme::linear;
  throw std::invalid_argument("normalizer must be 'log' or 'linear'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Range-image LiDAR toolkit: calibration, projection, metrics, diffusion sampling.";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  // Geometry and beam models.
  py::class_<BeamModel>(m, "BeamModel")
      .def(py::init([](const std::vector<std::pair<double, double>>& beams) {
             std::vector<Beam> b;
             for (const auto& [h, phi] : beams) b.push_back({h, phi});
             return BeamModel(std::move(b));
           }),
           py::arg("beams"), "List of (height_m, pitch_rad), pitch strictly decreasing.")
      .def("__len__", &BeamModel::size)
      .def_property_readonly("heights",
                             [](const BeamModel& m) {
                               std::vector<double> v;
                               for (const Beam& b : m) v.push_back(b.height);
                               return v;
                             })
      .def_property_readonly("pitches",
                             [](const BeamModel& m) {
                               std::vector<double> v;
                               for (const Beam& b : m) v.push_back(b.pitch);
                               return v;
                             })
      .def("every_nth", &BeamModel::every_nth, py::arg("factor"))
      .def("__eq__", [](const BeamModel& a, const BeamModel& b) { return a == b; })
      .def("__repr__", [](const BeamModel& m) {
        return "BeamModel(" + std::to_string(m.size()) + " beams)";
      });

  m.def(
      "cart_to_spherical",
      [](double x, double y, double z) {
        const SphericalCoord s = cart_to_spherical({x, y, z, 0.0});
        return py::make_tuple(s.r, s.theta, s.phi);
      },
      py::arg("x"), py::arg("y"), py::arg("z"), "Returns (r, azimuth, elevation).");
  m.def(
      "rotate_z", [](const Array& cloud, double angle) { return from_cloud(rotate_z(to_cloud(cloud), angle)); },
      py::arg("cloud"), py::arg("angle"));

  // Synthetic data.
  m.def(
      "synthetic_scan",
      [](std::size_t beams, std::size_t points_per_beam, std::uint64_t seed, double h_min,
         double h_max, double pitch_top_deg, double pitch_bottom_deg, double min_range,
         double max_range, double noise, bool descending) {
        Rng rng(seed);
        const BeamModel model =
            synthetic_beam_model(beams, h_min, h_max, pitch_top_deg, pitch_bottom_deg, rng,
                                 descending ? HeightLayout::descending : HeightLayout::uniform_random);
        ScanConfig sc;
        sc.points_per_beam = points_per_beam;
        sc.min_range = min_range;
        sc.max_range = max_range;
        sc.range_noise = noise;
        const LabeledCloud scan = synthesize_scan(model, sc, rng);
        py::array_t<std::int64_t> labels(py::ssize_t(scan.beam.size()));
        std::copy(scan.beam.begin(), scan.beam.end(), labels.mutable_data());
        return py::make_tuple(from_cloud(scan.cloud), labels, model);
      },
      py::arg("beams") = 64, py::arg("points_per_beam") = 2000, py::arg("seed") = 0,
      py::arg("h_min") = -0.3, py::arg("h_max") = 0.3, py::arg("pitch_top_deg") = 3.0,
      py::arg("pitch_bottom_deg") = -25.0, py::arg("min_range") = 5.0,
      py::arg("max_range") = 60.0, py::arg("noise") = 0.0, py::arg("descending") = true,
      "Returns (points (N, 4), beam labels (N,), true BeamModel).");

  // Calibration.
  m.def(
      "calibrate",
      [](const std::vector<Array>& clouds, std::size_t num_beams, double h_min, double h_max,
         std::size_t h_bins, double phi_min_deg, double phi_max_deg, std::size_t phi_bins) {
        HoughConfig cfg;
        cfg.num_beams = num_beams;
        cfg.h_min = h_min;
        cfg.h_max = h_max;
        cfg.h_bins = h_bins;
        cfg.phi_min = phi_min_deg * kPi / 180.0;
        cfg.phi_max = phi_max_deg * kPi / 180.0;
        cfg.phi_bins = phi_bins;
        std::vector<PointCloud> pcs;
        for (const auto& c : clouds) pcs.push_back(to_cloud(c));
        py::gil_scoped_release release;
        return calibrate(pcs, cfg);
      },
      py::arg("clouds"), py::arg("num_beams") = 64, py::arg("h_min") = -0.5,
      py::arg("h_max") = 0.5, py::arg("h_bins") = 401, py::arg("phi_min_deg") = -30.0,
      py::arg("phi_max_deg") = 10.0, py::arg("phi_bins") = 2000);
  m.def(
      "assign_beam",
      [](const Array& cloud, const BeamModel& model) {
        const PointCloud pc = to_cloud(cloud);
        py::array_t<std::int64_t> out(py::ssize_t(pc.size()));
        auto* p = out.mutable_data();
        for (std::size_t n = 0; n < pc.size(); ++n) p[n] = std::int64_t(assign_beam(pc[n], model));
        return out;
      },
      py::arg("cloud"), py::arg("model"));

  // Projection.
  m.def(
      "project",
      [](const Array& cloud, const BeamModel& model, std::size_t width, bool shared_origin) {
        const PointCloud pc = to_cloud(cloud);
        return from_range_image(shared_origin ? project_shared_origin(pc, model, width)
                                              : project(pc, model, width));
      },
      py::arg("cloud"), py::arg("model"), py::arg("width") = 1024,
      py::arg("shared_origin") = false, "Returns an (H, W, 2) array of range, intensity.");
  m.def(
      "unproject",
      [](const Array& image, const BeamModel& model) {
        return from_cloud(unproject(to_range_image(image), model));
      },
      py::arg("image"), py::arg("model"));
  m.def(
      "circshift_columns",
      [](const Array& image, std::ptrdiff_t k) {
        return from_range_image(circshift_columns(to_range_image(image), k));
      },
      py::arg("image"), py::arg("k"));
  m.def(
      "normalize",
      [](const Array& image, const std::string& scheme, double max_range) {
        return from_feature_map(normalize(to_range_image(image), {scheme_from(scheme), max_range}));
      },
      py::arg("image"), py::arg("scheme") = "log", py::arg("max_range") = 80.0);
  m.def(
      "denormalize",
      [](const Array& fm, const std::string& scheme, double max_range) {
        return from_range_image(denormalize(to_feature_map(fm), {scheme_from(scheme), max_range}));
      },
      py::arg("feature_map"), py::arg("scheme") = "log", py::arg("max_range") = 80.0);

  // Range-image operators.
  m.def(
      "circular_conv2d",
      [](const Array& fm, const Array& kernel, bool vertical_zero_pad) {
        if (kernel.ndim() != 4) {
          throw std::invalid_argument("kernel must be (out, in, kh, kw)");
        }
        ConvKernel k(std::size_t(kernel.shape(0)), std::size_t(kernel.shape(1)),
                     std::size_t(kernel.shape(2)), std::size_t(kernel.shape(3)));
        std::copy(kernel.data(), kernel.data() + kernel.size(), k.weights.begin());
        return from_feature_map(circular_conv2d(to_feature_map(fm), k, vertical_zero_pad));
      },
      py::arg("feature_map"), py::arg("kernel"), py::arg("vertical_zero_pad") = true);
  m.def(
      "relative_spherical_offset",
      [](std::array<double, 3> pj, std::array<double, 3> pi) {
        return relative_spherical_offset({pj[0], pj[1], pj[2]}, {pi[0], pi[1], pi[2]});
      },
      py::arg("pj"), py::arg("pi"), "Points given as (r, azimuth, elevation).");

  // Tasks.
  m.def(
      "subsample_beams",
      [](const Array& image, std::size_t factor) {
        return from_range_image(subsample_beams(to_range_image(image), factor));
      },
      py::arg("image"), py::arg("factor") = 4);
  m.def(
      "mask_sector",
      [](const Array& image, double center_deg, double width_deg) {
        const MaskedImage mi = mask_sector(to_range_image(image), center_deg, width_deg);
        return py::make_tuple(from_range_image(mi.image), from_grid(mi.mask.mask));
      },
      py::arg("image"), py::arg("center_deg") = 0.0, py::arg("width_deg") = 22.5,
      "Returns (masked image, mask) with 1 marking blanked pixels.");
  m.def(
      "reshape_condition",
      [](const Array& fm, std::size_t f) { return from_feature_map(reshape_condition(to_feature_map(fm), f)); },
      py::arg("feature_map"), py::arg("factor"));
  m.def(
      "unreshape_condition",
      [](const Array& fm, std::size_t f) {
        return from_feature_map(unreshape_condition(to_feature_map(fm), f));
      },
      py::arg("feature_map"), py::arg("factor"));
  m.def(
      "downsample_mask",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& mask,
         std::size_t f) { return from_grid(downsample_mask(to_grid(mask), f)); },
      py::arg("mask"), py::arg("factor"));

  // Losses.
  m.def("l1_reconstruction",
        [](const std::vector<double>& x, const std::vector<double>& xh) {
          return l1_reconstruction(x, xh);
        },
        py::arg("x"), py::arg("x_hat"));
  m.def("kl_to_standard_normal",
        [](const std::vector<double>& mu, const std::vector<double>& log_var) {
          return kl_to_standard_normal({mu, log_var});
        },
        py::arg("mu"), py::arg("log_var"));
  m.def("hinge_d_loss",
        [](const std::vector<double>& real, const std::vector<double>& fake) {
          return hinge_d_loss(real, fake);
        },
        py::arg("real_scores"), py::arg("fake_scores"));
  m.def("hinge_g_loss", [](const std::vector<double>& fake) { return hinge_g_loss(fake); },
        py::arg("fake_scores"));

  // Metrics.
  m.def(
      "bev_histogram",
      [](const Array& cloud, const std::vector<double>& bounds, std::size_t bins) {
        const BEVHistogram h = bev_histogram(to_cloud(cloud), bounds_from(bounds), bins);
        Array a({py::ssize_t(bins), py::ssize_t(bins)});
        std::copy(h.counts.begin(), h.counts.end(), a.mutable_data());
        return a;
      },
      py::arg("cloud"), py::arg("bounds") = std::vector<double>{-50, 50, -50, 50},
      py::arg("bins") = kDefaultBevBins);
  m.def(
      "jsd",
      [](const std::vector<Array>& a, const std::vector<Array>& b, const std::vector<double>& bounds,
         std::size_t bins) {
        const BevBounds bb = bounds_from(bounds);
        return jsd(histograms(a, bb, bins), histograms(b, bb, bins));
      },
      py::arg("set_a"), py::arg("set_b"),
      py::arg("bounds") = std::vector<double>{-50, 50, -50, 50}, py::arg("bins") = kDefaultBevBins);
  m.def(
      "mmd",
      [](const std::vector<Array>& a, const std::vector<Array>& b, std::optional<double> bandwidth,
         const std::vector<double>& bounds, std::size_t bins) {
        const BevBounds bb = bounds_from(bounds);
        return mmd(histograms(a, bb, bins), histograms(b, bb, bins), bandwidth);
      },
      py::arg("set_a"), py::arg("set_b"), py::arg("bandwidth") = py::none(),
      py::arg("bounds") = std::vector<double>{-50, 50, -50, 50}, py::arg("bins") = kDefaultBevBins);
  m.def(
      "chamfer",
      [](const Array& p, const Array& q) {
        const PointCloud a = to_cloud(p), b = to_cloud(q);
        py::gil_scoped_release release;
        return chamfer(a, b);
      },
      py::arg("p"), py::arg("q"));
  m.def(
      "range_mae",
      [](const Array& a, const Array& b, bool both_valid) {
        return range_mae(to_range_image(a), to_range_image(b),
                         both_valid ? MaePolicy::both_valid : MaePolicy::all);
      },
      py::arg("a"), py::arg("b"), py::arg("both_valid") = false);
  m.def(
      "frechet_distance",
      [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        const FrechetResult r = frechet_distance(gaussian_stats(a), gaussian_stats(b));
        return py::make_tuple(r.distance, r.jitter_applied);
      },
      py::arg("features_a"), py::arg("features_b"),
      "Frechet distance between Gaussian fits of two (n, D) feature matrices. Returns "
      "(distance, jitter_applied).");

  // Diffusion.
  m.def(
      "linear_schedule_alpha_bars",
      [](std::size_t steps, double beta_start, double beta_end) {
        return linear_schedule(steps, beta_start, beta_end).alpha_bars();
      },
      py::arg("steps") = 1000, py::arg("beta_start") = 1e-4, py::arg("beta_end") = 2e-2);
  m.def(
      "ddim_timesteps", &ddim_timesteps, py::arg("steps"), py::arg("n_steps"));
  m.def(
      "ddim_sample_gaussian",
      [](const std::vector<double>& mean, const std::vector<double>& var, std::size_t n_samples,
         std::size_t n_steps, std::size_t steps, std::uint64_t seed) {
        const NoiseSchedule sched = linear_schedule(steps);
        const std::size_t d = mean.size();
        const Denoiser den = analytic_gaussian_denoiser(LatentTensor({d}, mean), var, sched);
        Rng rng(seed);
        Array out({py::ssize_t(n_samples), py::ssize_t(d)});
        double* p = out.mutable_data();
        py::gil_scoped_release release;
        for (std::size_t s = 0; s < n_samples; ++s) {
          const LatentTensor x = ddim_sample(den, sched, n_steps, {d}, rng);
          std::copy(x.data.begin(), x.data.end(), p + s * d);
        }
        return out;
      },
      py::arg("mean"), py::arg("var"), py::arg("n_samples") = 1000, py::arg("n_steps") = 50,
      py::arg("steps") = 1000, py::arg("seed") = 0,
      "Deterministic DDIM samples of N(mean, diag(var)) using the exact Gaussian denoiser.");

  // File formats.
  m.def("read_kitti_bin", [](const std::filesystem::path& p, std::size_t stride) {
        return from_cloud(read_kitti_bin(p, stride));
      },
        py::arg("path"), py::arg("stride") = 4);
  m.def("write_kitti_bin",
        [](const std::filesystem::path& p, const Array& cloud) { write_kitti_bin(p, to_cloud(cloud)); },
        py::arg("path"), py::arg("cloud"));
  m.def("read_range_image",
        [](const std::filesystem::path& p) { return from_range_image(read_range_image(p)); },
        py::arg("path"));
  m.def("write_range_image",
        [](const std::filesystem::path& p, const Array& img) {
          write_range_image(p, to_range_image(img));
        },
        py::arg("path"), py::arg("image"));
  m.def("read_beam_model", py::overload_cast<const std::filesystem::path&>(&read_beam_model),
        py::arg("path"));
  m.def("write_beam_model",
        py::overload_cast<const std::filesystem::path&, const BeamModel&>(&write_beam_model),
        py::arg("path"), py::arg("model"));
}
