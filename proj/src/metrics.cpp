#include "rangeview/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "kdtree.hpp"
#include "rangeview/errors.hpp"

namespace rangeview {

double BEVHistogram::total() const {
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum;
}

std::vector<double> BEVHistogram::normalized() const {
  std::vector<double> out(counts.size(), 0.0);
  const double sum = total();
  if (sum > 0.0) {
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / sum;
  }
  return out;
}

namespace {

// Cell of v on [lo, hi] split into n cells, or n when outside.
std::size_t cell_of(double v, double lo, double hi, std::size_t n) {
  if (!(v >= lo) || !(v <= hi)) return n;
  if (v == hi) return n - 1;
  const auto c = static_cast<std::size_t>((v - lo) / (hi - lo) * double(n));
  return std::min(c, n - 1);
}

}  // namespace

BEVHistogram bev_histogram(const PointCloud& cloud, const BevBounds& bounds, std::size_t bins) {
  if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max)) {
    throw std::invalid_argument("bev_histogram: bounds must satisfy min < max");
  }
  if (bins < 1) throw std::invalid_argument("bev_histogram: bins must be >= 1");
  BEVHistogram hist{bins, bounds, std::vector<double>(bins * bins, 0.0)};
  for (const auto& p : cloud) {
    const std::size_t ix = cell_of(p.x, bounds.x_min, bounds.x_max, bins);
    const std::size_t iy = cell_of(p.y, bounds.y_min, bounds.y_max, bins);
    if (ix < bins && iy < bins) hist.counts[ix * bins + iy] += 1.0;
  }
  return hist;
}

namespace {

void check_sets(std::span<const BEVHistogram> a, std::span<const BEVHistogram> b,
                const char* where) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument(std::string(where) + ": both sets must be non-empty");
  }
  const BEVHistogram& ref = a.front();
  auto check = [&](const BEVHistogram& h) {
    if (h.bins != ref.bins || !(h.bounds == ref.bounds) || h.counts.size() != ref.counts.size()) {
      throw std::invalid_argument(std::string(where) + ": histograms use different grids");
    }
  };
  for (const auto& h : a) check(h);
  for (const auto& h : b) check(h);
}

std::vector<double> aggregate(std::span<const BEVHistogram> set) {
  std::vector<double> sum(set.front().counts.size(), 0.0);
  for (const auto& h : set) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += h.counts[i];
  }
  double total = 0.0;
  for (double v : sum) total += v;
  if (!(total > 0.0)) throw DataError("jsd: aggregate histogram is empty");
  for (double& v : sum) v /= total;
  return sum;
}

// Rows are the normalized histograms of a followed by those of b.
Eigen::MatrixXd stack_normalized(std::span<const BEVHistogram> a,
                                 std::span<const BEVHistogram> b) {
  const auto dim = static_cast<Eigen::Index>(a.front().counts.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(a.size() + b.size()), dim);
  Eigen::Index row = 0;
  for (auto set : {a, b}) {
    for (const auto& h : set) {
      const std::vector<double> n = h.normalized();
      x.row(row++) = Eigen::Map<const Eigen::RowVectorXd>(n.data(), dim);
    }
  }
  return x;
}

Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd gram = x * x.transpose();
  const Eigen::VectorXd norms = gram.diagonal();
  Eigen::MatrixXd d2 = (-2.0 * gram).colwise() + norms;
  d2.rowwise() += norms.transpose();
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();
  return d2;
}

double median_of_upper_triangle(const Eigen::MatrixXd& d2) {
  std::vector<double> dist;
  for (Eigen::Index i = 0; i < d2.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < d2.cols(); ++j) dist.push_back(std::sqrt(d2(i, j)));
  }
  if (dist.empty()) return 0.0;
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + std::ptrdiff_t(mid), dist.end());
  const double upper = dist[mid];
  if (dist.size() % 2 == 1) return upper;
  const double lower = *std::max_element(dist.begin(), dist.begin() + std::ptrdiff_t(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

double jsd(std::span<const BEVHistogram> set_a, std::span<const BEVHistogram> set_b) {
  check_sets(set_a, set_b, "jsd");
  const std::vector<double> p = aggregate(set_a);
  const std::vector<double> q = aggregate(set_b);
  double kl_pm = 0.0, kl_qm = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) kl_pm += p[i] * std::log(p[i] / m);
    if (q[i] > 0.0) kl_qm += q[i] * std::log(q[i] / m);
  }
  return 0.5 * kl_pm + 0.5 * kl_qm;
}

double median_pairwise_distance(std::span<const BEVHistogram> set_a,
                                std::span<const BEVHistogram> set_b) {
  check_sets(set_a, set_b, "median_pairwise_distance");
  return median_of_upper_triangle(squared_distances(stack_normalized(set_a, set_b)));
}

double mmd(std::span<const BEVHistogram> set_a, std::span<const BEVHistogram> set_b,
           std::optional<double> bandwidth) {
  check_sets(set_a, set_b, "mmd");
  const Eigen::MatrixXd d2 = squared_distances(stack_normalized(set_a, set_b));
  double gamma = bandwidth ? *bandwidth : median_of_upper_triangle(d2);
  if (bandwidth && !(gamma > 0.0)) throw std::invalid_argument("mmd: bandwidth must be > 0");
  if (!(gamma > 0.0)) gamma = 1.0;

  const Eigen::MatrixXd k = (-d2 / (2.0 * gamma * gamma)).array().exp().matrix();
  const auto na = static_cast<Eigen::Index>(set_a.size());
  const auto nb = static_cast<Eigen::Index>(set_b.size());
  const double kaa = k.topLeftCorner(na, na).mean();
  const double kbb = k.bottomRightCorner(nb, nb).mean();
  const double kab = k.topRightCorner(na, nb).mean();
  return std::max(0.0, kaa + kbb - 2.0 * kab);
}

double chamfer(const PointCloud& p, const PointCloud& q) {
  if (p.empty() || q.empty()) throw std::invalid_argument("chamfer: point clouds must be non-empty");
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    const detail::KdTree3 tree(to);
    double sum = 0.0;
    for (const auto& pt : from) sum += tree.nearest_squared({pt.x, pt.y, pt.z});
    return sum / double(from.size());
  };
  return directed(p, q) + directed(q, p);
}

double range_mae(const RangeImage& a, const RangeImage& b, MaePolicy policy) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("range_mae: image dimensions differ");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.range.size(); ++i) {
    if (policy == MaePolicy::both_valid && !(a.range[i] > 0.0 && b.range[i] > 0.0)) continue;
    sum += std::abs(a.range[i] - b.range[i]);
    ++count;
  }
  if (count == 0) throw DataError("range_mae: no pixels selected");
  return sum / double(count);
}

GaussianStats gaussian_stats(const Eigen::MatrixXd& features) {
  if (features.rows() < 2) {
    throw std::invalid_argument("gaussian_stats: at least two samples are required");
  }
  GaussianStats g;
  g.n = static_cast<std::size_t>(features.rows());
  g.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - g.mean.transpose();
  g.cov = centered.transpose() * centered / double(features.rows() - 1);
  g.cov = 0.5 * (g.cov + g.cov.transpose()).eval();
  return g;
}

namespace {

void check_stats(const GaussianStats& g, Eigen::Index dim) {
  if (g.mean.size() != dim || g.cov.rows() != dim || g.cov.cols() != dim) {
    throw std::invalid_argument("frechet_distance: dimension mismatch");
  }
  if (!g.mean.allFinite() || !g.cov.allFinite()) {
    throw DataError("frechet_distance: non-finite statistics");
  }
}

// Tr((s1 s2)^(1/2)) through the symmetric form s1^(1/2) s2 s1^(1/2).
std::optional<double> trace_sqrt_product(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig1(s1);
  if (eig1.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd root = eig1.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd s1_half =
      eig1.eigenvectors() * root.asDiagonal() * eig1.eigenvectors().transpose();
  Eigen::MatrixXd m = s1_half * s2 * s1_half;
  m = 0.5 * (m + m.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig2(m, Eigen::EigenvaluesOnly);
  if (eig2.info() != Eigen::Success) return std::nullopt;
  const double tr = eig2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  if (!std::isfinite(tr)) return std::nullopt;
  return tr;
}

}  // namespace

FrechetResult frechet_distance(const GaussianStats& g1, const GaussianStats& g2) {
  const Eigen::Index dim = g1.mean.size();
  check_stats(g1, dim);
  check_stats(g2, dim);

  FrechetResult result;
  Eigen::MatrixXd s1 = g1.cov;
  Eigen::MatrixXd s2 = g2.cov;
  std::optional<double> tr = trace_sqrt_product(s1, s2);
  if (!tr) {
    const Eigen::MatrixXd jitter = 1e-10 * Eigen::MatrixXd::Identity(dim, dim);
    s1 += jitter;
    s2 += jitter;
    result.jitter_applied = true;
    tr = trace_sqrt_product(s1, s2);
    if (!tr) throw DataError("frechet_distance: matrix square root failed after jitter");
  }
  const double mean_term = (g1.mean - g2.mean).squaredNorm();
  result.distance = std::max(0.0, mean_term + s1.trace() + s2.trace() - 2.0 * *tr);
  return result;
}

}  // namespace rangeview
