#pragma once

// Slow reference implementations used as test oracles. They are written
// straight from the defining formulas and share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "rangeview/diffusion.hpp"
#include "rangeview/geometry.hpp"
#include "rangeview/metrics.hpp"
#include "rangeview/projection.hpp"
#include "rangeview/rangeops.hpp"
#include "rangeview/tensor.hpp"

namespace oracle {

using rangeview::BEVHistogram;
using rangeview::FeatureMap;
using rangeview::PointCloud;

inline std::array<double, 3> to_cartesian(double r, double azimuth, double elevation) {
  return {r * std::cos(elevation) * std::cos(azimuth), r * std::cos(elevation) * std::sin(azimuth),
          r * std::sin(elevation)};
}

inline double distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline std::vector<double> normalized(const BEVHistogram& h) {
  double total = 0.0;
  for (double c : h.counts) total += c;
  std::vector<double> out(h.counts.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.counts[i] / total;
  }
  return out;
}

inline double sq_dist(const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
  return s;
}

inline double median_pairwise(const std::vector<BEVHistogram>& a,
                              const std::vector<BEVHistogram>& b) {
  std::vector<std::vector<double>> pooled;
  for (const auto& h : a) pooled.push_back(normalized(h));
  for (const auto& h : b) pooled.push_back(normalized(h));
  std::vector<double> d;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = i + 1; j < pooled.size(); ++j) {
      d.push_back(std::sqrt(sq_dist(pooled[i], pooled[j])));
    }
  }
  std::sort(d.begin(), d.end());
  if (d.empty()) return 0.0;
  const std::size_t n = d.size();
  return n % 2 == 1 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
}

// Biased squared MMD by explicit double loops.
inline double mmd(const std::vector<BEVHistogram>& a, const std::vector<BEVHistogram>& b,
                  double gamma) {
  auto k = [gamma](const std::vector<double>& u, const std::vector<double>& v) {
    return std::exp(-sq_dist(u, v) / (2.0 * gamma * gamma));
  };
  std::vector<std::vector<double>> na, nb;
  for (const auto& h : a) na.push_back(normalized(h));
  for (const auto& h : b) nb.push_back(normalized(h));
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (const auto& u : na)
    for (const auto& v : na) saa += k(u, v);
  for (const auto& u : nb)
    for (const auto& v : nb) sbb += k(u, v);
  for (const auto& u : na)
    for (const auto& v : nb) sab += k(u, v);
  const double m = double(na.size()), n = double(nb.size());
  return saa / (m * m) + sbb / (n * n) - 2.0 * sab / (m * n);
}

inline double chamfer(const PointCloud& p, const PointCloud& q) {
  auto directed = [](const PointCloud& from, const PointCloud& to) {
    double sum = 0.0;
    for (const auto& a : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& b : to) {
        const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      sum += best;
    }
    return sum / double(from.size());
  };
  return directed(p, q) + directed(q, p);
}

// Direct cross-correlation: horizontal wrap by modular indexing, vertical
// zero padding.
inline FeatureMap conv(const FeatureMap& x, const rangeview::ConvKernel& k) {
  FeatureMap y(x.height, x.width, k.out_channels);
  const long H = long(x.height), W = long(x.width);
  const long ry = long(k.kh / 2), rx = long(k.kw / 2);
  for (long r = 0; r < H; ++r)
    for (long c = 0; c < W; ++c)
      for (std::size_t o = 0; o < k.out_channels; ++o) {
        double s = 0.0;
        for (long dy = -ry; dy <= ry; ++dy) {
          const long rr = r + dy;
          if (rr < 0 || rr >= H) continue;
          for (long dx = -rx; dx <= rx; ++dx) {
            const long cc = ((c + dx) % W + W) % W;
            for (std::size_t i = 0; i < k.in_channels; ++i) {
              s += k.at(o, i, std::size_t(dy + ry), std::size_t(dx + rx)) *
                   x.at(std::size_t(rr), std::size_t(cc), i);
            }
          }
        }
        y.at(std::size_t(r), std::size_t(c), o) = s;
      }
  return y;
}

// out(r, (c + k) mod W) = in(r, c)
inline FeatureMap shift_columns(const FeatureMap& x, long k) {
  FeatureMap y(x.height, x.width, x.channels);
  const long W = long(x.width);
  for (std::size_t r = 0; r < x.height; ++r)
    for (long c = 0; c < W; ++c)
      for (std::size_t ch = 0; ch < x.channels; ++ch)
        y.at(r, std::size_t(((c + k) % W + W) % W), ch) = x.at(r, std::size_t(c), ch);
  return y;
}

// Mean of q(x_{t-1} | x_t, x_0), written with the two standard coefficients.
inline std::vector<double> posterior_mean(const std::vector<double>& x0,
                                          const std::vector<double>& xt, std::size_t t,
                                          const rangeview::NoiseSchedule& s) {
  const double ab_t = s.alpha_bar(t), ab_prev = s.alpha_bar(t - 1);
  const double c0 = std::sqrt(ab_prev) * s.beta(t) / (1.0 - ab_t);
  const double ct = std::sqrt(s.alpha(t)) * (1.0 - ab_prev) / (1.0 - ab_t);
  std::vector<double> m(x0.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = c0 * x0[i] + ct * xt[i];
  return m;
}

// Product of alphas by a plain loop.
inline double alpha_bar(const std::vector<double>& betas, std::size_t t) {
  double p = 1.0;
  for (std::size_t s = 0; s < t; ++s) p *= 1.0 - betas[s];
  return p;
}

}  // namespace oracle
