#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace rangeview {

using Rng = std::mt19937_64;

/// N-dimensional array of reals, row-major.
struct LatentTensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  LatentTensor() = default;
  /// Throws std::invalid_argument when data.size() != prod(shape).
  LatentTensor(std::vector<std::size_t> shape_, std::vector<double> data_);

  static LatentTensor zeros(std::vector<std::size_t> shape_);
  static LatentTensor filled(std::vector<std::size_t> shape_, double value);
  static LatentTensor standard_normal(std::vector<std::size_t> shape_, Rng& rng);

  std::size_t size() const { return data.size(); }
  bool same_shape(const LatentTensor& other) const { return shape == other.shape; }

  bool operator==(const LatentTensor&) const = default;
};

/// beta_t, alpha_t = 1 - beta_t and alpha_bar_t = prod_{s<=t} alpha_s, for
/// 1-based steps t = 1..T. alpha_bar(0) is 1.
class NoiseSchedule {
 public:
  /// Throws std::invalid_argument unless every beta is in (0, 1).
  explicit NoiseSchedule(std::vector<double> betas);

  std::size_t steps() const { return beta_.size(); }
  double beta(std::size_t t) const { return beta_.at(t - 1); }
  double alpha(std::size_t t) const { return alpha_.at(t - 1); }
  double alpha_bar(std::size_t t) const { return t == 0 ? 1.0 : alpha_bar_.at(t - 1); }

  const std::vector<double>& betas() const { return beta_; }
  const std::vector<double>& alpha_bars() const { return alpha_bar_; }

 private:
  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

/// T betas linearly spaced from beta_start to beta_end inclusive.
NoiseSchedule linear_schedule(std::size_t steps, double beta_start = 1e-4,
                              double beta_end = 2e-2);

/// Noise predictor eps(z_t, t, condition). `condition` is null for
/// unconditional models. Must return a tensor shaped like z_t.
using Denoiser = std::function<LatentTensor(const LatentTensor& z_t, std::size_t t,
                                            const LatentTensor* condition)>;

/// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps.
LatentTensor forward_sample(const LatentTensor& x0, std::size_t t, const LatentTensor& eps,
                            const NoiseSchedule& sched);

/// Monte-Carlo estimate of E ||eps - eps_hat(z_t, t)||^2 with t uniform on
/// 1..T and eps standard normal. Each of n_samples rounds draws (t, eps) for
/// every batch item in order; the result is the mean over all draws.
double denoising_loss(std::span<const LatentTensor> batch, const Denoiser& den,
                      const NoiseSchedule& sched, Rng& rng, std::size_t n_samples);

/// denoising_loss with each item's condition forwarded to the denoiser.
double conditional_denoising_loss(std::span<const std::pair<LatentTensor, LatentTensor>> pairs,
                                  const Denoiser& den, const NoiseSchedule& sched, Rng& rng,
                                  std::size_t n_samples);

/// Std-dev of the fixed reverse kernel, sqrt of the posterior variance
/// (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t. Zero at t = 1.
double reverse_std(std::size_t t, const NoiseSchedule& sched);

/// One ancestral step: mu + rho_t * noise with
/// mu = (z_t - beta_t / sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_t).
/// At t = 1 the noise must be all zeros.
LatentTensor ddpm_step(const LatentTensor& z_t, std::size_t t, const LatentTensor& eps_hat,
                       const NoiseSchedule& sched, const LatentTensor& noise);

/// Full T-step ancestral sampler starting from standard-normal z_T.
LatentTensor ddpm_sample(const Denoiser& den, const NoiseSchedule& sched,
                         const std::vector<std::size_t>& shape, Rng& rng,
                         const LatentTensor* condition = nullptr);

/// T, T - s, ..., T - (n - 1) s with stride s = floor(T / n).
std::vector<std::size_t> ddim_timesteps(std::size_t steps, std::size_t n_steps);

/// Deterministic (eta = 0) DDIM over ddim_timesteps(T, n_steps), returning
/// the x0 prediction made at the last visited step.
LatentTensor ddim_sample(const Denoiser& den, const NoiseSchedule& sched, std::size_t n_steps,
                         const std::vector<std::size_t>& shape, Rng& rng,
                         const LatentTensor* condition = nullptr);

/// Bayes-optimal noise predictor for data x0 ~ N(mu, diag(sigma2)) under
/// `sched`. sigma2 must match mu's size or hold one broadcast value.
Denoiser analytic_gaussian_denoiser(LatentTensor mu, std::vector<double> sigma2,
                                    NoiseSchedule sched);

}  // namespace rangeview
