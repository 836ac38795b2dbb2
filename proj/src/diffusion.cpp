#include "rangeview/diffusion.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rangeview {

namespace {

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void check_step(std::size_t t, const NoiseSchedule& sched, const char* where) {
  if (t < 1 || t > sched.steps()) {
    throw std::invalid_argument(std::string(where) + ": step " + std::to_string(t) +
                                " outside 1.." + std::to_string(sched.steps()));
  }
}

void check_same_shape(const LatentTensor& a, const LatentTensor& b, const char* where) {
  if (!a.same_shape(b) || a.size() != b.size()) {
    throw std::invalid_argument(std::string(where) + ": tensor shapes differ");
  }
}

}  // namespace

LatentTensor::LatentTensor(std::vector<std::size_t> shape_, std::vector<double> data_)
    : shape(std::move(shape_)), data(std::move(data_)) {
  if (data.size() != shape_size(shape)) {
    throw std::invalid_argument("LatentTensor: data size " + std::to_string(data.size()) +
                                " does not match shape product " +
                                std::to_string(shape_size(shape)));
  }
}

LatentTensor LatentTensor::zeros(std::vector<std::size_t> shape_) {
  return filled(std::move(shape_), 0.0);
}

LatentTensor LatentTensor::filled(std::vector<std::size_t> shape_, double value) {
  const std::size_t n = shape_size(shape_);
  return LatentTensor(std::move(shape_), std::vector<double>(n, value));
}

LatentTensor LatentTensor::standard_normal(std::vector<std::size_t> shape_, Rng& rng) {
  LatentTensor out = zeros(std::move(shape_));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : out.data) v = normal(rng);
  return out;
}

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
  if (beta_.empty()) throw std::invalid_argument("NoiseSchedule: at least one step required");
  alpha_.resize(beta_.size());
  alpha_bar_.resize(beta_.size());
  double running = 1.0;
  for (std::size_t i = 0; i < beta_.size(); ++i) {
    if (!(beta_[i] > 0.0 && beta_[i] < 1.0)) {
      throw std::invalid_argument("NoiseSchedule: beta_" + std::to_string(i + 1) +
                                  " must lie in (0, 1)");
    }
    alpha_[i] = 1.0 - beta_[i];
    running *= alpha_[i];
    alpha_bar_[i] = running;
  }
}

NoiseSchedule linear_schedule(std::size_t steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("linear_schedule: steps must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw std::invalid_argument("linear_schedule: need 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double frac = steps == 1 ? 0.0 : double(i) / double(steps - 1);
    betas[i] = beta_start + frac * (beta_end - beta_start);
  }
  return NoiseSchedule(std::move(betas));
}

LatentTensor forward_sample(const LatentTensor& x0, std::size_t t, const LatentTensor& eps,
                            const NoiseSchedule& sched) {
  check_step(t, sched, "forward_sample");
  check_same_shape(x0, eps, "forward_sample");
  const double a = std::sqrt(sched.alpha_bar(t));
  const double b = std::sqrt(1.0 - sched.alpha_bar(t));
  LatentTensor out = x0;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a * x0.data[i] + b * eps.data[i];
  return out;
}

namespace {

double squared_error(const LatentTensor& eps, const LatentTensor& pred) {
  check_same_shape(eps, pred, "denoising_loss");
  double sum = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double d = eps.data[i] - pred.data[i];
    sum += d * d;
  }
  return sum;
}

template <typename Item, typename GetX0, typename GetCond>
double monte_carlo_loss(std::span<const Item> batch, const Denoiser& den,
                        const NoiseSchedule& sched, Rng& rng, std::size_t n_samples,
                        GetX0 get_x0, GetCond get_cond) {
  if (batch.empty()) throw std::invalid_argument("denoising_loss: empty batch");
  if (n_samples < 1) throw std::invalid_argument("denoising_loss: n_samples must be >= 1");
  std::uniform_int_distribution<std::size_t> pick_step(1, sched.steps());
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (const Item& item : batch) {
      const LatentTensor& x0 = get_x0(item);
      const std::size_t t = pick_step(rng);
      const LatentTensor eps = LatentTensor::standard_normal(x0.shape, rng);
      const LatentTensor z_t = forward_sample(x0, t, eps, sched);
      total += squared_error(eps, den(z_t, t, get_cond(item)));
    }
  }
  return total / double(n_samples * batch.size());
}

}  // namespace

double denoising_loss(std::span<const LatentTensor> batch, const Denoiser& den,
                      const NoiseSchedule& sched, Rng& rng, std::size_t n_samples) {
  return monte_carlo_loss(
      batch, den, sched, rng, n_samples, [](const LatentTensor& x) -> const LatentTensor& { return x; },
      [](const LatentTensor&) -> const LatentTensor* { return nullptr; });
}

double conditional_denoising_loss(std::span<const std::pair<LatentTensor, LatentTensor>> pairs,
                                  const Denoiser& den, const NoiseSchedule& sched, Rng& rng,
                                  std::size_t n_samples) {
  using Pair = std::pair<LatentTensor, LatentTensor>;
  return monte_carlo_loss(
      pairs, den, sched, rng, n_samples, [](const Pair& p) -> const LatentTensor& { return p.first; },
      [](const Pair& p) -> const LatentTensor* { return &p.second; });
}

double reverse_std(std::size_t t, const NoiseSchedule& sched) {
  check_step(t, sched, "reverse_std");
  const double var = (1.0 - sched.alpha_bar(t - 1)) / (1.0 - sched.alpha_bar(t)) * sched.beta(t);
  return std::sqrt(var);
}

LatentTensor ddpm_step(const LatentTensor& z_t, std::size_t t, const LatentTensor& eps_hat,
                       const NoiseSchedule& sched, const LatentTensor& noise) {
  check_step(t, sched, "ddpm_step");
  check_same_shape(z_t, eps_hat, "ddpm_step");
  check_same_shape(z_t, noise, "ddpm_step");
  if (t == 1) {
    for (double v : noise.data) {
      if (v != 0.0) throw std::invalid_argument("ddpm_step: noise must be zero at t = 1");
    }
  }
  const double coef = sched.beta(t) / std::sqrt(1.0 - sched.alpha_bar(t));
  const double inv_sqrt_alpha = 1.0 / std::sqrt(sched.alpha(t));
  const double rho = reverse_std(t, sched);
  LatentTensor out = z_t;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data[i] = (z_t.data[i] - coef * eps_hat.data[i]) * inv_sqrt_alpha + rho * noise.data[i];
  }
  return out;
}

namespace {

LatentTensor predict(const Denoiser& den, const LatentTensor& z, std::size_t t,
                     const LatentTensor* condition) {
  LatentTensor eps = den(z, t, condition);
  check_same_shape(z, eps, "denoiser output");
  return eps;
}

}  // namespace

LatentTensor ddpm_sample(const Denoiser& den, const NoiseSchedule& sched,
                         const std::vector<std::size_t>& shape, Rng& rng,
                         const LatentTensor* condition) {
  LatentTensor z = LatentTensor::standard_normal(shape, rng);
  for (std::size_t t = sched.steps(); t >= 1; --t) {
    const LatentTensor eps = predict(den, z, t, condition);
    const LatentTensor noise =
        t > 1 ? LatentTensor::standard_normal(shape, rng) : LatentTensor::zeros(shape);
    z = ddpm_step(z, t, eps, sched, noise);
  }
  return z;
}

std::vector<std::size_t> ddim_timesteps(std::size_t steps, std::size_t n_steps) {
  if (n_steps < 1 || n_steps > steps) {
    throw std::invalid_argument("ddim: n_steps must lie in 1.." + std::to_string(steps));
  }
  const std::size_t stride = steps / n_steps;
  std::vector<std::size_t> ts(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k) ts[k] = steps - k * stride;
  return ts;
}

LatentTensor ddim_sample(const Denoiser& den, const NoiseSchedule& sched, std::size_t n_steps,
                         const std::vector<std::size_t>& shape, Rng& rng,
                         const LatentTensor* condition) {
  const std::vector<std::size_t> ts = ddim_timesteps(sched.steps(), n_steps);
  LatentTensor z = LatentTensor::standard_normal(shape, rng);
  LatentTensor x0_hat = z;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const std::size_t t = ts[k];
    const LatentTensor eps = predict(den, z, t, condition);
    const double ab = sched.alpha_bar(t);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_1m_ab = std::sqrt(1.0 - ab);
    for (std::size_t i = 0; i < z.size(); ++i) {
      x0_hat.data[i] = (z.data[i] - sqrt_1m_ab * eps.data[i]) / sqrt_ab;
    }
    if (k + 1 == ts.size()) break;
    const double ab_next = sched.alpha_bar(ts[k + 1]);
    const double a = std::sqrt(ab_next);
    const double b = std::sqrt(1.0 - ab_next);
    for (std::size_t i = 0; i < z.size(); ++i) z.data[i] = a * x0_hat.data[i] + b * eps.data[i];
  }
  return x0_hat;
}

Denoiser analytic_gaussian_denoiser(LatentTensor mu, std::vector<double> sigma2,
                                    NoiseSchedule sched) {
  if (sigma2.size() != mu.size() && sigma2.size() != 1) {
    throw std::invalid_argument("analytic_gaussian_denoiser: variance size mismatch");
  }
  for (double v : sigma2) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("analytic_gaussian_denoiser: variance must be >= 0");
    }
  }
  if (sigma2.size() == 1) sigma2.assign(mu.size(), sigma2.front());
  return [mu = std::move(mu), sigma2 = std::move(sigma2), sched = std::move(sched)](
             const LatentTensor& z, std::size_t t, const LatentTensor*) {
    check_step(t, sched, "analytic_gaussian_denoiser");
    if (z.size() != mu.size()) {
      throw std::invalid_argument("analytic_gaussian_denoiser: input size mismatch");
    }
    const double ab = sched.alpha_bar(t);
    const double sqrt_ab = std::sqrt(ab);
    const double sqrt_1m_ab = std::sqrt(1.0 - ab);
    LatentTensor eps = z;
    // (z - sqrt(ab) m_post) / sqrt(1 - ab) with the posterior mean substituted
    // and simplified; stays finite as ab -> 1.
    for (std::size_t i = 0; i < z.size(); ++i) {
      eps.data[i] = sqrt_1m_ab * (z.data[i] - sqrt_ab * mu.data[i]) /
                    (ab * sigma2[i] + (1.0 - ab));
    }
    return eps;
  };
}

}  // namespace rangeview
