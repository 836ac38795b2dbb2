#pragma once

#include <span>
#include <vector>

namespace rangeview {

/// Diagonal Gaussian posterior N(mu, diag(exp(log_var))).
struct DiagonalGaussian {
  std::vector<double> mu;
  std::vector<double> log_var;
};

/// Mean absolute difference over all elements.
double l1_reconstruction(std::span<const double> x, std::span<const double> x_hat);

/// KL(q || N(0, I)) = 0.5 * sum(exp(log_var) + mu^2 - 1 - log_var).
double kl_to_standard_normal(const DiagonalGaussian& q);

/// Discriminator hinge loss: mean(relu(1 - real)) + mean(relu(1 + fake)).
double hinge_d_loss(std::span<const double> real_scores, std::span<const double> fake_scores);

/// Generator hinge loss: -mean(fake).
double hinge_g_loss(std::span<const double> fake_scores);

/// Weights used when none are given; not tuned for any dataset.
inline constexpr double kDefaultKlWeight = 1e-6;
inline constexpr double kDefaultAdversarialWeight = 0.5;

/// Minimized first-stage objective: l1 + kl_weight * KL + adv_weight * hinge_g.
double first_stage_objective(std::span<const double> x, std::span<const double> x_hat,
                             const DiagonalGaussian& q, std::span<const double> fake_scores,
                             double kl_weight = kDefaultKlWeight,
                             double adv_weight = kDefaultAdversarialWeight);

}  // namespace rangeview
