#include "rangeview/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rangeview {

double l1_reconstruction(std::span<const double> x, std::span<const double> x_hat) {
  if (x.size() != x_hat.size()) {
    throw std::invalid_argument("l1_reconstruction: tensor sizes differ");
  }
  if (x.empty()) throw std::invalid_argument("l1_reconstruction: empty tensors");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += std::abs(x[i] - x_hat[i]);
  return sum / double(x.size());
}

double kl_to_standard_normal(const DiagonalGaussian& q) {
  if (q.mu.size() != q.log_var.size()) {
    throw std::invalid_argument("kl_to_standard_normal: mu and log_var lengths differ");
  }
  double sum = 0.0;
  for (std::size_t d = 0; d < q.mu.size(); ++d) {
    const double lv = q.log_var[d];
    // expm1(lv) - lv == exp(lv) - 1 - lv without cancellation near 0.
    sum += std::expm1(lv) - lv + q.mu[d] * q.mu[d];
  }
  return 0.5 * sum;
}

namespace {

void require_scores(std::span<const double> s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string(what) + ": empty score list");
}

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / double(v.size());
}

}  // namespace

double hinge_d_loss(std::span<const double> real_scores, std::span<const double> fake_scores) {
  require_scores(real_scores, "hinge_d_loss");
  require_scores(fake_scores, "hinge_d_loss");
  double real_term = 0.0, fake_term = 0.0;
  for (double s : real_scores) real_term += std::max(0.0, 1.0 - s);
  for (double s : fake_scores) fake_term += std::max(0.0, 1.0 + s);
  return real_term / double(real_scores.size()) + fake_term / double(fake_scores.size());
}

double hinge_g_loss(std::span<const double> fake_scores) {
  require_scores(fake_scores, "hinge_g_loss");
  return -mean(fake_scores);
}

double first_stage_objective(std::span<const double> x, std::span<const double> x_hat,
                             const DiagonalGaussian& q, std::span<const double> fake_scores,
                             double kl_weight, double adv_weight) {
  return l1_reconstruction(x, x_hat) + kl_weight * kl_to_standard_normal(q) +
         adv_weight * hinge_g_loss(fake_scores);
}

}  // namespace rangeview
