#include "rangeview/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rangeview {

BeamModel::BeamModel(std::vector<Beam> beams) : beams_(std::move(beams)) {
  if (beams_.empty()) {
    throw std::invalid_argument("BeamModel: at least one beam is required");
  }
  for (std::size_t j = 0; j < beams_.size(); ++j) {
    if (!std::isfinite(beams_[j].height) || !std::isfinite(beams_[j].pitch)) {
      throw std::invalid_argument("BeamModel: non-finite parameters for beam " +
                                  std::to_string(j));
    }
    if (j > 0 && !(beams_[j].pitch < beams_[j - 1].pitch)) {
      throw std::invalid_argument(
          "BeamModel: pitches must be strictly decreasing (beam " +
          std::to_string(j) + ")");
    }
  }
}

const Beam& BeamModel::at(std::size_t j) const {
  if (j >= beams_.size()) {
    throw std::out_of_range("BeamModel: beam index " + std::to_string(j) +
                            " out of range for " +
                            std::to_string(beams_.size()) + " beams");
  }
  return beams_[j];
}

BeamModel BeamModel::every_nth(std::size_t factor) const {
  if (factor == 0 || beams_.size() % factor != 0) {
    throw std::invalid_argument("BeamModel: factor " + std::to_string(factor) +
                                " does not divide " +
                                std::to_string(beams_.size()) + " beams");
  }
  std::vector<Beam> kept;
  kept.reserve(beams_.size() / factor);
  for (std::size_t j = 0; j < beams_.size(); j += factor) kept.push_back(beams_[j]);
  return BeamModel(std::move(kept));
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

namespace {

double azimuth(double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  double theta = std::atan2(y, x);
  // atan2(-0.0, x<0) yields -pi; fold onto the closed end of (-pi, pi].
  if (theta <= -kPi) theta = kPi;
  return theta;
}

}  // namespace

SphericalCoord cart_to_spherical(const Point3& p) {
  const double d = std::hypot(p.x, p.y);
  SphericalCoord s;
  s.r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  s.theta = azimuth(p.x, p.y);
  s.phi = (d == 0.0 && p.z == 0.0) ? 0.0 : std::atan2(p.z, d);
  return s;
}

SphericalCoord cart_to_beam_spherical(const Point3& p, std::size_t beam,
                                      const BeamModel& model) {
  const Beam& b = model.at(beam);
  const double dz = p.z - b.height;
  return {std::sqrt(p.x * p.x + p.y * p.y + dz * dz), azimuth(p.x, p.y), b.pitch};
}

Point3 beam_spherical_to_cart(const SphericalCoord& s, double height,
                              double intensity) {
  const double horizontal = s.r * std::cos(s.phi);
  return {horizontal * std::cos(s.theta), horizontal * std::sin(s.theta),
          s.r * std::sin(s.phi) + height, intensity};
}

Point3 rotate_z(const Point3& p, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * p.x - s * p.y, s * p.x + c * p.y, p.z, p.intensity};
}

PointCloud rotate_z(const PointCloud& cloud, double angle) {
  PointCloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(rotate_z(p, angle));
  return out;
}

}  // namespace rangeview
