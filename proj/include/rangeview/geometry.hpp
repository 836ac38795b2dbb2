#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace rangeview {

/// Sensor-frame point in meters with reflectance in [0, 1].
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

using PointCloud = std::vector<Point3>;

/// Range (m), azimuth theta in (-pi, pi] and elevation phi (rad).
struct SphericalCoord {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

/// Mounting height (m) and pitch (rad) of one laser.
struct Beam {
  double height = 0.0;
  double pitch = 0.0;

  bool operator==(const Beam&) const = default;
};

/// Per-laser geometry of a spinning multi-beam sensor. Beams are ordered
/// top to bottom: pitch strictly decreasing, so row 0 of a range image is the
/// highest beam.
class BeamModel {
 public:
  /// Throws std::invalid_argument when empty, non-finite, or when pitches are
  /// not strictly decreasing.
  explicit BeamModel(std::vector<Beam> beams);

  std::size_t size() const { return beams_.size(); }
  const Beam& operator[](std::size_t j) const { return beams_[j]; }
  const Beam& at(std::size_t j) const;
  const std::vector<Beam>& beams() const { return beams_; }

  auto begin() const { return beams_.begin(); }
  auto end() const { return beams_.end(); }

  /// Keeps beams 0, factor, 2*factor, ...; factor must divide size().
  BeamModel every_nth(std::size_t factor) const;

  bool operator==(const BeamModel&) const = default;

 private:
  std::vector<Beam> beams_;
};

inline constexpr double kPi = std::numbers::pi;

/// Maps any angle to (-pi, pi].
double wrap_angle(double angle);

/// Shared-origin spherical coordinates. The pole (x = y = 0) gets theta = 0.
SphericalCoord cart_to_spherical(const Point3& p);

/// Spherical coordinates relative to beam j's optical center (0, 0, h_j).
/// phi is the beam's nominal pitch, not computed from z.
SphericalCoord cart_to_beam_spherical(const Point3& p, std::size_t beam,
                                      const BeamModel& model);

/// Inverse of cart_to_beam_spherical for a beam mounted at `height`.
Point3 beam_spherical_to_cart(const SphericalCoord& s, double height,
                              double intensity = 0.0);

/// Rotation about the z axis (yaw) by `angle` radians.
Point3 rotate_z(const Point3& p, double angle);
PointCloud rotate_z(const PointCloud& cloud, double angle);

/// Distance from the z axis, sqrt(x^2 + y^2).
inline double planar_distance(const Point3& p) { return std::hypot(p.x, p.y); }

}  // namespace rangeview
