#include "gaitkal/orientation.hpp"

#include <cmath>
#include <stdexcept>

namespace gaitkal {

namespace {

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return r;
}

Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return r;
}

}  // namespace

EulerAngles euler_from_gravity(const Vec3& g) {
  if (g.norm() <= 1.0)
    throw std::invalid_argument(
        "euler_from_gravity: |gravity| <= 1 m/s^2, reading is degenerate");

  // With g_phone = Rx(pitch) * Rz(yaw) * (0, -|g|, 0):
  //   g_phone = |g| * (sin(yaw), -cos(yaw)cos(pitch), -cos(yaw)sin(pitch))
  // which inverts as below. atan2 keeps the signs right when either angle
  // is negative; pitch is recoverable over (-pi, pi], yaw over (-pi/2, pi/2).
  EulerAngles out;
  const double r_yz = std::hypot(g.y(), g.z());
  out.yaw = std::atan2(g.x(), r_yz);
  out.pitch = (r_yz > 1e-12) ? std::atan2(-g.z(), -g.y()) : 0.0;
  out.roll = 0.0;
  return out;
}

Eigen::Matrix3d nav_rotation(const EulerAngles& angles) {
  return rot_z(-angles.yaw) * rot_x(-angles.pitch);
}

NavSample to_nav_frame(const ImuSample& sample, const EulerAngles& angles) {
  return NavSample{sample.t, nav_rotation(angles) * sample.acc};
}

std::vector<NavSample> transform_stream(const SensorStream& stream) {
  if (stream.samples.size() < 2)
    throw std::invalid_argument(
        "transform_stream: stream needs at least 2 samples");

  std::vector<NavSample> out;
  out.reserve(stream.samples.size());
  for (const ImuSample& s : stream.samples)
    out.push_back(to_nav_frame(s, euler_from_gravity(s.gravity)));
  return out;
}

}  // namespace gaitkal
