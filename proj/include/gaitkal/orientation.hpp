#pragma once

#include <Eigen/Core>

#include <vector>

#include "gaitkal/types.hpp"

namespace gaitkal {

/// Frame conventions
/// -----------------
/// Phone frame (handset axes): x to the right of the screen, y up along the
/// screen, z out of the screen. The phone rides vertically in a belt pocket
/// with the screen facing back, so at the reference pose gravity reads
/// (0, -9.81, 0) and the person walks along +z.
///
/// Navigation frame: coincides with the phone frame at the reference pose.
/// Component meaning of any nav-frame vector: x lateral, y vertical (up),
/// z walking direction.
///
/// Attitude is parameterized by two angles recovered from the gravity
/// vector alone (roll is assumed zero): pitch rotates about phone x, yaw
/// about phone z, composed as
///
///   v_phone = Rx(pitch) * Rz(yaw) * v_nav
///
/// so the phone-to-nav rotation is Rz(-yaw) * Rx(-pitch).

struct EulerAngles {
  double pitch = 0.0;  ///< rad, about phone x
  double yaw = 0.0;    ///< rad, about phone z
  double roll = 0.0;   ///< rad, about phone y; always zero here
};

/// One sensor sample rotated into the navigation frame.
struct NavSample {
  double t = 0.0;
  Vec3 acc_nav = Vec3::Zero();  ///< m/s^2; x lateral, y vertical, z walking
};

/// @brief Recovers pitch and yaw from a gravity reading.
///
/// Sign-correct in all four quadrants of pitch and for |yaw| < pi/2.
/// @param gravity  gravity vector in the phone frame, any magnitude > 1
/// @throws std::invalid_argument if |gravity| <= 1 (degenerate reading)
EulerAngles euler_from_gravity(const Vec3& gravity);

/// @brief Phone-to-nav rotation for the given angles (roll ignored).
Eigen::Matrix3d nav_rotation(const EulerAngles& angles);

/// @brief Rotates one sample's linear acceleration into the nav frame.
NavSample to_nav_frame(const ImuSample& sample, const EulerAngles& angles);

/// @brief Per-sample tilt compensation for a whole stream.
///
/// Angles are recomputed from each sample's own gravity vector; no
/// smoothing across samples.
/// @throws std::invalid_argument if the stream has fewer than 2 samples
std::vector<NavSample> transform_stream(const SensorStream& stream);

/// Walking-direction component of a nav-frame sample.
inline double walking_component(const NavSample& s) { return s.acc_nav.z(); }

}  // namespace gaitkal
