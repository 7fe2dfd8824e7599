#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <stdexcept>

#include "gaitkal/orientation.hpp"

using namespace gaitkal;

namespace {

constexpr double kG = 9.81;

Eigen::Matrix3d rot_x(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitX()).toRotationMatrix();
}
Eigen::Matrix3d rot_z(double a) {
  return Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

// Gravity as the phone would measure it at the given attitude:
// v_phone = Rx(pitch) * Rz(yaw) * v_nav with v_nav = (0, -g, 0).
Vec3 tilted_gravity(double pitch, double yaw) {
  return rot_x(pitch) * rot_z(yaw) * Vec3(0.0, -kG, 0.0);
}

}  // namespace

TEST_SUITE("orientation") {
  TEST_CASE("reference pose recovers zero angles") {
    const EulerAngles e = euler_from_gravity(Vec3(0.0, -kG, 0.0));
    CHECK(e.pitch == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e.yaw == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e.roll == 0.0);
  }

  TEST_CASE("pure pitch and pure yaw recovered exactly") {
    // Pitch works in all four quadrants; yaw is limited to |yaw| < pi/2.
    for (double pitch : {-2.8, -1.2, -0.3, 0.0, 0.4, 1.5, 2.9}) {
      const EulerAngles e = euler_from_gravity(tilted_gravity(pitch, 0.0));
      CHECK(e.pitch == doctest::Approx(pitch).epsilon(1e-12));
      CHECK(e.yaw == doctest::Approx(0.0).epsilon(1e-12));
    }
    for (double yaw : {-1.4, -0.7, 0.2, 1.3}) {
      const EulerAngles e = euler_from_gravity(tilted_gravity(0.0, yaw));
      CHECK(e.yaw == doctest::Approx(yaw).epsilon(1e-12));
      CHECK(e.pitch == doctest::Approx(0.0).epsilon(1e-12));
    }
  }

  TEST_CASE("random attitude round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pitch_d(-M_PI + 0.05, M_PI - 0.05);
    std::uniform_real_distribution<double> yaw_d(-M_PI / 2 + 0.05,
                                                 M_PI / 2 - 0.05);
    for (int k = 0; k < 200; ++k) {
      const double pitch = pitch_d(rng);
      const double yaw = yaw_d(rng);
      const EulerAngles e = euler_from_gravity(tilted_gravity(pitch, yaw));
      CHECK(e.pitch == doctest::Approx(pitch).epsilon(1e-10));
      CHECK(e.yaw == doctest::Approx(yaw).epsilon(1e-10));
    }
  }

  TEST_CASE("nav rotation maps measured gravity back to straight down") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const Vec3 g_phone = tilted_gravity(ang(rng), ang(rng));
      const EulerAngles e = euler_from_gravity(g_phone);
      const Vec3 g_nav = nav_rotation(e) * g_phone;
      CHECK(std::abs(g_nav.x()) < 1e-10);
      CHECK(g_nav.y() == doctest::Approx(-kG).epsilon(1e-12));
      CHECK(std::abs(g_nav.z()) < 1e-10);
    }
  }

  TEST_CASE("to_nav_frame applies the inverse tilt") {
    ImuSample s;
    s.t = 0.25;
    s.acc = Vec3(0.3, -0.1, 1.7);

    // Zero attitude: acceleration passes through unchanged.
    const NavSample flat = to_nav_frame(s, EulerAngles{});
    CHECK(flat.t == 0.25);
    CHECK((flat.acc_nav - s.acc).norm() < 1e-15);

    // Tilted: rotating the nav result back into the phone frame must
    // recover the measurement.
    const EulerAngles e{0.35, -0.2, 0.0};
    const NavSample tilted = to_nav_frame(s, e);
    const Vec3 back = nav_rotation(e).transpose() * tilted.acc_nav;
    CHECK((back - s.acc).norm() < 1e-12);
  }

  TEST_CASE("transform_stream recomputes angles per sample") {
    SensorStream stream;
    ImuSample a;
    a.t = 0.0;
    a.acc = Vec3(0.0, 0.0, 1.0);
    a.gravity = Vec3(0.0, -kG, 0.0);
    ImuSample b = a;
    b.t = 0.01;
    b.gravity = tilted_gravity(0.5, 0.0);
    stream.samples = {a, b};

    const auto nav = transform_stream(stream);
    REQUIRE(nav.size() == 2);
    // Flat sample is untouched; the tilted one is rotated by -0.5 pitch.
    CHECK(nav[0].acc_nav.z() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nav[1].acc_nav.z() == doctest::Approx(std::cos(0.5)).epsilon(1e-12));
    CHECK(nav[1].acc_nav.y() == doctest::Approx(std::sin(0.5)).epsilon(1e-12));
    CHECK(walking_component(nav[1]) == nav[1].acc_nav.z());
  }

  TEST_CASE("degenerate inputs throw") {
    CHECK_THROWS_AS((void)euler_from_gravity(Vec3(0.0, -0.5, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)euler_from_gravity(Vec3::Zero()),
                    std::invalid_argument);

    SensorStream one;
    one.samples.resize(1);
    CHECK_THROWS_AS((void)transform_stream(one), std::invalid_argument);
  }
}
