#include "gaitkal/shs.hpp"

#include <cmath>

#include "gaitkal/orientation.hpp"

namespace gaitkal {

ShsResult run_shs(const WalkRecord& walk, const ShsConfig& cfg) {
  const auto nav = transform_stream(walk.stream);
  const Eigen::Index n = static_cast<Eigen::Index>(nav.size());
  Eigen::VectorXd w(n), t(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = walking_component(nav[static_cast<size_t>(i)]);
    t[i] = nav[static_cast<size_t>(i)].t;
  }

  ShsResult res;
  const auto steps = detect_steps(w, t, cfg.thresholds, cfg.limits);
  if (steps.empty()) {
    res.warnings.push_back("no steps detected; SHS produced no displacement");
    return res;
  }

  // Heading per sample: zero, or the integral of the gyro rate about the
  // nav vertical axis (tilt-compensated per sample like the acceleration).
  Eigen::VectorXd heading = Eigen::VectorXd::Zero(n);
  if (cfg.heading_source == HeadingSource::gyro_integrated) {
    for (Eigen::Index i = 1; i < n; ++i) {
      const auto& s = walk.stream.samples[static_cast<size_t>(i)];
      const Vec3 gyro_nav =
          nav_rotation(euler_from_gravity(s.gravity)) * s.gyro;
      heading[i] = heading[i - 1] + (t[i] - t[i - 1]) * gyro_nav.y();
    }
  }

  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  int idx = 0;
  for (const StepEvent& ev : steps) {
    const double len = scarlet_step_length(ev, cfg.scarlet_k);
    const double psi = heading[ev.end_idx];
    pos += len * Eigen::Vector2d(std::cos(psi), std::sin(psi));
    res.trajectory.push_back({idx++, t[ev.end_idx], len, psi, pos});
    res.total_distance += len;
  }
  return res;
}

}  // namespace gaitkal
