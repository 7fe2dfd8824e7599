#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "gaitkal/stepper.hpp"
#include "gaitkal/types.hpp"

namespace gaitkal {

/// Step-and-heading baseline: detect steps, estimate each length with the
/// Scarlet formula, advance along the heading. Headings either stay fixed
/// at zero (straight-line protocol walks) or integrate the gyro's
/// vertical-axis rate.
enum class HeadingSource { fixed_zero, gyro_integrated };

struct ShsConfig {
  FsmThresholds thresholds;
  double scarlet_k = 1.0;
  HeadingSource heading_source = HeadingSource::fixed_zero;
  StepLimits limits;
};

/// One advanced step. The trajectory plane is (x forward, y lateral);
/// heading 0 points along +x.
struct ShsStep {
  int step_idx = 0;
  double t_end = 0.0;
  double length_m = 0.0;
  double heading = 0.0;  ///< rad
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
};

struct ShsResult {
  std::vector<ShsStep> trajectory;
  double total_distance = 0.0;  ///< sum of step lengths, m
  std::vector<std::string> warnings;
};

/// @throws std::invalid_argument for streams with fewer than 2 samples
ShsResult run_shs(const WalkRecord& walk, const ShsConfig& cfg);

}  // namespace gaitkal
