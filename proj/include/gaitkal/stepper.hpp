#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

#include "gaitkal/types.hpp"

namespace gaitkal {

/// Four-threshold step detector over walking-direction acceleration.
///
/// State machine (reference definition; the unit tests trace it by hand):
///
///   state    | condition on a[i]      | next state / action
///   ---------+------------------------+---------------------------------
///   IDLE     | a >= pos_low           | RISING, start_idx = i
///   RISING   | a >= pos_high          | PEAK
///   RISING   | a <  pos_low           | IDLE (discard candidate)
///   PEAK     | a <= neg_low           | FALLING
///   FALLING  | a <= neg_high          | VALLEY
///   FALLING  | a >  neg_low           | IDLE (negative lobe too shallow,
///            |                        | discard candidate)
///   VALLEY   | a >= neg_low           | IDLE, end_idx = i, emit step
///
/// Any non-IDLE state abandons its candidate and returns to IDLE when the
/// elapsed time since start_idx exceeds max_period (the same period rule
/// that debounces completed steps, applied while tracking). Completed steps
/// with period outside [min_period, max_period] are discarded.
struct FsmThresholds {
  double pos_low = 0.0;   ///< m/s^2, entry threshold (Thr), 0 < pos_low
  double pos_high = 0.0;  ///< m/s^2, peak confirmation, pos_low < pos_high
  double neg_low = 0.0;   ///< m/s^2, negative-lobe entry, neg_low <= 0
  double neg_high = 0.0;  ///< m/s^2, valley confirmation, neg_high < neg_low

  bool valid() const {
    return pos_low > 0.0 && pos_low < pos_high && neg_low <= 0.0 &&
           neg_high < neg_low;
  }
};

/// Plausible single-step duration band, in seconds. Detections outside it
/// are treated as noise and discarded.
struct StepLimits {
  double min_period = 0.2;
  double max_period = 2.0;
};

/// One detected step. Statistics cover samples [start_idx, end_idx]
/// inclusive.
struct StepEvent {
  Eigen::Index start_idx = 0;
  Eigen::Index end_idx = 0;
  double period_T = 0.0;  ///< s, t[end_idx] - t[start_idx]
  double a_avg = 0.0;     ///< m/s^2
  double a_max = 0.0;
  double a_min = 0.0;
};

/// @brief Runs the threshold FSM over a walking-acceleration sequence.
/// @param acc_walk  walking-direction acceleration, same length as t
/// @param t         strictly increasing timestamps, length >= 2
/// @throws std::invalid_argument on invalid thresholds or mismatched input
std::vector<StepEvent> detect_steps(
    const Eigen::Ref<const Eigen::VectorXd>& acc_walk,
    const Eigen::Ref<const Eigen::VectorXd>& t, const FsmThresholds& thr,
    const StepLimits& limits = {});

/// @brief Scarlet step-length estimate: K * (a_avg - a_min) / (a_max - a_min).
/// @throws std::invalid_argument if a_max == a_min
double scarlet_step_length(const StepEvent& step, double K);

/// Calibration output for the Scarlet length constant.
struct ScarletCalibration {
  double k = 0.0;
  int walks_used = 0;
  std::vector<std::string> warnings;
};

/// @brief Coarse-to-fine grid search for detector thresholds.
///
/// Each walk is searched individually for the thresholds that best
/// reproduce its true step count (matched detections minus false
/// positives, ties broken toward a lower pos_low); the per-walk winners
/// are then averaged component-wise.
/// @param walks  every record must carry ground truth with step boundaries
/// @throws std::invalid_argument if walks is empty or truth is missing
FsmThresholds calibrate_thresholds(std::span<const WalkRecord> walks,
                                   const StepLimits& limits = {});

/// @brief Averages per-walk K = declared_distance / sum of step ratios.
///
/// Walks where no step is detected are excluded with a warning; throws
/// NumericalError if every walk is excluded.
/// @param walks  every record must carry a declared distance
ScarletCalibration calibrate_scarlet_k(std::span<const WalkRecord> walks,
                                       const FsmThresholds& thr,
                                       const StepLimits& limits = {});

}  // namespace gaitkal
