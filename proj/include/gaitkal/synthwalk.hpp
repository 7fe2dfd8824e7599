#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "gaitkal/types.hpp"
#include "gaitkal/velmodel.hpp"

namespace gaitkal {

/// Synthetic walk generator. Stands in for instrumented recordings: it
/// produces a phone-frame sensor stream together with exact walking-direction
/// ground truth, so pipeline error can be measured without a treadmill.
///
/// Construction, in order:
///  1. Per-step periods are drawn around step_period_mean, clamped to the
///     plausible gait band [0.3, 1.0] s and quantized to whole samples so
///     step boundaries land exactly on the time grid.
///  2. The truth waveform is tiled over the steps, giving an unscaled speed
///     profile; a linear ramp to rest over stop_decel_s plus stop_rest_s of
///     standstill is appended so the final step ends inside the stream.
///  3. The profile is rescaled so the trapezoid-integrated distance equals
///     walk_distance exactly; the same scale applied to the waveform yields
///     the model that actually generated the data (truth_model below).
///  4. Truth acceleration is the analytic waveform derivative; at samples
///     where two pieces meet the left and right derivatives are averaged,
///     which keeps trapezoid re-integration faithful to the truth speeds.
///  5. The phone is given a slowly swaying pitch and a fixed mounting
///     misalignment, and accelerometer / gyroscope / gravity channels are
///     corrupted per SensorErrorModel.
///
/// Everything is drawn from one mt19937_64 in a fixed order (step count,
/// periods, step amplitudes, mount angles, sway phase, biases, then
/// per-sample noise), so a seed pins the walk byte for byte. Reordering
/// draws is a compatibility break.

struct GaitProfile {
  double step_period_mean = 0.5;   ///< s
  double step_period_jitter = 0.02;  ///< s, std dev of per-step periods
  int n_steps = 80;  ///< mean step count; the distance constraint then sets
                     ///< the mean step length
  /// Std dev of the per-walk step count (same person, same distance,
  /// different day). Off by default: it shifts every step's true speed
  /// together, which penalizes all model-based methods identically and
  /// mostly measures the protocol, not the estimator.
  double step_count_jitter = 0.0;
  /// Relative std dev of each step's swing amplitude (the oscillatory part
  /// of the waveform; the baseline is untouched). Varies true step length
  /// while leaving amplitude-ratio statistics unchanged, which is exactly
  /// the variation accelerometer step-length formulas cannot see.
  double step_amplitude_jitter = 0.25;
  /// Within-step speed waveform before distance scaling. The default is a
  /// symmetric bump (peak mid-step, wide shoulders) so speed is continuous
  /// across step boundaries; correction models need not match this shape.
  VelocityModel truth_waveform = GaussianModel{0.9, 0.45, 0.5, 0.22};
  double walk_distance = 40.0;  ///< m, exact truth endpoint
  double sample_rate = 100.0;   ///< Hz
  double vertical_accel_amplitude = 1.5;  ///< m/s^2 bounce, zero-mean per step
  double stop_decel_s = 0.25;  ///< ramp-to-rest duration after the last step
  double stop_rest_s = 0.2;    ///< standstill appended after the ramp
};

/// @throws ConfigError describing the first violated bound
void validate_profile(const GaitProfile& profile);

struct SensorErrorModel {
  // Accelerometer bias magnitude range, m/s^2; each axis draws a magnitude
  // in [lo, hi] with a random sign. This is the dominant drift driver.
  double acc_bias_lo = 0.10;
  double acc_bias_hi = 0.28;
  double acc_noise_std = 0.15;     ///< m/s^2 per axis per sample
  double gyro_bias = 0.01;         ///< rad/s, per-axis uniform in [-b, b]
  double gyro_noise_std = 0.02;    ///< rad/s
  double gravity_bias = 0.03;      ///< m/s^2, per-axis uniform in [-b, b]
  double gravity_noise_std = 0.08; ///< m/s^2
  double tilt_sway_amplitude = 0.05;  ///< rad, pitch oscillation
  double tilt_sway_freq_hz = 0.35;
  double mount_pitch_max = 0.08;  ///< rad, fixed misalignment, uniform
  double mount_yaw_max = 0.08;

  /// All-zero corruption: measurements are the exact truth signals.
  static SensorErrorModel none();
};

/// @throws ConfigError for negative ranges or hi < lo
void validate_errors(const SensorErrorModel& errs);

struct GeneratedWalk {
  WalkRecord record;
  /// truth_waveform with the distance scale folded in; feeding this to the
  /// corrector makes the model error exactly zero.
  VelocityModel truth_model;
  std::vector<double> periods;  ///< quantized per-step periods, s
  double scale;                 ///< factor applied to the waveform
};

GeneratedWalk generate_full(const GaitProfile& profile,
                            const SensorErrorModel& errs, std::uint64_t seed);

/// generate_full without the generator-internal extras.
WalkRecord generate(const GaitProfile& profile, const SensorErrorModel& errs,
                    std::uint64_t seed);

/// @brief Central-difference velocity from positions (one-sided at the ends).
/// Interior samples are exact for quadratic trajectories on a uniform grid.
Eigen::VectorXd differentiate_position(const Eigen::VectorXd& p,
                                       const Eigen::VectorXd& t);

/// @brief Writes <label>.csv, <label>.truth.csv and <label>.meta.json into
/// dir and returns the walk CSV path.
std::filesystem::path write_walk_files(const std::filesystem::path& dir,
                                       const GeneratedWalk& walk,
                                       const GaitProfile& profile,
                                       const SensorErrorModel& errs,
                                       std::uint64_t seed);

}  // namespace gaitkal
