#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaitkal/stepper.hpp"
#include "gaitkal/strapdown.hpp"
#include "gaitkal/types.hpp"
#include "gaitkal/velmodel.hpp"

namespace gaitkal {

/// Error-state complementary Kalman filter over the navigator's estimation
/// error x = [d_p, d_v, d_theta, d_omega] (position, velocity, heading,
/// heading-rate errors). Transition per sample of length dt:
///
///   d_p'     = d_p + dt * d_v
///   d_v'     = d_v
///   d_theta' = d_theta + dt * d_omega
///   d_omega' = d_omega
///
/// Measurements observe (d_v, d_theta): the velocity error comes from the
/// gait model, the heading error is fed as zero with a wide variance unless
/// a real heading reference is wired in. After each update the estimated
/// error is subtracted from the navigator and the state is zeroed; the
/// covariance carries over.
struct ErrorState {
  Eigen::Vector4d x = Eigen::Vector4d::Zero();

  double d_p() const { return x[0]; }
  double d_v() const { return x[1]; }
  double d_theta() const { return x[2]; }
  double d_omega() const { return x[3]; }
};

using Covariance4 = Eigen::Matrix4d;

struct FilterConfig {
  Eigen::Vector4d q_diag{1e-6, 1e-4, 1e-8, 1e-6};  ///< process noise / sample
  Eigen::Vector2d r_diag{0.05 * 0.05,
                         0.030461741978670857};  ///< (0.05 m/s)^2, (10 deg)^2
  double dt = 0.01;                              ///< s, sample period
  Eigen::Vector4d p0_diag = Eigen::Vector4d::Zero();  ///< initial covariance
  double default_step_period = 0.5;  ///< s, model T before the first step ends
  bool use_heading_measurement = false;  ///< reserved; zero measurement if off

  Covariance4 Q() const { return q_diag.asDiagonal(); }
  Eigen::Matrix2d R() const { return r_diag.asDiagonal(); }
  Covariance4 P0() const { return p0_diag.asDiagonal(); }
};

/// @brief Propagates error state and covariance one sample ahead.
/// P := F P F' + Q with F from the transition above.
std::pair<ErrorState, Covariance4> predict(const ErrorState& state,
                                           const Covariance4& P,
                                           const FilterConfig& cfg);

/// @brief Standard Kalman update with H selecting (d_v, d_theta).
///
/// K = P H' (H P H' + R)^-1; P := (I - K H) P, re-symmetrized.
/// @param measured_error  (velocity error, heading error)
/// @throws NumericalError if the innovation covariance is singular
std::pair<ErrorState, Covariance4> update(const ErrorState& state,
                                          const Covariance4& P,
                                          const Eigen::Vector2d& measured_error,
                                          const FilterConfig& cfg);

/// INS velocity minus model velocity at the given step phase.
double velocity_error_measurement(double ins_velocity,
                                  const VelocityModel& model, double t_in_step,
                                  double T);

/// @brief Subtracts the estimated position/velocity error at sample idx.
///
/// Subsequent integration resumes from the corrected values. The caller
/// zeroes the state afterwards.
void apply_feedback(KinematicTrace& trace, Eigen::Index idx,
                    const ErrorState& state);

/// Correction sample indices, one list per detected step. For a step
/// spanning N samples, floor(N * pct / 100) indices are placed at the
/// midpoints of equal subdivisions of the span, so gaps differ by at most
/// one sample.
struct CorrectionSchedule {
  double correction_pct = 0.0;
  std::vector<std::vector<Eigen::Index>> per_step;
};

/// @throws std::invalid_argument if pct outside [0, 100]
CorrectionSchedule build_schedule(std::span<const StepEvent> steps,
                                  double pct);

enum class CorrectionMode { kalman, naive };

/// One applied correction, for diagnostics.
struct CorrectionEvent {
  Eigen::Index idx = 0;
  double t = 0.0;
  double innovation_v = 0.0;  ///< measured velocity error fed to the filter
  double d_v = 0.0;           ///< estimated velocity error fed back
  double d_p = 0.0;           ///< estimated position error fed back
};

struct RunOptions {
  double v0 = 0.0;  ///< m/s, known initial walking velocity
  double p0 = 0.0;  ///< m, initial position
};

struct InsRunResult {
  KinematicTrace trace;       ///< corrected history
  Eigen::VectorXd v_raw;      ///< uncorrected velocity, for diagnostics
  std::vector<StepEvent> steps;
  std::vector<CorrectionEvent> corrections;
  std::vector<std::string> warnings;

  double endpoint() const { return trace.p[trace.p.size() - 1]; }
};

/// @brief Full correction pipeline over one walk.
///
/// Tilt-compensates the stream, detects steps, then integrates sample by
/// sample. kalman mode predicts every sample and runs update + feedback at
/// scheduled indices; naive mode overwrites velocity with the model value
/// there (no covariance, no position fix). The model's step context uses
/// the previous detected step's period (the live step's period is unknown
/// until it ends); the first step uses cfg.default_step_period. With
/// pct = 0 the result reproduces plain propagation bit for bit.
/// @throws std::invalid_argument for streams with fewer than 2 samples
InsRunResult run_ins_corrected(const WalkRecord& walk,
                               const VelocityModel& model,
                               const FsmThresholds& thr,
                               const FilterConfig& cfg, double pct,
                               CorrectionMode mode, const RunOptions& run = {},
                               const StepLimits& limits = {});

}  // namespace gaitkal
