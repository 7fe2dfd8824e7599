#pragma once

#include <span>
#include <string_view>
#include <variant>

#include "gaitkal/stepper.hpp"
#include "gaitkal/types.hpp"

namespace gaitkal {

struct FilterConfig;  // fusion.hpp

/// Parametric within-step velocity waveforms. Each maps elapsed time since
/// step start (t in [0, T]) to walking speed for a step of period T.
///
/// Gaussian:   V(t) = A + (K/T) * exp(-(t - a*T)^2 / (2*(b*T)^2))
/// Sinusoidal: V(t) = K*T + a * sin(2*pi*t/T)
/// Sawtooth:   V(t) = K*T + a * saw(2*pi*t/T, b)
///
/// saw(x, b) is the asymmetric unit triangle wave: rising from -1 to +1 over
/// the first fraction b of the period, falling back to -1 over the rest.

struct GaussianModel {
  double A = 0.9;   ///< m/s, baseline speed
  double K = 1.0;   ///< m, bump area scale (peak height is K/T)
  double a = 0.4;   ///< peak position as fraction of the period
  double b = 0.15;  ///< bump width (std dev) as fraction of the period
};

struct SinusoidalModel {
  double K = 1.29;  ///< 1/s, mean speed per unit period
  double a = 0.25;  ///< m/s, oscillation amplitude
};

struct SawtoothModel {
  double K = 1.67;  ///< 1/s, mean speed per unit period
  double a = 0.2;   ///< m/s, oscillation amplitude
  double b = 0.25;  ///< rise fraction (peak position within the period)
};

using VelocityModel =
    std::variant<GaussianModel, SinusoidalModel, SawtoothModel>;

/// @brief Evaluates a model at elapsed time t within a step of period T.
/// @throws std::invalid_argument if T <= 0 or t outside [0, T]
double model_velocity(const VelocityModel& model, double t, double T);

/// @brief Average of model_velocity over [0, T] (trapezoid, 1000-point grid).
double mean_model_speed(const VelocityModel& model, double T);

/// @brief Analytic dV/dt at elapsed time t within a step of period T.
///
/// At the sawtooth kink (within 1e-9 of the rise fraction) the left and
/// right slopes are averaged so sampled accelerations integrate back to the
/// waveform without a systematic one-sided bias.
double model_accel(const VelocityModel& model, double t, double T);

/// "gaussian" | "sin" | "saw"
std::string_view model_name(const VelocityModel& model);

/// @throws ConfigError for an unknown tag
VelocityModel make_model(std::string_view tag);

/// Same model shape with the speed scale K replaced.
VelocityModel with_scale(VelocityModel model, double K);

double model_scale(const VelocityModel& model);

/// Multiplies the whole waveform by a factor (baseline and oscillation
/// amplitudes alike); used by the walk generator to hit a target distance.
VelocityModel scale_speed(VelocityModel model, double factor);

/// Options for the per-walk 1-D speed-scale search.
struct ModelCalibration {
  double k_lo = 0.1;
  double k_hi = 10.0;
  double tol = 1e-4;        ///< bracket width at convergence
  int max_iter = 200;
  double correction_pct = 10.0;  ///< pct used when evaluating a candidate K
};

/// @brief Calibrates a model's speed scale K on walks with known distance.
///
/// For each walk, golden-section search over K in [k_lo, k_hi] minimizes the
/// absolute endpoint error of the fully corrected pipeline (Kalman mode at
/// opts.correction_pct); per-walk minimizers are averaged. Shape parameters
/// other than K are held fixed at the template's values.
/// @throws NumericalError if the search fails to converge on any walk
double calibrate_model_k(std::span<const WalkRecord> walks,
                         const VelocityModel& shape, const FsmThresholds& thr,
                         const FilterConfig& filter,
                         const StepLimits& limits = {},
                         const ModelCalibration& opts = {});

/// calibrate_model_k specialized to the Gaussian waveform.
double calibrate_gaussian_k(std::span<const WalkRecord> walks,
                            const GaussianModel& fixed,
                            const FsmThresholds& thr,
                            const FilterConfig& filter,
                            const StepLimits& limits = {},
                            const ModelCalibration& opts = {});

}  // namespace gaitkal
