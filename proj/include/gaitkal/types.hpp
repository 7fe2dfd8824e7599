#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitkal {

using Vec3 = Eigen::Vector3d;

/// Thrown when a text input (walk log, truth sidecar, config) cannot be
/// parsed. Messages carry the 1-based line number of the offending row.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when parsed data violates a structural requirement
/// (non-monotone timestamps, missing sidecar fields, truth/stream mismatch).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed configuration (bad JSON, out-of-range parameters,
/// calibration/test set overlap).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical routine fails (singular innovation covariance,
/// non-convergent 1-D search).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One IMU sample: linear acceleration (gravity already removed), angular
/// rate, and the gravity vector, all in the phone frame.
struct ImuSample {
  double t = 0.0;  ///< seconds from stream start
  Vec3 acc = Vec3::Zero();      ///< m/s^2, linear acceleration
  Vec3 gyro = Vec3::Zero();     ///< rad/s
  Vec3 gravity = Vec3::Zero();  ///< m/s^2, low-passed gravity direction
};

/// A time-ordered sensor recording. Timestamps are strictly increasing;
/// gaps beyond +-20% of the nominal period are reported by validate_stream
/// rather than rejected here.
struct SensorStream {
  std::vector<ImuSample> samples;
  double nominal_rate = 100.0;  ///< Hz
};

/// Ground truth for a synthetic walk, sampled on the same grid as the
/// sensor stream. step_boundaries holds the sample index of each step
/// start plus the final sample index.
struct GroundTruth {
  Eigen::VectorXd t;
  Eigen::VectorXd true_v;  ///< walking-direction velocity, m/s
  Eigen::VectorXd true_p;  ///< walking-direction position, m
  std::vector<Eigen::Index> step_boundaries;
};

/// A walk plus everything known about it. Real recordings carry only the
/// stream and a declared distance; synthetic walks also carry truth.
struct WalkRecord {
  SensorStream stream;
  std::optional<GroundTruth> truth;
  std::string label;
  std::optional<double> declared_distance;  ///< metres, from the walk protocol
  std::optional<std::uint64_t> seed;        ///< generator seed, if synthetic
};

}  // namespace gaitkal
