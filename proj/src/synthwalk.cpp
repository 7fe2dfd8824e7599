#include "gaitkal/synthwalk.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "gaitkal/config.hpp"
#include "gaitkal/orientation.hpp"
#include "gaitkal/strapdown.hpp"
#include "gaitkal/walk_io.hpp"

namespace gaitkal {
namespace {

constexpr double kGravity = 9.81;
constexpr double kMinPeriod = 0.3;  // plausible gait band, seconds
constexpr double kMaxPeriod = 1.0;

struct Timeline {
  std::vector<Eigen::Index> bounds;  ///< step starts plus final step end
  std::vector<double> periods;       ///< quantized to the sample grid
  Eigen::Index decel_samples = 0;
  Eigen::Index rest_samples = 0;
  Eigen::Index total = 0;  ///< sample count including the stop tail
};

Timeline build_timeline(const GaitProfile& profile, std::mt19937_64& rng) {
  const double dt = 1.0 / profile.sample_rate;
  int n_steps = profile.n_steps;
  if (profile.step_count_jitter > 0.0) {
    std::normal_distribution<double> count(static_cast<double>(n_steps),
                                           profile.step_count_jitter);
    n_steps = std::max(1, static_cast<int>(std::lround(count(rng))));
  }
  std::normal_distribution<double> period(profile.step_period_mean,
                                          profile.step_period_jitter);
  Timeline tl;
  tl.bounds.push_back(0);
  for (int k = 0; k < n_steps; ++k) {
    double T = profile.step_period_jitter > 0.0 ? period(rng)
                                                : profile.step_period_mean;
    T = std::clamp(T, kMinPeriod, kMaxPeriod);
    const auto n = std::max<Eigen::Index>(2, std::llround(T / dt));
    tl.periods.push_back(static_cast<double>(n) * dt);
    tl.bounds.push_back(tl.bounds.back() + n);
  }
  tl.decel_samples = std::llround(profile.stop_decel_s / dt);
  tl.rest_samples = std::llround(profile.stop_rest_s / dt);
  tl.total = tl.bounds.back() + tl.decel_samples + tl.rest_samples + 1;
  return tl;
}

}  // namespace

SensorErrorModel SensorErrorModel::none() {
  SensorErrorModel e;
  e.acc_bias_lo = e.acc_bias_hi = 0.0;
  e.acc_noise_std = 0.0;
  e.gyro_bias = e.gyro_noise_std = 0.0;
  e.gravity_bias = e.gravity_noise_std = 0.0;
  e.tilt_sway_amplitude = e.tilt_sway_freq_hz = 0.0;
  e.mount_pitch_max = e.mount_yaw_max = 0.0;
  return e;
}

void validate_profile(const GaitProfile& profile) {
  auto fail = [](const std::string& what) { throw ConfigError("profile: " + what); };
  if (profile.step_period_mean < kMinPeriod ||
      profile.step_period_mean > kMaxPeriod)
    fail("step_period_mean outside [0.3, 1.0] s");
  if (profile.step_period_jitter < 0.0 || profile.step_period_jitter > 0.2)
    fail("step_period_jitter outside [0, 0.2] s");
  if (profile.n_steps < 1) fail("n_steps must be >= 1");
  if (profile.step_count_jitter < 0.0 || profile.step_count_jitter > 20.0)
    fail("step_count_jitter outside [0, 20]");
  if (profile.step_amplitude_jitter < 0.0 ||
      profile.step_amplitude_jitter > 1.0)
    fail("step_amplitude_jitter outside [0, 1]");
  if (!(profile.walk_distance > 0.0)) fail("walk_distance must be > 0");
  if (profile.sample_rate < 20.0 || profile.sample_rate > 1000.0)
    fail("sample_rate outside [20, 1000] Hz");
  if (profile.vertical_accel_amplitude < 0.0)
    fail("vertical_accel_amplitude must be >= 0");
  if (profile.stop_decel_s < 0.0 || profile.stop_rest_s < 0.0)
    fail("stop durations must be >= 0");
  if (!(mean_model_speed(profile.truth_waveform, profile.step_period_mean) >
        0.0))
    fail("truth waveform must have positive mean speed");
}

void validate_errors(const SensorErrorModel& e) {
  auto fail = [](const std::string& what) { throw ConfigError("errors: " + what); };
  if (e.acc_bias_lo < 0.0 || e.acc_bias_hi < e.acc_bias_lo)
    fail("need 0 <= acc_bias_lo <= acc_bias_hi");
  if (e.acc_noise_std < 0.0 || e.gyro_noise_std < 0.0 ||
      e.gravity_noise_std < 0.0)
    fail("noise stds must be >= 0");
  if (e.gyro_bias < 0.0 || e.gravity_bias < 0.0) fail("biases must be >= 0");
  if (e.tilt_sway_amplitude < 0.0 || e.tilt_sway_freq_hz < 0.0)
    fail("sway parameters must be >= 0");
  if (e.mount_pitch_max < 0.0 || e.mount_yaw_max < 0.0)
    fail("mount angle ranges must be >= 0");
}

GeneratedWalk generate_full(const GaitProfile& profile,
                            const SensorErrorModel& errs, std::uint64_t seed) {
  validate_profile(profile);
  validate_errors(errs);

  std::mt19937_64 rng(seed);
  const double dt = 1.0 / profile.sample_rate;
  const Timeline tl = build_timeline(profile, rng);
  const VelocityModel& wave = profile.truth_waveform;
  const int n_steps = static_cast<int>(tl.periods.size());

  // Per-step swing amplitudes scale the oscillatory term only, so every
  // acceleration statistic scales with them while the baseline speed stays.
  std::vector<double> amps(n_steps, 1.0);
  if (profile.step_amplitude_jitter > 0.0) {
    std::normal_distribution<double> amp(1.0, profile.step_amplitude_jitter);
    for (double& a : amps) a = std::clamp(amp(rng), 0.3, 2.0);
  }
  auto step_wave = [&wave](double amp) {
    VelocityModel w = wave;
    std::visit(
        [amp](auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, GaussianModel>)
            m.K *= amp;
          else
            m.a *= amp;
        },
        w);
    return w;
  };

  // Unscaled truth speed and its piecewise-analytic derivative. Junction
  // samples (step boundaries, stop-ramp ends) get the mean of the adjacent
  // pieces' slopes; see the header contract.
  Eigen::VectorXd t(tl.total), u(tl.total), du(tl.total);
  for (Eigen::Index i = 0; i < tl.total; ++i)
    t[i] = static_cast<double>(i) * dt;

  for (int k = 0; k < n_steps; ++k) {
    const double T = tl.periods[k];
    const VelocityModel wk = step_wave(amps[k]);
    for (Eigen::Index i = tl.bounds[k]; i < tl.bounds[k + 1]; ++i) {
      const double phase = static_cast<double>(i - tl.bounds[k]) * dt;
      u[i] = model_velocity(wk, phase, T);
      du[i] = model_accel(wk, phase, T);
    }
  }
  const Eigen::Index walk_end = tl.bounds.back();
  const double T_last = tl.periods.back();
  const VelocityModel wave_last = step_wave(amps.back());
  u[walk_end] = model_velocity(wave_last, T_last, T_last);
  du[walk_end] = model_accel(wave_last, T_last, T_last);
  for (int k = 1; k < n_steps; ++k)
    du[tl.bounds[k]] = 0.5 * (model_accel(step_wave(amps[k - 1]),
                                          tl.periods[k - 1],
                                          tl.periods[k - 1]) +
                              model_accel(step_wave(amps[k]), 0.0,
                                          tl.periods[k]));

  const Eigen::Index D = tl.decel_samples;
  const double ramp_slope =
      D > 0 ? -u[walk_end] / (static_cast<double>(D) * dt) : 0.0;
  for (Eigen::Index j = 1; j <= D; ++j) {
    u[walk_end + j] =
        u[walk_end] * static_cast<double>(D - j) / static_cast<double>(D);
    du[walk_end + j] = ramp_slope;
  }
  for (Eigen::Index i = walk_end + D + 1; i < tl.total; ++i) {
    u[i] = 0.0;
    du[i] = 0.0;
  }
  if (tl.total - 1 > walk_end) {
    du[walk_end] =
        0.5 * (model_accel(wave_last, T_last, T_last) + ramp_slope);
    du[walk_end + D] = 0.5 * (ramp_slope + 0.0);
  }

  // Scale so the trapezoid integral of truth speed is exactly the declared
  // distance; the same factor applied to the waveform gives the model that
  // generated the walk.
  const Eigen::VectorXd p_unscaled = integrate_trapezoid(t, u, 0.0);
  const double raw_distance = p_unscaled[tl.total - 1];
  if (!(raw_distance > 0.0))
    throw NumericalError("generate: truth waveform integrates to <= 0");
  const double scale = profile.walk_distance / raw_distance;

  GroundTruth truth;
  truth.t = t;
  truth.true_v = scale * u;
  truth.true_p = integrate_trapezoid(t, truth.true_v, 0.0);
  truth.step_boundaries.assign(tl.bounds.begin(), tl.bounds.end() - 1);
  truth.step_boundaries.push_back(tl.total - 1);

  // Mount misalignment, pitch sway, and per-walk biases. Draw order is part
  // of the determinism contract (header).
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform_pm = [&](double amp) { return amp * (2.0 * unit(rng) - 1.0); };
  const double mount_pitch = uniform_pm(errs.mount_pitch_max);
  const double mount_yaw = uniform_pm(errs.mount_yaw_max);
  const double sway_phase = 2.0 * std::numbers::pi * unit(rng);

  Vec3 acc_bias, gravity_bias, gyro_bias;
  for (int axis = 0; axis < 3; ++axis) {
    const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
    const double mag =
        errs.acc_bias_lo + (errs.acc_bias_hi - errs.acc_bias_lo) * unit(rng);
    acc_bias[axis] = sign * mag;
  }
  for (int axis = 0; axis < 3; ++axis)
    gravity_bias[axis] = uniform_pm(errs.gravity_bias);
  for (int axis = 0; axis < 3; ++axis)
    gyro_bias[axis] = uniform_pm(errs.gyro_bias);

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto noise3 = [&](double std_dev) {
    return Vec3(std_dev * gauss(rng), std_dev * gauss(rng),
                std_dev * gauss(rng));
  };

  const double sway_w = 2.0 * std::numbers::pi * errs.tilt_sway_freq_hz;
  const Vec3 gravity_nav(0.0, -kGravity, 0.0);

  WalkRecord record;
  record.label = "walk-" + std::to_string(seed);
  record.declared_distance = profile.walk_distance;
  record.seed = seed;
  record.stream.nominal_rate = profile.sample_rate;
  record.stream.samples.resize(tl.total);

  int step_k = 0;
  for (Eigen::Index i = 0; i < tl.total; ++i) {
    double vert = 0.0;
    if (i <= walk_end && profile.vertical_accel_amplitude > 0.0) {
      while (step_k + 1 < n_steps && i >= tl.bounds[step_k + 1]) ++step_k;
      const double phase = static_cast<double>(i - tl.bounds[step_k]) * dt;
      vert = profile.vertical_accel_amplitude *
             std::sin(2.0 * std::numbers::pi * phase / tl.periods[step_k]);
    }
    const Vec3 acc_nav(0.0, vert, scale * du[i]);

    EulerAngles angles;
    angles.pitch = mount_pitch + errs.tilt_sway_amplitude *
                                     std::sin(sway_w * t[i] + sway_phase);
    angles.yaw = mount_yaw;
    const Eigen::Matrix3d to_phone = nav_rotation(angles).transpose();
    const double pitch_rate = errs.tilt_sway_amplitude * sway_w *
                              std::cos(sway_w * t[i] + sway_phase);

    ImuSample& s = record.stream.samples[i];
    s.t = t[i];
    s.acc = to_phone * acc_nav + acc_bias + noise3(errs.acc_noise_std);
    // Pitch sways about the phone x axis; constant yaw contributes no rate.
    s.gyro =
        Vec3(pitch_rate, 0.0, 0.0) + gyro_bias + noise3(errs.gyro_noise_std);
    s.gravity =
        to_phone * gravity_nav + gravity_bias + noise3(errs.gravity_noise_std);
  }
  record.truth = std::move(truth);

  GeneratedWalk out;
  out.record = std::move(record);
  out.truth_model = scale_speed(wave, scale);
  out.periods = tl.periods;
  out.scale = scale;
  return out;
}

WalkRecord generate(const GaitProfile& profile, const SensorErrorModel& errs,
                    std::uint64_t seed) {
  return generate_full(profile, errs, seed).record;
}

Eigen::VectorXd differentiate_position(const Eigen::VectorXd& p,
                                       const Eigen::VectorXd& t) {
  const Eigen::Index n = p.size();
  if (n != t.size())
    throw std::invalid_argument("differentiate_position: size mismatch");
  if (n < 3)
    throw std::invalid_argument("differentiate_position: need >= 3 samples");

  Eigen::VectorXd v(n);
  v[0] = (p[1] - p[0]) / (t[1] - t[0]);
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    v[i] = (p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1]);
  v[n - 1] = (p[n - 1] - p[n - 2]) / (t[n - 1] - t[n - 2]);
  return v;
}

std::filesystem::path write_walk_files(const std::filesystem::path& dir,
                                       const GeneratedWalk& walk,
                                       const GaitProfile& profile,
                                       const SensorErrorModel& errs,
                                       std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  const auto base = dir / walk.record.label;

  auto csv_path = base;
  csv_path += ".csv";
  write_walk_csv(csv_path, walk.record.stream);

  auto truth_path = base;
  truth_path += ".truth.csv";
  write_truth_csv(truth_path, *walk.record.truth);

  nlohmann::json meta;
  meta["label"] = walk.record.label;
  meta["seed"] = seed;
  meta["rng_algorithm"] = "mt19937_64";
  meta["declared_distance_m"] = profile.walk_distance;
  meta["profile"] = profile_to_json(profile);
  meta["errors"] = errors_to_json(errs);
  meta["truth_model"] = model_to_json(walk.truth_model);
  meta["step_boundaries"] = walk.record.truth->step_boundaries;

  auto meta_path = base;
  meta_path += ".meta.json";
  std::ofstream out(meta_path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + meta_path.string());
  out << meta.dump(2) << '\n';
  return csv_path;
}

}  // namespace gaitkal
