#include "gaitkal/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gaitkal/orientation.hpp"

namespace gaitkal {

namespace {

Eigen::Matrix4d transition(double dt) {
  Eigen::Matrix4d F = Eigen::Matrix4d::Identity();
  F(0, 1) = dt;  // d_p <- d_p + dt * d_v
  F(2, 3) = dt;  // d_theta <- d_theta + dt * d_omega
  return F;
}

Eigen::Matrix<double, 2, 4> measurement_matrix() {
  Eigen::Matrix<double, 2, 4> H = Eigen::Matrix<double, 2, 4>::Zero();
  H(0, 1) = 1.0;  // d_v
  H(1, 2) = 1.0;  // d_theta
  return H;
}

}  // namespace

std::pair<ErrorState, Covariance4> predict(const ErrorState& state,
                                           const Covariance4& P,
                                           const FilterConfig& cfg) {
  const Eigen::Matrix4d F = transition(cfg.dt);
  ErrorState next;
  next.x = F * state.x;
  Covariance4 P_next = F * P * F.transpose() + cfg.Q();
  return {next, P_next};
}

std::pair<ErrorState, Covariance4> update(const ErrorState& state,
                                          const Covariance4& P,
                                          const Eigen::Vector2d& measured_error,
                                          const FilterConfig& cfg) {
  const auto H = measurement_matrix();
  const Eigen::Matrix2d S = H * P * H.transpose() + cfg.R();

  // 2x2 inverse by hand so the singularity check is explicit.
  const double det = S(0, 0) * S(1, 1) - S(0, 1) * S(1, 0);
  const double scale = S.cwiseAbs().maxCoeff();
  if (!(std::abs(det) > 1e-300) || std::abs(det) < 1e-14 * scale * scale)
    throw NumericalError(
        "update: innovation covariance is singular (det = " +
        std::to_string(det) + "); check R and P");
  Eigen::Matrix2d S_inv;
  S_inv << S(1, 1), -S(0, 1), -S(1, 0), S(0, 0);
  S_inv /= det;

  const Eigen::Matrix<double, 4, 2> K = P * H.transpose() * S_inv;
  ErrorState next;
  next.x = state.x + K * (measured_error - H * state.x);
  Covariance4 P_next = (Covariance4::Identity() - K * H) * P;
  P_next = ((P_next + P_next.transpose()) / 2.0).eval();
  return {next, P_next};
}

double velocity_error_measurement(double ins_velocity,
                                  const VelocityModel& model, double t_in_step,
                                  double T) {
  return ins_velocity - model_velocity(model, t_in_step, T);
}

void apply_feedback(KinematicTrace& trace, Eigen::Index idx,
                    const ErrorState& state) {
  if (idx < 0 || idx >= trace.v.size())
    throw std::invalid_argument("apply_feedback: index out of range");
  trace.v[idx] -= state.d_v();
  trace.p[idx] -= state.d_p();
}

CorrectionSchedule build_schedule(std::span<const StepEvent> steps,
                                  double pct) {
  if (pct < 0.0 || pct > 100.0)
    throw std::invalid_argument(
        "build_schedule: correction pct must be in [0, 100]");

  CorrectionSchedule sched;
  sched.correction_pct = pct;
  sched.per_step.reserve(steps.size());
  for (const StepEvent& ev : steps) {
    const auto span_n = static_cast<double>(ev.end_idx - ev.start_idx);
    const auto count = static_cast<Eigen::Index>(
        std::floor(span_n * pct / 100.0));
    std::vector<Eigen::Index> idx;
    idx.reserve(static_cast<size_t>(count));
    for (Eigen::Index j = 0; j < count; ++j) {
      // Midpoint of the j-th of `count` equal subdivisions of the span.
      const double pos = (static_cast<double>(j) + 0.5) * span_n /
                         static_cast<double>(count);
      idx.push_back(ev.start_idx + static_cast<Eigen::Index>(pos));
    }
    sched.per_step.push_back(std::move(idx));
  }
  return sched;
}

InsRunResult run_ins_corrected(const WalkRecord& walk,
                               const VelocityModel& model,
                               const FsmThresholds& thr,
                               const FilterConfig& cfg, double pct,
                               CorrectionMode mode, const RunOptions& run,
                               const StepLimits& limits) {
  const auto nav = transform_stream(walk.stream);
  const Eigen::Index n = static_cast<Eigen::Index>(nav.size());

  InsRunResult res;
  res.trace.t.resize(n);
  res.trace.a.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    res.trace.t[i] = nav[static_cast<size_t>(i)].t;
    res.trace.a[i] = walking_component(nav[static_cast<size_t>(i)]);
  }
  const Eigen::VectorXd& t = res.trace.t;
  const Eigen::VectorXd& a = res.trace.a;

  res.steps = detect_steps(a, t, thr, limits);
  if (res.steps.empty())
    res.warnings.push_back(
        "no steps detected; running uncorrected strapdown only");

  const CorrectionSchedule sched = build_schedule(res.steps, pct);

  // sample index -> step index, for scheduled samples only
  std::vector<Eigen::Index> corr_step(static_cast<size_t>(n), -1);
  for (size_t k = 0; k < sched.per_step.size(); ++k)
    for (Eigen::Index i : sched.per_step[k])
      corr_step[static_cast<size_t>(i)] = static_cast<Eigen::Index>(k);

  res.v_raw = integrate_trapezoid(t, a, run.v0);

  Eigen::VectorXd& v = res.trace.v;
  Eigen::VectorXd& p = res.trace.p;
  v.resize(n);
  p.resize(n);
  v[0] = run.v0;
  p[0] = run.p0;

  ErrorState err;
  Covariance4 P = cfg.P0();

  for (Eigen::Index i = 1; i < n; ++i) {
    v[i] = trapezoid_step(v[i - 1], t[i - 1], t[i], a[i - 1], a[i]);
    p[i] = trapezoid_step(p[i - 1], t[i - 1], t[i], v[i - 1], v[i]);

    if (mode == CorrectionMode::kalman) std::tie(err, P) = predict(err, P, cfg);

    const Eigen::Index k = corr_step[static_cast<size_t>(i)];
    if (k < 0) continue;

    // Step context: elapsed time in the live step, reference period from
    // the previous step (the live one hasn't ended yet). The phase wraps
    // if the live step outlasts the reference period.
    const StepEvent& step = res.steps[static_cast<size_t>(k)];
    const double T_ref =
        k > 0 ? res.steps[static_cast<size_t>(k - 1)].period_T
              : cfg.default_step_period;
    double phase = std::fmod(t[i] - t[step.start_idx], T_ref);
    if (phase < 0.0) phase = 0.0;
    const double v_model = model_velocity(model, phase, T_ref);

    if (mode == CorrectionMode::kalman) {
      const Eigen::Vector2d z(v[i] - v_model, 0.0);
      std::tie(err, P) = update(err, P, z, cfg);
      apply_feedback(res.trace, i, err);
      res.corrections.push_back(
          {i, t[i], z[0], err.d_v(), err.d_p()});
      err.x.setZero();
    } else {
      res.corrections.push_back({i, t[i], v[i] - v_model, v[i] - v_model, 0.0});
      v[i] = v_model;
    }
  }
  return res;
}

}  // namespace gaitkal
