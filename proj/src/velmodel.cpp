#include "gaitkal/velmodel.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "gaitkal/fusion.hpp"

namespace gaitkal {

namespace {

// Asymmetric unit triangle over phase x in [0, 2*pi]: -1 at 0, +1 at
// 2*pi*b, back to -1 at 2*pi.
double saw(double x, double b) {
  const double frac = x / (2.0 * std::numbers::pi);
  if (frac <= b) return b > 0.0 ? -1.0 + 2.0 * frac / b : 1.0;
  return 1.0 - 2.0 * (frac - b) / (1.0 - b);
}

}  // namespace

double model_velocity(const VelocityModel& model, double t, double T) {
  if (T <= 0.0)
    throw std::invalid_argument("model_velocity: step period must be > 0");
  if (t < 0.0 || t > T)
    throw std::invalid_argument("model_velocity: t outside [0, T]");

  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianModel>) {
          const double sigma = m.b * T;
          const double d = t - m.a * T;
          return m.A + (m.K / T) * std::exp(-d * d / (2.0 * sigma * sigma));
        } else if constexpr (std::is_same_v<M, SinusoidalModel>) {
          return m.K * T + m.a * std::sin(2.0 * std::numbers::pi * t / T);
        } else {
          return m.K * T + m.a * saw(2.0 * std::numbers::pi * t / T, m.b);
        }
      },
      model);
}

double mean_model_speed(const VelocityModel& model, double T) {
  constexpr int kGridPoints = 1000;
  const double h = T / (kGridPoints - 1);
  double sum = 0.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double t = std::min(i * h, T);
    const double w = (i == 0 || i == kGridPoints - 1) ? 0.5 : 1.0;
    sum += w * model_velocity(model, t, T);
  }
  return sum * h / T;
}

double model_accel(const VelocityModel& model, double t, double T) {
  if (T <= 0.0)
    throw std::invalid_argument("model_accel: step period must be > 0");
  if (t < 0.0 || t > T)
    throw std::invalid_argument("model_accel: t outside [0, T]");

  return std::visit(
      [&](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, GaussianModel>) {
          const double sigma = m.b * T;
          const double d = t - m.a * T;
          return (m.K / T) * std::exp(-d * d / (2.0 * sigma * sigma)) *
                 (-d / (sigma * sigma));
        } else if constexpr (std::is_same_v<M, SinusoidalModel>) {
          const double w = 2.0 * std::numbers::pi / T;
          return m.a * w * std::cos(w * t);
        } else {
          const double frac = t / T;
          const double rise = m.b > 0.0 ? 2.0 * m.a / (m.b * T) : 0.0;
          const double fall = m.b < 1.0 ? -2.0 * m.a / ((1.0 - m.b) * T) : 0.0;
          if (std::abs(frac - m.b) < 1e-9) return 0.5 * (rise + fall);
          return frac < m.b ? rise : fall;
        }
      },
      model);
}

std::string_view model_name(const VelocityModel& model) {
  switch (model.index()) {
    case 0: return "gaussian";
    case 1: return "sin";
    default: return "saw";
  }
}

VelocityModel make_model(std::string_view tag) {
  if (tag == "gaussian") return GaussianModel{};
  if (tag == "sin") return SinusoidalModel{};
  if (tag == "saw") return SawtoothModel{};
  throw ConfigError("unknown velocity model tag '" + std::string(tag) +
                    "' (expected gaussian|sin|saw)");
}

VelocityModel with_scale(VelocityModel model, double K) {
  std::visit([K](auto& m) { m.K = K; }, model);
  return model;
}

double model_scale(const VelocityModel& model) {
  return std::visit([](const auto& m) { return m.K; }, model);
}

VelocityModel scale_speed(VelocityModel model, double factor) {
  std::visit(
      [factor](auto& m) {
        using M = std::decay_t<decltype(m)>;
        m.K *= factor;
        if constexpr (std::is_same_v<M, GaussianModel>)
          m.A *= factor;
        else
          m.a *= factor;
      },
      model);
  return model;
}

namespace {

// Golden-section minimization; the endpoint error is effectively monotone
// around a single best K, so a unimodal bracket search is enough.
double golden_section(double lo, double hi, double tol, int max_iter,
                      const std::function<double(double)>& f) {
  constexpr double invphi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter; ++it) {
    if (!std::isfinite(f1) || !std::isfinite(f2))
      throw NumericalError(
          "calibrate_model_k: objective became non-finite during search");
    if (b - a < tol) return 0.5 * (a + b);
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  throw NumericalError("calibrate_model_k: search did not converge");
}

}  // namespace

double calibrate_model_k(std::span<const WalkRecord> walks,
                         const VelocityModel& shape, const FsmThresholds& thr,
                         const FilterConfig& filter, const StepLimits& limits,
                         const ModelCalibration& opts) {
  if (walks.empty())
    throw std::invalid_argument("calibrate_model_k: no walks given");

  double k_sum = 0.0;
  for (const WalkRecord& walk : walks) {
    if (!walk.declared_distance)
      throw std::invalid_argument(
          "calibrate_model_k: every walk needs a declared distance");
    const double target = *walk.declared_distance;
    RunOptions run;
    if (walk.truth && walk.truth->true_v.size() > 0)
      run.v0 = walk.truth->true_v[0];
    auto objective = [&](double k) {
      const auto res =
          run_ins_corrected(walk, with_scale(shape, k), thr, filter,
                            opts.correction_pct, CorrectionMode::kalman, run,
                            limits);
      return std::abs(res.trace.p[res.trace.p.size() - 1] - target);
    };
    k_sum += golden_section(opts.k_lo, opts.k_hi, opts.tol, opts.max_iter,
                            objective);
  }
  return k_sum / static_cast<double>(walks.size());
}

double calibrate_gaussian_k(std::span<const WalkRecord> walks,
                            const GaussianModel& fixed,
                            const FsmThresholds& thr,
                            const FilterConfig& filter,
                            const StepLimits& limits,
                            const ModelCalibration& opts) {
  return calibrate_model_k(walks, VelocityModel(fixed), thr, filter, limits,
                           opts);
}

}  // namespace gaitkal
