#include "gaitkal/stepper.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gaitkal/orientation.hpp"

namespace gaitkal {

namespace {

enum class Phase { idle, rising, peak, falling, valley };

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  const auto k = static_cast<size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(k), v.end());
  return v[k];
}

}  // namespace

std::vector<StepEvent> detect_steps(
    const Eigen::Ref<const Eigen::VectorXd>& acc_walk,
    const Eigen::Ref<const Eigen::VectorXd>& t, const FsmThresholds& thr,
    const StepLimits& limits) {
  if (!thr.valid())
    throw std::invalid_argument(
        "detect_steps: thresholds must satisfy 0 < pos_low < pos_high and "
        "neg_high < neg_low <= 0");
  const Eigen::Index n = acc_walk.size();
  if (n < 2 || t.size() != n)
    throw std::invalid_argument(
        "detect_steps: need equal-length sequences of >= 2 samples");

  std::vector<StepEvent> steps;
  Phase phase = Phase::idle;
  Eigen::Index start = 0;

  for (Eigen::Index i = 0; i < n; ++i) {
    if (i > 0 && t[i] <= t[i - 1])
      throw std::invalid_argument(
          "detect_steps: timestamps must be strictly increasing");
    const double a = acc_walk[i];

    // A candidate that has been open longer than any plausible step is
    // abandoned; the same max-period rule that debounces completed steps.
    if (phase != Phase::idle && t[i] - t[start] > limits.max_period)
      phase = Phase::idle;

    // Checks run valley-first so a boundary sample that closes one step can
    // open the next one (consecutive steps share their boundary sample).
    if (phase == Phase::valley && a >= thr.neg_low) {
      const double period = t[i] - t[start];
      if (period >= limits.min_period && period <= limits.max_period) {
        StepEvent ev;
        ev.start_idx = start;
        ev.end_idx = i;
        ev.period_T = period;
        ev.a_max = acc_walk.segment(start, i - start + 1).maxCoeff();
        ev.a_min = acc_walk.segment(start, i - start + 1).minCoeff();
        ev.a_avg = acc_walk.segment(start, i - start + 1).mean();
        steps.push_back(ev);
      }
      phase = Phase::idle;
    }
    if (phase == Phase::falling) {
      if (a <= thr.neg_high)
        phase = Phase::valley;
      else if (a > thr.neg_low)
        phase = Phase::idle;  // negative lobe too shallow
    }
    if (phase == Phase::peak && a <= thr.neg_low) phase = Phase::falling;
    if (phase == Phase::rising) {
      if (a >= thr.pos_high)
        phase = Phase::peak;
      else if (a < thr.pos_low)
        phase = Phase::idle;  // rise fizzled below the entry threshold
    }
    if (phase == Phase::idle && a >= thr.pos_low) {
      phase = Phase::rising;
      start = i;
    }
  }
  // An unfinished trailing candidate produces no event.
  return steps;
}

double scarlet_step_length(const StepEvent& step, double K) {
  const double span = step.a_max - step.a_min;
  if (span <= 0.0)
    throw std::invalid_argument(
        "scarlet_step_length: step has degenerate acceleration span");
  return K * (step.a_avg - step.a_min) / span;
}

namespace {

struct ScoredThresholds {
  FsmThresholds thr;
  long score = std::numeric_limits<long>::min();
};

// Matched detections minus false positives against the true step intervals.
// A detection matches the true step containing its midpoint; each true step
// matches at most once.
long detection_score(const std::vector<StepEvent>& steps,
                     const std::vector<Eigen::Index>& boundaries) {
  if (boundaries.size() < 2) return 0;
  std::vector<char> taken(boundaries.size() - 1, 0);
  long matched = 0, false_pos = 0;
  for (const StepEvent& ev : steps) {
    const Eigen::Index mid = (ev.start_idx + ev.end_idx) / 2;
    auto it = std::upper_bound(boundaries.begin(), boundaries.end(), mid);
    if (it == boundaries.begin() || it == boundaries.end()) {
      ++false_pos;
      continue;
    }
    const size_t k = static_cast<size_t>(it - boundaries.begin()) - 1;
    if (!taken[k]) {
      taken[k] = 1;
      ++matched;
    } else {
      ++false_pos;
    }
  }
  return matched - false_pos;
}

// Deterministic preference among equal scores: lower entry thresholds win
// (the entry threshold is deliberately biased low), then lower peak ones.
bool prefer(const FsmThresholds& a, const FsmThresholds& b) {
  if (a.pos_low != b.pos_low) return a.pos_low < b.pos_low;
  if (a.neg_low != b.neg_low) return a.neg_low > b.neg_low;  // closer to 0
  if (a.pos_high != b.pos_high) return a.pos_high < b.pos_high;
  return a.neg_high > b.neg_high;
}

void consider(ScoredThresholds& best, const FsmThresholds& thr,
              const Eigen::VectorXd& w, const Eigen::VectorXd& t,
              const std::vector<Eigen::Index>& boundaries,
              const StepLimits& limits) {
  if (!thr.valid()) return;
  const long s = detection_score(detect_steps(w, t, thr, limits), boundaries);
  if (s > best.score || (s == best.score && prefer(thr, best.thr))) {
    best.score = s;
    best.thr = thr;
  }
}

FsmThresholds search_walk(const Eigen::VectorXd& w, const Eigen::VectorXd& t,
                          const std::vector<Eigen::Index>& boundaries,
                          const StepLimits& limits) {
  std::vector<double> pos, neg;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    (w[i] >= 0.0 ? pos : neg).push_back(w[i]);
  const double pos_ref = percentile(pos, 0.98);
  const double neg_ref = percentile(neg, 0.02);

  // Coarse stage: fractions of the signal's extreme quantiles.
  constexpr std::array low_f = {0.06, 0.12, 0.20, 0.30, 0.42};
  constexpr std::array high_f = {0.35, 0.50, 0.65, 0.80};
  ScoredThresholds best;
  for (double pl : low_f)
    for (double ph : high_f)
      for (double nl : low_f)
        for (double nh : high_f)
          consider(best,
                   FsmThresholds{pl * pos_ref, ph * pos_ref, nl * neg_ref,
                                 nh * neg_ref},
                   w, t, boundaries, limits);

  // Fine stage: local multiplicative refinement around the coarse winner.
  constexpr std::array refine = {0.75, 0.875, 1.0, 1.125, 1.25};
  const FsmThresholds coarse = best.thr;
  for (double fpl : refine)
    for (double fph : refine)
      for (double fnl : refine)
        for (double fnh : refine)
          consider(best,
                   FsmThresholds{fpl * coarse.pos_low, fph * coarse.pos_high,
                                 fnl * coarse.neg_low, fnh * coarse.neg_high},
                   w, t, boundaries, limits);
  return best.thr;
}

}  // namespace

FsmThresholds calibrate_thresholds(std::span<const WalkRecord> walks,
                                   const StepLimits& limits) {
  if (walks.empty())
    throw std::invalid_argument("calibrate_thresholds: no walks given");

  FsmThresholds sum{0, 0, 0, 0};
  for (const WalkRecord& walk : walks) {
    if (!walk.truth || walk.truth->step_boundaries.size() < 2)
      throw std::invalid_argument(
          "calibrate_thresholds: every walk needs ground-truth step "
          "boundaries");
    const auto nav = transform_stream(walk.stream);
    const Eigen::Index n = static_cast<Eigen::Index>(nav.size());
    Eigen::VectorXd w(n), t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w[i] = walking_component(nav[static_cast<size_t>(i)]);
      t[i] = nav[static_cast<size_t>(i)].t;
    }
    const FsmThresholds found =
        search_walk(w, t, walk.truth->step_boundaries, limits);
    sum.pos_low += found.pos_low;
    sum.pos_high += found.pos_high;
    sum.neg_low += found.neg_low;
    sum.neg_high += found.neg_high;
  }
  const double n = static_cast<double>(walks.size());
  return FsmThresholds{sum.pos_low / n, sum.pos_high / n, sum.neg_low / n,
                       sum.neg_high / n};
}

ScarletCalibration calibrate_scarlet_k(std::span<const WalkRecord> walks,
                                       const FsmThresholds& thr,
                                       const StepLimits& limits) {
  if (walks.empty())
    throw std::invalid_argument("calibrate_scarlet_k: no walks given");

  ScarletCalibration cal;
  double k_sum = 0.0;
  for (const WalkRecord& walk : walks) {
    if (!walk.declared_distance)
      throw std::invalid_argument(
          "calibrate_scarlet_k: every walk needs a declared distance");
    const auto nav = transform_stream(walk.stream);
    const Eigen::Index n = static_cast<Eigen::Index>(nav.size());
    Eigen::VectorXd w(n), t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w[i] = walking_component(nav[static_cast<size_t>(i)]);
      t[i] = nav[static_cast<size_t>(i)].t;
    }
    const auto steps = detect_steps(w, t, thr, limits);
    double ratio_sum = 0.0;
    for (const StepEvent& ev : steps) ratio_sum += scarlet_step_length(ev, 1.0);
    if (steps.empty() || ratio_sum <= 0.0) {
      cal.warnings.push_back("walk '" + walk.label +
                             "' excluded: no usable steps detected");
      continue;
    }
    k_sum += *walk.declared_distance / ratio_sum;
    ++cal.walks_used;
  }
  if (cal.walks_used == 0)
    throw NumericalError(
        "calibrate_scarlet_k: no walk produced usable steps");
  cal.k = k_sum / cal.walks_used;
  return cal;
}

}  // namespace gaitkal
