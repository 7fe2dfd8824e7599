#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "gaitkal/orientation.hpp"
#include "gaitkal/stepper.hpp"
#include "gaitkal/synthwalk.hpp"

using namespace gaitkal;

namespace {

// Hand-traceable fixture: thresholds chosen so each transition in the FSM
// reference table fires on a distinct sample.
const FsmThresholds kThr{0.5, 1.0, -0.3, -0.8};

Eigen::VectorXd grid(Eigen::Index n, double dt = 0.1) {
  Eigen::VectorXd t(n);
  for (Eigen::Index i = 0; i < n; ++i) t[i] = dt * static_cast<double>(i);
  return t;
}

Eigen::VectorXd acc(std::initializer_list<double> values) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) a[i++] = v;
  return a;
}

}  // namespace

TEST_SUITE("stepper") {
  TEST_CASE("one full cycle emits one step with hand-computed stats") {
    // idle -> rising(i1) -> peak(i2) -> falling(i4) -> valley(i5) -> emit(i6)
    const auto a = acc({0.0, 0.6, 1.2, 0.4, -0.5, -1.0, -0.2});
    const auto steps = detect_steps(a, grid(a.size()), kThr);
    REQUIRE(steps.size() == 1);
    const StepEvent& ev = steps[0];
    CHECK(ev.start_idx == 1);
    CHECK(ev.end_idx == 6);
    CHECK(ev.period_T == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ev.a_max == 1.2);
    CHECK(ev.a_min == -1.0);
    CHECK(ev.a_avg == doctest::Approx(0.5 / 6.0).epsilon(1e-12));
  }

  TEST_CASE("fizzled rise and shallow negative lobe are discarded") {
    // Rise drops below the entry threshold before confirming a peak.
    const auto fizzle = acc({0.0, 0.6, 0.3, 0.0});
    CHECK(detect_steps(fizzle, grid(4), kThr).empty());

    // Peak confirmed, but the negative lobe never reaches neg_high and
    // climbs back above neg_low: candidate dropped from FALLING.
    const auto shallow = acc({0.0, 0.6, 1.2, -0.5, -0.1});
    CHECK(detect_steps(shallow, grid(5), kThr).empty());
  }

  TEST_CASE("stalled candidates are abandoned after max_period") {
    // Peak plateau outlasts the 0.5 s window; later samples stay below the
    // entry threshold so nothing reopens.
    const auto a = acc({0.0, 0.6, 1.2, 0.2, 0.2, 0.2, 0.2, 0.2, -1.0, 0.0});
    CHECK(detect_steps(a, grid(a.size()), kThr, StepLimits{0.2, 0.5}).empty());
  }

  TEST_CASE("completed periods outside the limits are discarded") {
    const auto a = acc({0.0, 0.6, 1.2, 0.4, -0.5, -1.0, -0.2});
    CHECK(detect_steps(a, grid(a.size()), kThr, StepLimits{0.6, 2.0}).empty());
    CHECK(detect_steps(a, grid(a.size()), kThr, StepLimits{0.2, 0.45}).empty());
  }

  TEST_CASE("consecutive steps may share their boundary sample") {
    const auto a =
        acc({0.0, 0.6, 1.2, -0.5, -1.0, 0.7, 1.3, -0.4, -0.9, 0.0});
    const auto steps = detect_steps(a, grid(a.size()), kThr);
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].start_idx == 1);
    CHECK(steps[0].end_idx == 5);
    CHECK(steps[1].start_idx == 5);  // the sample that closed step 0
    CHECK(steps[1].end_idx == 9);
  }

  TEST_CASE("input validation") {
    const auto a = acc({0.0, 0.6});
    CHECK_THROWS_AS(
        (void)detect_steps(a, grid(2), FsmThresholds{-0.1, 1.0, -0.3, -0.8}),
        std::invalid_argument);
    CHECK_THROWS_AS((void)detect_steps(a, grid(3), kThr),
                    std::invalid_argument);

    Eigen::VectorXd bad_t(2);
    bad_t << 0.0, 0.0;
    CHECK_THROWS_AS((void)detect_steps(a, bad_t, kThr), std::invalid_argument);
  }

  TEST_CASE("scarlet length is the amplitude-ratio formula") {
    StepEvent ev;
    ev.a_avg = 0.25;
    ev.a_max = 2.0;
    ev.a_min = -1.0;
    // K * (avg - min) / (max - min) = 0.8 * 1.25 / 3.0
    CHECK(scarlet_step_length(ev, 0.8) ==
          doctest::Approx(0.8 * 1.25 / 3.0).epsilon(1e-15));

    ev.a_max = ev.a_min = 1.0;
    CHECK_THROWS_AS((void)scarlet_step_length(ev, 0.8), std::invalid_argument);
  }

  TEST_CASE("calibrated thresholds recover the true step count") {
    GaitProfile profile;
    SensorErrorModel errs;
    std::vector<WalkRecord> walks;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      walks.push_back(generate(profile, errs, seed));

    const FsmThresholds thr = calibrate_thresholds(walks);
    REQUIRE(thr.valid());

    for (const WalkRecord& walk : walks) {
      const auto nav = transform_stream(walk.stream);
      Eigen::VectorXd t(static_cast<Eigen::Index>(nav.size()));
      Eigen::VectorXd aw(t.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        t[i] = nav[static_cast<size_t>(i)].t;
        aw[i] = walking_component(nav[static_cast<size_t>(i)]);
      }
      const auto steps = detect_steps(aw, t, thr);
      const auto n_true =
          static_cast<double>(walk.truth->step_boundaries.size()) - 1.0;
      CHECK(static_cast<double>(steps.size()) > 0.9 * n_true);
      CHECK(static_cast<double>(steps.size()) < 1.1 * n_true);
    }
  }

  TEST_CASE("scarlet calibration averages per-walk distance ratios") {
    GaitProfile profile;
    SensorErrorModel errs;
    std::vector<WalkRecord> walks;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      walks.push_back(generate(profile, errs, seed));

    const FsmThresholds thr = calibrate_thresholds(walks);
    const ScarletCalibration cal = calibrate_scarlet_k(walks, thr);
    CHECK(cal.walks_used == 3);
    CHECK(cal.k > 0.0);

    // With the fitted K the summed step lengths land near the declared
    // distance on the calibration walks themselves.
    for (const WalkRecord& walk : walks) {
      const auto nav = transform_stream(walk.stream);
      Eigen::VectorXd t(static_cast<Eigen::Index>(nav.size()));
      Eigen::VectorXd aw(t.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) {
        t[i] = nav[static_cast<size_t>(i)].t;
        aw[i] = walking_component(nav[static_cast<size_t>(i)]);
      }
      double total = 0.0;
      for (const StepEvent& ev : detect_steps(aw, t, thr))
        total += scarlet_step_length(ev, cal.k);
      CHECK(total == doctest::Approx(*walk.declared_distance).epsilon(0.10));
    }

    // Thresholds that never fire exclude every walk.
    const FsmThresholds deaf{50.0, 60.0, -50.0, -60.0};
    CHECK_THROWS_AS((void)calibrate_scarlet_k(walks, deaf), NumericalError);
  }
}
