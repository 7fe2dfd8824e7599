#include "gaitkal/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <tuple>

#include "gaitkal/fusion.hpp"
#include "gaitkal/log.hpp"
#include "gaitkal/shs.hpp"
#include "gaitkal/stepper.hpp"
#include "gaitkal/text.hpp"
#include "gaitkal/velmodel.hpp"

namespace gaitkal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

auto trial_key(const TrialResult& t) {
  return std::tie(t.method, t.model, t.pct, t.seed);
}

double rms_vs_truth(const Eigen::VectorXd& estimated,
                    const Eigen::VectorXd& truth) {
  if (estimated.size() != truth.size() || estimated.size() == 0) return kNaN;
  return std::sqrt((estimated - truth).squaredNorm() /
                   static_cast<double>(estimated.size()));
}

ShsConfig shs_config(const PipelineConfig& cfg) {
  ShsConfig shs;
  shs.thresholds = cfg.thresholds;
  shs.scarlet_k = cfg.scarlet_k;
  shs.limits = cfg.limits;
  return shs;
}

}  // namespace

double endpoint_error(double estimated_p_final, double truth_p_final) {
  return std::abs(estimated_p_final - truth_p_final);
}

std::vector<SummaryCell> SweepReport::summarize() const {
  // Group on a sorted copy so aggregation does not depend on how the caller
  // ordered the trials.
  std::vector<TrialResult> sorted = trials;
  std::sort(sorted.begin(), sorted.end(),
            [](const TrialResult& a, const TrialResult& b) {
              return trial_key(a) < trial_key(b);
            });

  std::vector<SummaryCell> cells;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].method == sorted[i].method &&
           sorted[j].model == sorted[i].model && sorted[j].pct == sorted[i].pct)
      ++j;

    SummaryCell cell;
    cell.method = sorted[i].method;
    cell.model = sorted[i].model;
    cell.pct = sorted[i].pct;
    cell.n = static_cast<int>(j - i);

    double sum = 0.0, rms_sum = 0.0;
    int rms_n = 0;
    for (std::size_t k = i; k < j; ++k) {
      sum += sorted[k].endpoint_error;
      if (std::isfinite(sorted[k].rms_along_path)) {
        rms_sum += sorted[k].rms_along_path;
        ++rms_n;
      }
    }
    cell.mean = sum / cell.n;
    double sq = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      const double d = sorted[k].endpoint_error - cell.mean;
      sq += d * d;
    }
    cell.stddev = cell.n > 1 ? std::sqrt(sq / (cell.n - 1)) : 0.0;
    cell.mean_rms = rms_n > 0 ? rms_sum / rms_n : kNaN;
    cells.push_back(std::move(cell));
    i = j;
  }
  return cells;
}

PipelineConfig calibrate_all(std::span<const WalkRecord> cal_walks,
                             const PipelineConfig& base) {
  if (cal_walks.empty())
    throw ConfigError("calibrate_all: calibration set is empty");

  PipelineConfig cfg = base;
  cfg.thresholds = calibrate_thresholds(cal_walks, cfg.limits);
  log::info("calibrated thresholds: pos " + format_double(cfg.thresholds.pos_low) +
            "/" + format_double(cfg.thresholds.pos_high) + ", neg " +
            format_double(cfg.thresholds.neg_low) + "/" +
            format_double(cfg.thresholds.neg_high));

  const ScarletCalibration scarlet =
      calibrate_scarlet_k(cal_walks, cfg.thresholds, cfg.limits);
  cfg.scarlet_k = scarlet.k;

  auto fit = [&](auto& slot) {
    using T = std::decay_t<decltype(slot)>;
    const double k =
        calibrate_model_k(cal_walks, VelocityModel(slot), cfg.thresholds,
                          cfg.filter, cfg.limits, cfg.calibration.search);
    slot.K = k;
    log::info(std::string("calibrated ") +
              std::string(model_name(VelocityModel(T{}))) +
              " scale K = " + format_double(k));
  };
  fit(cfg.models.gaussian);
  fit(cfg.models.sinusoidal);
  fit(cfg.models.sawtooth);
  return cfg;
}

SweepReport run_two_phase_experiment(std::span<const WalkRecord> cal_walks,
                                     std::span<const WalkRecord> test_walks,
                                     const PipelineConfig& cfg) {
  if (cal_walks.empty() || test_walks.empty())
    throw ConfigError("two-phase experiment needs non-empty walk sets");

  std::set<std::string> cal_labels;
  for (const auto& w : cal_walks) cal_labels.insert(w.label);
  for (const auto& w : test_walks)
    if (cal_labels.count(w.label))
      throw ConfigError("walk '" + w.label +
                        "' appears in both calibration and test sets");

  const PipelineConfig cal = calibrate_all(cal_walks, cfg);
  const ShsConfig shs = shs_config(cal);

  SweepReport report;
  std::uint64_t fallback_seed = 0;
  for (const WalkRecord& walk : test_walks) {
    if (!walk.truth)
      throw ValidationError("test walk '" + walk.label + "' has no truth");
    const GroundTruth& truth = *walk.truth;
    const double true_end = truth.true_p[truth.true_p.size() - 1];
    const std::uint64_t seed = walk.seed.value_or(fallback_seed);
    ++fallback_seed;

    RunOptions run;
    run.v0 = truth.true_v[0];

    auto add = [&](std::string method, std::string model, double pct,
                   double estimate, double rms) {
      TrialResult tr;
      tr.method = std::move(method);
      tr.model = std::move(model);
      tr.pct = pct;
      tr.seed = seed;
      tr.endpoint_error = endpoint_error(estimate, true_end);
      tr.true_distance = true_end;
      tr.rms_along_path = rms;
      report.trials.push_back(std::move(tr));
    };

    const InsRunResult raw =
        run_ins_corrected(walk, cal.models.gaussian, cal.thresholds,
                          cal.filter, 0.0, CorrectionMode::kalman, run,
                          cal.limits);
    const double raw_rms = rms_vs_truth(raw.trace.p, truth.true_p);

    const ShsResult shs_run = run_shs(walk, shs);

    for (double pct : cal.sweep.pcts) {
      add("ins-raw", "none", pct, raw.endpoint(), raw_rms);
      // Heading is fixed at zero on straight walks, so SHS walking-direction
      // position equals its accumulated distance.
      add("shs", "none", pct, shs_run.total_distance, kNaN);
      for (const std::string& tag : cal.sweep.models) {
        const VelocityModel model = model_from_set(cal.models, tag);
        const InsRunResult kal =
            run_ins_corrected(walk, model, cal.thresholds, cal.filter, pct,
                              CorrectionMode::kalman, run, cal.limits);
        add("ins-kalman", tag, pct, kal.endpoint(),
            rms_vs_truth(kal.trace.p, truth.true_p));
        const InsRunResult naive =
            run_ins_corrected(walk, model, cal.thresholds, cal.filter, pct,
                              CorrectionMode::naive, run, cal.limits);
        add("ins-naive", tag, pct, naive.endpoint(),
            rms_vs_truth(naive.trace.p, truth.true_p));
      }
    }
  }

  std::sort(report.trials.begin(), report.trials.end(),
            [](const TrialResult& a, const TrialResult& b) {
              return trial_key(a) < trial_key(b);
            });
  return report;
}

void emit_report(const SweepReport& report,
                 const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + p.string());
    return out;
  };

  {
    auto out = open(out_dir / "sweep.csv");
    out << "method,model,pct,seed,endpoint_error\n";
    for (const TrialResult& t : report.trials)
      out << t.method << ',' << t.model << ',' << format_double(t.pct) << ','
          << t.seed << ',' << format_double(t.endpoint_error) << '\n';
  }

  const auto cells = report.summarize();
  {
    auto out = open(out_dir / "fig5_data.csv");
    out << "method,model,pct,mean_error,std_error\n";
    for (const SummaryCell& c : cells)
      out << c.method << ',' << c.model << ',' << format_double(c.pct) << ','
          << format_double(c.mean) << ',' << format_double(c.stddev) << '\n';
  }

  nlohmann::json summary;
  summary["spread_measure"] = "standard_deviation";
  summary["cells"] = nlohmann::json::array();
  for (const SummaryCell& c : cells) {
    nlohmann::json cell;
    cell["method"] = c.method;
    cell["model"] = c.model;
    cell["pct"] = c.pct;
    cell["n"] = c.n;
    cell["mean_endpoint_error"] = c.mean;
    cell["std_endpoint_error"] = c.stddev;
    if (std::isfinite(c.mean_rms))
      cell["mean_rms_along_path"] = c.mean_rms;
    else
      cell["mean_rms_along_path"] = nullptr;
    summary["cells"].push_back(std::move(cell));
  }
  open(out_dir / "summary.json") << summary.dump(2) << '\n';
}

}  // namespace gaitkal
