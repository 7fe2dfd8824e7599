#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gaitkal/config.hpp"
#include "gaitkal/types.hpp"

namespace gaitkal {

/// |estimated - truth| in metres.
double endpoint_error(double estimated_p_final, double truth_p_final);

/// One (method, model, pct, walk) evaluation.
struct TrialResult {
  std::string method;  ///< ins-kalman | ins-naive | ins-raw | shs
  std::string model;   ///< waveform tag, or "none" for model-free methods
  double pct = 0.0;
  std::uint64_t seed = 0;
  double endpoint_error = 0.0;  ///< m, >= 0
  double true_distance = 0.0;   ///< m
  /// RMS of |estimated - true| walking position over the whole trace; NaN
  /// for methods without a per-sample position (SHS). Reported alongside
  /// the endpoint metric, not used for acceptance.
  double rms_along_path = 0.0;
};

/// Mean/std of endpoint error for one (method, model, pct) cell. The spread
/// is the sample standard deviation (n-1 denominator), reported as such.
struct SummaryCell {
  std::string method;
  std::string model;
  double pct = 0.0;
  int n = 0;
  double mean = 0.0;
  double stddev = 0.0;        ///< 0 when n < 2
  double mean_rms = 0.0;      ///< NaN when no trial in the cell has one
};

struct SweepReport {
  std::vector<TrialResult> trials;  ///< sorted by (method, model, pct, seed)
  /// Cells ordered by (method, model, pct), whatever the trial order.
  std::vector<SummaryCell> summarize() const;
};

/// @brief Runs every calibration against one walk set: detector thresholds,
/// Scarlet length constant, and each model family's speed scale. Returns a
/// copy of base with those fields replaced.
/// @param cal_walks  synthetic walks with truth and declared distances
PipelineConfig calibrate_all(std::span<const WalkRecord> cal_walks,
                             const PipelineConfig& base);

/// @brief Two-phase protocol: calibrate on cal_walks, then score every
/// method at every sweep pct on test_walks with paired seeds (each method
/// consumes the identical records).
///
/// ins-raw and shs ignore corrections; their rows repeat across pct so every
/// cell of the grid is populated for plotting.
/// @throws ConfigError if either set is empty or a label appears in both
/// @throws ValidationError if a test walk lacks ground truth
SweepReport run_two_phase_experiment(std::span<const WalkRecord> cal_walks,
                                     std::span<const WalkRecord> test_walks,
                                     const PipelineConfig& cfg);

/// @brief Writes sweep.csv (method,model,pct,seed,endpoint_error),
/// summary.json and fig5_data.csv (mean/std per cell) into out_dir.
/// Identical reports produce byte-identical files.
void emit_report(const SweepReport& report,
                 const std::filesystem::path& out_dir);

}  // namespace gaitkal
