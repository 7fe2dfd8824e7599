// gaitkal: synthetic walk generation, localization, calibration and sweep
// experiments from one binary. Exit codes: 0 ok, 2 config error, 3 data
// error, 4 numerical failure. GAITKAL_LOG={error,warn,info,debug} controls
// stderr verbosity.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaitkal/config.hpp"
#include "gaitkal/fusion.hpp"
#include "gaitkal/harness.hpp"
#include "gaitkal/log.hpp"
#include "gaitkal/orientation.hpp"
#include "gaitkal/shs.hpp"
#include "gaitkal/synthwalk.hpp"
#include "gaitkal/text.hpp"
#include "gaitkal/walk_io.hpp"

namespace {

using namespace gaitkal;

void require_calibrated(const PipelineConfig& cfg) {
  if (!cfg.thresholds.valid())
    throw ConfigError(
        "config has no valid detector thresholds; run calibrate first");
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 int n_seeds, std::int64_t seed_base_opt) {
  const PipelineConfig cfg = load_config(config_path);
  const std::uint64_t base = seed_base_opt >= 0
                                 ? static_cast<std::uint64_t>(seed_base_opt)
                                 : cfg.sweep.test_seed_base;
  std::filesystem::create_directories(out_dir);
  save_config(std::filesystem::path(out_dir) / "config.json", cfg);
  for (int k = 0; k < n_seeds; ++k) {
    const std::uint64_t seed = base + static_cast<std::uint64_t>(k);
    const GeneratedWalk walk = generate_full(cfg.profile, cfg.errors, seed);
    const auto path =
        write_walk_files(out_dir, walk, cfg.profile, cfg.errors, seed);
    std::cout << path.string() << '\n';
  }
  return 0;
}

void write_ins_trace(const std::string& path, const InsRunResult& res) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << "t,acc_walk,v,p,v_raw\n";
  for (Eigen::Index i = 0; i < res.trace.t.size(); ++i)
    out << format_double(res.trace.t[i]) << ','
        << format_double(res.trace.a[i]) << ','
        << format_double(res.trace.v[i]) << ','
        << format_double(res.trace.p[i]) << ','
        << format_double(res.v_raw[i]) << '\n';
}

void write_shs_trace(const std::string& path, const ShsResult& res) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << "step_idx,t_end,length_m,heading_rad,x,y\n";
  for (const ShsStep& s : res.trajectory)
    out << s.step_idx << ',' << format_double(s.t_end) << ','
        << format_double(s.length_m) << ',' << format_double(s.heading) << ','
        << format_double(s.pos.x()) << ',' << format_double(s.pos.y()) << '\n';
}

int cmd_localize(const std::string& walk_path, const std::string& config_path,
                 const std::string& method, const std::string& model_tag,
                 double pct, const std::string& trace_path) {
  const PipelineConfig cfg = load_config(config_path);
  require_calibrated(cfg);
  const WalkRecord walk = load_walk(walk_path);
  validate_stream(walk.stream);
  if (walk.stream.samples.size() < 2)
    throw ValidationError(walk_path + ": too few samples to localize");

  double estimate = 0.0;
  std::size_t steps = 0;
  if (method == "shs") {
    ShsConfig shs;
    shs.thresholds = cfg.thresholds;
    shs.scarlet_k = cfg.scarlet_k;
    shs.limits = cfg.limits;
    const ShsResult res = run_shs(walk, shs);
    estimate = res.total_distance;
    steps = res.trajectory.size();
    if (!trace_path.empty()) write_shs_trace(trace_path, res);
  } else {
    CorrectionMode mode = CorrectionMode::kalman;
    double run_pct = pct;
    if (method == "ins-naive") {
      mode = CorrectionMode::naive;
    } else if (method == "ins-raw") {
      run_pct = 0.0;
    } else if (method != "ins-kalman") {
      throw ConfigError("unknown method '" + method + "'");
    }
    RunOptions run;
    if (walk.truth && walk.truth->true_v.size() > 0)
      run.v0 = walk.truth->true_v[0];
    const InsRunResult res =
        run_ins_corrected(walk, model_from_set(cfg.models, model_tag),
                          cfg.thresholds, cfg.filter, run_pct, mode, run,
                          cfg.limits);
    estimate = res.endpoint();
    steps = res.steps.size();
    if (!trace_path.empty()) write_ins_trace(trace_path, res);
  }

  std::cout << "method: " << method << '\n';
  if (method == "ins-kalman" || method == "ins-naive")
    std::cout << "model: " << model_tag << "\npct: " << format_double(pct)
              << '\n';
  std::cout << "steps_detected: " << steps << '\n'
            << "endpoint_m: " << format_double(estimate) << '\n';
  if (walk.truth && walk.truth->true_p.size() > 0) {
    const double true_end =
        walk.truth->true_p[walk.truth->true_p.size() - 1];
    std::cout << "true_distance_m: " << format_double(true_end) << '\n'
              << "endpoint_error_m: "
              << format_double(endpoint_error(estimate, true_end)) << '\n';
  } else if (walk.declared_distance) {
    std::cout << "declared_distance_m: "
              << format_double(*walk.declared_distance) << '\n'
              << "endpoint_error_m: "
              << format_double(endpoint_error(estimate,
                                              *walk.declared_distance))
              << '\n';
  }
  return 0;
}

int cmd_calibrate(const std::string& walks_dir, const std::string& config_in,
                  const std::string& config_out) {
  PipelineConfig base;
  if (!config_in.empty()) base = load_config(config_in);
  const std::vector<WalkRecord> walks = load_walk_dir(walks_dir);
  if (walks.empty())
    throw ValidationError("no walk logs found in " + walks_dir);
  const PipelineConfig calibrated = calibrate_all(walks, base);
  save_config(config_out, calibrated);
  std::cout << "calibrated config written to " << config_out << '\n';
  return 0;
}

int cmd_sweep(const std::string& cal_dir, const std::string& test_dir,
              const std::string& config_path, const std::string& out_dir) {
  const PipelineConfig cfg = load_config(config_path);
  const std::vector<WalkRecord> cal = load_walk_dir(cal_dir);
  const std::vector<WalkRecord> test = load_walk_dir(test_dir);
  const SweepReport report = run_two_phase_experiment(cal, test, cfg);
  std::filesystem::create_directories(out_dir);
  save_config(std::filesystem::path(out_dir) / "config.json", cfg);
  emit_report(report, out_dir);
  std::cout << "wrote " << report.trials.size() << " trials to " << out_dir
            << '\n';
  return 0;
}

int cmd_init(const std::string& config_out) {
  save_config(config_out, PipelineConfig{});
  std::cout << "default config written to " << config_out << '\n';
  return 0;
}

// Tuning helper for the synthetic error model: how far does uncorrected
// double integration drift with the configured sensors?
int cmd_drift(const std::string& config_path, int n_seeds) {
  const PipelineConfig cfg = load_config(config_path);
  double sum = 0.0, lo = 0.0, hi = 0.0;
  for (int k = 0; k < n_seeds; ++k) {
    const std::uint64_t seed =
        cfg.sweep.test_seed_base + static_cast<std::uint64_t>(k);
    const WalkRecord walk = generate(cfg.profile, cfg.errors, seed);
    const auto nav = transform_stream(walk.stream);
    const KinematicTrace trace =
        propagate(nav, walk.truth->true_v[0], 0.0);
    const double err = endpoint_error(
        trace.p[trace.p.size() - 1],
        walk.truth->true_p[walk.truth->true_p.size() - 1]);
    sum += err;
    lo = k == 0 ? err : std::min(lo, err);
    hi = k == 0 ? err : std::max(hi, err);
    std::cout << "seed " << seed << ": raw endpoint error "
              << format_double(err) << " m\n";
  }
  std::cout << "mean: " << format_double(sum / n_seeds) << " m (min "
            << format_double(lo) << ", max " << format_double(hi) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Pedestrian inertial localization: gait-model-corrected strapdown "
      "navigation, step-and-heading baseline, and a synthetic walk bench"};
  app.require_subcommand(1);

  std::string config_path, out_dir, walk_path, trace_path;
  std::string cal_dir, test_dir, config_in, config_out;
  std::string method = "ins-kalman", model_tag = "gaussian";
  double pct = 10.0;
  int n_seeds = 1;
  std::int64_t seed_base = -1;

  auto* ini = app.add_subcommand("init", "Write a default pipeline config");
  ini->add_option("--out", config_out, "Config path to create")->required();

  auto* sim = app.add_subcommand("simulate", "Generate synthetic walk logs");
  sim->add_option("--config", config_path, "Pipeline config JSON")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  sim->add_option("--seeds", n_seeds, "Number of walks")->required();
  sim->add_option("--seed-base", seed_base,
                  "First seed (default: sweep.test_seed_base)");

  auto* loc = app.add_subcommand("localize", "Run one method on one walk");
  loc->add_option("--walk", walk_path, "Walk log CSV")->required();
  loc->add_option("--config", config_path, "Pipeline config JSON")->required();
  loc->add_option("--method", method,
                  "ins-kalman | ins-naive | ins-raw | shs");
  loc->add_option("--model", model_tag, "gaussian | sin | saw");
  loc->add_option("--pct", pct, "Correction percentage");
  loc->add_option("--trace", trace_path, "Write per-sample trace CSV here");

  auto* cal = app.add_subcommand("calibrate",
                                 "Fit thresholds, step-length constant and "
                                 "model scales on a walk directory");
  cal->add_option("--walks", cal_dir, "Calibration walk directory")
      ->required();
  cal->add_option("--config", config_in, "Base config (defaults if omitted)");
  cal->add_option("--config-out", config_out, "Where to write the result")
      ->required();

  auto* swp = app.add_subcommand(
      "sweep", "Two-phase experiment over the correction grid");
  swp->add_option("--cal", cal_dir, "Calibration walk directory")->required();
  swp->add_option("--test", test_dir, "Test walk directory")->required();
  swp->add_option("--config", config_path, "Pipeline config JSON")->required();
  swp->add_option("--out", out_dir, "Report directory")->required();

  auto* drf = app.add_subcommand(
      "drift", "Report uncorrected INS drift for the configured error model");
  drf->add_option("--config", config_path, "Pipeline config JSON")->required();
  drf->add_option("--seeds", n_seeds, "Number of walks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ini->parsed()) return cmd_init(config_out);
    if (sim->parsed())
      return cmd_simulate(config_path, out_dir, n_seeds, seed_base);
    if (loc->parsed())
      return cmd_localize(walk_path, config_path, method, model_tag, pct,
                          trace_path);
    if (cal->parsed()) return cmd_calibrate(cal_dir, config_in, config_out);
    if (swp->parsed()) return cmd_sweep(cal_dir, test_dir, config_path, out_dir);
    if (drf->parsed()) return cmd_drift(config_path, n_seeds);
  } catch (const ConfigError& e) {
    gaitkal::log::error(e.what());
    return 2;
  } catch (const ParseError& e) {
    gaitkal::log::error(e.what());
    return 3;
  } catch (const ValidationError& e) {
    gaitkal::log::error(e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    gaitkal::log::error(e.what());
    return 3;
  } catch (const NumericalError& e) {
    gaitkal::log::error(e.what());
    return 4;
  } catch (const std::exception& e) {
    gaitkal::log::error(std::string("unexpected: ") + e.what());
    return 1;
  }
  return 0;
}
