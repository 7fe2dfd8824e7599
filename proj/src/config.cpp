#include "gaitkal/config.hpp"

#include <fstream>
#include <set>

namespace gaitkal {
namespace {

using nlohmann::json;

// Reads known keys out of one JSON object, treating absent keys as "keep the
// default" and leftover keys as typos.
class Fields {
 public:
  Fields(const json& doc, std::string scope)
      : doc_(doc), scope_(std::move(scope)) {
    if (!doc.is_object())
      throw ConfigError(scope_ + ": expected a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      out = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(scope_ + "." + key + ": wrong type");
    }
  }

  template <typename Derived>
  void get_vec(const char* key, Eigen::MatrixBase<Derived>& out) {
    std::vector<double> v;
    bool had = doc_.contains(key);
    get(key, v);
    if (!had) return;
    if (static_cast<Eigen::Index>(v.size()) != out.size())
      throw ConfigError(scope_ + "." + key + ": expected " +
                        std::to_string(out.size()) + " entries");
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = v[i];
  }

  const json& sub(const char* key) {
    seen_.insert(key);
    return doc_.at(key);
  }
  bool has(const char* key) const { return doc_.contains(key); }

  void finish() const {
    for (const auto& item : doc_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(scope_ + ": unknown key '" + item.key() + "'");
  }

 private:
  const json& doc_;
  std::string scope_;
  std::set<std::string, std::less<>> seen_;
};

std::vector<double> as_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return {v.data(), v.data() + v.size()};
}

json thresholds_to_json(const FsmThresholds& t) {
  return {{"pos_low", t.pos_low},
          {"pos_high", t.pos_high},
          {"neg_low", t.neg_low},
          {"neg_high", t.neg_high}};
}

FsmThresholds thresholds_from_json(const json& doc, const std::string& scope) {
  FsmThresholds t;
  Fields f(doc, scope);
  f.get("pos_low", t.pos_low);
  f.get("pos_high", t.pos_high);
  f.get("neg_low", t.neg_low);
  f.get("neg_high", t.neg_high);
  f.finish();
  const bool zeroed = t.pos_low == 0.0 && t.pos_high == 0.0 &&
                      t.neg_low == 0.0 && t.neg_high == 0.0;
  if (!zeroed && !t.valid())
    throw ConfigError(scope + ": thresholds must satisfy 0 < pos_low < "
                              "pos_high and neg_high < neg_low <= 0");
  return t;
}

json filter_to_json(const FilterConfig& c) {
  return {{"q_diag", as_vector(c.q_diag)},
          {"r_diag", as_vector(c.r_diag)},
          {"dt", c.dt},
          {"p0_diag", as_vector(c.p0_diag)},
          {"default_step_period", c.default_step_period},
          {"use_heading_measurement", c.use_heading_measurement}};
}

FilterConfig filter_from_json(const json& doc, const std::string& scope) {
  FilterConfig c;
  Fields f(doc, scope);
  f.get_vec("q_diag", c.q_diag);
  f.get_vec("r_diag", c.r_diag);
  f.get("dt", c.dt);
  f.get_vec("p0_diag", c.p0_diag);
  f.get("default_step_period", c.default_step_period);
  f.get("use_heading_measurement", c.use_heading_measurement);
  f.finish();
  if (c.dt <= 0.0) throw ConfigError(scope + ".dt: must be > 0");
  if ((c.q_diag.array() < 0.0).any() || (c.r_diag.array() <= 0.0).any() ||
      (c.p0_diag.array() < 0.0).any())
    throw ConfigError(scope + ": q_diag/p0_diag must be >= 0, r_diag > 0");
  return c;
}

json limits_to_json(const StepLimits& l) {
  return {{"min_period", l.min_period}, {"max_period", l.max_period}};
}

StepLimits limits_from_json(const json& doc, const std::string& scope) {
  StepLimits l;
  Fields f(doc, scope);
  f.get("min_period", l.min_period);
  f.get("max_period", l.max_period);
  f.finish();
  if (!(l.min_period > 0.0) || !(l.max_period > l.min_period))
    throw ConfigError(scope + ": need 0 < min_period < max_period");
  return l;
}

GaitProfile profile_from_json(const json& doc, const std::string& scope) {
  GaitProfile p;
  Fields f(doc, scope);
  f.get("step_period_mean", p.step_period_mean);
  f.get("step_period_jitter", p.step_period_jitter);
  f.get("n_steps", p.n_steps);
  f.get("step_count_jitter", p.step_count_jitter);
  f.get("step_amplitude_jitter", p.step_amplitude_jitter);
  if (f.has("truth_waveform")) p.truth_waveform = model_from_json(f.sub("truth_waveform"));
  f.get("walk_distance", p.walk_distance);
  f.get("sample_rate", p.sample_rate);
  f.get("vertical_accel_amplitude", p.vertical_accel_amplitude);
  f.get("stop_decel_s", p.stop_decel_s);
  f.get("stop_rest_s", p.stop_rest_s);
  f.finish();
  validate_profile(p);
  return p;
}

SensorErrorModel errors_from_json(const json& doc, const std::string& scope) {
  SensorErrorModel e;
  Fields f(doc, scope);
  f.get("acc_bias_lo", e.acc_bias_lo);
  f.get("acc_bias_hi", e.acc_bias_hi);
  f.get("acc_noise_std", e.acc_noise_std);
  f.get("gyro_bias", e.gyro_bias);
  f.get("gyro_noise_std", e.gyro_noise_std);
  f.get("gravity_bias", e.gravity_bias);
  f.get("gravity_noise_std", e.gravity_noise_std);
  f.get("tilt_sway_amplitude", e.tilt_sway_amplitude);
  f.get("tilt_sway_freq_hz", e.tilt_sway_freq_hz);
  f.get("mount_pitch_max", e.mount_pitch_max);
  f.get("mount_yaw_max", e.mount_yaw_max);
  f.finish();
  validate_errors(e);
  return e;
}

json calibration_search_to_json(const ModelCalibration& m) {
  return {{"k_lo", m.k_lo},
          {"k_hi", m.k_hi},
          {"tol", m.tol},
          {"max_iter", m.max_iter},
          {"correction_pct", m.correction_pct}};
}

ModelCalibration calibration_search_from_json(const json& doc,
                                              const std::string& scope) {
  ModelCalibration m;
  Fields f(doc, scope);
  f.get("k_lo", m.k_lo);
  f.get("k_hi", m.k_hi);
  f.get("tol", m.tol);
  f.get("max_iter", m.max_iter);
  f.get("correction_pct", m.correction_pct);
  f.finish();
  if (!(m.k_lo > 0.0) || !(m.k_hi > m.k_lo) || !(m.tol > 0.0) ||
      m.max_iter < 1)
    throw ConfigError(scope + ": need 0 < k_lo < k_hi, tol > 0, max_iter >= 1");
  return m;
}

}  // namespace

VelocityModel model_from_set(const ModelSet& models, std::string_view tag) {
  if (tag == "gaussian") return models.gaussian;
  if (tag == "sin") return models.sinusoidal;
  if (tag == "saw") return models.sawtooth;
  throw ConfigError("unknown velocity model tag '" + std::string(tag) +
                    "' (expected gaussian|sin|saw)");
}

nlohmann::json model_to_json(const VelocityModel& model) {
  json doc;
  doc["type"] = std::string(model_name(model));
  std::visit(
      [&doc](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        doc["K"] = m.K;
        if constexpr (std::is_same_v<M, GaussianModel>) {
          doc["A"] = m.A;
          doc["a"] = m.a;
          doc["b"] = m.b;
        } else if constexpr (std::is_same_v<M, SinusoidalModel>) {
          doc["a"] = m.a;
        } else {
          doc["a"] = m.a;
          doc["b"] = m.b;
        }
      },
      model);
  return doc;
}

VelocityModel model_from_json(const nlohmann::json& doc) {
  Fields f(doc, "model");
  std::string type;
  f.get("type", type);
  VelocityModel model = make_model(type);  // throws on bad tag
  std::visit(
      [&f](auto& m) {
        using M = std::decay_t<decltype(m)>;
        f.get("K", m.K);
        if constexpr (std::is_same_v<M, GaussianModel>) {
          f.get("A", m.A);
          f.get("a", m.a);
          f.get("b", m.b);
        } else if constexpr (std::is_same_v<M, SinusoidalModel>) {
          f.get("a", m.a);
        } else {
          f.get("a", m.a);
          f.get("b", m.b);
        }
      },
      model);
  f.finish();
  return model;
}

nlohmann::json profile_to_json(const GaitProfile& p) {
  return {{"step_period_mean", p.step_period_mean},
          {"step_period_jitter", p.step_period_jitter},
          {"n_steps", p.n_steps},
          {"step_count_jitter", p.step_count_jitter},
          {"step_amplitude_jitter", p.step_amplitude_jitter},
          {"truth_waveform", model_to_json(p.truth_waveform)},
          {"walk_distance", p.walk_distance},
          {"sample_rate", p.sample_rate},
          {"vertical_accel_amplitude", p.vertical_accel_amplitude},
          {"stop_decel_s", p.stop_decel_s},
          {"stop_rest_s", p.stop_rest_s}};
}

nlohmann::json errors_to_json(const SensorErrorModel& e) {
  return {{"acc_bias_lo", e.acc_bias_lo},
          {"acc_bias_hi", e.acc_bias_hi},
          {"acc_noise_std", e.acc_noise_std},
          {"gyro_bias", e.gyro_bias},
          {"gyro_noise_std", e.gyro_noise_std},
          {"gravity_bias", e.gravity_bias},
          {"gravity_noise_std", e.gravity_noise_std},
          {"tilt_sway_amplitude", e.tilt_sway_amplitude},
          {"tilt_sway_freq_hz", e.tilt_sway_freq_hz},
          {"mount_pitch_max", e.mount_pitch_max},
          {"mount_yaw_max", e.mount_yaw_max}};
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
  json doc;
  doc["rng_algorithm"] = cfg.rng_algorithm;
  doc["profile"] = profile_to_json(cfg.profile);
  doc["errors"] = errors_to_json(cfg.errors);
  doc["filter"] = filter_to_json(cfg.filter);
  doc["thresholds"] = thresholds_to_json(cfg.thresholds);
  doc["scarlet_k"] = cfg.scarlet_k;
  doc["limits"] = limits_to_json(cfg.limits);
  doc["models"] = {{"gaussian", model_to_json(cfg.models.gaussian)},
                   {"sin", model_to_json(cfg.models.sinusoidal)},
                   {"saw", model_to_json(cfg.models.sawtooth)}};
  doc["sweep"] = {{"pcts", cfg.sweep.pcts},
                  {"n_seeds", cfg.sweep.n_seeds},
                  {"test_seed_base", cfg.sweep.test_seed_base},
                  {"models", cfg.sweep.models}};
  doc["calibration"] = {
      {"n_walks", cfg.calibration.n_walks},
      {"seed_base", cfg.calibration.seed_base},
      {"search", calibration_search_to_json(cfg.calibration.search)}};
  return doc;
}

PipelineConfig config_from_json(const nlohmann::json& doc) {
  PipelineConfig cfg;
  Fields f(doc, "config");
  f.get("rng_algorithm", cfg.rng_algorithm);
  if (cfg.rng_algorithm != "mt19937_64")
    throw ConfigError("config.rng_algorithm: only mt19937_64 is supported");
  if (f.has("profile")) cfg.profile = profile_from_json(f.sub("profile"), "profile");
  if (f.has("errors")) cfg.errors = errors_from_json(f.sub("errors"), "errors");
  if (f.has("filter")) cfg.filter = filter_from_json(f.sub("filter"), "filter");
  if (f.has("thresholds"))
    cfg.thresholds = thresholds_from_json(f.sub("thresholds"), "thresholds");
  f.get("scarlet_k", cfg.scarlet_k);
  if (f.has("limits")) cfg.limits = limits_from_json(f.sub("limits"), "limits");

  if (f.has("models")) {
    Fields m(f.sub("models"), "models");
    auto read = [&m](const char* key, auto& out) {
      if (!m.has(key)) return;
      VelocityModel parsed = model_from_json(m.sub(key));
      using T = std::decay_t<decltype(out)>;
      if (!std::holds_alternative<T>(parsed))
        throw ConfigError(std::string("models.") + key +
                          ": type does not match the slot");
      out = std::get<T>(parsed);
    };
    read("gaussian", cfg.models.gaussian);
    read("sin", cfg.models.sinusoidal);
    read("saw", cfg.models.sawtooth);
    m.finish();
  }

  if (f.has("sweep")) {
    Fields s(f.sub("sweep"), "sweep");
    s.get("pcts", cfg.sweep.pcts);
    s.get("n_seeds", cfg.sweep.n_seeds);
    s.get("test_seed_base", cfg.sweep.test_seed_base);
    s.get("models", cfg.sweep.models);
    s.finish();
    for (double pct : cfg.sweep.pcts)
      if (pct < 0.0 || pct > 100.0)
        throw ConfigError("sweep.pcts: entries must lie in [0, 100]");
    if (cfg.sweep.n_seeds < 1)
      throw ConfigError("sweep.n_seeds: must be >= 1");
    for (const auto& tag : cfg.sweep.models) make_model(tag);
  }

  if (f.has("calibration")) {
    Fields c(f.sub("calibration"), "calibration");
    c.get("n_walks", cfg.calibration.n_walks);
    c.get("seed_base", cfg.calibration.seed_base);
    if (c.has("search"))
      cfg.calibration.search =
          calibration_search_from_json(c.sub("search"), "calibration.search");
    c.finish();
    if (cfg.calibration.n_walks < 1)
      throw ConfigError("calibration.n_walks: must be >= 1");
  }

  f.finish();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path,
                 const PipelineConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write config " + path.string());
  out << config_to_json(cfg).dump(2) << '\n';
}

}  // namespace gaitkal
