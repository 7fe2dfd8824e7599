#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "gaitkal/config.hpp"

using namespace gaitkal;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl =
        (fs::temp_directory_path() / "gaitkal-cfg-XXXXXX").string();
    path = fs::path(mkdtemp(tmpl.data()));
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults survive a json round trip") {
    const PipelineConfig cfg;
    const PipelineConfig back = config_from_json(config_to_json(cfg));

    CHECK(back.rng_algorithm == "mt19937_64");
    CHECK(back.profile.n_steps == cfg.profile.n_steps);
    CHECK(back.profile.walk_distance == cfg.profile.walk_distance);
    CHECK(back.profile.step_amplitude_jitter ==
          cfg.profile.step_amplitude_jitter);
    CHECK(back.errors.acc_bias_lo == cfg.errors.acc_bias_lo);
    CHECK(back.filter.dt == cfg.filter.dt);
    CHECK((back.filter.q_diag.array() == cfg.filter.q_diag.array()).all());
    CHECK(back.scarlet_k == cfg.scarlet_k);
    CHECK(back.sweep.pcts == cfg.sweep.pcts);
    CHECK(back.sweep.n_seeds == cfg.sweep.n_seeds);
    CHECK(back.sweep.models == cfg.sweep.models);
    CHECK(back.calibration.n_walks == cfg.calibration.n_walks);

    // Serializing the round-tripped config reproduces the document.
    CHECK(config_to_json(back) == config_to_json(cfg));
  }

  TEST_CASE("file round trip is byte-stable") {
    TempDir dir;
    const fs::path a = dir.path / "a.json";
    const fs::path b = dir.path / "b.json";
    PipelineConfig cfg;
    cfg.scarlet_k = 0.731;
    cfg.thresholds = FsmThresholds{0.22, 1.28, -0.37, -1.30};

    save_config(a, cfg);
    const PipelineConfig loaded = load_config(a);
    CHECK(loaded.scarlet_k == 0.731);
    CHECK(loaded.thresholds.pos_low == 0.22);

    save_config(b, loaded);
    CHECK(slurp(a) == slurp(b));
  }

  TEST_CASE("partial documents keep defaults for absent keys") {
    const auto doc = nlohmann::json::parse(R"({"scarlet_k": 2.5})");
    const PipelineConfig cfg = config_from_json(doc);
    CHECK(cfg.scarlet_k == 2.5);
    CHECK(cfg.profile.n_steps == GaitProfile{}.n_steps);
    CHECK(cfg.sweep.n_seeds == SweepConfig{}.n_seeds);
  }

  TEST_CASE("unknown keys are rejected by name") {
    const auto doc = nlohmann::json::parse(R"({"scarlet_q": 2.5})");
    try {
      (void)config_from_json(doc);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("scarlet_q") != std::string::npos);
    }

    const auto nested =
        nlohmann::json::parse(R"({"profile": {"step_count": 3}})");
    CHECK_THROWS_AS((void)config_from_json(nested), ConfigError);
  }

  TEST_CASE("wrong types and bad values are rejected") {
    CHECK_THROWS_AS(
        (void)config_from_json(nlohmann::json::parse(R"({"scarlet_k": "x"})")),
        ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(
                        R"({"rng_algorithm": "pcg64"})")),
                    ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(
                        R"({"filter": {"dt": 0.0}})")),
                    ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(
                        R"({"sweep": {"pcts": [0, 101]}})")),
                    ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(
                        R"({"sweep": {"models": ["triangle"]}})")),
                    ConfigError);
    CHECK_THROWS_AS((void)config_from_json(nlohmann::json::parse(
                        R"({"sweep": {"n_seeds": 0}})")),
                    ConfigError);
  }

  TEST_CASE("threshold block: all-zero placeholder or a valid set") {
    // Uncalibrated configs carry the all-zero placeholder.
    const auto zeros = nlohmann::json::parse(
        R"({"thresholds": {"pos_low": 0, "pos_high": 0,
            "neg_low": 0, "neg_high": 0}})");
    CHECK_FALSE(config_from_json(zeros).thresholds.valid());

    const auto bad = nlohmann::json::parse(
        R"({"thresholds": {"pos_low": -0.2, "pos_high": 1.0,
            "neg_low": -0.3, "neg_high": -0.8}})");
    CHECK_THROWS_AS((void)config_from_json(bad), ConfigError);
  }

  TEST_CASE("model documents are tagged by type") {
    for (const char* tag : {"gaussian", "sin", "saw"}) {
      const VelocityModel m = make_model(tag);
      const VelocityModel back = model_from_json(model_to_json(m));
      CHECK(model_name(back) == tag);
      CHECK(model_to_json(back) == model_to_json(m));
    }
    CHECK_THROWS_AS((void)model_from_json(nlohmann::json::parse(
                        R"({"type": "square"})")),
                    ConfigError);
  }

  TEST_CASE("model_from_set dispatches on the tag") {
    ModelSet set;
    set.gaussian.K = 0.111;
    set.sinusoidal.K = 0.222;
    set.sawtooth.K = 0.333;
    CHECK(model_scale(model_from_set(set, "gaussian")) == 0.111);
    CHECK(model_scale(model_from_set(set, "sin")) == 0.222);
    CHECK(model_scale(model_from_set(set, "saw")) == 0.333);
    CHECK_THROWS_AS((void)model_from_set(set, "none"), ConfigError);
  }

  TEST_CASE("unreadable or malformed files carry the path in the error") {
    TempDir dir;
    const fs::path missing = dir.path / "absent.json";
    CHECK_THROWS_AS((void)load_config(missing), ConfigError);

    const fs::path broken = dir.path / "broken.json";
    std::ofstream(broken) << "{ not json";
    try {
      (void)load_config(broken);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("broken.json") != std::string::npos);
    }
  }
}
