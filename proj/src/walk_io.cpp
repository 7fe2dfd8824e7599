#include "gaitkal/walk_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaitkal/log.hpp"
#include "gaitkal/text.hpp"

namespace gaitkal {
namespace {

constexpr const char* kWalkHeader =
    "t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,grav_x,grav_y,grav_z";
constexpr const char* kTruthHeader = "t,true_v,true_p";

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type pos = 0;
  while (true) {
    auto comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      return out;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, int line_no,
                             const std::string& what) {
  std::ostringstream msg;
  msg << path.string() << ": line " << line_no << ": " << what;
  throw ParseError(msg.str());
}

double field_as_double(const std::filesystem::path& path, int line_no,
                       const std::string& field, const char* name) {
  double out = 0.0;
  if (!parse_double(field, out))
    parse_fail(path, line_no,
               std::string("bad ") + name + " value '" + field + "'");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ValidationError("cannot write " + path.string());
  return out;
}

void check_monotone_t(const std::filesystem::path& path, double prev_t,
                      double t, int line_no) {
  if (!(t > prev_t)) {
    std::ostringstream msg;
    msg << path.string() << ": line " << line_no << ": timestamp " << t
        << " does not increase past " << prev_t;
    throw ValidationError(msg.str());
  }
}

}  // namespace

WalkRecord parse_walk_log(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kWalkHeader)
    parse_fail(path, 1, std::string("expected header '") + kWalkHeader + "'");

  WalkRecord record;
  record.label = path.stem().string();
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 10)
      parse_fail(path, line_no,
                 "expected 10 fields, got " + std::to_string(fields.size()));

    ImuSample s;
    s.t = field_as_double(path, line_no, fields[0], "t");
    for (int k = 0; k < 3; ++k) {
      s.acc[k] = field_as_double(path, line_no, fields[1 + k], "acc");
      s.gyro[k] = field_as_double(path, line_no, fields[4 + k], "gyro");
      s.gravity[k] = field_as_double(path, line_no, fields[7 + k], "grav");
    }
    if (!record.stream.samples.empty())
      check_monotone_t(path, record.stream.samples.back().t, s.t, line_no);
    record.stream.samples.push_back(s);
  }
  return record;
}

void write_walk_csv(const std::filesystem::path& path,
                    const SensorStream& stream) {
  auto out = open_for_write(path);
  out << kWalkHeader << '\n';
  for (const auto& s : stream.samples) {
    out << format_double(s.t);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.acc[k]);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.gyro[k]);
    for (int k = 0; k < 3; ++k) out << ',' << format_double(s.gravity[k]);
    out << '\n';
  }
}

std::vector<StreamWarning> validate_stream(const SensorStream& stream) {
  std::vector<StreamWarning> warnings;
  const double nominal_dt = 1.0 / stream.nominal_rate;
  const auto& samples = stream.samples;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(samples.size());
       ++i) {
    const auto& s = samples[i];

    const bool finite = std::isfinite(s.t) && s.acc.allFinite() &&
                        s.gyro.allFinite() && s.gravity.allFinite();
    if (!finite) {
      warnings.push_back({StreamWarning::Kind::non_finite, i,
                          "sample " + std::to_string(i) +
                              ": non-finite field"});
      continue;  // magnitude/gap checks are meaningless on this sample
    }

    const double g_mag = s.gravity.norm();
    if (g_mag < 9.0 || g_mag > 10.6)
      warnings.push_back({StreamWarning::Kind::gravity_magnitude, i,
                          "sample " + std::to_string(i) +
                              ": gravity magnitude " + format_double(g_mag) +
                              " outside [9.0, 10.6]"});

    if (i > 0) {
      const double gap = s.t - samples[i - 1].t;
      if (gap < 0.8 * nominal_dt || gap > 1.2 * nominal_dt)
        warnings.push_back({StreamWarning::Kind::sample_gap, i,
                            "sample " + std::to_string(i) + ": gap " +
                                format_double(gap) +
                                " s vs nominal " + format_double(nominal_dt)});
    }
  }
  for (const auto& w : warnings) log::warn(w.message);
  return warnings;
}

void write_truth_csv(const std::filesystem::path& path,
                     const GroundTruth& truth) {
  auto out = open_for_write(path);
  out << kTruthHeader << '\n';
  for (Eigen::Index i = 0; i < truth.t.size(); ++i)
    out << format_double(truth.t[i]) << ',' << format_double(truth.true_v[i])
        << ',' << format_double(truth.true_p[i]) << '\n';
}

GroundTruth read_truth_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kTruthHeader)
    parse_fail(path, 1, std::string("expected header '") + kTruthHeader + "'");

  std::vector<double> t, v, p;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3)
      parse_fail(path, line_no,
                 "expected 3 fields, got " + std::to_string(fields.size()));
    double ti = field_as_double(path, line_no, fields[0], "t");
    if (!t.empty()) check_monotone_t(path, t.back(), ti, line_no);
    t.push_back(ti);
    v.push_back(field_as_double(path, line_no, fields[1], "true_v"));
    p.push_back(field_as_double(path, line_no, fields[2], "true_p"));
  }

  GroundTruth truth;
  truth.t = Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
  truth.true_v = Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  truth.true_p = Eigen::Map<const Eigen::VectorXd>(p.data(), p.size());
  return truth;
}

WalkRecord load_walk(const std::filesystem::path& csv_path) {
  WalkRecord record = parse_walk_log(csv_path);

  auto sidecar = csv_path;
  sidecar.replace_extension(".truth.csv");
  if (std::filesystem::exists(sidecar)) {
    GroundTruth truth = read_truth_csv(sidecar);
    if (!record.stream.samples.empty()) {
      if (truth.t.size() == 0 ||
          truth.t[0] > record.stream.samples.front().t ||
          truth.t[truth.t.size() - 1] < record.stream.samples.back().t)
        throw ValidationError(sidecar.string() +
                              ": truth span does not cover the walk log");
    }
    record.truth = std::move(truth);
  }

  auto meta_path = csv_path;
  meta_path.replace_extension(".meta.json");
  if (std::filesystem::exists(meta_path)) {
    auto in = open_for_read(meta_path);
    nlohmann::json meta;
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta_path.string() + ": " + e.what());
    }
    if (meta.contains("declared_distance_m"))
      record.declared_distance = meta["declared_distance_m"].get<double>();
    if (record.truth && meta.contains("step_boundaries"))
      record.truth->step_boundaries =
          meta["step_boundaries"].get<std::vector<Eigen::Index>>();
    if (meta.contains("label")) record.label = meta["label"].get<std::string>();
    if (meta.contains("seed")) record.seed = meta["seed"].get<std::uint64_t>();
  }
  return record;
}

std::vector<WalkRecord> load_walk_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw ValidationError(dir.string() + " is not a directory");

  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".csv") continue;
    // .truth.csv sidecars are picked up through their parent walk.
    if (p.stem().extension() == ".truth") continue;
    paths.push_back(p);
  }
  std::sort(paths.begin(), paths.end());

  std::vector<WalkRecord> walks;
  walks.reserve(paths.size());
  for (const auto& p : paths) walks.push_back(load_walk(p));
  return walks;
}

}  // namespace gaitkal
