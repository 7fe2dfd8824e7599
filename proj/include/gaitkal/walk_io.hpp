#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gaitkal/types.hpp"

namespace gaitkal {

/// Walk log schema (CSV, LF endings, 1 header + 1 row per sample):
///   t,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,grav_x,grav_y,grav_z
/// Truth sidecar (same stem, ".truth.csv"):
///   t,true_v,true_p
/// Metadata sidecar (same stem, ".meta.json"): generator settings, seed,
/// declared distance, and true step boundaries.
///
/// Doubles are written in shortest round-trip form, so a write/parse cycle
/// reproduces the record bit for bit and repeated runs produce identical
/// bytes.

/// @brief Parses a walk log. Structural problems (wrong column count,
/// non-numeric fields) raise ParseError naming the 1-based line; timestamps
/// out of order raise ValidationError. Value-level oddities (NaN, gravity
/// magnitude, gaps) are left to validate_stream.
WalkRecord parse_walk_log(const std::filesystem::path& path);

void write_walk_csv(const std::filesystem::path& path,
                    const SensorStream& stream);

struct StreamWarning {
  enum class Kind { gravity_magnitude, sample_gap, non_finite };
  Kind kind;
  Eigen::Index index;  ///< sample the warning refers to
  std::string message;
};

/// @brief Value-level checks: |gravity| within [9.0, 10.6], inter-sample
/// gaps within +-20% of the nominal period, all fields finite.
std::vector<StreamWarning> validate_stream(const SensorStream& stream);

void write_truth_csv(const std::filesystem::path& path,
                     const GroundTruth& truth);

/// Reads a truth sidecar (step boundaries live in the metadata sidecar).
GroundTruth read_truth_csv(const std::filesystem::path& path);

/// @brief Loads a walk plus whatever sidecars sit next to it.
///
/// Truth and metadata are optional; when truth is present its time span
/// must cover the stream's span (ValidationError otherwise).
WalkRecord load_walk(const std::filesystem::path& csv_path);

/// All *.csv walks in a directory (excluding *.truth.csv), sorted by
/// filename for reproducible ordering.
std::vector<WalkRecord> load_walk_dir(const std::filesystem::path& dir);

}  // namespace gaitkal
