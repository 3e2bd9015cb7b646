#pragma once

// File formats shared by the command-line tool and the tests.
//
// Model file (JSON):
//   {"name": ..., "n": 3, "r": 2,
//    "structure_constants": [{"i": 1, "j": 2, "k": 3, "value": 1.0}, ...],
//    "representation": {"d": 3, "matrices": [[row-major d*d], ...]},
//    "params": {"a": 1.0}}
// Indices are 1-based; entries with i > j are optional mirrors.
//
// Trajectory file (CSV): '#'-prefixed metadata lines, a header row
// t,g11,g12,...,psi1..psin,u1..ur, then one row per sample with 17
// significant digits. The JSON form carries the same fields.
//
// Schedule (JSON): [{"duration": 0.1, "index": 1, "sign": 1}, ...].

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liegeo/geodesics.hpp"
#include "liegeo/models.hpp"
#include "liegeo/reachability.hpp"

namespace liegeo {

/// A parsed model file before load-time validation.
struct ModelDescription {
  std::string name;
  int n = 0;
  int r = 0;
  StructureConstants structure;
  std::vector<Eigen::MatrixXd> matrices;
  std::map<std::string, double> params;
};

/// Throws Errc::parse_error (with the JSON position when available) on
/// malformed input or missing fields.
[[nodiscard]] ModelDescription parse_model_description(const std::string& text);
[[nodiscard]] ModelDescription read_model_description(const std::string& path);

/// Builds the validated model; validation failures throw.
[[nodiscard]] LieModel to_model(const ModelDescription& desc);

[[nodiscard]] std::string read_text_file(const std::string& path);

/// Comma-separated reals; throws Errc::parse_error.
[[nodiscard]] std::vector<double> parse_real_list(const std::string& text);

/// printf-style %.17g, so every double survives a round trip.
[[nodiscard]] std::string format_real(double v);

enum class FileFormat { csv, json };
[[nodiscard]] FileFormat format_from_string(const std::string& s);

struct TrajectoryMeta {
  int decimation = 1;
  std::optional<std::string> stamp;
};

void write_trajectory(std::ostream& os, const Trajectory& traj, FileFormat format,
                      const TrajectoryMeta& meta = {});

/// Reads either format back; d, n and r follow from the column header.
[[nodiscard]] Trajectory read_trajectory(std::istream& is, FileFormat format);

void write_pendulum_csv(std::ostream& os, const PendulumReduction& red);

[[nodiscard]] std::string schedule_to_json(const ControlSchedule& sched);
[[nodiscard]] ControlSchedule schedule_from_json(const std::string& text);

/// Square matrix from a JSON nested list [[...], ...] or a flat row-major list.
[[nodiscard]] Eigen::MatrixXd matrix_from_json(const std::string& text);

}  // namespace liegeo
