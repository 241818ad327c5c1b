#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipselect/metric_space.hpp"

namespace lipselect::cli {

/// Exit statuses of `run`.
enum ExitStatus : int {
  kOk = 0,
  kChecksFailed = 1,
  kSchemaError = 2,
  kPreconditionError = 3,
  kInternalError = 4,
};

/// One invocation. Unset fields fall back to the JSON document named by
/// `config` (keys match the field names), then to built-in defaults.
struct RunConfig {
  std::string command;  // separate | select | plip | bartle-graves | verify
  std::optional<std::filesystem::path> config;

  std::optional<std::filesystem::path> space;
  std::optional<std::filesystem::path> correspondence;
  std::optional<std::filesystem::path> matrix;
  std::optional<std::filesystem::path> sequence;
  std::optional<std::filesystem::path> values;
  std::optional<std::filesystem::path> f0;
  std::optional<std::filesystem::path> out;

  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> epsilon;
  std::optional<double> r;
  std::optional<double> tol;
  std::optional<double> delta_min;
  std::optional<int> rounds;
  std::optional<int> sphere_count;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::vector<double> radii;
  std::vector<PointId> points;
};

/// Dispatches to the command's pipeline, writes the JSON report (to `out`,
/// or to `report` when no path is given) plus any CSV tables next to it, and
/// returns the exit status. Diagnostics go to `log`.
int run(const RunConfig& config, std::ostream& report, std::ostream& log);

}  // namespace lipselect::cli
