#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnrates/distributions.hpp"
#include "nnrates/harness.hpp"
#include "nnrates/report.hpp"

namespace nnrates {

// Distribution documents:
//   {"preset": "disjoint_support" | "two_pure_atoms" | "gapped_two_level"}
//   {"family": "power_margin", "gamma": 1.0}
//   {"family": "piecewise_uniform", "prior1": 0.5,
//    "class0": {"breaks": [...], "heights": [...]}, "class1": {...}}
//   {"family": "finite_atomic", "distances": [[...], ...] | "distance_file": "path",
//    "mass": [...], "eta": [...]}
// Relative distance_file paths resolve against base_dir.
DistributionInstance distribution_from_json(const nlohmann::json& j,
                                            const std::filesystem::path& base_dir = {});
// Reads a distribution document from a JSON file.
DistributionInstance load_distribution(const std::filesystem::path& path);

enum class ExperimentType {
  UpperBound,
  ZeroBayes,
  LowerBound,
  ExactMistake,
  ExpectedExcess,
  PointwiseExcess,
  RateSweep,
  Consistency,
  Boundary,
  HighError,
};

std::string to_string(ExperimentType type);

struct ExperimentSpec {
  ExperimentType type = ExperimentType::UpperBound;
  std::string name;
  std::vector<std::size_t> n;  // sample sizes (one for single-n experiments)
  KRule rule;
  double delta = 0.1;
  std::size_t trials = 400;
  std::size_t mc_points = 2000;
  QueryMode query = QueryMode::Auto;
  // lower_bound
  std::size_t batch = 2000;
  std::size_t min_trials = 2000;
  std::size_t max_trials = 400000;
  // pointwise_excess
  double x = 0.5;
  // boundary
  double p = 0.1;
  std::size_t probes = 101;
};

struct Overrides {
  std::optional<std::uint64_t> master_seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> mc_points;
  std::optional<std::string> format;
  std::optional<std::string> output_dir;
};

struct RunConfig {
  nlohmann::json echo;  // the document after overrides
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "results";
  ReportFormat format = ReportFormat::Csv;
  DistributionInstance dist = DistributionInstance::power_margin(1.0);
  std::vector<ExperimentSpec> experiments;
};

// Parses and fully validates a run document: the distribution is built and
// every experiment's parameters are checked (k rules, bound feasibility, grid
// sizes) so that nothing runs unless everything can. Throws ArgumentError (or
// another nnrates::Error) describing the first problem.
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& overrides,
                           const std::filesystem::path& base_dir = {});

// Reads JSON from a file; IoError if unreadable, ArgumentError if malformed.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace nnrates
