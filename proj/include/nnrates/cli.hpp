#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nnrates/config.hpp"
#include "nnrates/report.hpp"

namespace nnrates {

// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalid = 2,   // parse or validation error
  kExitResource = 3,  // an exact oracle exceeded its budget
  kExitIo = 4,        // unreadable input or unwritable output
};

struct ExperimentResult {
  Table table;
  Summary summary;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const DistributionInstance& dist,
                                std::uint64_t master_seed);

// Verdict dump over a probe grid (every atom on finite spaces).
ExperimentResult analyze_boundary(const DistributionInstance& dist, double p, double delta,
                                  std::size_t probes);

// Entry point of the nnrates executable.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nnrates
