#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ftlsim/ftl.hpp"
#include "ftlsim/metrics.hpp"
#include "ftlsim/workload.hpp"

namespace ftlsim::cli {

/// Everything one simulation point needs, straight from flags or a
/// key=value config file.
struct RunSpec {
  FtlConfig config;
  std::string workload;          // "uniform:...", "hotspot:...", "zipf:..."
  std::string trace;             // trace file path (alternative to workload)
  std::string trace_format = "canonical";
  std::uint32_t lba_unit = 512;
  std::uint64_t logical_capacity = 0;  // bytes; 0 = fill to the op factor
  std::string out_dir = "out";
};

std::vector<WriteRequest> build_workload(const RunSpec& spec);

/// Resolves logical capacity into geometry.logical_pages and validates.
void finalize_spec(RunSpec& spec);

struct RunOutcome {
  SimReport report;
  double wall_clock_s = 0.0;
};

RunOutcome execute_run(const RunSpec& spec, bool timed = false);

int cli_main(int argc, const char* const* argv);

}  // namespace ftlsim::cli
