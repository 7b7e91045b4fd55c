#pragma once

#include <string>

#include "regsets/serialize.hpp"

namespace regsets {

struct RunResult {
  Json report;
  bool pass = false;
};

// Executes one CLI command described by a config object:
//   {command, mode, seed, budgets{nodes,draws,pairs}, out, params{}, inputs{}}
// Writes artifact files under `out` (when given), returns the report.
// Module errors surface as a failed report carrying the machine-readable
// error code rather than an exception.
RunResult run_pipeline(const Json& config);

}  // namespace regsets
