// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "jjaqed/config.hpp"
#include "jjaqed/errors.hpp"

namespace jjaqed {

// Runs the configured task and writes its CSV files into cfg.output.
// Returns the paths written. Module errors propagate as jjaqed::Error.
std::vector<std::string> run(const RunConfig& cfg);

// Grid tasks only (sweep-chi, sweep-omega). Every grid point is solved
// independently on cfg.parallelism workers; a failing point becomes a row
// with the error column filled instead of aborting the sweep.
std::vector<std::string> sweep(const RunConfig& cfg);

// 2 for schema errors, 4 for tracking ambiguity, 3 for other numeric failures.
int exit_code(ErrorKind kind);

}  // namespace jjaqed
