// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace wavepipe {

enum ExitCode : int { kExitOk = 0, kExitFail = 1, kExitUsage = 2, kExitInfeasible = 3 };

/// Entry point behind the `wavepipe` binary.  Subcommands: analyze,
/// optimize, extract, sdc, verify.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wavepipe
