// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "wavepipe/config.hpp"
#include "wavepipe/netlist.hpp"

namespace wavepipe::testing {

inline std::string circuit_path(const std::string& file) { return std::string(WAVEPIPE_CIRCUITS_DIR) + "/" + file; }

inline Circuit load_circuit(const std::string& file) { return parse_netlist_file(circuit_path(file)); }

/// The worked examples use nominal delays: no guard bands.
inline Config nominal(double T) {
  Config cfg;
  cfg.T = T;
  cfg.r_u = 1.0;
  cfg.r_l = 1.0;
  return cfg;
}

}  // namespace wavepipe::testing
