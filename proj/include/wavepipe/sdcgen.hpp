// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/gate_graph.hpp"
#include "wavepipe/retime.hpp"

namespace wavepipe {

/// One register-to-register path of the optimized graph.
struct WavePath {
  std::string source;              ///< launching terminal or register name
  std::string sink;                ///< capturing terminal or register name
  std::vector<std::string> pins;   ///< source Q pin through sink D pin
  std::vector<int> anchors;        ///< anchor edges crossed, in order, repeated per removed register
  std::vector<std::size_t> anchor_pin;  ///< index into `pins` of each anchor's input pin
};

/*! \brief Paths sharing endpoints and the same anchor sequence.
 *
 * A class crossing k anchors carries k + 1 waves and is bounded by
 * [kT, (k+1)T].  `through` and `to` are filled by find_differentiating_pins.
 */
struct WavePathClass {
  std::string source;
  std::string sink;
  std::vector<int> anchors;  ///< edge ids of the optimized graph
  std::vector<std::string> anchor_names;
  int waves = 0;
  std::vector<WavePath> paths;
  bool entangled = false;
  bool constrainable = true;
  std::string diagnostic;
  std::vector<std::string> through;
  std::string to;
};

struct SdcConstraint {
  bool is_max = true;
  int multiple = 0;  ///< bound in units of T
  double bound = 0.0;
  std::vector<std::string> through;
  std::string to;

  [[nodiscard]] std::string text() const;
};

/// Enumerates register-to-register paths of `opt` that cross at least one
/// anchor (edges with y >= 1 in `anchors`) and groups them.  Throws
/// std::length_error past `path_limit` paths.
std::vector<WavePathClass> classify_paths(const GateGraph& opt, const RetimeSolution& anchors,
                                          std::size_t path_limit = 100000);

/// Resolves `through`/`to` for every class.  Classes that cannot be told
/// apart from a higher-wave class are marked unconstrainable.
void find_differentiating_pins(std::vector<WavePathClass>& classes);

/// Max/min pairs in class order with duplicates dropped.
std::vector<SdcConstraint> build_constraints(const std::vector<WavePathClass>& classes, double T);

std::string emit_sdc(const std::vector<WavePathClass>& classes, const Config& cfg);

/// True when `path` passes every through pin in order and ends at `to`.
bool constraint_matches(const SdcConstraint& c, const WavePath& path);

}  // namespace wavepipe
