// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/gate_graph.hpp"

namespace wavepipe {

/*! \brief Retiming lags and removal counts relating two graphs.
 *
 * All vectors are indexed like the original graph.  For every edge
 * `w_r = w + r(dst) - r(src)` and `y = w_r - w_prime`.
 */
struct RetimeSolution {
  bool feasible = false;
  std::string diagnostic;
  std::vector<int> r;        ///< per node; 0 at terminals
  std::vector<int> y;        ///< per edge
  std::vector<int> w;        ///< per edge, original register count
  std::vector<int> w_r;      ///< per edge, after retiming
  std::vector<int> w_prime;  ///< per edge, register count in the optimized graph
  std::vector<int> opt_edge; ///< matching edge id in the optimized graph

  [[nodiscard]] int total_removed() const;
};

/// Finds lags and removals that turn `orig` into `opt`.  Registers in `opt`
/// are the plain flip-flops and latches; delay units and anchors do not
/// count.  `cfg.retime_objective` picks between fewest removals (ties broken
/// by smallest total lag) and smallest total lag.
RetimeSolution extract_removals(const GateGraph& orig, const GateGraph& opt, const Config& cfg = {});

/// One `edge <src> <dst> removed=<y>` line per edge with y >= 1, in edge order.
std::string format_anchors(const GateGraph& orig, const RetimeSolution& sol);

}  // namespace wavepipe
