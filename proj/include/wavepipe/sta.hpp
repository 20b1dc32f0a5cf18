// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/gate_graph.hpp"

namespace wavepipe {

/// Latest (`s`) and earliest (`s_prime`) arrival, relative to the current
/// reference clock edge.
struct ArrivalWindow {
  double s = 0.0;
  double s_prime = 0.0;
};

enum class ViolationKind { setup, hold, non_interference, latch_region };

std::string_view to_string(ViolationKind kind);

struct Violation {
  std::string node;
  ViolationKind kind = ViolationKind::setup;
  double margin = 0.0;  ///< negative by how much the check failed
};

enum class UnitKind { none, flipflop, latch };

std::string_view to_string(UnitKind kind);

/// One timing element on a connection, applied in signal order.
struct Stage {
  enum class Kind { unit, anchor, buffer } kind = Kind::anchor;
  UnitKind unit = UnitKind::flipflop;
  int N = 0;
  double phi = 0.0;
  double delay = 0.0;  ///< buffer delay
};

/*! \brief A gate graph with every delay and delay unit resolved.
 *
 * `chains[e]` lists the elements between the output of `graph.edges[e].src`
 * and the input pin of `graph.edges[e].dst`.  Gate delays come from `d`,
 * indexed by node.
 */
struct PlacedCircuit {
  GateGraph graph;
  std::vector<double> d;
  std::vector<std::vector<Stage>> chains;
};

/// Reads element chains off a graph: a sequential element carrying a cycle
/// index is a delay unit; one without is a plain register, i.e. a unit at
/// cycle 0 and phase 0 followed by one anchor.
PlacedCircuit place_from_graph(const GateGraph& g);

struct TimingReport {
  std::vector<ArrivalWindow> node;      ///< gate output, or terminal capture input
  std::vector<bool> node_valid;         ///< false for pure sources
  std::vector<ArrivalWindow> edge_in;   ///< window at the connection after all stages
  std::vector<int> ref_cycle;           ///< anchors crossed on the critical fanin path
  std::vector<Violation> violations;
  std::vector<int> order;               ///< report order: topological, ties by name
  bool converged = true;

  [[nodiscard]] bool clean() const { return violations.empty(); }
};

/// Longest flip-flop to flip-flop path delay including clock-to-q and setup.
/// Inputs and outputs count as flip-flops.  No guard bands.
double traditional_min_period(const Circuit& c);

TimingReport propagate_windows(const PlacedCircuit& placed, const Config& cfg);

/// Setup and hold checks at a capturing boundary terminal.
std::vector<Violation> check_boundary(const std::string& node, const ArrivalWindow& w, const Config& cfg,
                                      const FlipFlopParams& p);

/// `node  s  s'  ref_cycle  violations` table.
std::string format_report(const PlacedCircuit& placed, const TimingReport& r);

}  // namespace wavepipe
