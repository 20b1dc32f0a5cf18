// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "wavepipe/netlist.hpp"

namespace wavepipe {

enum class NodeKind { gate, terminal };

/// An element collapsed onto a gate-to-gate connection, in signal order.
struct EdgeElement {
  InstanceKind kind = InstanceKind::flipflop;  // flipflop, latch, anchor or buffer
  std::string name;
  std::optional<double> phase;
  std::optional<int> cycle;
  double delay = 0.0;  // buffers only
};

struct GraphNode {
  std::string name;
  NodeKind kind = NodeKind::gate;
  InstanceKind source_kind = InstanceKind::gate;
  std::string fn;
  double d = 0.0;
  std::vector<double> lib;
  bool launches = false;  ///< terminal drives the graph (flip-flop Q or input)
  bool captures = false;  ///< terminal is driven (flip-flop D or output)
  std::vector<int> fanin;   ///< edge ids in input-pin order
  std::vector<int> fanout;  ///< edge ids

  [[nodiscard]] bool is_gate() const { return kind == NodeKind::gate; }
};

/*! \brief Connection between two graph nodes.
 *
 * `w` counts the sequential elements (non-boundary flip-flops and latches)
 * collapsed onto the connection.  A non-boundary flip-flop that drives k
 * loads is duplicated onto k edges.
 */
struct GraphEdge {
  int src = -1;
  int dst = -1;
  int pin = 0;
  int w = 0;
  std::vector<EdgeElement> elements;

  [[nodiscard]] int anchors() const;
  [[nodiscard]] int buffers() const;
  [[nodiscard]] double buffer_delay() const;
};

class GateGraph {
 public:
  std::string name;
  ClockSpec clock;
  FlipFlopParams ff_params;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  [[nodiscard]] int node_index(const std::string& name) const;
  [[nodiscard]] const GraphNode& node(const std::string& name) const { return nodes.at(node_index(name)); }
  /// Edge id for src -> dst (first pin match when `pin` < 0), or -1.
  [[nodiscard]] int find_edge(const std::string& src, const std::string& dst, int pin = -1) const;

  [[nodiscard]] std::size_t gate_count() const;
  [[nodiscard]] int total_weight() const;

  /// Pin names: `<gate>/ZN`, `<gate>/A` or `/A<k>`, `<terminal>/D`.
  [[nodiscard]] std::string output_pin(int node) const;
  [[nodiscard]] std::string input_pin(int edge) const;

  /// Topological order over edges without registers or anchors that do not
  /// leave a launching terminal.  Launching terminals come first and ties
  /// are broken by name.
  [[nodiscard]] std::vector<int> topo_order() const;

  void rebuild_index();

 private:
  std::unordered_map<std::string, int> index_;
};

GateGraph to_gate_graph(const Circuit& c);

/*! \brief Result of choosing the region to optimize. */
struct CriticalPart {
  std::set<std::string> removable;
  std::set<std::string> boundary;
  std::set<std::string> gates;  ///< combinational nodes reaching a removable flip-flop
  Circuit circuit;              ///< input circuit with boundary flags rewritten
};

/// Marks the end points of every flip-flop to flip-flop path whose delay,
/// including clock-to-q and setup, exceeds `t_spec` as removable.
CriticalPart select_critical_part(const Circuit& c, double t_spec);

}  // namespace wavepipe
