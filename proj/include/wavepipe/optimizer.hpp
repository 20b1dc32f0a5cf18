// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/gate_graph.hpp"
#include "wavepipe/netlist.hpp"
#include "wavepipe/sta.hpp"
#include "wavepipe/vsmodel.hpp"

namespace wavepipe {

/*! \brief The optimizer's result on top of the graph it was given.
 *
 * Every removable register of `base` becomes an anchor.  Each connection
 * may carry one delay unit ahead of its anchors and a chain of identical
 * buffers after them.  Gate delays in `d` are library entries once
 * discretization has run.
 */
struct OptimizedCircuit {
  GateGraph base;
  double T = 0.0;
  double buffer_delay = 1.0;
  std::vector<EdgeDecision> decisions;  ///< per edge of `base`
  std::vector<double> d;                ///< per node
  std::vector<int> buffer_count;        ///< per edge

  [[nodiscard]] PlacedCircuit placed() const;
  /// Netlist form: units `U_<src>_<dst>_<pin>`, buffers `B_<src>_<dst>_<pin>_<i>`,
  /// anchors named after the registers they replace.
  [[nodiscard]] Circuit to_circuit() const;

  [[nodiscard]] int flipflop_units() const;
  [[nodiscard]] int latch_units() const;
  [[nodiscard]] int buffers() const;
  /// Area of inserted units and buffers.
  [[nodiscard]] double area(const Config& cfg) const;
};

/// Area of the registers and buffers that the optimizer may remove from `g`.
double removable_area(const GateGraph& g, const Config& cfg);

struct StageReport {
  std::string name;
  std::string status;
  std::size_t S = 0;
  std::size_t S_d = 0;
  double objective = 0.0;
  int iterations = 0;
  std::vector<std::size_t> trace;  ///< site-set size after each iteration
};

struct OptimizationReport {
  bool feasible = false;
  std::string failed_stage;  ///< relaxed, cdq, legalization, discretization or final-verify
  std::string diagnostic;
  std::vector<StageReport> stages;
  double T = 0.0;
  int n_f = 0;
  int n_l = 0;
  int n_b = 0;
  double area_delta = 0.0;
  int replaced = 0;  ///< buffer chains turned into units

  /// `stage1.S=3` style lines.
  [[nodiscard]] std::string to_key_values() const;
  [[nodiscard]] std::string to_text() const;
};

struct FlowResult {
  std::optional<OptimizedCircuit> circuit;
  OptimizationReport report;

  [[nodiscard]] bool feasible() const { return circuit.has_value(); }
};

/// The full four-stage flow at `cfg.T` (the graph clock when unset).
FlowResult run_flow(const GateGraph& g, const Config& cfg);

/// Nearest library entry; ties go to the smaller value.
double snap_to_library(double d, const std::vector<double>& lib);

/// Snaps gate delays, re-times, and nudges offending gates one library step
/// when needed.  Returns nullopt when the repaired circuit still fails.
std::optional<OptimizedCircuit> discretize_delays(const OptimizedCircuit& oc, const Config& cfg);

/// Turns long buffer chains into delay units where the exact model allows
/// it without growing the area.  Returns the input when nothing qualifies.
OptimizedCircuit replace_buffers(const OptimizedCircuit& oc, const Config& cfg, int* replaced = nullptr);

/// Shrinks T from `cfg.T` by `step_fraction * cfg.T` per step while the
/// flow stays feasible; returns the last feasible run.
FlowResult sweep_clock_period(const GateGraph& g, const Config& cfg, double step_fraction);

}  // namespace wavepipe
