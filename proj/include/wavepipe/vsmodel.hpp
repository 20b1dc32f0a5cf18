// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/gate_graph.hpp"
#include "wavepipe/milp.hpp"
#include "wavepipe/sta.hpp"

namespace wavepipe {

/*! \brief Decoded choice for one connection u -> v.
 *
 * Along the connection the signal passes, in order: the output of u, an
 * optional delay unit (emulated by the pads `delta`/`delta_prime` before
 * legalization), `lambda` anchors, a buffer chain of delay `xi`, and finally
 * the gate v with delay `d`.
 */
struct EdgeDecision {
  int edge = -1;
  double xi = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
  bool x = false;
  UnitKind unit_case = UnitKind::none;
  int N = 0;
  double phi = 0.0;
  double d = 0.0;  ///< delay of the destination gate (0 for terminals)
};

/// Edge ids of candidate or committed delay-unit sites.
using PlacementSet = std::set<int>;

enum class ModelStage { relaxed, cdq, legal };

/// Variable ids of one site's unit model; -1 where absent.
struct SiteVars {
  int x = -1;
  int z_delta = -1;
  int z_delta_prime = -1;
  int N = -1;
  int t = -1;        ///< unit output, latest
  int t_prime = -1;  ///< unit output, earliest
  int ceiling = -1;  ///< unit output, upper bound on the earliest arrival
  std::vector<int> selectors;
  std::vector<UnitKind> selector_kind;
  std::vector<double> selector_phi;
};

struct ModelArtifacts {
  MilpModel model;
  ModelStage stage = ModelStage::relaxed;
  double T = 0.0;
  double big_M = 0.0;
  std::vector<int> s, s_prime;          ///< per node output window (-1 for pure sinks)
  std::vector<int> cap_s, cap_s_prime;  ///< per capturing terminal
  std::vector<int> d;                   ///< per node; -1 for terminals
  std::vector<int> xi, delta, delta_prime, buffers;  ///< per edge; buffers is -1 unless integral
  std::vector<SiteVars> site;           ///< per edge
  PlacementSet sites;
  std::size_t core_rows = 0;  ///< rows from the connection, node and boundary constraints
};

/// Knobs for the exact model used by legalization and the late stages.
struct LegalOptions {
  bool zero_pads = false;                 ///< forbid pads outside the sites
  std::set<int> no_latch;                 ///< sites restricted to flip-flop units
  std::set<int> unit_only;                ///< sites that must hold a unit (no pass-through branch)
  std::map<int, std::pair<UnitKind, double>> fixed_unit;  ///< site -> (kind, phase)
  std::vector<std::optional<double>> fixed_d;             ///< per node
  bool lib_choice = false;                ///< gate delays restricted to library entries
  std::set<int> integer_buffers;          ///< edges whose buffer delay is a whole number of buffers
  std::set<int> no_buffers;               ///< edges that may not receive buffers
};

ModelArtifacts build_relaxed_model(const GateGraph& g, const Config& cfg);

ModelArtifacts build_cdq_model(const GateGraph& g, const Config& cfg, const PlacementSet& S, double d_th);

ModelArtifacts build_legalization_model(const GateGraph& g, const Config& cfg, const PlacementSet& S_d,
                                        const LegalOptions& opts = {});

/// Register-carrying connections that, taken together, cut every loop not
/// closed by a boundary terminal.  A unit must stay on each of them so no
/// feedback loop runs purely through anchors.
PlacementSet loop_breakers(const GateGraph& g);

/// big-M used by the disjunctions and indicators of a model over `g`.
double default_big_M(const GateGraph& g, const Config& cfg);

struct Decoded {
  std::vector<EdgeDecision> edges;
  PlacementSet unequal;  ///< connections with delta_prime - delta > tolerance
  PlacementSet units;    ///< sites with x = 1 or a unit branch selected
  std::vector<double> d; ///< per node
};

/// Throws std::logic_error if an integer variable came back fractional.
Decoded decode_solution(const ModelArtifacts& arts, const Solution& sol, const GateGraph& g);

}  // namespace wavepipe
