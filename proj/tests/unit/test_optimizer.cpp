// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "fixtures.hpp"
#include "properties.hpp"
#include "wavepipe/optimizer.hpp"

using namespace wavepipe;
using namespace wavepipe::testing;

namespace {

FlowResult flow(const std::string& file, double T) {
  return run_flow(to_gate_graph(load_circuit(file)), nominal(T));
}

}  // namespace

TEST_CASE("Fig. 1(c) reaches 9 but not 8") {
  const FlowResult at9 = flow("fig1c.net", 9);
  REQUIRE(at9.feasible());
  CHECK(at9.report.feasible);
  CHECK(propagate_windows(at9.circuit->placed(), nominal(9)).clean());

  const FlowResult at8 = flow("fig1c.net", 8);
  CHECK_FALSE(at8.feasible());
  CHECK(at8.report.failed_stage == "relaxed");
  CHECK_FALSE(at8.report.diagnostic.empty());
}

TEST_CASE("Fig. 1(c) just under 9 is infeasible") {
  CHECK_FALSE(flow("fig1c.net", 8.9).feasible());
}

TEST_CASE("the XOR loop keeps a delay unit") {
  const GateGraph g = to_gate_graph(load_circuit("fig1c_open.net"));
  const FlowResult fr = run_flow(g, nominal(9));
  REQUIRE(fr.feasible());
  const int loop = g.find_edge("XOR", "XOR");
  CHECK(fr.circuit->decisions[loop].unit_case != UnitKind::none);
  CHECK(fr.circuit->flipflop_units() + fr.circuit->latch_units() >= 1);
}

TEST_CASE("stage reports follow the flow") {
  const FlowResult fr = flow("fig1c_open.net", 10);
  REQUIRE(fr.feasible());
  REQUIRE(fr.report.stages.size() >= 3);
  CHECK(fr.report.stages[0].name == "relaxed");
  CHECK(fr.report.stages[1].S_d <= fr.report.stages[1].S);
  const std::string kv = fr.report.to_key_values();
  CHECK(kv.find("stage1.S=") != std::string::npos);
}

TEST_CASE("snap_to_library picks the nearest entry, low on ties") {
  CHECK(snap_to_library(4.4, {3, 5}) == 5);
  CHECK(snap_to_library(4.0, {3, 5}) == 3);
  CHECK(snap_to_library(2.0, {3, 5}) == 3);
  CHECK(snap_to_library(9.0, {3, 5}) == 5);
  CHECK(snap_to_library(1.5, {}) == 1.5);
}

TEST_CASE("discretized delays come from the libraries") {
  const FlowResult fr = flow("fig1c_open.net", 9.5);
  REQUIRE(fr.feasible());
  const auto& oc = *fr.circuit;
  for (std::size_t v = 0; v < oc.base.nodes.size(); ++v) {
    const auto& n = oc.base.nodes[v];
    if (!n.is_gate()) continue;
    CHECK(std::find(n.lib.begin(), n.lib.end(), oc.d[v]) != n.lib.end());
  }
}

TEST_CASE("replace_buffers leaves a circuit without buffers alone") {
  const FlowResult fr = flow("fig1c.net", 11);
  REQUIRE(fr.feasible());
  REQUIRE(fr.circuit->buffers() == 0);
  int replaced = -1;
  const OptimizedCircuit out = replace_buffers(*fr.circuit, nominal(11), &replaced);
  CHECK(replaced == 0);
  CHECK(out.buffer_count == fr.circuit->buffer_count);
  CHECK(out.d == fr.circuit->d);
  CHECK(out.area(nominal(11)) == fr.circuit->area(nominal(11)));
}

TEST_CASE("sweep from 11 stops within one step of 9") {
  const GateGraph g = to_gate_graph(load_circuit("fig1c.net"));
  const FlowResult fr = sweep_clock_period(g, nominal(11), 0.005);
  REQUIRE(fr.feasible());
  CHECK(fr.report.T >= 9.0 - 1e-9);
  CHECK(fr.report.T <= 9.0 + 0.005 * 11 + 1e-9);
}

TEST_CASE("sweep rejects a bad step") {
  const GateGraph g = to_gate_graph(load_circuit("fig1c.net"));
  CHECK_THROWS_AS(sweep_clock_period(g, nominal(11), 0.0), std::invalid_argument);
}

TEST_CASE("netlist form names units and keeps anchors") {
  const FlowResult fr = flow("fig1c_open.net", 9);
  REQUIRE(fr.feasible());
  const Circuit c = fr.circuit->to_circuit();
  CHECK(c.count(InstanceKind::anchor) == 3);
  for (const auto& inst : c.instances()) {
    if ((inst.kind == InstanceKind::flipflop || inst.kind == InstanceKind::latch) && !inst.boundary)
      CHECK(inst.name.rfind("U_", 0) == 0);
    if (inst.kind == InstanceKind::buffer) CHECK(inst.name.rfind("B_", 0) == 0);
  }
  CHECK(propagate_windows(place_from_graph(to_gate_graph(c)), nominal(9)).clean());
}

TEST_CASE("optimizer invariants") {
  for (const auto& o : optimizer_properties(200)) CHECK_MESSAGE(o.ok(200), describe(o));
}
