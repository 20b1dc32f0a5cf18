// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "properties.hpp"
#include "wavepipe/retime.hpp"

using namespace wavepipe;
using namespace wavepipe::testing;

namespace {

GateGraph graph(const std::string& file) { return to_gate_graph(load_circuit(file)); }

// fig5_orig with F6 pushed backward across g_5 onto all three of its inputs.
constexpr const char* kFig5Retimed =
    "circuit fig5\nclock period=10 duty=0.5\nffparams tcq=1 tsu=1 th=1 tdq=1\n"
    "input i1\ninput i2\ninput i3\noutput o from=F4\n"
    "ff F1 from=i1 boundary\nff F2 from=i2 boundary\nff F3 from=i3 boundary\n"
    "gate g_1 fn=not delay=2 in=F1\nff F5 from=g_1\ngate g_2 fn=not delay=2 in=F5\n"
    "gate g_3 fn=buf delay=2 in=F3\ngate g_4 fn=and delay=3 in=F2,g_3\n"
    "ff Ra from=g_2\nff Rb from=g_4\nff Rc from=g_3\n"
    "gate g_5 fn=or delay=3 in=Ra,Rb,Rc\ngate g_6 fn=not delay=2 in=g_5\nff F4 from=g_6 boundary\n";

}  // namespace

TEST_CASE("Fig. 5 removals") {
  const GateGraph orig = graph("fig5_orig.net");
  const GateGraph opt = graph("fig5_opt.net");
  const RetimeSolution sol = extract_removals(orig, opt);
  REQUIRE(sol.feasible);
  CHECK(sol.y[orig.find_edge("g_4", "g_5")] == 1);
  CHECK(sol.y[orig.find_edge("g_2", "g_5")] == 1);
  CHECK(sol.y[orig.find_edge("g_1", "g_2")] == 1);
  CHECK(sol.total_removed() == 3);
  CHECK(sol.r[orig.node_index("g_5")] == 1);
  CHECK(format_anchors(orig, sol) ==
        "edge g_1 g_2 removed=1\nedge g_2 g_5 removed=1\nedge g_4 g_5 removed=1\n");
}

TEST_CASE("identical graphs need no lags or removals") {
  for (const char* file : {"fig5_orig.net", "fig6_orig.net", "fig1c_open.net", "fig3_orig.net"}) {
    const GateGraph g = graph(file);
    const RetimeSolution sol = extract_removals(g, g);
    REQUIRE(sol.feasible);
    CHECK(std::all_of(sol.r.begin(), sol.r.end(), [](int r) { return r == 0; }));
    CHECK(sol.total_removed() == 0);
    CHECK(format_anchors(g, sol).empty());
  }
}

TEST_CASE("a pure retiming removes nothing") {
  const GateGraph orig = graph("fig5_orig.net");
  const GateGraph opt = to_gate_graph(parse_netlist(kFig5Retimed));
  const RetimeSolution sol = extract_removals(orig, opt);
  REQUIRE(sol.feasible);
  CHECK(sol.total_removed() == 0);
  CHECK(std::any_of(sol.r.begin(), sol.r.end(), [](int r) { return r != 0; }));
  CHECK(sol.r[orig.node_index("g_5")] == 1);
}

TEST_CASE("Fig. 6 removes F7 and F8") {
  const GateGraph orig = graph("fig6_orig.net");
  const RetimeSolution sol = extract_removals(orig, graph("fig6_opt.net"));
  REQUIRE(sol.feasible);
  CHECK(format_anchors(orig, sol) == "edge g_1 g_4 removed=1\nedge g_4 g_5 removed=1\n");
}

TEST_CASE("a graph with extra registers has no consistent removal") {
  const GateGraph fewer = graph("fig5_opt.net");
  const GateGraph more = graph("fig5_orig.net");
  const RetimeSolution sol = extract_removals(fewer, more);
  CHECK_FALSE(sol.feasible);
  CHECK_FALSE(sol.diagnostic.empty());
}

TEST_CASE("smallest total lag objective") {
  Config cfg;
  cfg.retime_objective = "min-lags";
  const GateGraph orig = graph("fig5_orig.net");
  const RetimeSolution sol = extract_removals(orig, graph("fig5_opt.net"), cfg);
  REQUIRE(sol.feasible);
  for (std::size_t e = 0; e < orig.edges.size(); ++e)
    CHECK(sol.y[e] == sol.w_r[e] - sol.w_prime[e]);
}

TEST_CASE("retime invariants") {
  for (const auto& o : retime_properties(kPropertyCases)) CHECK_MESSAGE(o.ok(kPropertyCases), describe(o));
}
