// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "fixtures.hpp"
#include "properties.hpp"
#include "wavepipe/sta.hpp"

using namespace wavepipe;
using namespace wavepipe::testing;

namespace {

bool has(const TimingReport& r, const std::string& node, ViolationKind kind) {
  for (const auto& v : r.violations)
    if (v.node == node && v.kind == kind) return true;
  return false;
}

struct Analyzed {
  PlacedCircuit placed;
  TimingReport report;
};

Analyzed analyze(const std::string& file, const Config& cfg) {
  Analyzed a;
  a.placed = place_from_graph(to_gate_graph(load_circuit(file)));
  a.report = propagate_windows(a.placed, cfg);
  return a;
}

double edge_s(const Analyzed& a, const std::string& src, const std::string& dst) {
  return a.report.edge_in[a.placed.graph.find_edge(src, dst)].s;
}

}  // namespace

TEST_CASE("traditional minimum periods of the Fig. 1 circuits") {
  CHECK(traditional_min_period(load_circuit("fig1a.net")) == doctest::Approx(21));
  CHECK(traditional_min_period(load_circuit("fig1b.net")) == doctest::Approx(16));
  CHECK(traditional_min_period(load_circuit("fig1c.net")) == doctest::Approx(11));
}

TEST_CASE("Fig. 3 arrival windows") {
  const Analyzed a = analyze("fig3.net", nominal(10));
  // Launch 3 + 11 through u, one anchor: 4.  Then 3 more through w: 7.
  CHECK(edge_s(a, "u", "w") == doctest::Approx(4));
  CHECK(a.report.node[a.placed.graph.node_index("w")].s == doctest::Approx(7));
  // F3 is a register: it relaunches at 10 + 3 and the anchor takes 10 off.
  CHECK(edge_s(a, "w", "z") == doctest::Approx(3));
  CHECK(a.report.node[a.placed.graph.node_index("z")].s == doctest::Approx(5));
  CHECK(a.report.clean());
}

TEST_CASE("removing F3 from Fig. 3 breaks hold at F4") {
  const Analyzed a = analyze("fig3_removed.net", nominal(10));
  // 7 + 2 arrives at z, minus a second anchor: -1.
  CHECK(a.report.node[a.placed.graph.node_index("z")].s == doctest::Approx(-1));
  CHECK(has(a.report, "F4", ViolationKind::hold));
}

TEST_CASE("check_boundary at the setup and hold edges") {
  const Config cfg = nominal(10);
  FlipFlopParams p;
  p.t_su = 1;
  p.t_h = 1;
  CHECK(check_boundary("F", {9.0, 1.0}, cfg, p).empty());
  const auto late = check_boundary("F", {9.001, 1.0}, cfg, p);
  REQUIRE(late.size() == 1);
  CHECK(late[0].kind == ViolationKind::setup);
  CHECK(late[0].margin == doctest::Approx(-0.001));
  const auto early = check_boundary("F", {5.0, 0.999}, cfg, p);
  REQUIRE(early.size() == 1);
  CHECK(early[0].kind == ViolationKind::hold);
}

TEST_CASE("guard bands stretch the checks") {
  Config cfg = nominal(10);
  cfg.r_u = 1.1;
  FlipFlopParams p;
  p.t_su = 1;
  p.t_h = 1;
  CHECK(check_boundary("F", {8.9, 1.1}, cfg, p).empty());
  CHECK(check_boundary("F", {8.95, 1.1}, cfg, p).size() == 1);
  CHECK(check_boundary("F", {5.0, 1.05}, cfg, p).size() == 1);
}

TEST_CASE("a transparent latch passes late data through") {
  const Circuit c = parse_netlist(
      "circuit lt\nclock period=10 duty=0.5\nffparams tcq=3 tsu=1 th=1 tdq=3\n"
      "input i\noutput o from=F4\nff F1 from=i boundary\n"
      "gate u fn=buf delay=3 in=F1\nlatch L from=u\ngate z fn=buf delay=2 in=L\nff F4 from=z boundary\n");
  Config cfg = nominal(10);
  cfg.r_u = 1.2;
  cfg.r_l = 0.8;
  const PlacedCircuit pc = place_from_graph(to_gate_graph(c));
  const TimingReport r = propagate_windows(pc, cfg);
  // Input window [4.8, 7.2] straddles the opening edge at 5: the late edge
  // leaves through the data path (7.2 + 3.6), the early one at the clock
  // (5 + 2.4).  One anchor takes 10 off both.
  const auto& w = r.edge_in[pc.graph.find_edge("u", "z")];
  CHECK(w.s == doctest::Approx(0.8));
  CHECK(w.s_prime == doctest::Approx(-2.6));
  for (const auto& v : r.violations) CHECK(v.kind != ViolationKind::latch_region);
}

TEST_CASE("a latch reached after it opens flags the region check") {
  const Circuit c = parse_netlist(
      "circuit lt\nclock period=10 duty=0.5\nffparams tcq=3 tsu=1 th=1 tdq=3\n"
      "input i\noutput o from=F4\nff F1 from=i boundary\n"
      "gate u fn=buf delay=4 in=F1\nlatch L from=u\ngate z fn=buf delay=2 in=L\nff F4 from=z boundary\n");
  const PlacedCircuit pc = place_from_graph(to_gate_graph(c));
  const TimingReport r = propagate_windows(pc, nominal(10));
  bool region = false;
  for (const auto& v : r.violations) region = region || v.kind == ViolationKind::latch_region;
  CHECK(region);
}

TEST_CASE("report table lists nodes in order") {
  const Analyzed a = analyze("fig3.net", nominal(10));
  const std::string text = format_report(a.placed, a.report);
  CHECK(text.rfind("node", 0) == 0);
  CHECK(text.find("\nu ") < text.find("\nw "));
  CHECK(text.find("\nw ") < text.find("\nz "));
}

TEST_CASE("sta invariants") {
  for (const auto& o : sta_properties(kPropertyCases)) CHECK_MESSAGE(o.ok(kPropertyCases), describe(o));
}
