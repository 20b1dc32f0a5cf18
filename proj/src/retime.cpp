// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/retime.hpp"

#include <cmath>
#include <sstream>

#include "wavepipe/milp.hpp"

namespace wavepipe {

int RetimeSolution::total_removed() const {
  int s = 0;
  for (int v : y) s += v;
  return s;
}

namespace {

RetimeSolution mismatch(RetimeSolution s, const std::string& why) {
  s.feasible = false;
  s.diagnostic = "structural mismatch: " + why;
  return s;
}

}  // namespace

RetimeSolution extract_removals(const GateGraph& orig, const GateGraph& opt, const Config& cfg) {
  RetimeSolution sol;
  const int n = static_cast<int>(orig.nodes.size());
  const int ne = static_cast<int>(orig.edges.size());
  if (opt.nodes.size() != orig.nodes.size() || opt.edges.size() != orig.edges.size())
    return mismatch(std::move(sol), "node or connection counts differ");
  for (const auto& node : orig.nodes) {
    const int k = opt.node_index(node.name);
    if (k < 0) return mismatch(std::move(sol), "'" + node.name + "' missing from the optimized circuit");
    if (opt.nodes[k].is_gate() != node.is_gate()) return mismatch(std::move(sol), "'" + node.name + "' changed kind");
  }
  sol.w.resize(ne);
  sol.w_prime.resize(ne);
  sol.opt_edge.resize(ne);
  int F = 0;
  for (int e = 0; e < ne; ++e) {
    const auto& ge = orig.edges[e];
    const int k = opt.find_edge(orig.nodes[ge.src].name, orig.nodes[ge.dst].name, ge.pin);
    if (k < 0)
      return mismatch(std::move(sol), "no connection " + orig.nodes[ge.src].name + " -> " + orig.nodes[ge.dst].name);
    sol.opt_edge[e] = k;
    sol.w[e] = ge.w;
    sol.w_prime[e] = opt.edges[k].w;
    F += ge.w;
  }

  MilpModel m;
  std::vector<int> r(n), a(n, -1), y(ne);
  for (int v = 0; v < n; ++v) {
    const bool pinned = !orig.nodes[v].is_gate();
    r[v] = m.add_var(VarKind::integer, pinned ? 0 : -F, pinned ? 0 : F, "r_" + orig.nodes[v].name);
    if (!pinned) {
      a[v] = m.add_continuous(0.0, F, "abs_r_" + orig.nodes[v].name);
      m.add_constraint(var(a[v]) >= var(r[v]));
      m.add_constraint(var(a[v]) >= -1.0 * var(r[v]));
    }
  }
  for (int e = 0; e < ne; ++e) {
    const auto& ge = orig.edges[e];
    y[e] = m.add_var(VarKind::integer, 0, ge.w + 2 * F, "y_" + std::to_string(e));
    // w + r(dst) - r(src) - y = w'
    m.add_constraint(var(r[ge.dst]) - var(r[ge.src]) - var(y[e]) == LinExpr(sol.w_prime[e] - ge.w));
    m.add_constraint(var(r[ge.dst]) - var(r[ge.src]) >= LinExpr(-ge.w));
  }
  // Weights keep the primary term strictly dominant over the tie-break.
  const double heavy = static_cast<double>(n) * F + 1.0;
  const double light_y = static_cast<double>(ne) * (2 * F + 1) + 1.0;
  const bool min_lags = cfg.retime_objective == "min-lags";
  LinExpr obj;
  for (int e = 0; e < ne; ++e) obj.add(y[e], min_lags ? 1.0 : heavy);
  for (int v = 0; v < n; ++v)
    if (a[v] >= 0) obj.add(a[v], min_lags ? light_y : 1.0);
  m.set_objective(obj);

  const Solution s = solve(m, {cfg.milp_nodes, cfg.milp_time_ms});
  if (!s.has_values()) return mismatch(std::move(sol), "no lag assignment explains the register counts");

  sol.r.resize(n);
  for (int v = 0; v < n; ++v) sol.r[v] = static_cast<int>(std::lround(s.value(r[v])));
  sol.y.resize(ne);
  sol.w_r.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& ge = orig.edges[e];
    sol.w_r[e] = ge.w + sol.r[ge.dst] - sol.r[ge.src];
    sol.y[e] = sol.w_r[e] - sol.w_prime[e];
    if (sol.y[e] < 0 || sol.w_r[e] < 0) return mismatch(std::move(sol), "solver returned an inconsistent lag vector");
  }
  sol.feasible = true;
  return sol;
}

std::string format_anchors(const GateGraph& orig, const RetimeSolution& sol) {
  std::ostringstream os;
  for (std::size_t e = 0; e < sol.y.size(); ++e) {
    if (sol.y[e] < 1) continue;
    const auto& ge = orig.edges[e];
    os << "edge " << orig.nodes[ge.src].name << ' ' << orig.nodes[ge.dst].name << " removed=" << sol.y[e] << '\n';
  }
  return os.str();
}

}  // namespace wavepipe
