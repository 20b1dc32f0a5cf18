// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

namespace wavepipe::testing {

namespace {

constexpr double kTol = 1e-9;

enum class LpStatus { optimal, infeasible, unbounded };

// min c.x  s.t.  A x = b, x >= 0, b >= 0.  Columns at or past `barred` may
// not enter the basis (used for artificials in phase 2).
struct Tableau {
  std::vector<std::vector<double>> a;  // rows: coefficients then rhs
  std::vector<int> basis;
  int cols = 0;

  void pivot(int r, int c) {
    const double p = a[r][c];
    for (auto& v : a[r]) v /= p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == r || a[i][c] == 0.0) continue;
      const double f = a[i][c];
      for (int j = 0; j <= cols; ++j) a[i][j] -= f * a[r][j];
    }
    basis[r] = c;
  }

  LpStatus minimize(const std::vector<double>& cost, int barred) {
    for (int iter = 0; iter < 100000; ++iter) {
      // Reduced costs from scratch: small tableaux, clarity over speed.
      int enter = -1;
      for (int j = 0; j < barred; ++j) {
        double rc = cost[j];
        for (std::size_t i = 0; i < a.size(); ++i) rc -= cost[basis[i]] * a[i][j];
        if (rc < -kTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      int leave = -1;
      double best = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i][enter] <= kTol) continue;
        const double ratio = a[i][cols] / a[i][enter];
        if (leave < 0 || ratio < best - kTol || (ratio <= best + kTol && basis[i] < basis[leave])) {
          leave = static_cast<int>(i);
          best = ratio;
        }
      }
      if (leave < 0) return LpStatus::unbounded;
      pivot(leave, enter);
    }
    throw std::runtime_error("oracle simplex did not terminate");
  }
};

}  // namespace

OracleResult oracle_lp(const MilpModel& m, const std::vector<std::optional<double>>& fixed) {
  const auto& vars = m.variables();
  const int nv = static_cast<int>(vars.size());
  auto is_fixed = [&](int v) { return v < static_cast<int>(fixed.size()) && fixed[v].has_value(); };

  // Shift free variables to y = x - lb in [0, ub - lb].
  std::vector<int> col(nv, -1);
  int n = 0;
  for (int v = 0; v < nv; ++v)
    if (!is_fixed(v)) col[v] = n++;
  auto base_value = [&](int v) { return is_fixed(v) ? *fixed[v] : vars[v].lb; };

  struct Row {
    std::vector<double> a;
    Relation rel;
    double b;
  };
  std::vector<Row> rows;
  for (const auto& c : m.constraints()) {
    Row r{std::vector<double>(n, 0.0), c.rel, c.rhs - c.expr.constant};
    for (const auto& t : c.expr.terms) {
      r.b -= t.coef * base_value(t.var);
      if (col[t.var] >= 0) r.a[col[t.var]] += t.coef;
    }
    rows.push_back(std::move(r));
  }
  for (int v = 0; v < nv; ++v) {
    if (col[v] < 0) continue;
    Row r{std::vector<double>(n, 0.0), Relation::le, vars[v].ub - vars[v].lb};
    r.a[col[v]] = 1.0;
    rows.push_back(std::move(r));
  }

  // Slack per inequality, then one artificial per row.
  int slacks = 0;
  for (const auto& r : rows) slacks += r.rel != Relation::eq ? 1 : 0;
  const int mrows = static_cast<int>(rows.size());
  const int art0 = n + slacks;
  Tableau t;
  t.cols = art0 + mrows;
  t.a.assign(mrows, std::vector<double>(t.cols + 1, 0.0));
  t.basis.assign(mrows, 0);
  int s = n;
  for (int i = 0; i < mrows; ++i) {
    auto& row = t.a[i];
    for (int j = 0; j < n; ++j) row[j] = rows[i].a[j];
    if (rows[i].rel == Relation::le) row[s++] = 1.0;
    if (rows[i].rel == Relation::ge) row[s++] = -1.0;
    row[t.cols] = rows[i].b;
    if (row[t.cols] < 0)
      for (int j = 0; j <= t.cols; ++j) row[j] = -row[j];
    row[art0 + i] = 1.0;
    t.basis[i] = art0 + i;
  }

  OracleResult res;
  std::vector<double> phase1(t.cols, 0.0);
  for (int i = 0; i < mrows; ++i) phase1[art0 + i] = 1.0;
  t.minimize(phase1, t.cols);
  double infeas = 0.0;
  for (int i = 0; i < mrows; ++i)
    if (t.basis[i] >= art0) infeas += t.a[i][t.cols];
  if (infeas > 1e-7) return res;
  for (int i = 0; i < mrows; ++i) {
    if (t.basis[i] < art0) continue;
    for (int j = 0; j < art0; ++j)
      if (std::abs(t.a[i][j]) > 1e-9) {
        t.pivot(i, j);
        break;
      }
  }

  const double sign = m.sense() == Sense::maximize ? -1.0 : 1.0;
  std::vector<double> cost(t.cols, 0.0);
  double offset = m.objective().constant;
  for (const auto& term : m.objective().terms) {
    offset += term.coef * base_value(term.var);
    if (col[term.var] >= 0) cost[col[term.var]] += sign * term.coef;
  }
  if (t.minimize(cost, art0) == LpStatus::unbounded) {
    res.unbounded = true;
    return res;
  }
  std::vector<double> y(t.cols, 0.0);
  for (int i = 0; i < mrows; ++i) y[t.basis[i]] = t.a[i][t.cols];
  res.feasible = true;
  res.x.resize(nv);
  res.objective = offset;
  for (int v = 0; v < nv; ++v) {
    res.x[v] = col[v] >= 0 ? vars[v].lb + y[col[v]] : *fixed[v];
  }
  for (const auto& term : m.objective().terms)
    if (col[term.var] >= 0) res.objective += term.coef * y[col[term.var]];
  return res;
}

OracleResult oracle_milp(const MilpModel& m) {
  const auto& vars = m.variables();
  std::vector<int> ints;
  for (const auto& v : vars)
    if (v.kind != VarKind::continuous) {
      if (std::ceil(v.lb) > std::floor(v.ub)) return {};
      if (std::floor(v.ub) - std::ceil(v.lb) > 15) throw std::invalid_argument("integer range too wide for enumeration");
      ints.push_back(v.id);
    }
  std::vector<std::optional<double>> fixed(vars.size());
  for (int id : ints) fixed[id] = std::ceil(vars[id].lb);
  OracleResult best;
  const bool maximize = m.sense() == Sense::maximize;
  while (true) {
    OracleResult r = oracle_lp(m, fixed);
    if (r.unbounded) return r;
    if (r.feasible && (!best.feasible || (maximize ? r.objective > best.objective : r.objective < best.objective)))
      best = r;
    // Odometer over the integer assignments.
    std::size_t k = 0;
    for (; k < ints.size(); ++k) {
      const int id = ints[k];
      if (*fixed[id] + 1.0 <= std::floor(vars[id].ub) + 1e-9) {
        fixed[id] = *fixed[id] + 1.0;
        break;
      }
      fixed[id] = std::ceil(vars[id].lb);
    }
    if (k == ints.size()) break;
  }
  return best;
}

BellmanWindows bellman_windows(const PlacedCircuit& pc, double T) {
  const auto& g = pc.graph;
  const int n = static_cast<int>(g.nodes.size());
  const double tcq = g.ff_params.t_cq;
  BellmanWindows b;
  b.hi.assign(n, -std::numeric_limits<double>::infinity());
  b.lo.assign(n, std::numeric_limits<double>::infinity());
  b.valid.assign(n, false);
  // Value at a node's output: launching terminals restart at t_cq.
  auto out_hi = [&](int v) { return !g.nodes[v].is_gate() && g.nodes[v].launches ? tcq : b.hi[v]; };
  auto out_lo = [&](int v) { return !g.nodes[v].is_gate() && g.nodes[v].launches ? tcq : b.lo[v]; };
  auto out_ok = [&](int v) { return (!g.nodes[v].is_gate() && g.nodes[v].launches) || (g.nodes[v].is_gate() && b.valid[v]); };

  const int rounds = n + static_cast<int>(g.edges.size()) + 2;
  bool changed = true;
  for (int round = 0; round < rounds && changed; ++round) {
    changed = false;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const int u = g.edges[e].src;
      const int v = g.edges[e].dst;
      if (!out_ok(u)) continue;
      double shift = 0.0;
      for (const auto& st : pc.chains[e]) {
        if (st.kind == Stage::Kind::anchor) shift -= T;
        else if (st.kind == Stage::Kind::buffer) shift += st.delay;
        else throw std::invalid_argument("bellman oracle handles anchors and buffers only");
      }
      const double own = g.nodes[v].is_gate() ? pc.d[v] : 0.0;
      const double hi = out_hi(u) + shift + own;
      const double lo = out_lo(u) + shift + own;
      if (!b.valid[v] || hi > b.hi[v] + kTol) {
        b.hi[v] = b.valid[v] ? std::max(b.hi[v], hi) : hi;
        changed = true;
      }
      if (!b.valid[v] || lo < b.lo[v] - kTol) {
        b.lo[v] = b.valid[v] ? std::min(b.lo[v], lo) : lo;
        changed = true;
      }
      b.valid[v] = true;
    }
  }
  b.converged = !changed;
  return b;
}

std::set<int> reachable(const GateGraph& g, int from) {
  std::set<int> seen{from};
  std::queue<int> q;
  q.push(from);
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int e : g.nodes[v].fanout) {
      const int w = g.edges[e].dst;
      if (seen.insert(w).second) q.push(w);
    }
  }
  return seen;
}

std::vector<std::vector<int>> terminal_paths(const GateGraph& g, std::size_t limit) {
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> on(g.nodes.size(), false);
  std::function<void(int)> dfs = [&](int v) {
    if (out.size() >= limit) return;
    for (int e : g.nodes[v].fanout) {
      const int w = g.edges[e].dst;
      path.push_back(e);
      if (!g.nodes[w].is_gate()) {
        if (g.nodes[w].captures) out.push_back(path);
      } else if (!on[w]) {
        on[w] = true;
        dfs(w);
        on[w] = false;
      }
      path.pop_back();
    }
  };
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    if (!g.nodes[v].is_gate() && g.nodes[v].launches) dfs(static_cast<int>(v));
  return out;
}

std::vector<std::vector<int>> simple_cycles(const GateGraph& g, std::size_t limit) {
  // Cycles rooted at their smallest gate id, found by depth-first search.
  std::vector<std::vector<int>> out;
  std::vector<int> path;
  std::vector<bool> on(g.nodes.size(), false);
  std::function<void(int, int)> dfs = [&](int root, int v) {
    if (out.size() >= limit) return;
    for (int e : g.nodes[v].fanout) {
      const int w = g.edges[e].dst;
      if (!g.nodes[w].is_gate() || w < root) continue;
      path.push_back(e);
      if (w == root) {
        out.push_back(path);
      } else if (!on[w]) {
        on[w] = true;
        dfs(root, w);
        on[w] = false;
      }
      path.pop_back();
    }
  };
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (!g.nodes[v].is_gate()) continue;
    on[v] = true;
    dfs(static_cast<int>(v), static_cast<int>(v));
    on[v] = false;
  }
  return out;
}

std::vector<WavePath> register_segments(const GateGraph& g, const std::vector<int>& removed, std::size_t limit) {
  auto reg = [](const GraphEdge& e, bool first) -> std::string {
    std::string name;
    for (const auto& el : e.elements)
      if (el.kind == InstanceKind::flipflop || el.kind == InstanceKind::latch) {
        if (first) return el.name;
        name = el.name;
      }
    return name;
  };
  std::vector<WavePath> out;
  std::vector<bool> on(g.nodes.size(), false);
  std::function<void(int, WavePath)> walk;
  auto follow = [&](int e, WavePath p) {
    const auto& ge = g.edges[e];
    const std::string stop = reg(ge, true);
    if (!stop.empty()) {
      p.sink = stop;
      p.pins.push_back(stop + "/D");
      out.push_back(std::move(p));
      return;
    }
    p.pins.push_back(g.input_pin(e));
    for (int k = 0; k < removed[e]; ++k) {
      p.anchors.push_back(e);
      p.anchor_pin.push_back(p.pins.size() - 1);
    }
    if (!g.nodes[ge.dst].is_gate()) {
      p.sink = g.nodes[ge.dst].name;
      out.push_back(std::move(p));
      return;
    }
    if (on[ge.dst]) return;
    p.pins.push_back(g.output_pin(ge.dst));
    on[ge.dst] = true;
    walk(ge.dst, std::move(p));
    on[ge.dst] = false;
  };
  walk = [&](int v, WavePath p) {
    for (int e : g.nodes[v].fanout) {
      if (out.size() >= limit) return;
      follow(e, p);
    }
  };
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (g.nodes[v].is_gate() || !g.nodes[v].launches) continue;
    WavePath p;
    p.source = g.nodes[v].name;
    p.pins = {g.output_pin(static_cast<int>(v))};
    walk(static_cast<int>(v), p);
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const std::string src = reg(g.edges[e], false);
    if (src.empty()) continue;
    WavePath p;
    p.source = src;
    p.pins = {src + "/Q"};
    // Continue past the register onto the rest of this connection.
    const auto& ge = g.edges[e];
    p.pins.push_back(g.input_pin(static_cast<int>(e)));
    if (!g.nodes[ge.dst].is_gate()) {
      p.sink = g.nodes[ge.dst].name;
      out.push_back(std::move(p));
      continue;
    }
    p.pins.push_back(g.output_pin(ge.dst));
    on[ge.dst] = true;
    walk(ge.dst, std::move(p));
    on[ge.dst] = false;
  }
  return out;
}

}  // namespace wavepipe::testing
