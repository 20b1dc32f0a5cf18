// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/sta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace wavepipe {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::setup: return "setup";
    case ViolationKind::hold: return "hold";
    case ViolationKind::non_interference: return "non_interference";
    case ViolationKind::latch_region: return "latch_region";
  }
  return "?";
}

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::none: return "none";
    case UnitKind::flipflop: return "ff";
    case UnitKind::latch: return "latch";
  }
  return "?";
}

PlacedCircuit place_from_graph(const GateGraph& g) {
  PlacedCircuit p;
  p.graph = g;
  for (const auto& n : g.nodes) p.d.push_back(n.d);
  for (const auto& e : g.edges) {
    std::vector<Stage> chain;
    for (const auto& el : e.elements) {
      Stage st;
      switch (el.kind) {
        case InstanceKind::flipflop:
        case InstanceKind::latch:
          st.kind = Stage::Kind::unit;
          st.unit = el.kind == InstanceKind::flipflop ? UnitKind::flipflop : UnitKind::latch;
          st.N = el.cycle.value_or(0);
          st.phi = el.phase.value_or(0.0);
          chain.push_back(st);
          if (!el.cycle) chain.push_back(Stage{Stage::Kind::anchor});
          break;
        case InstanceKind::anchor:
          chain.push_back(Stage{Stage::Kind::anchor});
          break;
        case InstanceKind::buffer:
          st.kind = Stage::Kind::buffer;
          st.delay = el.delay;
          chain.push_back(st);
          break;
        default:
          break;
      }
    }
    p.chains.push_back(std::move(chain));
  }
  return p;
}

double traditional_min_period(const Circuit& c) {
  const auto& p = c.ff_params;
  auto is_reg = [](const Instance& i) {
    return i.kind == InstanceKind::flipflop || i.kind == InstanceKind::latch || i.kind == InstanceKind::input;
  };
  std::map<std::string, double> memo;
  std::function<double(const std::string&)> arrival = [&](const std::string& n) -> double {
    const Instance& inst = c.at(n);
    if (is_reg(inst)) return 0.0;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    double a = 0.0;
    for (const auto& in : inst.inputs) a = std::max(a, arrival(in));
    const double own = inst.kind == InstanceKind::gate || inst.kind == InstanceKind::buffer ? inst.delay : 0.0;
    return memo[n] = a + own;
  };
  double period = 0.0;
  for (const auto& inst : c.instances()) {
    const bool captures = inst.kind == InstanceKind::flipflop || inst.kind == InstanceKind::latch ||
                          inst.kind == InstanceKind::output;
    if (!captures) continue;
    period = std::max(period, p.t_cq + arrival(inst.inputs.at(0)) + p.t_su);
  }
  return period;
}

std::vector<Violation> check_boundary(const std::string& node, const ArrivalWindow& w, const Config& cfg,
                                      const FlipFlopParams& p) {
  std::vector<Violation> out;
  const double T = cfg.T;
  const double setup_margin = T - (w.s + p.t_su * cfg.r_u);
  if (setup_margin < -cfg.eps) out.push_back({node, ViolationKind::setup, setup_margin});
  const double hold_margin = w.s_prime - p.t_h * cfg.r_u;
  if (hold_margin < -cfg.eps) out.push_back({node, ViolationKind::hold, hold_margin});
  return out;
}

namespace {

bool cuts(const std::vector<Stage>& chain) {
  return std::any_of(chain.begin(), chain.end(), [](const Stage& s) { return s.kind != Stage::Kind::buffer; });
}

bool independent(const PlacedCircuit& pc, int e) {
  const auto& src = pc.graph.nodes[pc.graph.edges[e].src];
  return (!src.is_gate() && src.launches) || cuts(pc.chains[e]);
}

std::vector<int> report_order(const PlacedCircuit& pc) {
  const auto& g = pc.graph;
  const int n = static_cast<int>(g.nodes.size());
  std::vector<int> indeg(n, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    if (!independent(pc, static_cast<int>(e))) ++indeg[g.edges[e].dst];
  auto later = [&](int a, int b) {
    const bool la = !g.nodes[a].is_gate() && g.nodes[a].launches;
    const bool lb = !g.nodes[b].is_gate() && g.nodes[b].launches;
    if (la != lb) return lb;
    return g.nodes[a].name > g.nodes[b].name;
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int e : g.nodes[v].fanout)
      if (!independent(pc, e) && --indeg[g.edges[e].dst] == 0) ready.push(g.edges[e].dst);
  }
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("placement has a loop without a delay unit or anchor");
  return order;
}

struct ChainResult {
  ArrivalWindow w;
  int anchors = 0;
};

std::string edge_label(const GateGraph& g, int e) {
  return g.nodes[g.edges[e].src].name + "->" + g.nodes[g.edges[e].dst].name + "." +
         std::to_string(g.edges[e].pin);
}

ChainResult apply_chain(const PlacedCircuit& pc, int e, ArrivalWindow w, const Config& cfg, double T,
                        std::vector<Violation>* viol) {
  const auto& p = pc.graph.ff_params;
  ChainResult r;
  for (const Stage& st : pc.chains[e]) {
    switch (st.kind) {
      case Stage::Kind::buffer:
        w.s += st.delay * cfg.r_u;
        w.s_prime += st.delay * cfg.r_l;
        break;
      case Stage::Kind::anchor:
        w.s -= T;
        w.s_prime -= T;
        ++r.anchors;
        break;
      case Stage::Kind::unit: {
        const double base = st.N * T + st.phi;
        const double lo = base + p.t_h * cfg.r_u;
        const double hi = base + T - p.t_su * cfg.r_u;
        if (viol) {
          const std::string where = edge_label(pc.graph, e);
          if (w.s_prime < lo - cfg.eps) viol->push_back({where, ViolationKind::hold, w.s_prime - lo});
          if (w.s > hi + cfg.eps) viol->push_back({where, ViolationKind::setup, hi - w.s});
        }
        if (st.unit == UnitKind::flipflop) {
          w.s = base + T + p.t_cq * cfg.r_u;
          w.s_prime = base + T + p.t_cq * cfg.r_l;
        } else {
          const double open = base + cfg.D * T;
          if (viol && w.s_prime > open + cfg.eps)
            viol->push_back({edge_label(pc.graph, e), ViolationKind::latch_region, open - w.s_prime});
          const double late = std::max(open + p.t_cq * cfg.r_u, w.s + p.t_dq * cfg.r_u);
          const double early = std::max(open + p.t_cq * cfg.r_l, w.s_prime + p.t_dq * cfg.r_l);
          w.s = late;
          w.s_prime = early;
        }
        break;
      }
    }
  }
  r.w = w;
  return r;
}

}  // namespace

TimingReport propagate_windows(const PlacedCircuit& pc, const Config& cfg_in) {
  Config cfg = cfg_in;
  if (cfg.T <= 0.0) cfg.T = pc.graph.clock.T;
  const double T = cfg.T;
  const auto& g = pc.graph;
  const auto& p = g.ff_params;
  if (pc.chains.size() != g.edges.size() || pc.d.size() != g.nodes.size())
    throw std::invalid_argument("placement does not match its graph");
  for (const auto& chain : pc.chains)
    for (const auto& st : chain)
      if (st.kind == Stage::Kind::unit && st.unit == UnitKind::none)
        throw std::invalid_argument("unresolved delay unit");

  const int n = static_cast<int>(g.nodes.size());
  TimingReport r;
  r.order = report_order(pc);
  r.node.assign(n, {});
  r.node_valid.assign(n, false);
  r.edge_in.assign(g.edges.size(), {});
  r.ref_cycle.assign(n, 0);
  std::vector<ArrivalWindow> out(n);  // window at each node's output
  std::vector<bool> have(n, false);

  const ArrivalWindow launch{p.t_cq * cfg.r_u, p.t_cq * cfg.r_l};
  auto evaluate = [&](int v, std::vector<Violation>* viol) -> bool {
    const auto& node = g.nodes[v];
    bool any = false;
    ArrivalWindow in{-1e300, 1e300};
    int ref = 0;
    for (int e : node.fanin) {
      const int u = g.edges[e].src;
      if (!have[u]) continue;
      const ChainResult cr = apply_chain(pc, e, out[u], cfg, T, viol);
      r.edge_in[e] = cr.w;
      if (cr.w.s > in.s) {
        in.s = cr.w.s;
        ref = r.ref_cycle[u] + cr.anchors;
      }
      in.s_prime = std::min(in.s_prime, cr.w.s_prime);
      any = true;
    }
    ArrivalWindow next;
    if (node.is_gate()) {
      if (!any) return false;
      next = {in.s + pc.d[v] * cfg.r_u, in.s_prime + pc.d[v] * cfg.r_l};
    } else {
      next = any ? in : ArrivalWindow{};
    }
    if (!node.is_gate() && !any) return false;
    const bool changed = !r.node_valid[v] || std::abs(next.s - r.node[v].s) > 1e-12 ||
                         std::abs(next.s_prime - r.node[v].s_prime) > 1e-12;
    r.node[v] = next;
    r.node_valid[v] = true;
    r.ref_cycle[v] = node.is_gate() || !node.launches ? ref : 0;
    if (node.is_gate()) {
      out[v] = next;
      have[v] = true;
    }
    return changed;
  };

  for (int v = 0; v < n; ++v) {
    if (!g.nodes[v].is_gate() && g.nodes[v].launches) {
      out[v] = launch;
      have[v] = true;
    }
  }
  const int cap = 4 * (n + static_cast<int>(g.edges.size())) + 16;
  int pass = 0;
  bool changed = true;
  std::vector<bool> moving(n, false);
  while (changed && pass < cap) {
    changed = false;
    std::fill(moving.begin(), moving.end(), false);
    for (int v : r.order) {
      if (evaluate(v, nullptr)) {
        changed = true;
        moving[v] = true;
      }
    }
    ++pass;
  }
  r.converged = !changed;

  // Final pass records violations against the converged windows.
  for (int v : r.order) evaluate(v, &r.violations);
  const double gap = cfg.stable_gap();
  for (int v : r.order) {
    const auto& node = g.nodes[v];
    if (!r.node_valid[v]) continue;
    if (!node.is_gate() && node.captures) {
      auto b = check_boundary(node.name, r.node[v], cfg, p);
      r.violations.insert(r.violations.end(), b.begin(), b.end());
    }
    const double margin = r.node[v].s_prime + T - r.node[v].s - gap;
    if (margin < -cfg.eps || (!r.converged && moving[v]))
      r.violations.push_back({node.name, ViolationKind::non_interference, std::min(margin, -cfg.eps)});
  }
  return r;
}

std::string format_report(const PlacedCircuit& pc, const TimingReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "node" << std::setw(12) << "s" << std::setw(12) << "s'" << std::setw(10)
     << "ref_cycle"
     << "violations\n";
  std::map<std::string, std::vector<std::string>> by_node;
  for (const auto& v : r.violations) by_node[v.node].emplace_back(to_string(v.kind));
  for (int v : r.order) {
    const auto& node = pc.graph.nodes[v];
    os << std::setw(16) << node.name;
    std::ostringstream s, sp;
    s << std::setprecision(6);
    sp << std::setprecision(6);
    if (r.node_valid[v]) {
      s << r.node[v].s;
      sp << r.node[v].s_prime;
    } else {
      s << "-";
      sp << "-";
    }
    os << std::setw(12) << s.str() << std::setw(12) << sp.str() << std::setw(10) << r.ref_cycle[v];
    auto it = by_node.find(node.name);
    if (it == by_node.end()) {
      os << "-";
    } else {
      for (std::size_t i = 0; i < it->second.size(); ++i) os << (i ? "," : "") << it->second[i];
    }
    os << "\n";
  }
  for (const auto& v : r.violations) {
    if (pc.graph.node_index(v.node) >= 0) continue;
    std::ostringstream m;
    m << std::setprecision(6) << v.margin;
    os << "unit " << v.node << " " << to_string(v.kind) << " margin=" << m.str() << "\n";
  }
  return os.str();
}

}  // namespace wavepipe
