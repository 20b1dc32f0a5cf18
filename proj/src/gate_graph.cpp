// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/gate_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

namespace wavepipe {

namespace {

bool is_sequential(const EdgeElement& e) {
  return e.kind == InstanceKind::flipflop || e.kind == InstanceKind::latch;
}

/// True for elements that shift the timing reference or hold a wave.
bool cuts_combinational(const EdgeElement& e) { return e.kind != InstanceKind::buffer; }

}  // namespace

int GraphEdge::anchors() const {
  return static_cast<int>(std::count_if(elements.begin(), elements.end(),
                                        [](const EdgeElement& e) { return e.kind == InstanceKind::anchor; }));
}

int GraphEdge::buffers() const {
  return static_cast<int>(std::count_if(elements.begin(), elements.end(),
                                        [](const EdgeElement& e) { return e.kind == InstanceKind::buffer; }));
}

double GraphEdge::buffer_delay() const {
  double d = 0.0;
  for (const auto& e : elements)
    if (e.kind == InstanceKind::buffer) d += e.delay;
  return d;
}

int GateGraph::node_index(const std::string& n) const {
  auto it = index_.find(n);
  return it == index_.end() ? -1 : it->second;
}

int GateGraph::find_edge(const std::string& src, const std::string& dst, int pin) const {
  const int s = node_index(src);
  const int d = node_index(dst);
  if (s < 0 || d < 0) return -1;
  for (int e : nodes[d].fanin)
    if (edges[e].src == s && (pin < 0 || edges[e].pin == pin)) return e;
  return -1;
}

std::size_t GateGraph::gate_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const GraphNode& n) { return n.is_gate(); }));
}

int GateGraph::total_weight() const {
  int w = 0;
  for (const auto& e : edges) w += e.w;
  return w;
}

std::string GateGraph::output_pin(int node) const {
  const auto& n = nodes.at(node);
  return n.name + (n.is_gate() ? "/ZN" : "/Q");
}

std::string GateGraph::input_pin(int edge) const {
  const auto& e = edges.at(edge);
  const auto& n = nodes.at(e.dst);
  if (!n.is_gate()) return n.name + "/D";
  if (n.fanin.size() == 1) return n.name + "/A";
  return n.name + "/A" + std::to_string(e.pin + 1);
}

std::vector<int> GateGraph::topo_order() const {
  const int n = static_cast<int>(nodes.size());
  std::vector<int> indeg(n, 0);
  // Launching terminals drive a fixed window, so their fanout never waits on
  // what they capture.
  auto combinational = [&](const GraphEdge& e) {
    if (!nodes[e.src].is_gate() && nodes[e.src].launches) return false;
    return std::none_of(e.elements.begin(), e.elements.end(), cuts_combinational);
  };
  for (const auto& e : edges)
    if (combinational(e)) ++indeg[e.dst];
  // Launching terminals first, then by name.
  auto later = [&](int a, int b) {
    const bool la = !nodes[a].is_gate() && nodes[a].launches;
    const bool lb = !nodes[b].is_gate() && nodes[b].launches;
    if (la != lb) return lb;
    return nodes[a].name > nodes[b].name;
  };
  std::priority_queue<int, std::vector<int>, decltype(later)> ready(later);
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int e : nodes[v].fanout) {
      if (!combinational(edges[e])) continue;
      if (--indeg[edges[e].dst] == 0) ready.push(edges[e].dst);
    }
  }
  if (static_cast<int>(order.size()) != n) throw NetlistError(0, "combinational loop in gate graph");
  return order;
}

void GateGraph::rebuild_index() {
  index_.clear();
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index_[nodes[i].name] = i;
}

GateGraph to_gate_graph(const Circuit& c) {
  GateGraph g;
  g.name = c.name;
  g.clock = c.clock;
  g.ff_params = c.ff_params;

  auto is_node = [](const Instance& i) {
    return i.kind == InstanceKind::gate || i.kind == InstanceKind::input || i.kind == InstanceKind::output ||
           (i.kind == InstanceKind::flipflop && i.boundary);
  };
  for (const auto& inst : c.instances()) {
    if (!is_node(inst)) continue;
    GraphNode n;
    n.name = inst.name;
    n.source_kind = inst.kind;
    if (inst.kind == InstanceKind::gate) {
      n.kind = NodeKind::gate;
      n.fn = inst.fn;
      n.d = inst.delay;
      n.lib = inst.lib;
    } else {
      n.kind = NodeKind::terminal;
      n.launches = inst.kind != InstanceKind::output;
      n.captures = inst.kind != InstanceKind::input;
    }
    g.nodes.push_back(std::move(n));
  }
  g.rebuild_index();

  // Walks back from a reference through collapsed elements to a graph node.
  auto trace = [&](const std::string& ref, std::vector<EdgeElement>& chain) -> int {
    std::string cur = ref;
    std::size_t steps = 0;
    while (true) {
      const Instance& inst = c.at(cur);
      if (is_node(inst)) break;
      EdgeElement el;
      el.kind = inst.kind;
      el.name = inst.name;
      el.phase = inst.phase;
      el.cycle = inst.cycle;
      el.delay = inst.kind == InstanceKind::buffer ? inst.delay : 0.0;
      chain.push_back(el);
      cur = inst.inputs.at(0);
      if (++steps > c.instances().size())
        throw NetlistError(inst.line, "sequential loop without gates through '" + inst.name + "'");
    }
    std::reverse(chain.begin(), chain.end());
    return g.node_index(cur);
  };

  for (int v = 0; v < static_cast<int>(g.nodes.size()); ++v) {
    const Instance& inst = c.at(g.nodes[v].name);
    for (int pin = 0; pin < static_cast<int>(inst.inputs.size()); ++pin) {
      GraphEdge e;
      e.dst = v;
      e.pin = pin;
      e.src = trace(inst.inputs[pin], e.elements);
      for (const auto& el : e.elements)
        if (is_sequential(el) && !el.cycle) ++e.w;
      const int id = static_cast<int>(g.edges.size());
      g.nodes[v].fanin.push_back(id);
      g.nodes[e.src].fanout.push_back(id);
      g.edges.push_back(std::move(e));
    }
  }
  (void)g.topo_order();  // throws on a cycle without a register
  return g;
}

CriticalPart select_critical_part(const Circuit& c, double t_spec) {
  CriticalPart part;
  const auto& p = c.ff_params;

  // Longest combinational arrival from each launching element, per capture.
  auto is_reg = [](const Instance& i) {
    return i.kind == InstanceKind::flipflop || i.kind == InstanceKind::latch || i.kind == InstanceKind::input ||
           i.kind == InstanceKind::output;
  };
  std::map<std::string, std::vector<std::string>> fanout;
  for (const auto& inst : c.instances())
    for (const auto& in : inst.inputs) fanout[in].push_back(inst.name);

  for (const auto& src : c.instances()) {
    if (!is_reg(src) || src.kind == InstanceKind::output) continue;
    // Longest path over combinational instances in DFS order with memo.
    std::map<std::string, double> best;
    std::function<void(const std::string&, double)> walk = [&](const std::string& n, double t) {
      for (const auto& nxt : fanout[n]) {
        const Instance& inst = c.at(nxt);
        if (is_reg(inst)) {
          const double total = p.t_cq + t + p.t_su;
          if (total > t_spec) {
            if (!src.boundary && src.kind != InstanceKind::input) part.removable.insert(src.name);
            if (!inst.boundary && inst.kind != InstanceKind::output) part.removable.insert(inst.name);
          }
          continue;
        }
        const double add = inst.kind == InstanceKind::gate || inst.kind == InstanceKind::buffer ? inst.delay : 0.0;
        auto it = best.find(nxt);
        if (it != best.end() && it->second >= t + add) continue;
        best[nxt] = t + add;
        walk(nxt, t + add);
      }
    };
    walk(src.name, 0.0);
  }

  for (const auto& inst : c.instances())
    if ((inst.kind == InstanceKind::flipflop || inst.kind == InstanceKind::latch) && !part.removable.count(inst.name))
      part.boundary.insert(inst.name);

  // Backward closure from removable elements through gates and removable ones.
  std::queue<std::string> work;
  std::set<std::string> seen;
  for (const auto& r : part.removable) {
    work.push(r);
    seen.insert(r);
  }
  while (!work.empty()) {
    const Instance& inst = c.at(work.front());
    work.pop();
    for (const auto& in : inst.inputs) {
      const Instance& src = c.at(in);
      const bool pass = src.kind == InstanceKind::gate || src.kind == InstanceKind::buffer ||
                        src.kind == InstanceKind::anchor || part.removable.count(src.name);
      if (!pass || seen.count(src.name)) continue;
      seen.insert(src.name);
      if (src.kind == InstanceKind::gate) part.gates.insert(src.name);
      work.push(src.name);
    }
  }

  for (const auto& inst : c.instances()) {
    if (inst.kind == InstanceKind::flipflop && part.boundary.count(inst.name) && !inst.boundary) {
      Instance b = inst;
      b.boundary = true;
      b.phase.reset();
      b.cycle.reset();
      part.circuit.add(b);
    } else {
      part.circuit.add(inst);
    }
  }
  part.circuit.name = c.name;
  part.circuit.clock = c.clock;
  part.circuit.ff_params = c.ff_params;
  return part;
}

}  // namespace wavepipe
