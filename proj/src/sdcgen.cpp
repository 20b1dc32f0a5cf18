// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/sdcgen.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace wavepipe {

namespace {

bool registered(const GraphEdge& e) {
  return std::any_of(e.elements.begin(), e.elements.end(), [](const EdgeElement& el) {
    return el.kind == InstanceKind::flipflop || el.kind == InstanceKind::latch;
  });
}

std::string first_register(const GraphEdge& e) {
  for (const auto& el : e.elements)
    if (el.kind == InstanceKind::flipflop || el.kind == InstanceKind::latch) return el.name;
  return {};
}

std::string last_register(const GraphEdge& e) {
  for (auto it = e.elements.rbegin(); it != e.elements.rend(); ++it)
    if (it->kind == InstanceKind::flipflop || it->kind == InstanceKind::latch) return it->name;
  return {};
}

class PathWalker {
 public:
  PathWalker(const GateGraph& g, std::vector<int> removed, std::size_t limit)
      : g_(g), removed_(std::move(removed)), limit_(limit), on_path_(g.nodes.size(), false) {}

  void from_terminal(int v) {
    WavePath p;
    p.source = g_.nodes[v].name;
    p.pins = {g_.output_pin(v)};
    explore(v, p);
  }

  void from_register(int e) {
    const auto& ge = g_.edges[e];
    WavePath p;
    p.source = last_register(ge);
    p.pins = {p.source + "/Q"};
    step(e, p);
  }

  std::vector<WavePath> found;

 private:
  void finish(WavePath p) {
    if (++count_ > limit_)
      throw std::length_error("more than " + std::to_string(limit_) + " paths; raise the path limit");
    if (!p.anchors.empty()) found.push_back(std::move(p));
  }

  // Follows connection e (known to carry no register) from the current pin list.
  void step(int e, WavePath p) {
    const auto& ge = g_.edges[e];
    const int dst = ge.dst;
    p.pins.push_back(g_.input_pin(e));
    for (int k = 0; k < removed_[e]; ++k) {
      p.anchors.push_back(e);
      p.anchor_pin.push_back(p.pins.size() - 1);
    }
    if (!g_.nodes[dst].is_gate()) {
      p.sink = g_.nodes[dst].name;
      finish(std::move(p));
      return;
    }
    if (on_path_[dst]) throw std::invalid_argument("loop through '" + g_.nodes[dst].name + "' has no register");
    p.pins.push_back(g_.output_pin(dst));
    on_path_[dst] = true;
    explore(dst, p);
    on_path_[dst] = false;
  }

  void explore(int v, const WavePath& p) {
    for (int e : g_.nodes[v].fanout) {
      const auto& ge = g_.edges[e];
      if (registered(ge)) {
        WavePath q = p;
        q.sink = first_register(ge);
        q.pins.push_back(q.sink + "/D");
        finish(std::move(q));
      } else {
        step(e, p);
      }
    }
  }

  const GateGraph& g_;
  std::vector<int> removed_;
  std::size_t limit_;
  std::size_t count_ = 0;
  std::vector<bool> on_path_;
};

std::string edge_name(const GateGraph& g, int e) {
  return g.output_pin(g.edges[e].src) + "->" + g.input_pin(e);
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

/// Pins from the first anchor's driver output to the last anchor's input.
std::vector<std::string> anchor_span(const WavePath& p) {
  const std::size_t lo = p.anchor_pin.front() - 1;
  const std::size_t hi = p.anchor_pin.back();
  return {p.pins.begin() + static_cast<long>(lo), p.pins.begin() + static_cast<long>(hi) + 1};
}

}  // namespace

std::string SdcConstraint::text() const {
  char num[64];
  std::snprintf(num, sizeof num, "%.6g", bound);
  std::string s = is_max ? "set_max_delay " : "set_min_delay ";
  s += num;
  for (const auto& p : through) s += " -through " + p;
  if (!to.empty()) s += " -to " + to;
  return s;
}

std::vector<WavePathClass> classify_paths(const GateGraph& opt, const RetimeSolution& anchors,
                                          std::size_t path_limit) {
  std::vector<int> removed(opt.edges.size(), 0);
  for (std::size_t e = 0; e < anchors.y.size(); ++e)
    if (anchors.y[e] > 0) removed.at(anchors.opt_edge.at(e)) += anchors.y[e];
  // Removals on a connection that still holds a register have no defined
  // position relative to it and are left out.
  for (std::size_t e = 0; e < opt.edges.size(); ++e)
    if (registered(opt.edges[e])) removed[e] = 0;

  PathWalker walker(opt, removed, path_limit);
  for (int v = 0; v < static_cast<int>(opt.nodes.size()); ++v)
    if (!opt.nodes[v].is_gate() && opt.nodes[v].launches) walker.from_terminal(v);
  for (int e = 0; e < static_cast<int>(opt.edges.size()); ++e)
    if (registered(opt.edges[e])) walker.from_register(e);

  using Key = std::tuple<std::string, std::string, std::vector<std::string>, std::vector<int>>;
  std::map<Key, WavePathClass> groups;
  for (auto& p : walker.found) {
    std::vector<std::string> names;
    for (int e : p.anchors) names.push_back(edge_name(opt, e));
    Key key{p.source, p.sink, names, p.anchors};
    auto& c = groups[key];
    if (c.paths.empty()) {
      c.source = p.source;
      c.sink = p.sink;
      c.anchors = p.anchors;
      c.anchor_names = names;
      c.waves = static_cast<int>(p.anchors.size()) + 1;
    }
    c.paths.push_back(std::move(p));
  }
  std::vector<WavePathClass> out;
  for (auto& [k, c] : groups) out.push_back(std::move(c));
  return out;
}

void find_differentiating_pins(std::vector<WavePathClass>& classes) {
  for (auto& c : classes) {
    // Base list: pins of the anchor span shared by every path of the class.
    c.through.clear();
    c.to.clear();
    for (const auto& pin : anchor_span(c.paths.front())) {
      bool everywhere = true;
      for (const auto& p : c.paths)
        if (!contains(anchor_span(p), pin)) everywhere = false;
      if (everywhere) c.through.push_back(pin);
    }

    const std::set<int> mine(c.anchors.begin(), c.anchors.end());
    std::set<std::string> higher_sinks;
    std::set<std::string> higher_pins;
    c.entangled = false;
    for (const auto& h : classes) {
      if (h.waves <= c.waves) continue;
      const std::set<int> theirs(h.anchors.begin(), h.anchors.end());
      if (!std::includes(theirs.begin(), theirs.end(), mine.begin(), mine.end())) continue;
      c.entangled = true;
      higher_sinks.insert(h.sink);
      for (const auto& p : h.paths) higher_pins.insert(p.pins.begin(), p.pins.end());
    }
    if (!c.entangled) continue;

    if (!higher_sinks.count(c.sink)) {
      c.to = c.paths.front().pins.back();
      continue;
    }
    auto on_all = [&](const std::string& pin) {
      return std::all_of(c.paths.begin(), c.paths.end(), [&](const WavePath& p) { return contains(p.pins, pin); });
    };
    const auto& lead = c.paths.front();
    bool done = false;
    // Sink side, walking backwards from the capture pin.  The end points
    // themselves are not through points.
    for (std::size_t i = lead.pins.size() - 1; i-- > lead.anchor_pin.back() + 1;) {
      const auto& pin = lead.pins[i];
      if (on_all(pin) && !higher_pins.count(pin)) {
        c.through.push_back(pin);
        done = true;
        break;
      }
    }
    // Source side, walking forwards from the launch pin.
    if (!done) {
      for (std::size_t i = 1; i + 1 < lead.anchor_pin.front(); ++i) {
        const auto& pin = lead.pins[i];
        if (on_all(pin) && !higher_pins.count(pin)) {
          c.through.insert(c.through.begin(), pin);
          done = true;
          break;
        }
      }
    }
    if (!done) {
      c.constrainable = false;
      c.diagnostic = "no pin separates " + c.source + " -> " + c.sink + " from paths with more waves";
    }
  }

  // Two classes with different wave counts must not share a through list.
  std::map<std::pair<std::vector<std::string>, std::string>, const WavePathClass*> seen;
  for (auto& c : classes) {
    if (!c.constrainable) continue;
    auto [it, fresh] = seen.emplace(std::pair{c.through, c.to}, &c);
    if (!fresh && it->second->waves != c.waves) {
      c.constrainable = false;
      c.diagnostic = "constraint for " + c.source + " -> " + c.sink + " would collide with a class of " +
                     std::to_string(it->second->waves) + " waves";
    }
  }
}

std::vector<SdcConstraint> build_constraints(const std::vector<WavePathClass>& classes, double T) {
  std::vector<SdcConstraint> out;
  std::set<std::string> emitted;
  for (const auto& c : classes) {
    if (!c.constrainable || c.waves < 2) continue;
    const int k = c.waves - 1;
    SdcConstraint mx{true, k + 1, (k + 1) * T, c.through, c.to};
    SdcConstraint mn{false, k, k * T, c.through, c.to};
    if (!emitted.insert(mx.text()).second) continue;
    emitted.insert(mn.text());
    out.push_back(std::move(mx));
    out.push_back(std::move(mn));
  }
  return out;
}

std::string emit_sdc(const std::vector<WavePathClass>& classes, const Config& cfg) {
  std::string s;
  for (const auto& c : build_constraints(classes, cfg.T)) s += c.text() + "\n";
  return s;
}

bool constraint_matches(const SdcConstraint& c, const WavePath& path) {
  std::size_t at = 0;
  for (const auto& pin : c.through) {
    while (at < path.pins.size() && path.pins[at] != pin) ++at;
    if (at == path.pins.size()) return false;
    ++at;
  }
  return c.to.empty() || path.pins.back() == c.to;
}

}  // namespace wavepipe
