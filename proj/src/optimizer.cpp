// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace wavepipe {

// ---------------------------------------------------------------------------
// OptimizedCircuit

namespace {

int lambda_of(const GraphEdge& e) { return e.w + e.anchors(); }

}  // namespace

PlacedCircuit OptimizedCircuit::placed() const {
  PlacedCircuit pc;
  pc.graph = base;
  pc.d = d;
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    std::vector<Stage> chain;
    const auto& dec = decisions[e];
    if (dec.unit_case != UnitKind::none) {
      Stage st{Stage::Kind::unit};
      st.unit = dec.unit_case;
      st.N = dec.N;
      st.phi = dec.phi;
      chain.push_back(st);
    }
    for (int k = 0; k < lambda_of(base.edges[e]); ++k) chain.push_back(Stage{Stage::Kind::anchor});
    for (const auto& el : base.edges[e].elements) {
      if (el.kind != InstanceKind::buffer) continue;
      Stage st{Stage::Kind::buffer};
      st.delay = el.delay;
      chain.push_back(st);
    }
    for (int k = 0; k < buffer_count[e]; ++k) {
      Stage st{Stage::Kind::buffer};
      st.delay = buffer_delay;
      chain.push_back(st);
    }
    pc.chains.push_back(std::move(chain));
  }
  return pc;
}

Circuit OptimizedCircuit::to_circuit() const {
  Circuit c;
  c.name = base.name;
  c.clock = base.clock;
  c.clock.T = T;
  c.ff_params = base.ff_params;

  std::set<std::string> used;
  for (const auto& n : base.nodes) used.insert(n.name);
  auto fresh = [&](const std::string& want) {
    std::string name = want;
    for (int k = 1; used.count(name); ++k) name = want + "_" + std::to_string(k);
    used.insert(name);
    return name;
  };

  // Chains first so that every node knows the reference driving each pin.
  std::vector<Instance> chain_insts;
  std::vector<std::string> pin_ref(base.edges.size());
  for (std::size_t e = 0; e < base.edges.size(); ++e) {
    const auto& ge = base.edges[e];
    const std::string tag = base.nodes[ge.src].name + "_" + base.nodes[ge.dst].name + "_" + std::to_string(ge.pin);
    std::string prev = base.nodes[ge.src].name;
    auto push = [&](Instance inst) {
      inst.inputs = {prev};
      prev = inst.name;
      chain_insts.push_back(std::move(inst));
    };
    const auto& dec = decisions[e];
    if (dec.unit_case != UnitKind::none) {
      Instance u;
      u.kind = dec.unit_case == UnitKind::flipflop ? InstanceKind::flipflop : InstanceKind::latch;
      u.name = fresh("U_" + tag);
      u.phase = dec.phi;
      u.cycle = dec.N;
      push(u);
    }
    // Anchors keep the names of the registers they stand for.
    std::vector<std::string> removed;
    for (const auto& el : ge.elements)
      if (el.kind != InstanceKind::buffer) removed.push_back(el.name);
    for (int k = 0; k < lambda_of(ge); ++k) {
      Instance a;
      a.kind = InstanceKind::anchor;
      a.name = fresh(k < static_cast<int>(removed.size()) ? removed[k] : "A_" + tag);
      push(a);
    }
    int bi = 0;
    for (const auto& el : ge.elements) {
      if (el.kind != InstanceKind::buffer) continue;
      Instance b;
      b.kind = InstanceKind::buffer;
      b.name = fresh(el.name);
      b.delay = el.delay;
      push(b);
    }
    for (int k = 0; k < buffer_count[e]; ++k) {
      Instance b;
      b.kind = InstanceKind::buffer;
      b.name = fresh("B_" + tag + "_" + std::to_string(bi++));
      b.delay = buffer_delay;
      push(b);
    }
    pin_ref[e] = prev;
  }

  for (std::size_t v = 0; v < base.nodes.size(); ++v) {
    const auto& n = base.nodes[v];
    Instance inst;
    inst.name = n.name;
    for (int e : n.fanin) inst.inputs.push_back(pin_ref[e]);
    if (n.is_gate()) {
      inst.kind = InstanceKind::gate;
      inst.fn = n.fn;
      inst.delay = d[v];
      inst.lib = n.lib;
      if (std::find(inst.lib.begin(), inst.lib.end(), inst.delay) == inst.lib.end()) {
        inst.lib.push_back(inst.delay);
        std::sort(inst.lib.begin(), inst.lib.end());
      }
    } else if (n.launches && n.captures) {
      inst.kind = InstanceKind::flipflop;
      inst.boundary = true;
    } else {
      inst.kind = n.launches ? InstanceKind::input : InstanceKind::output;
    }
    c.add(std::move(inst));
  }
  for (auto& inst : chain_insts) c.add(std::move(inst));
  return c;
}

int OptimizedCircuit::flipflop_units() const {
  return static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                        [](const EdgeDecision& e) { return e.unit_case == UnitKind::flipflop; }));
}

int OptimizedCircuit::latch_units() const {
  return static_cast<int>(std::count_if(decisions.begin(), decisions.end(),
                                        [](const EdgeDecision& e) { return e.unit_case == UnitKind::latch; }));
}

int OptimizedCircuit::buffers() const {
  int n = 0;
  for (int b : buffer_count) n += b;
  return n;
}

double OptimizedCircuit::area(const Config& cfg) const {
  return cfg.ff_area * flipflop_units() + cfg.latch_area * latch_units() + cfg.buffer_area * buffers();
}

double removable_area(const GateGraph& g, const Config& cfg) {
  std::map<std::string, InstanceKind> regs;
  for (const auto& e : g.edges)
    for (const auto& el : e.elements)
      if (el.kind == InstanceKind::flipflop || el.kind == InstanceKind::latch) regs.emplace(el.name, el.kind);
  double a = 0.0;
  for (const auto& [name, kind] : regs) a += kind == InstanceKind::flipflop ? cfg.ff_area : cfg.latch_area;
  return a;
}

// ---------------------------------------------------------------------------
// Report

std::string OptimizationReport::to_key_values() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "feasible=" << (feasible ? 1 : 0) << '\n';
  if (!feasible) {
    os << "failed_stage=" << failed_stage << '\n';
    os << "diagnostic=" << diagnostic << '\n';
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const std::string k = "stage" + std::to_string(i + 1) + ".";
    os << k << "name=" << s.name << '\n'
       << k << "status=" << s.status << '\n'
       << k << "S=" << s.S << '\n'
       << k << "S_d=" << s.S_d << '\n'
       << k << "objective=" << s.objective << '\n'
       << k << "iterations=" << s.iterations << '\n';
  }
  if (feasible) {
    os << "final.T=" << T << '\n'
       << "final.n_f=" << n_f << '\n'
       << "final.n_l=" << n_l << '\n'
       << "final.n_b=" << n_b << '\n'
       << "final.area_delta=" << area_delta << '\n'
       << "final.replaced=" << replaced << '\n';
  }
  return os.str();
}

std::string OptimizationReport::to_text() const {
  std::ostringstream os;
  os << std::setprecision(6);
  for (const auto& s : stages)
    os << std::left << std::setw(16) << s.name << std::setw(14) << s.status << "|S|=" << s.S << " |S_d|=" << s.S_d
       << " obj=" << s.objective << " iter=" << s.iterations << '\n';
  if (feasible) {
    os << "achieved T " << T << ": " << n_f << " flip-flop units, " << n_l << " latch units, " << n_b
       << " buffers, area delta " << area_delta << '\n';
  } else {
    os << "infeasible at " << failed_stage;
    if (!diagnostic.empty()) os << ": " << diagnostic;
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Discretization

double snap_to_library(double d, const std::vector<double>& lib) {
  if (lib.empty()) return d;
  double best = lib.front();
  for (double x : lib) {
    const double gap = std::abs(x - d);
    const double cur = std::abs(best - d);
    if (gap < cur - 1e-12) best = x;
  }
  return best;
}

namespace {

SolveLimits limits_of(const Config& c) { return {c.milp_nodes, c.milp_time_ms}; }

Config at_period(const Config& cfg, double T) {
  Config c = cfg;
  c.T = T;
  return c;
}

void sync_decisions(OptimizedCircuit& oc) {
  for (auto& dec : oc.decisions) {
    const int dst = oc.base.edges[dec.edge].dst;
    dec.d = oc.base.nodes[dst].is_gate() ? oc.d[dst] : 0.0;
  }
}

bool timing_clean(const OptimizedCircuit& oc, const Config& cfg) {
  return propagate_windows(oc.placed(), at_period(cfg, oc.T)).clean();
}

int buffers_for(double xi, double db) {
  const double n = xi / db;
  return std::max(0, static_cast<int>(std::ceil(n - 1e-7)));
}

OptimizedCircuit from_decoded(const GateGraph& g, const Config& cfg, const ModelArtifacts& arts, const Decoded& dec) {
  OptimizedCircuit oc;
  oc.base = g;
  oc.T = cfg.T;
  oc.buffer_delay = cfg.buffer_delay;
  oc.decisions = dec.edges;
  oc.d.assign(g.nodes.size(), 0.0);
  for (std::size_t v = 0; v < g.nodes.size(); ++v) oc.d[v] = g.nodes[v].is_gate() ? dec.d[v] : g.nodes[v].d;
  for (auto& e : oc.decisions) {
    e.delta = 0.0;
    e.delta_prime = 0.0;
  }
  oc.buffer_count.assign(g.edges.size(), 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const double xi = dec.edges[e].xi;
    oc.buffer_count[e] = arts.buffers[e] >= 0 ? static_cast<int>(std::lround(xi / cfg.buffer_delay))
                                              : buffers_for(xi, cfg.buffer_delay);
  }
  sync_decisions(oc);
  return oc;
}

/// Timing of a continuous solution: each buffer chain is a single stage of
/// delay xi.
TimingReport continuous_timing(const GateGraph& g, const Config& cfg, const Decoded& dec) {
  OptimizedCircuit oc;
  oc.base = g;
  oc.T = cfg.T;
  oc.decisions = dec.edges;
  oc.d = dec.d;
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    if (!g.nodes[v].is_gate()) oc.d[v] = g.nodes[v].d;
  oc.buffer_count.assign(g.edges.size(), 0);
  PlacedCircuit pc = oc.placed();
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (dec.edges[e].xi <= 0.0) continue;
    Stage st{Stage::Kind::buffer};
    st.delay = dec.edges[e].xi;
    pc.chains[e].push_back(st);
  }
  return propagate_windows(pc, cfg);
}

std::set<int> latch_region_sites(const GateGraph& g, const TimingReport& r) {
  std::set<int> out;
  for (const auto& v : r.violations) {
    if (v.kind != ViolationKind::latch_region) continue;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const auto& ge = g.edges[e];
      if (g.nodes[ge.src].name + "->" + g.nodes[ge.dst].name + "." + std::to_string(ge.pin) == v.node)
        out.insert(static_cast<int>(e));
    }
  }
  return out;
}

struct Solved {
  ModelArtifacts arts;
  Solution sol;
  [[nodiscard]] bool ok() const { return sol.has_values() && sol.issues.empty(); }
};

Solved solve_legal(const GateGraph& g, const Config& cfg, const PlacementSet& S, const LegalOptions& opts) {
  Solved s{build_legalization_model(g, cfg, S, opts), {}};
  s.sol = solve(s.arts.model, limits_of(cfg));
  return s;
}

LegalOptions exact_options(const OptimizedCircuit& oc, const std::set<int>& no_latch) {
  LegalOptions opts;
  opts.zero_pads = true;
  opts.no_latch = no_latch;
  for (const auto& dec : oc.decisions)
    if (dec.unit_case != UnitKind::none) opts.fixed_unit[dec.edge] = {dec.unit_case, dec.phi};
  for (std::size_t e = 0; e < oc.base.edges.size(); ++e) opts.integer_buffers.insert(static_cast<int>(e));
  return opts;
}

PlacementSet unit_sites(const OptimizedCircuit& oc) {
  PlacementSet S;
  for (const auto& dec : oc.decisions)
    if (dec.unit_case != UnitKind::none) S.insert(dec.edge);
  return S;
}

/// Re-solves with units fixed and delays on the library grid.
std::optional<OptimizedCircuit> requantize(const OptimizedCircuit& oc, const Config& cfg, bool lib_choice) {
  LegalOptions opts = exact_options(oc, {});
  if (lib_choice) {
    opts.lib_choice = true;
  } else {
    opts.fixed_d.assign(oc.base.nodes.size(), std::nullopt);
    for (std::size_t v = 0; v < oc.base.nodes.size(); ++v)
      if (oc.base.nodes[v].is_gate()) opts.fixed_d[v] = oc.d[v];
  }
  const Config c = at_period(cfg, oc.T);
  Solved s = solve_legal(oc.base, c, unit_sites(oc), opts);
  if (!s.ok()) return std::nullopt;
  OptimizedCircuit out = from_decoded(oc.base, c, s.arts, decode_solution(s.arts, s.sol, oc.base));
  for (std::size_t v = 0; v < out.base.nodes.size(); ++v)
    if (out.base.nodes[v].is_gate()) out.d[v] = snap_to_library(out.d[v], out.base.nodes[v].lib);
  sync_decisions(out);
  if (!timing_clean(out, cfg)) return std::nullopt;
  return out;
}

}  // namespace

std::optional<OptimizedCircuit> discretize_delays(const OptimizedCircuit& oc, const Config& cfg) {
  OptimizedCircuit out = oc;
  std::vector<int> dir(oc.d.size(), 0);  // +1 rounded up, -1 rounded down
  for (std::size_t v = 0; v < oc.base.nodes.size(); ++v) {
    const auto& n = oc.base.nodes[v];
    if (!n.is_gate()) continue;
    out.d[v] = snap_to_library(oc.d[v], n.lib);
    if (out.d[v] > oc.d[v] + 1e-12) dir[v] = 1;
    if (out.d[v] < oc.d[v] - 1e-12) dir[v] = -1;
  }
  sync_decisions(out);
  const auto first = propagate_windows(out.placed(), at_period(cfg, out.T));
  if (first.clean()) return out;

  // One repair pass: late problems pull rounded-up gates down a step, early
  // problems push rounded-down gates up a step.
  bool late = false, early = false;
  for (const auto& v : first.violations) {
    if (v.kind == ViolationKind::hold) early = true;
    else late = true;
  }
  auto step = [&](const OptimizedCircuit& from, bool down, bool up) {
    OptimizedCircuit c = from;
    for (std::size_t v = 0; v < c.base.nodes.size(); ++v) {
      const auto& lib = c.base.nodes[v].lib;
      if (!c.base.nodes[v].is_gate() || lib.size() < 2) continue;
      const auto it = std::find(lib.begin(), lib.end(), c.d[v]);
      if (it == lib.end()) continue;
      if (down && dir[v] == 1 && it != lib.begin()) c.d[v] = *std::prev(it);
      if (up && dir[v] == -1 && std::next(it) != lib.end()) c.d[v] = *std::next(it);
    }
    sync_decisions(c);
    return c;
  };
  std::vector<std::pair<bool, bool>> tries;
  if (late && early) tries = {{true, true}, {true, false}, {false, true}};
  else tries = {{late, early}};
  for (auto [down, up] : tries) {
    OptimizedCircuit c = step(out, down, up);
    if (timing_clean(c, cfg)) return c;
  }
  return std::nullopt;
}

OptimizedCircuit replace_buffers(const OptimizedCircuit& oc, const Config& cfg_in, int* replaced) {
  const Config cfg = at_period(cfg_in, oc.T);
  OptimizedCircuit cur = oc;
  if (replaced) *replaced = 0;
  std::set<int> rejected;
  while (true) {
    int pick = -1;
    double longest = cfg.replace_threshold * cfg.T;
    for (std::size_t e = 0; e < cur.base.edges.size(); ++e) {
      const double chain = cur.buffer_count[e] * cur.buffer_delay;
      if (rejected.count(static_cast<int>(e)) || cur.decisions[e].unit_case != UnitKind::none) continue;
      if (chain > longest + 1e-12) {
        longest = chain;
        pick = static_cast<int>(e);
      }
    }
    if (pick < 0) break;
    LegalOptions opts = exact_options(cur, {});
    opts.unit_only.insert(pick);
    opts.fixed_d.assign(cur.base.nodes.size(), std::nullopt);
    for (std::size_t v = 0; v < cur.base.nodes.size(); ++v)
      if (cur.base.nodes[v].is_gate()) opts.fixed_d[v] = cur.d[v];
    PlacementSet S = unit_sites(cur);
    S.insert(pick);
    Solved s = solve_legal(cur.base, cfg, S, opts);
    bool commit = false;
    if (s.ok()) {
      OptimizedCircuit next = from_decoded(cur.base, cfg, s.arts, decode_solution(s.arts, s.sol, cur.base));
      next.d = cur.d;
      sync_decisions(next);
      if (next.area(cfg) <= cur.area(cfg) + 1e-9 && timing_clean(next, cfg)) {
        cur = std::move(next);
        commit = true;
        if (replaced) ++*replaced;
      }
    }
    if (!commit) rejected.insert(pick);
  }
  return cur;
}

// ---------------------------------------------------------------------------
// Flow

namespace {

FlowResult fail(FlowResult r, const std::string& stage, const std::string& why) {
  r.report.feasible = false;
  r.report.failed_stage = stage;
  r.report.diagnostic = why;
  r.circuit.reset();
  return r;
}

std::string status_of(const Solution& s) {
  if (s.has_values() && !s.issues.empty()) return "audit-failed";
  return std::string(to_string(s.status));
}

/// Final legalization with zero pads; widens the site set with the
/// connections that still carried pads if the plain set fails.
std::optional<std::pair<Solved, PlacementSet>> exact_pass(const GateGraph& g, const Config& cfg, PlacementSet S,
                                                          const PlacementSet& padded, const std::set<int>& no_latch,
                                                          const PlacementSet& breakers, std::string* status) {
  LegalOptions opts;
  opts.zero_pads = true;
  opts.no_latch = no_latch;
  opts.unit_only = breakers;
  Solved s = solve_legal(g, cfg, S, opts);
  *status = status_of(s.sol);
  if (s.ok()) return std::pair{std::move(s), S};
  PlacementSet wider = S;
  wider.insert(padded.begin(), padded.end());
  if (wider == S) return std::nullopt;
  Solved t = solve_legal(g, cfg, wider, opts);
  if (t.ok()) return std::pair{std::move(t), wider};
  if (*status != "bound_reached") *status = status_of(t.sol);
  return std::nullopt;
}

}  // namespace

FlowResult run_flow(const GateGraph& g, const Config& cfg_in) {
  Config cfg = cfg_in;
  if (cfg.T <= 0.0) cfg.T = g.clock.T;
  cfg.validate();
  if (!(cfg.T > 0.0)) throw std::invalid_argument("no clock period given");
  for (const auto& e : g.edges)
    for (const auto& el : e.elements)
      if (el.cycle) throw std::invalid_argument("input already carries delay unit '" + el.name + "'");

  FlowResult res;
  auto& rep = res.report;
  rep.T = cfg.T;
  const SolveLimits lim = limits_of(cfg);

  // Stage 1: pads emulate every unit.
  auto relaxed = build_relaxed_model(g, cfg);
  const Solution s1 = solve(relaxed.model, lim);
  rep.stages.push_back({"relaxed", status_of(s1), 0, 0, s1.objective, 1, {}});
  if (!s1.has_values() || !s1.issues.empty()) return fail(std::move(res), "relaxed", "relaxed model " + status_of(s1));
  const Decoded d1 = decode_solution(relaxed, s1, g);
  // Loops closed only through removed registers keep a unit.
  const PlacementSet breakers = loop_breakers(g);
  PlacementSet S = d1.unequal;
  S.insert(breakers.begin(), breakers.end());
  rep.stages.back().S = S.size();

  // Stage 2: commit units where the pad gap stays large.
  PlacementSet S_d;
  {
    StageReport st{"cdq", "skipped", S.size(), 0, 0.0, 0, {}};
    if (!S.empty()) {
      auto schedule = cfg.dth_schedule();
      schedule.push_back(0.0);
      bool any = false;
      for (double dth : schedule) {
        auto arts = build_cdq_model(g, cfg, S, dth);
        for (int e : breakers) arts.model.set_bounds(arts.site[e].x, 1.0, 1.0);
        const Solution sol = solve(arts.model, lim);
        ++st.iterations;
        st.status = status_of(sol);
        if (!sol.has_values() || !sol.issues.empty()) continue;
        any = true;
        st.objective = sol.objective;
        const Decoded dec = decode_solution(arts, sol, g);
        S_d = dec.units;
        bool residual = false;
        for (int e : dec.unequal)
          if (!S.count(e)) residual = true;
        if (!residual) break;
      }
      if (!any) {
        st.S_d = 0;
        rep.stages.push_back(st);
        return fail(std::move(res), "cdq", "no delay bound admitted a solution");
      }
    }
    st.S_d = S_d.size();
    rep.stages.push_back(st);
  }

  // Stage 3: exact unit models; sites that pick pass-through leave S_d.
  std::set<int> no_latch;
  StageReport st3{"legalization", "skipped", S.size(), S_d.size(), 0.0, 0, {}};
  S_d.insert(breakers.begin(), breakers.end());
  st3.S_d = S_d.size();
  PlacementSet cur = S_d;
  PlacementSet padded;
  LegalOptions loose;
  loose.unit_only = breakers;
  for (std::size_t guard = 0; guard <= S_d.size() + 1; ++guard) {
    Solved s = solve_legal(g, cfg, cur, loose);
    ++st3.iterations;
    st3.status = status_of(s.sol);
    if (!s.ok()) break;
    st3.objective = s.sol.objective;
    const Decoded dec = decode_solution(s.arts, s.sol, g);
    padded = dec.unequal;
    PlacementSet kept;
    for (int e : cur)
      if (dec.units.count(e)) kept.insert(e);
    st3.trace.push_back(kept.size());
    if (kept == cur) break;
    cur = kept;
  }

  std::optional<OptimizedCircuit> oc;
  for (int attempt = 0; attempt < 4 && !oc; ++attempt) {
    std::string status;
    auto exact = exact_pass(g, cfg, cur, padded, no_latch, breakers, &status);
    ++st3.iterations;
    if (!exact) {
      st3.status = status;
      st3.S_d = cur.size();
      rep.stages.push_back(st3);
      return fail(std::move(res), "legalization",
                  status == "bound_reached" ? "solver limits reached before an exact unit assignment was found"
                                            : "no unit assignment meets the exact timing model");
    }
    auto& [solved, sites] = *exact;
    st3.status = status_of(solved.sol);
    st3.objective = solved.sol.objective;
    st3.S_d = sites.size();
    const Decoded dec = decode_solution(solved.arts, solved.sol, g);
    const auto timing = continuous_timing(g, cfg, dec);
    const auto bad = latch_region_sites(g, timing);
    if (!bad.empty()) {
      // Latches whose earliest input lands after opening need a flip-flop.
      no_latch.insert(bad.begin(), bad.end());
      cur = sites;
      continue;
    }
    oc = from_decoded(g, cfg, solved.arts, dec);
  }
  rep.stages.push_back(st3);
  if (!oc) return fail(std::move(res), "legalization", "latch sites kept failing their transparency window");

  // Stage 4: library delays, whole buffers, then buffer replacement.
  StageReport st4{"discretization", "optimal", S.size(), st3.S_d, 0.0, 1, {}};
  std::optional<OptimizedCircuit> disc = discretize_delays(*oc, cfg);
  if (!disc) {
    ++st4.iterations;
    disc = requantize(*oc, cfg, false);
  }
  if (!disc) {
    ++st4.iterations;
    disc = requantize(*oc, cfg, true);
  }
  if (!disc) {
    st4.status = "infeasible";
    rep.stages.push_back(st4);
    return fail(std::move(res), "discretization", "library delays and whole buffers cannot meet timing");
  }
  int replaced = 0;
  OptimizedCircuit done = replace_buffers(*disc, cfg, &replaced);
  st4.objective = done.area(cfg);
  rep.stages.push_back(st4);

  const auto final_timing = propagate_windows(done.placed(), cfg);
  if (!final_timing.clean()) {
    std::ostringstream why;
    why << final_timing.violations.size() << " violations, first at " << final_timing.violations.front().node << " ("
        << to_string(final_timing.violations.front().kind) << ")";
    return fail(std::move(res), "final-verify", why.str());
  }

  rep.feasible = true;
  rep.T = cfg.T;
  rep.n_f = done.flipflop_units();
  rep.n_l = done.latch_units();
  rep.n_b = done.buffers();
  rep.replaced = replaced;
  rep.area_delta = done.area(cfg) - removable_area(g, cfg);
  res.circuit = std::move(done);
  return res;
}

FlowResult sweep_clock_period(const GateGraph& g, const Config& cfg, double step_fraction) {
  if (!(step_fraction > 0.0 && step_fraction <= 0.1)) throw std::invalid_argument("sweep step must lie in (0, 0.1]");
  const double T0 = cfg.T > 0.0 ? cfg.T : g.clock.T;
  FlowResult best = run_flow(g, at_period(cfg, T0));
  if (!best.feasible()) return best;
  for (int k = 1; k * step_fraction < 1.0; ++k) {
    const double T = T0 * (1.0 - k * step_fraction);
    FlowResult next = run_flow(g, at_period(cfg, T));
    if (!next.feasible()) break;
    best = std::move(next);
  }
  return best;
}

}  // namespace wavepipe
