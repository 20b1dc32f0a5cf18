// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

// Cycle-by-cycle wave simulation.  Everything here is computed in absolute
// time from the clock edges a token actually meets; it deliberately does
// not reuse the relative-window propagation of the timing analyzer so the
// two can be checked against each other.

#include "wavepipe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace wavepipe {

namespace {

using Lag = std::pair<int, int>;  // (launching node, cycles since launch)

struct Token {
  bool valid = false;
  double lo = 0.0;  // earliest
  double hi = 0.0;  // latest
  std::set<Lag> lags;
};

struct Generation {
  std::vector<Token> out;  // what a node drives
  std::vector<Token> in;   // gate output before fanout, or terminal capture input
};

int anchors_on(const std::vector<Stage>& chain) {
  int a = 0;
  for (const auto& st : chain) a += st.kind == Stage::Kind::anchor ? 1 : 0;
  return a;
}

std::string connection(const GateGraph& g, int e) {
  return g.nodes[g.edges[e].src].name + "->" + g.nodes[g.edges[e].dst].name + "." + std::to_string(g.edges[e].pin);
}

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

class Simulator {
 public:
  Simulator(const PlacedCircuit& pc, const Config& cfg, int horizon)
      : pc_(pc), g_(pc.graph), cfg_(cfg), p_(pc.graph.ff_params) {
    if (cfg_.T <= 0.0) cfg_.T = g_.clock.T;
    T_ = cfg_.T;
    if (T_ <= 0.0) throw std::invalid_argument("clock period must be positive");
    if (pc.chains.size() != g_.edges.size() || pc.d.size() != g_.nodes.size())
      throw std::invalid_argument("placement does not match its graph");
    lambda_.resize(g_.edges.size());
    int total = 0;
    for (std::size_t e = 0; e < g_.edges.size(); ++e) {
      for (const auto& st : pc.chains[e])
        if (st.kind == Stage::Kind::unit && st.unit == UnitKind::none)
          throw std::invalid_argument("unresolved delay unit");
      lambda_[e] = anchors_on(pc.chains[e]);
      total += lambda_[e];
    }
    horizon_ = horizon > 0 ? horizon : total + 4;
    order_ = evaluation_order();
  }

  CaptureReport run() {
    const int n = static_cast<int>(g_.nodes.size());
    const int cap = horizon_ + 8 * (n + static_cast<int>(g_.edges.size())) + 32;
    CaptureReport rep;
    rep.T = T_;
    int steady = -1;
    for (int gen = 0; gen < cap; ++gen) {
      step(gen);
      if (gen > horizon_ && periodic(gen)) {
        steady = gen;
        break;
      }
    }
    if (steady >= 0) {
      step(steady + 1);  // the next wave, for the overlap check
      rep.stable = true;
    }
    const int at = steady >= 0 ? steady : static_cast<int>(hist_.size()) - 1;
    rep.steady_generation = steady;
    rep.generations = static_cast<int>(hist_.size());
    check(at, steady >= 0, rep);
    return rep;
  }

 private:
  // Same-cycle dependencies: connections with no anchor and no delay unit
  // whose source is not a launching terminal.  Anything else reads a value
  // that is either from an earlier cycle or independent of the source input.
  std::vector<int> evaluation_order() const {
    const int n = static_cast<int>(g_.nodes.size());
    std::vector<int> indeg(n, 0);
    auto same_cycle = [&](int e) {
      const auto& src = g_.nodes[g_.edges[e].src];
      if (!src.is_gate() && src.launches) return false;
      return std::all_of(pc_.chains[e].begin(), pc_.chains[e].end(),
                         [](const Stage& s) { return s.kind == Stage::Kind::buffer; });
    };
    for (std::size_t e = 0; e < g_.edges.size(); ++e)
      if (same_cycle(static_cast<int>(e))) ++indeg[g_.edges[e].dst];
    std::queue<int> ready;
    for (int v = 0; v < n; ++v)
      if (indeg[v] == 0) ready.push(v);
    std::vector<int> order;
    while (!ready.empty()) {
      const int v = ready.front();
      ready.pop();
      order.push_back(v);
      for (int e : g_.nodes[v].fanout)
        if (same_cycle(e) && --indeg[g_.edges[e].dst] == 0) ready.push(g_.edges[e].dst);
    }
    if (static_cast<int>(order.size()) != n)
      throw std::invalid_argument("placement has a loop without a delay unit or anchor");
    return order;
  }

  // Carries the token that `src` drove in the right earlier cycle through
  // the connection's elements.  Unit checks go to `viol` when given.
  Token through(int e, int gen, std::vector<Violation>* viol) const {
    const int u = g_.edges[e].src;
    int cycle = gen - lambda_[e];
    if (cycle < 0) return {};
    Token t = hist_[cycle].out[u];
    if (!t.valid) return t;
    std::set<Lag> lags;
    for (const auto& [src, lag] : t.lags)
      if (lag + lambda_[e] <= horizon_) lags.insert({src, lag + lambda_[e]});
    t.lags = std::move(lags);
    for (const Stage& st : pc_.chains[e]) {
      switch (st.kind) {
        case Stage::Kind::buffer:
          t.hi += st.delay * cfg_.r_u;
          t.lo += st.delay * cfg_.r_l;
          break;
        case Stage::Kind::anchor:
          ++cycle;
          break;
        case Stage::Kind::unit: {
          const double edge = (cycle + st.N) * T_ + st.phi;
          if (viol) {
            const double open_from = edge + p_.t_h * cfg_.r_u;
            const double close_at = edge + T_ - p_.t_su * cfg_.r_u;
            if (t.lo < open_from - cfg_.eps) viol->push_back({connection(g_, e), ViolationKind::hold, t.lo - open_from});
            if (t.hi > close_at + cfg_.eps) viol->push_back({connection(g_, e), ViolationKind::setup, close_at - t.hi});
          }
          const double launch = edge + T_;
          if (st.unit == UnitKind::flipflop) {
            t.hi = launch + p_.t_cq * cfg_.r_u;
            t.lo = launch + p_.t_cq * cfg_.r_l;
          } else {
            const double transparent = edge + cfg_.D * T_;
            if (viol && t.lo > transparent + cfg_.eps)
              viol->push_back({connection(g_, e), ViolationKind::latch_region, transparent - t.lo});
            t.hi = std::max(transparent + p_.t_cq * cfg_.r_u, t.hi + p_.t_dq * cfg_.r_u);
            t.lo = std::max(transparent + p_.t_cq * cfg_.r_l, t.lo + p_.t_dq * cfg_.r_l);
          }
          break;
        }
      }
    }
    return t;
  }

  Token gather(int v, int gen, std::vector<Violation>* viol) const {
    Token acc;
    for (int e : g_.nodes[v].fanin) {
      Token t = through(e, gen, viol);
      if (!t.valid) continue;
      if (!acc.valid) {
        acc = std::move(t);
        continue;
      }
      acc.hi = std::max(acc.hi, t.hi);
      acc.lo = std::min(acc.lo, t.lo);
      acc.lags.insert(t.lags.begin(), t.lags.end());
    }
    if (acc.valid && g_.nodes[v].is_gate()) {
      acc.hi += pc_.d[v] * cfg_.r_u;
      acc.lo += pc_.d[v] * cfg_.r_l;
    }
    return acc;
  }

  static bool same(const Token& a, const Token& b) {
    return a.valid == b.valid && (!a.valid || (same_time(a.lo, b.lo) && same_time(a.hi, b.hi) && a.lags == b.lags));
  }

  void step(int gen) {
    const int n = static_cast<int>(g_.nodes.size());
    Generation cur;
    cur.out.assign(n, {});
    cur.in.assign(n, {});
    for (int v = 0; v < n; ++v) {
      const auto& node = g_.nodes[v];
      if (node.is_gate() || !node.launches) continue;
      cur.out[v] = Token{true, gen * T_ + p_.t_cq * cfg_.r_l, gen * T_ + p_.t_cq * cfg_.r_u, {{v, 0}}};
    }
    hist_.push_back(std::move(cur));
    Generation& g = hist_.back();
    // Loops closed by a delay unit without an anchor feed back within the
    // cycle; repeat until nothing moves.
    const int passes = n + static_cast<int>(g_.edges.size()) + 2;
    unsettled_.assign(n, false);
    for (int pass = 0; pass < passes; ++pass) {
      bool moved = false;
      std::fill(unsettled_.begin(), unsettled_.end(), false);
      for (int v : order_) {
        Token t = gather(v, gen, nullptr);
        if (!same(t, g.in[v])) {
          moved = true;
          unsettled_[v] = true;
        }
        g.in[v] = t;
        if (g_.nodes[v].is_gate()) g.out[v] = std::move(t);
      }
      if (!moved) {
        std::fill(unsettled_.begin(), unsettled_.end(), false);
        break;
      }
    }
  }

  bool periodic(int gen) const {
    const auto& a = hist_[gen - 1];
    const auto& b = hist_[gen];
    for (std::size_t v = 0; v < b.in.size(); ++v) {
      for (const auto* pair : {&a.in, &a.out}) {
        const Token& x = (*pair)[v];
        const Token& y = pair == &a.in ? b.in[v] : b.out[v];
        if (x.valid != y.valid) return false;
        if (!x.valid) continue;
        if (!same_time(x.lo + T_, y.lo) || !same_time(x.hi + T_, y.hi) || x.lags != y.lags) return false;
      }
    }
    return std::none_of(unsettled_.begin(), unsettled_.end(), [](bool b) { return b; });
  }

  void check(int at, bool stable, CaptureReport& rep) const {
    const double gap = cfg_.stable_gap();
    auto& viol = rep.violations;
    for (int v : order_) {
      const auto& node = g_.nodes[v];
      gather(v, at, &viol);
      const Token& t = hist_[at].in[v];
      if (!t.valid) continue;

      bool moving = !stable;
      double next_lo = t.lo + T_;
      if (stable) {
        next_lo = hist_[at + 1].in[v].lo;
      } else if (at > 0 && hist_[at - 1].in[v].valid) {
        const Token& prev = hist_[at - 1].in[v];
        moving = !same_time(prev.lo + T_, t.lo) || !same_time(prev.hi + T_, t.hi) || unsettled_[v];
        next_lo = t.lo + T_;
      }
      const double overlap = next_lo - t.hi - gap;
      if (overlap < -cfg_.eps || moving)
        viol.push_back({node.name, ViolationKind::non_interference, std::min(overlap, -cfg_.eps)});

      if (node.is_gate() || !node.captures) continue;
      // The edge that actually latches the wave is the first one it meets
      // with setup satisfied; the design expects the one after `at`.
      const int designed = at + 1;
      const int k = static_cast<int>(std::ceil((t.hi + p_.t_su * cfg_.r_u - cfg_.eps) / T_ - 1e-12));
      if (k > designed) viol.push_back({node.name, ViolationKind::setup, designed * T_ - t.hi - p_.t_su * cfg_.r_u});
      if (k < designed) viol.push_back({node.name, ViolationKind::hold, t.lo - at * T_ - p_.t_h * cfg_.r_u});
      const double hold = t.lo - ((k - 1) * T_ + p_.t_h * cfg_.r_u);
      if (hold < -cfg_.eps) viol.push_back({node.name, ViolationKind::hold, hold});
      for (const auto& [src, lag] : t.lags)
        rep.captures.push_back({node.name, g_.nodes[src].name, at - lag, k});
    }
    std::sort(rep.captures.begin(), rep.captures.end(), [](const CaptureRecord& a, const CaptureRecord& b) {
      return std::tie(a.sink, a.source, a.wave, a.cycle) < std::tie(b.sink, b.source, b.wave, b.cycle);
    });
  }

  const PlacedCircuit& pc_;
  const GateGraph& g_;
  Config cfg_;
  const FlipFlopParams& p_;
  double T_ = 0.0;
  int horizon_ = 0;
  std::vector<int> lambda_;
  std::vector<int> order_;
  std::vector<Generation> hist_;
  std::vector<bool> unsettled_;
};

std::set<std::string> terminal_names(const GateGraph& g, bool launching) {
  std::set<std::string> out;
  for (const auto& n : g.nodes)
    if (!n.is_gate() && (launching ? n.launches : n.captures)) out.insert(n.name);
  return out;
}

int default_horizon(const PlacedCircuit& pc) {
  int total = 0;
  for (const auto& chain : pc.chains) total += anchors_on(chain);
  return total + 4;
}

}  // namespace

std::vector<std::tuple<std::string, std::string, int>> CaptureReport::offsets() const {
  std::set<std::tuple<std::string, std::string, int>> s;
  for (const auto& c : captures) s.insert({c.sink, c.source, c.cycle - c.wave});
  return {s.begin(), s.end()};
}

CaptureReport simulate_waves(const PlacedCircuit& pc, const Config& cfg, int horizon) {
  return Simulator(pc, cfg, horizon).run();
}

CaptureReport simulate_waves(const Circuit& c, const Config& cfg, int horizon) {
  return simulate_waves(place_from_graph(to_gate_graph(c)), cfg, horizon);
}

EquivalenceResult check_equivalence(const Circuit& orig, const PlacedCircuit& opt, const Config& cfg) {
  const PlacedCircuit ref = place_from_graph(to_gate_graph(orig));
  for (bool launching : {true, false})
    if (terminal_names(ref.graph, launching) != terminal_names(opt.graph, launching))
      throw std::invalid_argument(std::string("structural mismatch: ") + (launching ? "launching" : "capturing") +
                                  " terminals differ");
  const int horizon = std::max(default_horizon(ref), default_horizon(opt));

  Config ref_cfg = cfg;
  ref_cfg.T = std::max(orig.clock.T, cfg.r_u * traditional_min_period(orig));
  Config opt_cfg = cfg;
  if (opt_cfg.T <= 0.0) opt_cfg.T = opt.graph.clock.T;

  EquivalenceResult r;
  r.reference = simulate_waves(ref, ref_cfg, horizon);
  r.optimized = simulate_waves(opt, opt_cfg, horizon);
  for (const auto& v : r.optimized.violations)
    r.diff.push_back("violation " + std::string(to_string(v.kind)) + " at " + v.node);
  const auto a = r.reference.offsets();
  const auto b = r.optimized.offsets();
  std::vector<std::tuple<std::string, std::string, int>> only;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only));
  for (const auto& [sink, src, off] : only)
    r.diff.push_back("missing capture at " + sink + ": " + src + " after " + std::to_string(off) + " cycles");
  only.clear();
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only));
  for (const auto& [sink, src, off] : only) {
    // Arriving sooner than any reference capture of the pair means the wave
    // overtook the register that used to hold it back.
    bool early = true;
    for (const auto& [rs, rsrc, roff] : a)
      if (rs == sink && rsrc == src && roff <= off) early = false;
    r.diff.push_back(std::string(early ? "early arrival at " : "extra capture at ") + sink + ": " + src +
                     " captured after " + std::to_string(off) + " cycles");
  }
  r.pass = r.diff.empty();
  return r;
}

EquivalenceResult check_equivalence(const Circuit& orig, const Circuit& opt, const Config& cfg) {
  return check_equivalence(orig, place_from_graph(to_gate_graph(opt)), cfg);
}

std::string format_captures(const CaptureReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(16) << "sink" << std::setw(16) << "source" << std::setw(8) << "wave"
     << "cycle\n";
  for (const auto& c : r.captures)
    os << std::setw(16) << c.sink << std::setw(16) << c.source << std::setw(8) << c.wave << c.cycle << "\n";
  return os.str();
}

}  // namespace wavepipe
