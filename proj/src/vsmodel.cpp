// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/vsmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavepipe {

double default_big_M(const GateGraph& g, const Config& cfg) {
  const double T = cfg.T;
  double lib_sum = 0.0;
  for (const auto& n : g.nodes)
    if (n.is_gate() && !n.lib.empty()) lib_sum += n.lib.back();
  const double base_M = 4.0 * T + lib_sum;
  if (cfg.big_M > 0.0) return cfg.big_M;
  // Large enough to relax any branch row over the declared variable bounds.
  const auto& p = g.ff_params;
  const double n_span = std::max(std::abs(cfg.n_min), std::abs(cfg.n_max));
  const double span = (cfg.arrival_hi - cfg.arrival_lo + 4.0 + n_span) * T +
                      (p.t_cq + p.t_dq + p.t_su + p.t_h) * cfg.r_u + T;
  return std::max(base_M, span);
}

PlacementSet loop_breakers(const GateGraph& g) {
  const auto order = g.topo_order();
  std::vector<int> pos(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  auto internal = [&](const GraphEdge& e) { return g.nodes[e.src].is_gate() && g.nodes[e.dst].is_gate(); };
  auto reaches = [&](int from, int to) {
    std::vector<bool> seen(g.nodes.size(), false);
    std::vector<int> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (int e : g.nodes[v].fanout) {
        const int u = g.edges[e].dst;
        if (internal(g.edges[e]) && !seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
    return false;
  };
  // Every loop has an edge running backwards in the order; all such edges
  // carry a register because registers alone cut the original loops.
  PlacementSet out;
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    const auto& ge = g.edges[e];
    if (!internal(ge) || pos[ge.dst] > pos[ge.src]) continue;
    if (ge.w + ge.anchors() >= 1 && reaches(ge.dst, ge.src)) out.insert(e);
  }
  return out;
}

namespace {

class Builder {
 public:
  Builder(const GateGraph& g, const Config& cfg, ModelStage stage) : g_(g), cfg_(cfg) {
    a_.stage = stage;
    a_.T = cfg.T;
    a_.big_M = default_big_M(g, cfg);
  }

  void add_nodes(const LegalOptions* opts) {
    const double T = cfg_.T;
    const double lo = cfg_.arrival_lo * T;
    const double hi = cfg_.arrival_hi * T;
    const auto& p = g_.ff_params;
    const int n = static_cast<int>(g_.nodes.size());
    a_.s.assign(n, -1);
    a_.s_prime.assign(n, -1);
    a_.cap_s.assign(n, -1);
    a_.cap_s_prime.assign(n, -1);
    a_.d.assign(n, -1);
    auto& m = a_.model;
    for (int v = 0; v < n; ++v) {
      const auto& node = g_.nodes[v];
      if (node.is_gate()) {
        a_.s[v] = m.add_continuous(lo, hi, "s_" + node.name);
        a_.s_prime[v] = m.add_continuous(lo, hi, "sp_" + node.name);
        double dlo = node.lib.front();
        double dhi = node.lib.back();
        if (opts && v < static_cast<int>(opts->fixed_d.size()) && opts->fixed_d[v]) dlo = dhi = *opts->fixed_d[v];
        a_.d[v] = m.add_continuous(dlo, dhi, "d_" + node.name);
      } else {
        if (node.launches) {
          const double late = p.t_cq * cfg_.r_u;
          const double early = p.t_cq * cfg_.r_l;
          a_.s[v] = m.add_continuous(late, late, "s_" + node.name);
          a_.s_prime[v] = m.add_continuous(early, early, "sp_" + node.name);
        }
        if (node.captures) {
          a_.cap_s[v] = m.add_continuous(lo, hi, "cs_" + node.name);
          a_.cap_s_prime[v] = m.add_continuous(lo, hi, "csp_" + node.name);
        }
      }
    }
  }

  void add_edges(const LegalOptions* opts) {
    const double T = cfg_.T;
    const int ne = static_cast<int>(g_.edges.size());
    auto& m = a_.model;
    a_.xi.assign(ne, -1);
    a_.delta.assign(ne, -1);
    a_.delta_prime.assign(ne, -1);
    a_.buffers.assign(ne, -1);
    a_.site.assign(ne, {});
    for (int e = 0; e < ne; ++e) {
      const std::string tag = std::to_string(e);
      const double xi_hi = opts && opts->no_buffers.count(e) ? 0.0 : 3.0 * T;
      a_.xi[e] = m.add_continuous(0.0, xi_hi, "xi_" + tag);
      a_.delta[e] = m.add_continuous(0.0, 5.0 * T, "dl_" + tag);
      a_.delta_prime[e] = m.add_continuous(0.0, 5.0 * T, "dlp_" + tag);
    }
  }

  // Window expressions at the ends of a connection.
  [[nodiscard]] LinExpr src_s(int e) const { return var(a_.s.at(g_.edges[e].src)); }
  [[nodiscard]] LinExpr src_sp(int e) const { return var(a_.s_prime.at(g_.edges[e].src)); }
  [[nodiscard]] LinExpr dst_s(int e) const {
    const int v = g_.edges[e].dst;
    return var(g_.nodes[v].is_gate() ? a_.s[v] : a_.cap_s[v]);
  }
  [[nodiscard]] LinExpr dst_sp(int e) const {
    const int v = g_.edges[e].dst;
    return var(g_.nodes[v].is_gate() ? a_.s_prime[v] : a_.cap_s_prime[v]);
  }
  [[nodiscard]] LinExpr dly(int e) const {
    const int v = g_.edges[e].dst;
    return g_.nodes[v].is_gate() ? var(a_.d[v]) : LinExpr(0.0);
  }
  /// Removed registers and existing anchors both shift the reference by T.
  [[nodiscard]] double lambda_T(int e) const { return (g_.edges[e].w + g_.edges[e].anchors()) * cfg_.T; }
  /// Buffers already present on the connection.
  [[nodiscard]] double fixed_buf(int e) const { return g_.edges[e].buffer_delay(); }

  void add_relaxed_edge(int e) {
    auto& m = a_.model;
    const double ru = cfg_.r_u, rl = cfg_.r_l;
    const LinExpr xi = var(a_.xi[e]);
    const LinExpr dl = var(a_.delta[e]);
    const LinExpr dlp = var(a_.delta_prime[e]);
    m.add_constraint(dst_s(e) >= src_s(e) + ru * xi + ru * dly(e) + dl - LinExpr(lambda_T(e) - ru * fixed_buf(e)));
    m.add_constraint(dst_sp(e) <= src_sp(e) + rl * xi + rl * dly(e) + dlp - LinExpr(lambda_T(e) - rl * fixed_buf(e)));
    m.add_constraint(dl <= dlp);
    m.add_constraint(src_sp(e) + dlp <= src_s(e) + dl);
  }

  void add_cdq_edge(int e, double d_th) {
    auto& m = a_.model;
    const double ru = cfg_.r_u, rl = cfg_.r_l;
    const double tcq = g_.ff_params.t_cq;
    auto& sv = a_.site[e];
    const std::string tag = std::to_string(e);
    sv.x = m.add_binary("x_" + tag);
    const LinExpr xi = var(a_.xi[e]);
    const LinExpr dl = var(a_.delta[e]);
    const LinExpr dlp = var(a_.delta_prime[e]);
    // Products are added after the four connection rows so the row count of
    // the core model stays comparable to the relaxed one.
    const int zd = m.add_continuous(0.0, 5.0 * cfg_.T, "zdl_" + tag);
    const int zdp = m.add_continuous(0.0, 5.0 * cfg_.T, "zdlp_" + tag);
    sv.z_delta = zd;
    sv.z_delta_prime = zdp;
    m.add_constraint(dst_s(e) >=
                     src_s(e) + ru * xi + ru * dly(e) + var(zd) + (tcq * ru) * var(sv.x) - LinExpr(lambda_T(e) - ru * fixed_buf(e)));
    m.add_constraint(dst_sp(e) <=
                     src_sp(e) + rl * xi + rl * dly(e) + var(zdp) + (tcq * rl) * var(sv.x) - LinExpr(lambda_T(e) - rl * fixed_buf(e)));
    m.add_constraint(dl <= dlp);
    m.add_constraint(src_sp(e) + dlp <= src_s(e) + dl);
    pending_products_.push_back(e);
    pending_dth_.push_back(d_th);
  }

  void finish_cdq_sites() {
    auto& m = a_.model;
    for (std::size_t k = 0; k < pending_products_.size(); ++k) {
      const int e = pending_products_[k];
      auto& sv = a_.site[e];
      const double U = 5.0 * cfg_.T;
      // z = x * delta with delta in [0, U]; written out so z keeps its id.
      for (auto [z, v] : {std::pair{sv.z_delta, a_.delta[e]}, std::pair{sv.z_delta_prime, a_.delta_prime[e]}}) {
        m.add_constraint(var(z) <= U * var(sv.x));
        m.add_constraint(var(z) >= LinExpr(0.0));
        m.add_constraint(var(z) <= var(v));
        m.add_constraint(var(z) >= var(v) - U * (LinExpr(1.0) - var(sv.x)));
      }
      add_indicator(m, sv.x, var(a_.delta_prime[e]) - var(a_.delta[e]), pending_dth_[k],
                    std::max(a_.big_M, pending_dth_[k] + 1.0));
    }
  }

  void add_legal_site(int e, const LegalOptions& opts) {
    auto& m = a_.model;
    const double T = cfg_.T;
    const double ru = cfg_.r_u, rl = cfg_.r_l;
    const auto& p = g_.ff_params;
    auto& sv = a_.site[e];
    const std::string tag = std::to_string(e);
    m.set_bounds(a_.delta[e], 0.0, 0.0);
    m.set_bounds(a_.delta_prime[e], 0.0, 0.0);
    sv.N = m.add_var(VarKind::integer, cfg_.n_min, cfg_.n_max, "N_" + tag);
    sv.t = m.add_continuous(cfg_.arrival_lo * T, (cfg_.arrival_hi + 2.0) * T, "t_" + tag);
    sv.t_prime = m.add_continuous(cfg_.arrival_lo * T, (cfg_.arrival_hi + 2.0) * T, "tp_" + tag);
    const LinExpr xi = var(a_.xi[e]);
    m.add_constraint(dst_s(e) >= var(sv.t) + ru * xi + ru * dly(e) - LinExpr(lambda_T(e) - ru * fixed_buf(e)));
    m.add_constraint(dst_sp(e) <= var(sv.t_prime) + rl * xi + rl * dly(e) - LinExpr(lambda_T(e) - rl * fixed_buf(e)));

    const LinExpr su = src_s(e), sp = src_sp(e);
    const LinExpr NT = T * var(sv.N);
    const LinExpr t = var(sv.t), tp = var(sv.t_prime);
    std::vector<std::vector<Constraint>> branches;
    if (!ceil_.empty()) sv.ceiling = m.add_continuous(cfg_.arrival_lo * T, (cfg_.arrival_hi + 2.0) * T, "tc_" + tag);
    auto pass_through = [&] {
      std::vector<Constraint> rows{t >= su, tp <= sp};
      if (sv.ceiling >= 0) rows.push_back(var(sv.ceiling) >= var(ceil_[g_.edges[e].src]));
      return rows;
    };
    auto ff = [&](double phi) {
      std::vector<Constraint> rows{
          sp >= NT + LinExpr(phi + p.t_h * ru),
          su <= NT + LinExpr(T + phi - p.t_su * ru),
          t >= NT + LinExpr(T + phi + p.t_cq * ru),
          tp <= NT + LinExpr(T + phi + p.t_cq * rl),
      };
      if (sv.ceiling >= 0) rows.push_back(var(sv.ceiling) >= NT + LinExpr(T + phi + p.t_cq * rl));
      return rows;
    };
    auto latch = [&](double phi) {
      const double open = phi + cfg_.D * T;
      std::vector<Constraint> rows{
          sp >= NT + LinExpr(phi + p.t_h * ru),
          su <= NT + LinExpr(T + phi - p.t_su * ru),
          sp <= NT + LinExpr(open),
          t >= NT + LinExpr(open + p.t_cq * ru),
          t >= su + LinExpr(p.t_dq * ru),
          tp <= NT + LinExpr(open + p.t_cq * rl),
      };
      if (sv.ceiling >= 0) {
        // s' only bounds the earliest arrival from below, so the region
        // bound above is checked again on the ceiling.
        const LinExpr cu = var(ceil_[g_.edges[e].src]);
        rows.push_back(cu <= NT + LinExpr(open));
        rows.push_back(var(sv.ceiling) >= NT + LinExpr(open + p.t_cq * rl));
        rows.push_back(var(sv.ceiling) >= cu + LinExpr(p.t_dq * rl));
      }
      return rows;
    };

    if (auto it = opts.fixed_unit.find(e); it != opts.fixed_unit.end()) {
      const auto [kind, phi] = it->second;
      const auto rows = kind == UnitKind::none ? pass_through() : kind == UnitKind::flipflop ? ff(phi) : latch(phi);
      for (const auto& c : rows) m.add_constraint(c);
      sv.selectors = {-1};
      sv.selector_kind = {kind};
      sv.selector_phi = {kind == UnitKind::none ? 0.0 : phi};
      if (kind == UnitKind::none) m.set_bounds(sv.N, 0.0, 0.0);
      return;
    }
    if (!opts.unit_only.count(e)) {
      branches.push_back(pass_through());
      sv.selector_kind.push_back(UnitKind::none);
      sv.selector_phi.push_back(0.0);
    }
    for (double phi : cfg_.phases()) {
      branches.push_back(ff(phi));
      sv.selector_kind.push_back(UnitKind::flipflop);
      sv.selector_phi.push_back(phi);
    }
    if (!opts.no_latch.count(e)) {
      for (double phi : cfg_.phases()) {
        branches.push_back(latch(phi));
        sv.selector_kind.push_back(UnitKind::latch);
        sv.selector_phi.push_back(phi);
      }
    }
    if (branches.size() == 1) {
      for (const auto& c : branches[0]) m.add_constraint(c);
      sv.selectors = {-1};
    } else {
      sv.selectors = add_either_or(m, branches, a_.big_M, "u" + tag);
    }
  }

  /// True when some site may take a latch, whose region bound needs an
  /// upper bound on the earliest arrival at its source.
  [[nodiscard]] static bool latch_possible(const PlacementSet& S_d, const LegalOptions& opts) {
    for (int e : S_d) {
      if (auto it = opts.fixed_unit.find(e); it != opts.fixed_unit.end()) {
        if (it->second.first == UnitKind::latch) return true;
      } else if (!opts.no_latch.count(e)) {
        return true;
      }
    }
    return false;
  }

  /// Ceiling variables: per node, an upper bound on the earliest arrival.
  void add_ceiling_vars() {
    auto& m = a_.model;
    const double T = cfg_.T;
    ceil_.assign(g_.nodes.size(), -1);
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v) {
      const auto& node = g_.nodes[v];
      if (node.is_gate()) {
        ceil_[v] = m.add_continuous(cfg_.arrival_lo * T, (cfg_.arrival_hi + 2.0) * T, "sc_" + node.name);
      } else if (node.launches) {
        const double early = g_.ff_params.t_cq * cfg_.r_l;
        ceil_[v] = m.add_continuous(early, early, "sc_" + node.name);
      }
    }
  }

  /// The earliest arrival at a gate is the minimum over its fanins, so the
  /// ceiling follows one fanin picked by a binary.
  void add_ceiling_rows(const PlacementSet& S_d) {
    auto& m = a_.model;
    const double rl = cfg_.r_l;
    std::vector<std::vector<int>> fanin(g_.nodes.size());
    for (int e = 0; e < static_cast<int>(g_.edges.size()); ++e)
      if (g_.nodes[g_.edges[e].dst].is_gate()) fanin[g_.edges[e].dst].push_back(e);
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v) {
      if (fanin[v].empty()) continue;
      LinExpr pick;
      for (int e : fanin[v]) {
        LinExpr reach = S_d.count(e) ? var(a_.site[e].ceiling) : var(ceil_[g_.edges[e].src]) + var(a_.delta_prime[e]);
        reach += rl * var(a_.xi[e]) + rl * dly(e) - LinExpr(lambda_T(e) - rl * fixed_buf(e));
        if (fanin[v].size() == 1) {
          m.add_constraint(var(ceil_[v]) >= reach);
          continue;
        }
        const int b = m.add_binary("scb_" + std::to_string(e));
        pick.add(b, 1.0);
        m.add_constraint(var(ceil_[v]) >= reach - ceiling_M() * (LinExpr(1.0) - var(b)));
      }
      if (fanin[v].size() > 1) m.add_constraint(pick == LinExpr(1.0));
    }
  }

  /// Covers the widest reach over the declared variable bounds.
  [[nodiscard]] double ceiling_M() const {
    double d_max = 0.0, buf_max = 0.0;
    for (const auto& n : g_.nodes)
      if (n.is_gate() && !n.lib.empty()) d_max = std::max(d_max, n.lib.back());
    for (const auto& e : g_.edges) buf_max = std::max(buf_max, e.buffer_delay());
    const double T = cfg_.T;
    return (cfg_.arrival_hi + 2.0 - cfg_.arrival_lo) * T + 3.0 * T + 5.0 * T + d_max + buf_max + T;
  }

  void add_node_rows() {
    auto& m = a_.model;
    const double T = cfg_.T;
    const double gap = cfg_.stable_gap();
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v) {
      const auto& node = g_.nodes[v];
      int s = a_.s[v], sp = a_.s_prime[v];
      if (!node.is_gate() && node.captures) {
        s = a_.cap_s[v];
        sp = a_.cap_s_prime[v];
      }
      m.add_constraint(var(s) + LinExpr(gap) <= var(sp) + LinExpr(T));
    }
    const auto& p = g_.ff_params;
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v) {
      const auto& node = g_.nodes[v];
      if (node.is_gate() || !node.captures) continue;
      m.add_constraint(var(a_.cap_s[v]) + LinExpr(p.t_su * cfg_.r_u) <= LinExpr(T));
      m.add_constraint(var(a_.cap_s_prime[v]) >= LinExpr(p.t_h * cfg_.r_u));
    }
  }

  void add_gate_options(const LegalOptions& opts) {
    auto& m = a_.model;
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v) {
      const auto& node = g_.nodes[v];
      if (!node.is_gate() || !opts.lib_choice) continue;
      if (v < static_cast<int>(opts.fixed_d.size()) && opts.fixed_d[v]) continue;
      if (node.lib.size() < 2) continue;
      LinExpr sum, pick;
      for (std::size_t k = 0; k < node.lib.size(); ++k) {
        const int b = m.add_binary("lib_" + node.name + "_" + std::to_string(k));
        sum.add(b, 1.0);
        pick.add(b, node.lib[k]);
      }
      m.add_constraint(sum == LinExpr(1.0));
      m.add_constraint(var(a_.d[v]) == pick);
    }
    const double db = cfg_.buffer_delay;
    for (int e : opts.integer_buffers) {
      const int hi = static_cast<int>(std::floor(m.variables()[a_.xi[e]].ub / db + 1e-9));
      a_.buffers[e] = m.add_var(VarKind::integer, 0, hi, "nb_" + std::to_string(e));
      m.add_constraint(var(a_.xi[e]) == db * var(a_.buffers[e]));
    }
  }

  void set_objective(const PlacementSet& excluded_pads, double unit_cost, double x_cost) {
    LinExpr obj;
    for (int e = 0; e < static_cast<int>(g_.edges.size()); ++e) {
      if (!excluded_pads.count(e)) {
        obj.add(a_.delta_prime[e], cfg_.alpha + cfg_.beta);
        obj.add(a_.delta[e], -cfg_.alpha);
      }
      obj.add(a_.xi[e], cfg_.beta);
      const auto& sv = a_.site[e];
      if (sv.x >= 0) obj.add(sv.x, x_cost);
      for (std::size_t k = 0; k < sv.selectors.size(); ++k)
        if (sv.selectors[k] >= 0 && sv.selector_kind[k] != UnitKind::none) obj.add(sv.selectors[k], unit_cost);
    }
    for (int v = 0; v < static_cast<int>(g_.nodes.size()); ++v)
      if (a_.d[v] >= 0) obj.add(a_.d[v], -cfg_.gamma);
    a_.model.set_objective(obj, Sense::minimize);
  }

  ModelArtifacts& artifacts() { return a_; }

 private:
  const GateGraph& g_;
  const Config& cfg_;
  ModelArtifacts a_;
  std::vector<int> ceil_;  ///< per node; empty unless a latch is possible
  std::vector<int> pending_products_;
  std::vector<double> pending_dth_;
};

std::size_t expected_core_rows(const GateGraph& g) {
  std::size_t caps = 0;
  for (const auto& n : g.nodes)
    if (!n.is_gate() && n.captures) ++caps;
  return 4 * g.edges.size() + g.nodes.size() + 2 * caps;
}

void require_period(const Config& cfg) {
  if (!(cfg.T > 0.0)) throw std::invalid_argument("model needs a positive clock period");
}

}  // namespace

ModelArtifacts build_relaxed_model(const GateGraph& g, const Config& cfg) {
  require_period(cfg);
  Builder b(g, cfg, ModelStage::relaxed);
  b.add_nodes(nullptr);
  b.add_edges(nullptr);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) b.add_relaxed_edge(e);
  b.add_node_rows();
  b.set_objective({}, 0.0, 0.0);
  auto& a = b.artifacts();
  a.core_rows = a.model.num_constraints();
  if (a.core_rows != expected_core_rows(g)) throw std::logic_error("relaxed model row count mismatch");
  return std::move(a);
}

ModelArtifacts build_cdq_model(const GateGraph& g, const Config& cfg, const PlacementSet& S, double d_th) {
  require_period(cfg);
  Builder b(g, cfg, ModelStage::cdq);
  b.add_nodes(nullptr);
  b.add_edges(nullptr);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (S.count(e))
      b.add_cdq_edge(e, d_th);
    else
      b.add_relaxed_edge(e);
  }
  b.add_node_rows();
  auto& a = b.artifacts();
  a.core_rows = a.model.num_constraints();
  b.finish_cdq_sites();
  // A small charge per unit makes the choice between equivalent placements
  // deterministic and favors fewer units.
  b.set_objective(S, 0.0, 1e-3 * cfg.alpha);
  a.sites = S;
  return std::move(a);
}

ModelArtifacts build_legalization_model(const GateGraph& g, const Config& cfg, const PlacementSet& S_d,
                                        const LegalOptions& opts) {
  require_period(cfg);
  Builder b(g, cfg, ModelStage::legal);
  b.add_nodes(&opts);
  b.add_edges(&opts);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
    if (!S_d.count(e)) b.add_relaxed_edge(e);
  b.add_node_rows();
  auto& a = b.artifacts();
  a.core_rows = a.model.num_constraints();
  const bool ceilings = Builder::latch_possible(S_d, opts);
  if (ceilings) b.add_ceiling_vars();
  for (int e : S_d) b.add_legal_site(e, opts);
  if (ceilings) b.add_ceiling_rows(S_d);
  b.add_gate_options(opts);
  if (opts.zero_pads) {
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
      a.model.set_bounds(a.delta[e], 0.0, 0.0);
      a.model.set_bounds(a.delta_prime[e], 0.0, 0.0);
    }
  }
  b.set_objective(S_d, cfg.alpha, 0.0);
  a.sites = S_d;
  return std::move(a);
}

Decoded decode_solution(const ModelArtifacts& arts, const Solution& sol, const GateGraph& g) {
  if (!sol.has_values()) throw std::logic_error("decode_solution needs a solution with values");
  const auto& m = arts.model;
  auto integral = [&](int id) {
    const double v = sol.value(id);
    if (std::abs(v - std::round(v)) > 1e-6) throw std::logic_error("fractional integer variable v" + std::to_string(id));
    return static_cast<int>(std::lround(v));
  };
  (void)m;
  const double tol = 1e-6 * std::max(1.0, arts.T);
  Decoded out;
  out.d.assign(g.nodes.size(), 0.0);
  for (std::size_t v = 0; v < g.nodes.size(); ++v)
    if (arts.d[v] >= 0) out.d[v] = sol.value(arts.d[v]);
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    EdgeDecision ed;
    ed.edge = e;
    ed.xi = std::max(0.0, sol.value(arts.xi[e]));
    ed.delta = sol.value(arts.delta[e]);
    ed.delta_prime = sol.value(arts.delta_prime[e]);
    const int dst = g.edges[e].dst;
    ed.d = arts.d[dst] >= 0 ? out.d[dst] : 0.0;
    const auto& sv = arts.site[e];
    if (sv.x >= 0) ed.x = integral(sv.x) == 1;
    if (!sv.selectors.empty()) {
      int chosen = -1;
      for (std::size_t k = 0; k < sv.selectors.size(); ++k) {
        if (sv.selectors[k] < 0 || integral(sv.selectors[k]) == 1) {
          chosen = static_cast<int>(k);
          break;
        }
      }
      if (chosen < 0) throw std::logic_error("no branch selected at a site");
      ed.unit_case = sv.selector_kind[chosen];
      ed.phi = sv.selector_phi[chosen];
      ed.N = ed.unit_case == UnitKind::none ? 0 : integral(sv.N);
      ed.x = ed.unit_case != UnitKind::none;
    }
    if (arts.buffers[e] >= 0) ed.xi = arts.buffers.size() ? sol.value(arts.xi[e]) : ed.xi;
    if (ed.delta_prime - ed.delta > tol) out.unequal.insert(e);
    if (ed.x) out.units.insert(e);
    out.edges.push_back(ed);
  }
  return out;
}

}  // namespace wavepipe
