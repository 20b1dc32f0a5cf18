// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "wavepipe/milp/simplex.hpp"

namespace wavepipe {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntTol = 1e-6;
}  // namespace

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& t : o.terms) terms.push_back({t.var, -t.coef});
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double k) {
  for (auto& t : terms) t.coef *= k;
  constant *= k;
  return *this;
}

double LinExpr::evaluate(const std::vector<double>& values) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * values.at(t.var);
  return v;
}

LinExpr LinExpr::normalized() const {
  std::map<int, double> acc;
  for (const auto& t : terms) acc[t.var] += t.coef;
  LinExpr out;
  out.constant = constant;
  for (const auto& [v, c] : acc)
    if (c != 0.0) out.terms.push_back({v, c});
  return out;
}

LinExpr var(int id, double coef) {
  LinExpr e;
  e.add(id, coef);
  return e;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double k, LinExpr a) { return a *= k; }

namespace {
Constraint make(const LinExpr& lhs, const LinExpr& rhs, Relation rel) {
  Constraint c;
  c.expr = lhs - rhs;
  c.rel = rel;
  c.rhs = 0.0;
  return c;
}
}  // namespace

Constraint operator<=(const LinExpr& lhs, const LinExpr& rhs) { return make(lhs, rhs, Relation::le); }
Constraint operator>=(const LinExpr& lhs, const LinExpr& rhs) { return make(lhs, rhs, Relation::ge); }
Constraint operator==(const LinExpr& lhs, const LinExpr& rhs) { return make(lhs, rhs, Relation::eq); }

int MilpModel::add_var(VarKind kind, double lb, double ub, std::string name) {
  Variable v;
  v.id = static_cast<int>(vars_.size());
  v.kind = kind;
  v.lb = kind == VarKind::binary ? std::max(0.0, lb) : lb;
  v.ub = kind == VarKind::binary ? std::min(1.0, ub) : ub;
  v.name = std::move(name);
  vars_.push_back(std::move(v));
  return vars_.back().id;
}

int MilpModel::add_constraint(Constraint c, std::string name) {
  c.expr = c.expr.normalized();
  c.rhs -= c.expr.constant;
  c.expr.constant = 0.0;
  if (!name.empty()) c.name = std::move(name);
  cons_.push_back(std::move(c));
  return static_cast<int>(cons_.size()) - 1;
}

void MilpModel::set_objective(LinExpr expr, Sense sense) {
  obj_ = expr.normalized();
  sense_ = sense;
}

void MilpModel::set_bounds(int id, double lb, double ub) {
  vars_.at(id).lb = lb;
  vars_.at(id).ub = ub;
}

void MilpModel::validate() const {
  const int n = static_cast<int>(vars_.size());
  auto check = [&](const LinExpr& e, const std::string& where) {
    for (const auto& t : e.terms) {
      if (t.var < 0 || t.var >= n) throw std::invalid_argument(where + " references unknown variable");
      if (!std::isfinite(t.coef)) throw std::invalid_argument(where + " has a non-finite coefficient");
    }
  };
  for (const auto& v : vars_) {
    if (std::isnan(v.lb) || std::isnan(v.ub) || v.lb > v.ub)
      throw std::invalid_argument("variable v" + std::to_string(v.id) + " has empty bounds");
    if (v.kind != VarKind::continuous && (!std::isfinite(v.lb) || !std::isfinite(v.ub)))
      throw std::invalid_argument("integer variable v" + std::to_string(v.id) + " needs finite bounds");
    if (v.kind == VarKind::binary && (v.lb < 0.0 || v.ub > 1.0))
      throw std::invalid_argument("binary variable v" + std::to_string(v.id) + " outside [0,1]");
  }
  for (std::size_t i = 0; i < cons_.size(); ++i) {
    check(cons_[i].expr, "constraint " + std::to_string(i));
    if (!std::isfinite(cons_[i].rhs)) throw std::invalid_argument("constraint has a non-finite right-hand side");
  }
  check(obj_, "objective");
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::bound_reached: return "bound_reached";
    case SolveStatus::unbounded: return "unbounded";
  }
  return "?";
}

std::vector<std::string> audit(const MilpModel& m, const std::vector<double>& values, double tol) {
  std::vector<std::string> issues;
  if (values.size() != m.num_vars()) {
    issues.push_back("value vector has wrong size");
    return issues;
  }
  for (const auto& v : m.variables()) {
    const double x = values[v.id];
    const double t = tol * std::max(1.0, std::abs(x));
    if (x < v.lb - t || x > v.ub + t) issues.push_back("v" + std::to_string(v.id) + " outside its bounds");
    if (v.kind != VarKind::continuous && std::abs(x - std::round(x)) > tol)
      issues.push_back("v" + std::to_string(v.id) + " is fractional");
  }
  for (std::size_t i = 0; i < m.constraints().size(); ++i) {
    const auto& c = m.constraints()[i];
    const double lhs = c.expr.evaluate(values);
    const double t = tol * std::max(1.0, std::abs(c.rhs));
    const bool ok = c.rel == Relation::le   ? lhs <= c.rhs + t
                    : c.rel == Relation::ge ? lhs >= c.rhs - t
                                            : std::abs(lhs - c.rhs) <= t;
    if (!ok) {
      issues.push_back("constraint " + (c.name.empty() ? std::to_string(i) : c.name) + " violated");
    }
  }
  return issues;
}

namespace {

using Lp = milp::LpProblem<double>;
using Simplex = milp::DenseSimplex<double>;

/// Maps each model variable to one or two LP columns.
struct ColumnMap {
  struct Entry {
    int col = -1;
    double sign = 1.0;
    int neg_col = -1;  ///< second column for free variables
  };
  std::vector<Entry> entries;
  int cols = 0;
};

ColumnMap map_columns(const MilpModel& m, std::vector<double>& lb, std::vector<double>& ub) {
  ColumnMap map;
  for (const auto& v : m.variables()) {
    ColumnMap::Entry e;
    e.col = map.cols++;
    if (std::isfinite(v.lb)) {
      lb.push_back(v.lb);
      ub.push_back(v.ub);
    } else if (std::isfinite(v.ub)) {
      e.sign = -1.0;
      lb.push_back(-v.ub);
      ub.push_back(kInf);
    } else {
      lb.push_back(0.0);
      ub.push_back(kInf);
      e.neg_col = map.cols++;
      lb.push_back(0.0);
      ub.push_back(kInf);
    }
    map.entries.push_back(e);
  }
  return map;
}

Lp build_lp(const MilpModel& m, ColumnMap& map) {
  Lp lp;
  map = map_columns(m, lp.lb, lp.ub);
  const int rows = static_cast<int>(m.num_constraints());
  lp.A = Lp::Matrix::Zero(rows, map.cols);
  lp.b = Lp::Vector::Zero(rows);
  auto put = [&](auto&& row, const LinExpr& e) {
    for (const auto& t : e.terms) {
      const auto& ent = map.entries[t.var];
      row(ent.col) += t.coef * ent.sign;
      if (ent.neg_col >= 0) row(ent.neg_col) -= t.coef;
    }
  };
  for (int i = 0; i < rows; ++i) {
    const auto& c = m.constraints()[i];
    auto row = lp.A.row(i);
    put([&](int j) -> double& { return row(j); }, c.expr);
    lp.b(i) = c.rhs;
    lp.sense.push_back(c.rel == Relation::le ? milp::RowSense::le
                       : c.rel == Relation::ge ? milp::RowSense::ge
                                               : milp::RowSense::eq);
  }
  lp.c = Lp::Vector::Zero(map.cols);
  const double flip = m.sense() == Sense::maximize ? -1.0 : 1.0;
  Lp::Vector& c = lp.c;
  put([&](int j) -> double& { return c(j); }, flip * LinExpr(m.objective()));
  return lp;
}

std::vector<double> to_model_values(const ColumnMap& map, const std::vector<double>& x) {
  std::vector<double> out(map.entries.size());
  for (std::size_t i = 0; i < map.entries.size(); ++i) {
    const auto& e = map.entries[i];
    out[i] = e.sign * x[e.col] - (e.neg_col >= 0 ? x[e.neg_col] : 0.0);
  }
  return out;
}

struct Node {
  double key = 0.0;  ///< parent relaxation value
  std::vector<std::pair<double, double>> bounds;  ///< per integer variable
  std::shared_ptr<const Simplex> warm;            ///< parent's optimal tableau
};

void apply_bounds(Simplex& lp, const ColumnMap& map, int id, double lo, double hi) {
  const auto& e = map.entries[id];
  if (e.sign > 0)
    lp.set_bounds(e.col, lo, hi);
  else
    lp.set_bounds(e.col, -hi, -lo);
}

}  // namespace

Solution solve(const MilpModel& m, const SolveLimits& limits) {
  m.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };

  ColumnMap map;
  const Lp lp = build_lp(m, map);
  const double flip = m.sense() == Sense::maximize ? -1.0 : 1.0;
  const double constant = m.objective().constant;

  std::vector<int> ints;
  for (const auto& v : m.variables())
    if (v.kind != VarKind::continuous) ints.push_back(v.id);

  Solution sol;
  auto root = std::make_shared<Simplex>(lp);
  const auto root_status = root->solve();
  if (root_status == milp::LpStatus::infeasible) {
    sol.status = SolveStatus::infeasible;
    return sol;
  }
  if (root_status == milp::LpStatus::unbounded) {
    sol.status = SolveStatus::unbounded;
    return sol;
  }

  std::vector<double> incumbent;
  double inc_obj = kInf;  // minimization form, without constant
  std::vector<std::string> notes;

  // Depth-first search: children re-optimize from their parent's tableau
  // with a few dual pivots, and the open list stays proportional to depth.
  Node first;
  for (int id : ints) first.bounds.emplace_back(m.variables()[id].lb, m.variables()[id].ub);
  first.key = -kInf;
  std::vector<Node> open;
  open.push_back(std::move(first));
  bool limit_hit = false;
  double best_open = -kInf;

  auto prune_tol = [](double inc) { return 1e-6 * std::max(1.0, std::abs(inc)); };

  while (!open.empty()) {
    if (sol.nodes >= limits.max_nodes || elapsed_ms() > limits.time_ms) {
      limit_hit = true;
      best_open = kInf;
      for (const auto& n : open) best_open = std::min(best_open, n.key);
      break;
    }
    Node node = std::move(open.back());
    open.pop_back();
    if (!incumbent.empty() && node.key >= inc_obj - prune_tol(inc_obj)) continue;
    ++sol.nodes;

    std::shared_ptr<Simplex> lpn;
    milp::LpStatus st;
    if (!node.warm) {
      lpn = root;
      st = root_status;
    } else {
      lpn = std::make_shared<Simplex>(*node.warm);
      node.warm.reset();
      for (std::size_t k = 0; k < ints.size(); ++k)
        apply_bounds(*lpn, map, ints[k], node.bounds[k].first, node.bounds[k].second);
      st = lpn->reoptimize();
      if (st == milp::LpStatus::iteration_limit) {
        Lp local = lp;
        for (std::size_t k = 0; k < ints.size(); ++k) {
          const auto& e = map.entries[ints[k]];
          const double lo = node.bounds[k].first, hi = node.bounds[k].second;
          local.lb[e.col] = e.sign > 0 ? lo : -hi;
          local.ub[e.col] = e.sign > 0 ? hi : -lo;
        }
        lpn = std::make_shared<Simplex>(local);
        st = lpn->solve();
        if (st == milp::LpStatus::iteration_limit) notes.push_back("LP iteration limit at a node");
      }
    }
    if (st != milp::LpStatus::optimal) continue;
    const double z = lpn->objective();
    if (!incumbent.empty() && z >= inc_obj - prune_tol(inc_obj)) continue;
    std::vector<double> vals = to_model_values(map, lpn->primal());

    int branch = -1;
    double best_frac = 0.0;
    for (std::size_t k = 0; k < ints.size(); ++k) {
      const double x = vals[ints[k]];
      const double f = std::abs(x - std::round(x));
      if (f <= kIntTol) continue;
      const double dist = 0.5 - std::abs(x - std::floor(x) - 0.5);
      if (branch < 0 || dist > best_frac + 1e-12) {
        branch = static_cast<int>(k);
        best_frac = dist;
      }
    }
    if (branch < 0) {
      for (int id : ints) vals[id] = std::round(vals[id]);
      incumbent = vals;
      inc_obj = z;
      continue;
    }
    const double x = vals[ints[branch]];
    Node down{z, node.bounds, lpn};
    down.bounds[branch].second = std::floor(x);
    Node up{z, std::move(node.bounds), lpn};
    up.bounds[branch].first = std::ceil(x);
    // The child on the nearer side of x is explored first.
    const bool down_first = x - std::floor(x) <= 0.5;
    Node& later = down_first ? up : down;
    Node& sooner = down_first ? down : up;
    if (later.bounds[branch].first <= later.bounds[branch].second) open.push_back(std::move(later));
    if (sooner.bounds[branch].first <= sooner.bounds[branch].second) open.push_back(std::move(sooner));
  }

  if (!incumbent.empty()) {
    sol.values = incumbent;
    sol.objective = flip * inc_obj + constant;
  }
  if (limit_hit) {
    sol.status = SolveStatus::bound_reached;
    sol.best_bound = flip * std::min(best_open, inc_obj) + constant;
  } else if (incumbent.empty()) {
    sol.status = SolveStatus::infeasible;
  } else {
    sol.status = SolveStatus::optimal;
    sol.best_bound = sol.objective;
  }
  if (!incumbent.empty()) sol.issues = audit(m, incumbent);
  sol.issues.insert(sol.issues.end(), notes.begin(), notes.end());
  return sol;
}

int linearize_product(MilpModel& m, int x, int v, const std::string& name) {
  const double L = m.variables().at(v).lb;
  const double U = m.variables().at(v).ub;
  if (!std::isfinite(L) || !std::isfinite(U)) throw std::invalid_argument("linearize_product needs a bounded factor");
  if (m.variables().at(x).kind != VarKind::binary) throw std::invalid_argument("linearize_product needs a binary");
  const int z = m.add_continuous(std::min(0.0, L), std::max(0.0, U), name);
  m.add_constraint(var(z) <= U * var(x));
  m.add_constraint(var(z) >= L * var(x));
  m.add_constraint(var(z) <= var(v) - L * (LinExpr(1.0) - var(x)));
  m.add_constraint(var(z) >= var(v) - U * (LinExpr(1.0) - var(x)));
  return z;
}

std::vector<int> add_either_or(MilpModel& m, const std::vector<std::vector<Constraint>>& branches, double big_M,
                               const std::string& prefix) {
  if (branches.size() < 2) throw std::invalid_argument("add_either_or needs at least two branches");
  std::vector<int> sel;
  LinExpr sum;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const int b = m.add_binary(prefix.empty() ? std::string{} : prefix + "_sel" + std::to_string(k));
    sel.push_back(b);
    sum.add(b, 1.0);
    for (const auto& c : branches[k]) {
      const LinExpr slack = big_M * (LinExpr(1.0) - var(b));
      if (c.rel != Relation::ge) {
        Constraint r = c;
        r.rel = Relation::le;
        r.expr = c.expr - slack;
        m.add_constraint(r);
      }
      if (c.rel != Relation::le) {
        Constraint r = c;
        r.rel = Relation::ge;
        r.expr = c.expr + slack;
        m.add_constraint(r);
      }
    }
  }
  m.add_constraint(sum == LinExpr(1.0));
  return sel;
}

int add_indicator(MilpModel& m, int x, const LinExpr& expr, double rhs, double big_M, const std::string& name) {
  return m.add_constraint(expr + big_M * (LinExpr(1.0) - var(x)) >= LinExpr(rhs), name);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_expr(std::ostringstream& os, const LinExpr& e) {
  bool first = true;
  for (const auto& t : e.terms) {
    const double c = t.coef;
    if (first) {
      if (c < 0) os << "- ";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    const double a = std::abs(c);
    if (a != 1.0) os << fmt(a) << " ";
    os << "v" << t.var;
    first = false;
  }
  if (first) os << "0";
}

}  // namespace

std::string export_lp(const MilpModel& m) {
  std::ostringstream os;
  os << "\\ generated by wavepipe\n";
  os << (m.sense() == Sense::minimize ? "Minimize\n" : "Maximize\n");
  os << " obj: ";
  write_expr(os, m.objective());
  if (m.objective().constant != 0.0) {
    os << (m.objective().constant < 0 ? " - " : " + ") << fmt(std::abs(m.objective().constant));
  }
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < m.constraints().size(); ++i) {
    const auto& c = m.constraints()[i];
    os << " c" << i << ": ";
    write_expr(os, c.expr);
    os << (c.rel == Relation::le ? " <= " : c.rel == Relation::ge ? " >= " : " = ") << fmt(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (const auto& v : m.variables()) {
    if (v.kind == VarKind::binary) continue;
    const bool lo = std::isfinite(v.lb);
    const bool hi = std::isfinite(v.ub);
    if (!lo && !hi) {
      os << " v" << v.id << " free\n";
    } else {
      os << " " << (lo ? fmt(v.lb) : "-inf") << " <= v" << v.id << " <= " << (hi ? fmt(v.ub) : "+inf") << "\n";
    }
  }
  std::vector<int> gen, bin;
  for (const auto& v : m.variables()) {
    if (v.kind == VarKind::integer) gen.push_back(v.id);
    if (v.kind == VarKind::binary) bin.push_back(v.id);
  }
  if (!gen.empty()) {
    os << "Generals\n";
    for (int id : gen) os << " v" << id << "\n";
  }
  if (!bin.empty()) {
    os << "Binaries\n";
    for (int id : bin) os << " v" << id << "\n";
  }
  os << "End\n";
  return os.str();
}

}  // namespace wavepipe
