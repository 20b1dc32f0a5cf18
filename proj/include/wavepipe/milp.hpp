// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wavepipe {

enum class VarKind { continuous, integer, binary };
enum class Relation { le, ge, eq };
enum class Sense { minimize, maximize };

struct Term {
  int var = -1;
  double coef = 0.0;
};

/// Sparse linear expression.  Repeated variables are allowed and summed.
struct LinExpr {
  std::vector<Term> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  LinExpr& add(int var, double coef) {
    terms.push_back({var, coef});
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double k);

  [[nodiscard]] double evaluate(const std::vector<double>& values) const;
  /// Merges duplicates and drops zero coefficients, sorted by variable id.
  [[nodiscard]] LinExpr normalized() const;
};

LinExpr var(int id, double coef = 1.0);
LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double k, LinExpr a);

struct Variable {
  int id = -1;
  VarKind kind = VarKind::continuous;
  double lb = 0.0;
  double ub = 0.0;
  std::string name;
};

struct Constraint {
  LinExpr expr;
  Relation rel = Relation::le;
  double rhs = 0.0;
  std::string name;
};

Constraint operator<=(const LinExpr& lhs, const LinExpr& rhs);
Constraint operator>=(const LinExpr& lhs, const LinExpr& rhs);
Constraint operator==(const LinExpr& lhs, const LinExpr& rhs);

/*! \brief Mixed-integer linear program.
 *
 * Variables are numbered densely from 0 in creation order; the id doubles as
 * the branching tie-break and as the `v<id>` name in LP export.
 */
class MilpModel {
 public:
  int add_var(VarKind kind, double lb, double ub, std::string name = {});
  int add_binary(std::string name = {}) { return add_var(VarKind::binary, 0.0, 1.0, std::move(name)); }
  int add_continuous(double lb, double ub, std::string name = {}) {
    return add_var(VarKind::continuous, lb, ub, std::move(name));
  }

  /// Stores `c` with the expression constant folded into the right-hand side.
  int add_constraint(Constraint c, std::string name = {});

  void set_objective(LinExpr expr, Sense sense = Sense::minimize);

  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return cons_; }
  [[nodiscard]] const LinExpr& objective() const { return obj_; }
  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] std::size_t num_vars() const { return vars_.size(); }
  [[nodiscard]] std::size_t num_constraints() const { return cons_.size(); }

  void set_bounds(int id, double lb, double ub);

  /// Throws std::invalid_argument on dangling references or bad bounds.
  void validate() const;

 private:
  std::vector<Variable> vars_;
  std::vector<Constraint> cons_;
  LinExpr obj_;
  Sense sense_ = Sense::minimize;
};

enum class SolveStatus { optimal, feasible, infeasible, bound_reached, unbounded };

std::string_view to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> values;
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  std::vector<std::string> issues;  ///< audit findings; empty for a sound solution

  [[nodiscard]] bool has_values() const { return !values.empty(); }
  [[nodiscard]] double value(int id) const { return values.at(id); }
};

struct SolveLimits {
  std::size_t max_nodes = 20000;
  double time_ms = 60000.0;
};

/// Branch-and-bound over LP relaxations.  Deterministic for a fixed model.
Solution solve(const MilpModel& m, const SolveLimits& limits = {});

/// Re-evaluates every bound, integrality requirement and constraint.
std::vector<std::string> audit(const MilpModel& m, const std::vector<double>& values, double tol = 1e-6);

/// z = x * v for binary x and bounded v.
int linearize_product(MilpModel& m, int x, int v, const std::string& name = {});

/// One selector per branch; exactly one branch holds.  Branch constraints are
/// relaxed by big_M * (1 - selector).
std::vector<int> add_either_or(MilpModel& m, const std::vector<std::vector<Constraint>>& branches, double big_M,
                               const std::string& prefix = {});

/// expr >= rhs whenever x = 1.
int add_indicator(MilpModel& m, int x, const LinExpr& expr, double rhs, double big_M, const std::string& name = {});

/// CPLEX LP text with variables named v<id>.
std::string export_lp(const MilpModel& m);

}  // namespace wavepipe
