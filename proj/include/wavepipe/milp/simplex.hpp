// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace wavepipe::milp {

enum class RowSense { le, ge, eq };

/// min c'x  s.t.  A x (<=|>=|=) b,  lb <= x <= ub.  Every lb must be finite.
template <typename Scalar>
struct LpProblem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix A;
  Vector b;
  std::vector<RowSense> sense;
  Vector c;
  std::vector<Scalar> lb;
  std::vector<Scalar> ub;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

/*! \brief Dense bounded-variable tableau simplex.
 *
 * solve() runs a two-phase primal simplex.  Afterwards the tableau can be
 * copied and re-optimized with set_bounds() and reoptimize(), which runs the
 * dual simplex from the still dual-feasible basis.  Entering and leaving
 * choices follow Bland's smallest-index rule, so results are reproducible.
 */
template <typename Scalar>
class DenseSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit DenseSimplex(const LpProblem<Scalar>& lp) : n_struct_(static_cast<int>(lp.c.size())) {
    const int m = static_cast<int>(lp.b.size());
    int n_slack = 0;
    for (auto s : lp.sense) n_slack += s != RowSense::eq;
    n_ = n_struct_ + n_slack;
    cost_ = Vector::Zero(n_);
    cost_.head(n_struct_) = lp.c;
    lo_.assign(lp.lb.begin(), lp.lb.end());
    hi_.assign(lp.ub.begin(), lp.ub.end());
    lo_.resize(n_, Scalar(0));
    hi_.resize(n_, inf());
    at_upper_.assign(n_, false);

    // Residuals with every structural variable at its lower bound.
    Vector x0 = Eigen::Map<const Vector>(lo_.data(), n_struct_);
    Vector resid = m > 0 ? Vector(lp.b - lp.A * x0) : Vector(0);

    std::vector<int> art_rows;
    std::vector<Scalar> art_sign;
    Matrix rows = Matrix::Zero(m, n_);
    if (m > 0) rows.leftCols(n_struct_) = lp.A;
    basis_.assign(m, -1);
    xb_ = Vector::Zero(m);
    int slack = n_struct_;
    for (int i = 0; i < m; ++i) {
      Scalar sigma = 0;
      if (lp.sense[i] != RowSense::eq) {
        sigma = lp.sense[i] == RowSense::le ? Scalar(1) : Scalar(-1);
        rows(i, slack) = sigma;
        if (sigma * resid(i) >= 0) {
          basis_[i] = slack;
          xb_(i) = sigma * resid(i);
          rows.row(i) *= sigma;
        }
        ++slack;
      }
      if (basis_[i] < 0) {
        art_rows.push_back(i);
        art_sign.push_back(resid(i) >= 0 ? Scalar(1) : Scalar(-1));
      }
    }
    n_art_ = static_cast<int>(art_rows.size());
    tab_ = Matrix::Zero(m, n_ + n_art_);
    tab_.leftCols(n_) = rows;
    cost_.conservativeResize(n_ + n_art_);
    cost_.tail(n_art_).setZero();
    lo_.resize(n_ + n_art_, Scalar(0));
    hi_.resize(n_ + n_art_, inf());
    at_upper_.resize(n_ + n_art_, false);
    for (int k = 0; k < n_art_; ++k) {
      const int i = art_rows[k];
      tab_(i, n_ + k) = art_sign[k];
      tab_.row(i) *= art_sign[k];
      basis_[i] = n_ + k;
      xb_(i) = art_sign[k] * resid(i);
    }
    n_ += n_art_;
  }

  LpStatus solve() {
    if (n_art_ > 0) {
      Vector phase1 = Vector::Zero(n_);
      phase1.tail(n_art_).setOnes();
      compute_reduced(phase1);
      const LpStatus st = primal_loop();
      if (st == LpStatus::iteration_limit) return st;
      Scalar infeas = 0;
      for (int i = 0; i < rows(); ++i)
        if (is_artificial(basis_[i])) infeas += xb_(i);
      if (infeas > Scalar(1e-7)) return status_ = LpStatus::infeasible;
      drop_artificials();
    }
    compute_reduced(cost_);
    return status_ = primal_loop();
  }

  /// Changes the bounds of structural variable `j` without re-optimizing.
  /// Nonbasic variables move with their bound so the basis stays dual feasible.
  void set_bounds(int j, Scalar lo, Scalar hi) {
    if (basic_row(j) < 0) {
      const Scalar old = value_nonbasic(j);
      lo_[j] = lo;
      hi_[j] = hi;
      if (at_upper_[j] && !std::isfinite(double(hi))) at_upper_[j] = false;
      const Scalar now = value_nonbasic(j);
      if (now != old) xb_ -= tab_.col(j) * (now - old);
    } else {
      lo_[j] = lo;
      hi_[j] = hi;
    }
  }

  /// Dual simplex after set_bounds(), then a primal clean-up pass.
  LpStatus reoptimize() {
    for (int j = 0; j < n_struct_; ++j)
      if (lo_[j] > hi_[j] + feas_tol()) return status_ = LpStatus::infeasible;
    const LpStatus st = dual_loop();
    if (st != LpStatus::optimal) return status_ = st;
    return status_ = primal_loop();
  }

  [[nodiscard]] LpStatus status() const { return status_; }

  [[nodiscard]] std::vector<Scalar> primal() const {
    std::vector<Scalar> x(n_struct_);
    for (int j = 0; j < n_struct_; ++j) x[j] = value_nonbasic(j);
    for (int i = 0; i < rows(); ++i)
      if (basis_[i] < n_struct_) x[basis_[i]] = xb_(i);
    return x;
  }

  [[nodiscard]] Scalar objective() const {
    const auto x = primal();
    Scalar z = 0;
    for (int j = 0; j < n_struct_; ++j) z += cost_(j) * x[j];
    return z;
  }

  [[nodiscard]] int rows() const { return static_cast<int>(basis_.size()); }
  [[nodiscard]] int iterations() const { return iterations_; }

 private:
  static Scalar inf() { return std::numeric_limits<Scalar>::infinity(); }
  static Scalar feas_tol() { return Scalar(1e-9); }
  static Scalar cost_tol() { return Scalar(1e-9); }
  static Scalar pivot_tol() { return Scalar(1e-11); }

  [[nodiscard]] bool is_artificial(int j) const { return j >= n_ - n_art_; }

  [[nodiscard]] Scalar value_nonbasic(int j) const { return at_upper_[j] ? hi_[j] : lo_[j]; }

  [[nodiscard]] int basic_row(int j) const {
    for (int i = 0; i < rows(); ++i)
      if (basis_[i] == j) return i;
    return -1;
  }

  void compute_reduced(const Vector& c) {
    Vector cb(rows());
    for (int i = 0; i < rows(); ++i) cb(i) = c(basis_[i]);
    red_ = c;
    if (rows() > 0) red_.noalias() -= (cb.transpose() * tab_).transpose();
    for (int i = 0; i < rows(); ++i) red_(basis_[i]) = 0;
  }

  void pivot(int r, int j) {
    const Scalar p = tab_(r, j);
    tab_.row(r) /= p;
    // Rank-one elimination; the tableau is column-major, so whole-matrix
    // updates vectorize where row-by-row sweeps would stride.
    Vector factors = tab_.col(j);
    factors(r) = 0;
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> prow = tab_.row(r);
    tab_.noalias() -= factors * prow;
    const Scalar f = red_(j);
    if (f != Scalar(0)) red_ -= f * prow.transpose();
    red_(j) = 0;
    tab_.col(j).setZero();
    tab_(r, j) = 1;
    basis_[r] = j;
    ++iterations_;
  }

  [[nodiscard]] int iteration_cap() const { return 200 * (rows() + n_) + 5000; }

  [[nodiscard]] std::vector<bool> basic_flags() const {
    std::vector<bool> basic(n_, false);
    for (int b : basis_) basic[b] = true;
    return basic;
  }

  LpStatus primal_loop() {
    const int cap = iterations_ + iteration_cap();
    while (true) {
      if (iterations_ > cap) return LpStatus::iteration_limit;
      const auto basic = basic_flags();
      int enter = -1;
      for (int j = 0; j < n_; ++j) {
        if (basic[j] || lo_[j] == hi_[j]) continue;
        if ((!at_upper_[j] && red_(j) < -cost_tol()) || (at_upper_[j] && red_(j) > cost_tol())) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::optimal;
      const Scalar dir = at_upper_[enter] ? Scalar(-1) : Scalar(1);

      // Ratio test; the entering variable's own bound range competes too.
      Scalar best = hi_[enter] - lo_[enter];
      int leave = -1;
      bool leave_to_upper = false;
      for (int i = 0; i < rows(); ++i) {
        const Scalar a = tab_(i, enter) * dir;
        const int bj = basis_[i];
        Scalar t;
        bool to_upper;
        if (a > pivot_tol()) {
          t = (xb_(i) - lo_[bj]) / a;
          to_upper = false;
        } else if (a < -pivot_tol() && std::isfinite(double(hi_[bj]))) {
          t = (hi_[bj] - xb_(i)) / -a;
          to_upper = true;
        } else {
          continue;
        }
        t = std::max<Scalar>(t, 0);
        const Scalar tiny = Scalar(1e-12);
        if (t < best - tiny || (leave >= 0 && t <= best + tiny && bj < basis_[leave])) {
          best = t;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(double(best))) return LpStatus::unbounded;
      xb_ -= tab_.col(enter) * (dir * best);
      if (leave < 0) {
        at_upper_[enter] = !at_upper_[enter];
        ++iterations_;
        continue;
      }
      const Scalar enter_val = value_nonbasic(enter) + dir * best;
      const int out = basis_[leave];
      pivot(leave, enter);
      xb_(leave) = enter_val;
      at_upper_[enter] = false;
      at_upper_[out] = leave_to_upper;
    }
  }

  LpStatus dual_loop() {
    const int cap = iterations_ + iteration_cap();
    while (true) {
      if (iterations_ > cap) return LpStatus::iteration_limit;
      int r = -1;
      for (int i = 0; i < rows(); ++i) {
        const int bj = basis_[i];
        const Scalar tol = feas_tol() * std::max<Scalar>(1, std::abs(xb_(i)));
        if (xb_(i) < lo_[bj] - tol || xb_(i) > hi_[bj] + tol) {
          if (r < 0 || bj < basis_[r]) r = i;
        }
      }
      if (r < 0) return LpStatus::optimal;
      const int out = basis_[r];
      const bool below = xb_(r) < lo_[out];
      const Scalar target = below ? lo_[out] : hi_[out];
      const auto basic = basic_flags();
      int enter = -1;
      Scalar best = inf();
      for (int j = 0; j < n_; ++j) {
        if (basic[j] || lo_[j] == hi_[j]) continue;
        const Scalar a = tab_(r, j);
        if (std::abs(a) <= pivot_tol()) continue;
        // x_out moves by -a * dx_j; it must move toward the violated bound.
        const bool can_increase = !at_upper_[j];
        const bool can_decrease = at_upper_[j];
        const bool helps = below ? ((can_increase && a < 0) || (can_decrease && a > 0))
                                 : ((can_increase && a > 0) || (can_decrease && a < 0));
        if (!helps) continue;
        const Scalar ratio = std::abs(red_(j) / a);
        if (ratio < best - Scalar(1e-12)) {
          best = ratio;
          enter = j;
        }
      }
      if (enter < 0) return LpStatus::infeasible;
      const Scalar theta = (xb_(r) - target) / tab_(r, enter);
      const Scalar enter_val = value_nonbasic(enter) + theta;
      xb_ -= tab_.col(enter) * theta;
      pivot(r, enter);
      xb_(r) = enter_val;
      at_upper_[enter] = false;
      at_upper_[out] = !below;
    }
  }

  void drop_artificials() {
    const int first_art = n_ - n_art_;
    for (int i = 0; i < rows(); ++i) {
      if (!is_artificial(basis_[i])) continue;
      int col = -1;
      for (int j = 0; j < first_art; ++j) {
        if (std::abs(tab_(i, j)) > Scalar(1e-9) && basic_row(j) < 0) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        const Scalar v = value_nonbasic(col);
        pivot(i, col);
        xb_(i) = v;
        at_upper_[col] = false;
      }
    }
    // Rows still carrying an artificial are redundant.
    std::vector<int> keep;
    for (int i = 0; i < rows(); ++i)
      if (!is_artificial(basis_[i])) keep.push_back(i);
    Matrix t(static_cast<int>(keep.size()), first_art);
    Vector xb(static_cast<int>(keep.size()));
    std::vector<int> basis;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      t.row(k) = tab_.row(keep[k]).head(first_art);
      xb(k) = xb_(keep[k]);
      basis.push_back(basis_[keep[k]]);
    }
    tab_ = std::move(t);
    xb_ = std::move(xb);
    basis_ = std::move(basis);
    n_ = first_art;
    n_art_ = 0;
    cost_.conservativeResize(n_);
    lo_.resize(n_);
    hi_.resize(n_);
    at_upper_.resize(n_);
  }

  int n_struct_ = 0;
  int n_ = 0;
  int n_art_ = 0;
  Matrix tab_;
  Vector xb_;
  Vector cost_;
  Vector red_;
  std::vector<int> basis_;
  std::vector<Scalar> lo_;
  std::vector<Scalar> hi_;
  std::vector<bool> at_upper_;
  int iterations_ = 0;
  LpStatus status_ = LpStatus::iteration_limit;
};

}  // namespace wavepipe::milp
