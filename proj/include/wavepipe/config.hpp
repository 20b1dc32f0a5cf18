// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace wavepipe {

/*! \brief Optimization and analysis settings.
 *
 * Phases, delay bounds and the replacement threshold are stored as fractions
 * of the clock period so that a sweep over T rescales them automatically.
 * A non-positive `T`, `t_stable` or `big_M` means "derive from the circuit".
 */
struct Config {
  double T = 0.0;
  double D = 0.5;
  double r_u = 1.1;
  double r_l = 0.9;
  std::vector<double> phase_fractions{0.0, 0.25, 0.5, 0.75};
  double t_stable = -1.0;
  double alpha = 100.0;
  double beta = 10.0;
  double gamma = 10.0;
  double dth_start = 7.0 / 8.0;
  double dth_step = 1.0 / 8.0;
  double big_M = 0.0;
  double eps = 1e-9;

  double buffer_delay = 1.0;
  double buffer_area = 1.0;
  double ff_area = 6.0;
  double latch_area = 6.0;
  double replace_threshold = 0.5;
  double sweep_step = 0.005;

  int n_min = -2;
  int n_max = 2;
  double arrival_lo = -2.0;  ///< arrival variable bounds in units of T
  double arrival_hi = 3.0;

  std::size_t milp_nodes = 20000;
  double milp_time_ms = 60000.0;

  std::string retime_objective = "min-removals";

  [[nodiscard]] std::vector<double> phases() const;
  [[nodiscard]] std::vector<double> dth_schedule() const;
  [[nodiscard]] double stable_gap() const { return t_stable > 0.0 ? t_stable : buffer_delay; }

  /// Throws std::invalid_argument naming the first broken invariant.
  void validate() const;

  /// Applies one `key = value` override; returns false for unknown keys.
  bool set(const std::string& key, const std::string& value);
};

/// Reads a flat `key = value` file (with `#` comments) on top of `base`.
Config load_config_file(const std::string& path, Config base = {});

}  // namespace wavepipe
