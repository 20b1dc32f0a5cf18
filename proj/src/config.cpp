// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wavepipe {

std::vector<double> Config::phases() const {
  std::vector<double> out;
  for (double f : phase_fractions) out.push_back(f * T);
  return out;
}

std::vector<double> Config::dth_schedule() const {
  std::vector<double> out;
  if (dth_step <= 0.0) {
    out.push_back(dth_start * T);
    return out;
  }
  // Integer stepping avoids drift in the last entry.
  const int steps = static_cast<int>(dth_start / dth_step + 1e-9);
  for (int k = 0; k <= steps; ++k) {
    const double f = dth_start - k * dth_step;
    if (f < 1e-12) break;
    out.push_back(f * T);
  }
  return out;
}

void Config::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (!(r_u >= 1.0 && 1.0 >= r_l && r_l > 0.0)) fail("guard bands must satisfy ru >= 1 >= rl > 0");
  if (!(D > 0.0 && D < 1.0)) fail("duty cycle must lie in (0,1)");
  for (double f : phase_fractions)
    if (f < 0.0 || f >= 1.0) fail("phases must lie in [0,T)");
  if (phase_fractions.empty()) fail("at least one phase is required");
  if (!std::is_sorted(phase_fractions.begin(), phase_fractions.end())) fail("phases must be ordered");
  if (dth_start < 0.0 || dth_step < 0.0) fail("delay bound schedule must be non-negative");
  if (big_M > 0.0 && T > 0.0 && big_M < 4.0 * T) fail("big_M must be at least 4T");
  if (alpha < 0.0 || beta < 0.0 || gamma < 0.0) fail("objective weights must be non-negative");
  if (buffer_delay <= 0.0) fail("buffer delay must be positive");
  if (replace_threshold < 0.0) fail("replace threshold must be non-negative");
  if (sweep_step <= 0.0 || sweep_step > 0.1) fail("sweep step must lie in (0, 0.1]");
  if (n_min > n_max) fail("cycle index bounds are empty");
  if (retime_objective != "min-removals" && retime_objective != "min-lags")
    fail("retime objective must be min-removals or min-lags");
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("bad value '" + v + "' for " + key);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

bool Config::set(const std::string& key, const std::string& value) {
  auto num = [&] { return to_double(key, value); };
  if (key == "T") T = num();
  else if (key == "D" || key == "duty") D = num();
  else if (key == "r_u" || key == "ru") r_u = num();
  else if (key == "r_l" || key == "rl") r_l = num();
  else if (key == "t_stable" || key == "tstable") t_stable = num();
  else if (key == "alpha") alpha = num();
  else if (key == "beta") beta = num();
  else if (key == "gamma") gamma = num();
  else if (key == "dth_start") dth_start = num();
  else if (key == "dth_step") dth_step = num();
  else if (key == "big_M") big_M = num();
  else if (key == "eps") eps = num();
  else if (key == "buffer_delay") buffer_delay = num();
  else if (key == "buffer_area") buffer_area = num();
  else if (key == "ff_area") ff_area = num();
  else if (key == "latch_area") latch_area = num();
  else if (key == "replace_threshold") replace_threshold = num();
  else if (key == "sweep_step") sweep_step = num();
  else if (key == "n_min") n_min = static_cast<int>(num());
  else if (key == "n_max") n_max = static_cast<int>(num());
  else if (key == "arrival_lo") arrival_lo = num();
  else if (key == "arrival_hi") arrival_hi = num();
  else if (key == "milp_nodes") milp_nodes = static_cast<std::size_t>(num());
  else if (key == "milp_time_ms") milp_time_ms = num();
  else if (key == "retime_objective") retime_objective = value;
  else if (key == "phases") {
    // Fractions of T, comma separated.
    std::vector<double> ph;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) ph.push_back(to_double(key, trim(item)));
    phase_fractions = ph;
  } else {
    return false;
  }
  return true;
}

Config load_config_file(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!base.set(key, value)) throw std::invalid_argument(path + ":" + std::to_string(no) + ": unknown key '" + key + "'");
  }
  return base;
}

}  // namespace wavepipe
