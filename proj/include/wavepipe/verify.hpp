// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/netlist.hpp"
#include "wavepipe/sta.hpp"

namespace wavepipe {

/// A wave launched in cycle `wave`, seen at one node in absolute time.
struct WaveToken {
  int wave = 0;
  ArrivalWindow window;  ///< s is the latest, s_prime the earliest arrival
};

/// One boundary capture: data launched by `source` in cycle `wave` is
/// latched by `sink` at the clock edge of cycle `cycle`.
struct CaptureRecord {
  std::string sink;
  std::string source;
  int wave = 0;
  int cycle = 0;
};

struct CaptureReport {
  std::vector<CaptureRecord> captures;  ///< steady-state generation, sorted
  std::vector<Violation> violations;
  bool stable = false;   ///< the wave pattern became periodic within the cap
  int generations = 0;   ///< clock cycles simulated
  int steady_generation = -1;
  double T = 0.0;

  [[nodiscard]] bool pass() const { return violations.empty(); }
  /// Sorted (sink, source, cycle - wave) triples without duplicates.
  [[nodiscard]] std::vector<std::tuple<std::string, std::string, int>> offsets() const;
};

/// Launches one token per launching terminal and cycle and propagates them
/// through gates, buffers, anchors and delay units until the pattern repeats
/// every cycle.  Setup, hold, latch-region and overlap checks are made on the
/// periodic pattern.  `horizon` bounds the launch-to-capture latency that is
/// tracked (0 picks register count + 4).  Uses `cfg.T` when positive, else
/// the circuit clock.
CaptureReport simulate_waves(const PlacedCircuit& pc, const Config& cfg, int horizon = 0);
CaptureReport simulate_waves(const Circuit& c, const Config& cfg, int horizon = 0);

struct EquivalenceResult {
  bool pass = false;
  std::vector<std::string> diff;
  CaptureReport reference;
  CaptureReport optimized;
};

/// Simulates `orig` at the larger of its declared period and its
/// guard-banded minimum period, `opt` at `cfg.T` (or its own clock), and
/// compares launch-to-capture offsets per boundary pair.  Throws
/// std::invalid_argument when the boundary terminals differ.
EquivalenceResult check_equivalence(const Circuit& orig, const PlacedCircuit& opt, const Config& cfg);
EquivalenceResult check_equivalence(const Circuit& orig, const Circuit& opt, const Config& cfg);

/// `sink source wave cycle` table.
std::string format_captures(const CaptureReport& r);

}  // namespace wavepipe
