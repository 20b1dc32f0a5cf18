// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wavepipe {

/*! \brief Timing parameters shared by every sequential element of a circuit. */
struct FlipFlopParams {
  double t_cq = 0.0;
  double t_su = 0.0;
  double t_h = 0.0;
  double t_dq = 0.0;  ///< data-to-q delay of a transparent latch

  bool operator==(const FlipFlopParams&) const = default;
};

struct ClockSpec {
  double T = 0.0;
  double duty = 0.5;

  bool operator==(const ClockSpec&) const = default;
};

enum class InstanceKind { input, output, flipflop, latch, anchor, buffer, gate };

std::string_view to_string(InstanceKind kind);

/*! \brief One netlist statement after parsing.
 *
 * Gates keep their delay library sorted and deduplicated.  Sequential units
 * written by the optimizer carry an optional phase and cycle index; anchors
 * mark the positions of removed flip-flops and have no timing effect.
 */
struct Instance {
  std::string name;
  InstanceKind kind = InstanceKind::gate;
  std::vector<std::string> inputs;
  std::string fn;
  double delay = 0.0;
  std::vector<double> lib;
  bool boundary = false;
  std::optional<double> phase;
  std::optional<int> cycle;
  int line = 0;

  [[nodiscard]] bool same_structure(const Instance& other) const;
};

/*! \brief Structural circuit model: gates, flip-flops and ports.
 *
 * Primary inputs and outputs behave as boundary flip-flops during timing.
 */
class Circuit {
 public:
  std::string name;
  ClockSpec clock;
  FlipFlopParams ff_params;

  [[nodiscard]] const std::vector<Instance>& instances() const { return instances_; }
  [[nodiscard]] const Instance* find(std::string_view name) const;
  [[nodiscard]] const Instance& at(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const { return find(name) != nullptr; }

  /// Appends an instance; throws on duplicate names.  References are not
  /// checked until validate().
  void add(Instance inst);
  /// Replaces the instance with the same name.
  void replace(const Instance& inst);

  /// Checks references, port arity and the absence of combinational loops.
  void validate() const;

  [[nodiscard]] std::vector<const Instance*> of_kind(InstanceKind kind) const;
  [[nodiscard]] std::size_t count(InstanceKind kind) const;

  [[nodiscard]] bool same_structure(const Circuit& other) const;

 private:
  std::vector<Instance> instances_;
  std::unordered_map<std::string, std::size_t> index_;
};

class NetlistError : public std::runtime_error {
 public:
  NetlistError(int line, const std::string& message);
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

Circuit parse_netlist(std::string_view text);
Circuit parse_netlist_file(const std::string& path);
std::string serialize_netlist(const Circuit& c);

}  // namespace wavepipe
