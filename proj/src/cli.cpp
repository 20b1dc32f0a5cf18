// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavepipe/config.hpp"
#include "wavepipe/netlist.hpp"
#include "wavepipe/optimizer.hpp"
#include "wavepipe/retime.hpp"
#include "wavepipe/sdcgen.hpp"
#include "wavepipe/sta.hpp"
#include "wavepipe/verify.hpp"
#include "wavepipe/vsmodel.hpp"

namespace wavepipe {

namespace {

namespace fs = std::filesystem;

// Flag name -> Config key.  Values stay strings so Config::set does the
// parsing and file values are only overridden by flags actually given.
const std::vector<std::pair<std::string, std::string>>& config_flags() {
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"--T", "T"},
      {"--ru", "r_u"},
      {"--rl", "r_l"},
      {"--phases", "phases"},
      {"--duty", "D"},
      {"--tstable", "t_stable"},
      {"--alpha", "alpha"},
      {"--beta", "beta"},
      {"--gamma", "gamma"},
      {"--dth-start", "dth_start"},
      {"--dth-step", "dth_step"},
      {"--sweep-step", "sweep_step"},
      {"--milp-nodes", "milp_nodes"},
      {"--milp-time-ms", "milp_time_ms"},
      {"--replace-threshold", "replace_threshold"},
      {"--retime-objective", "retime_objective"},
  };
  return flags;
}

struct Common {
  std::string config_path;
  std::string out_dir = ".";
  std::string output;
  std::map<std::string, std::string> overrides;  // config key -> value
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "flat key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--out-dir", c.out_dir, "directory for written files");
  sub->add_option("-o,--output", c.output, "output file");
  for (const auto& [flag, key] : config_flags()) {
    const std::string k = key;
    sub->add_option_function<std::string>(
        flag, [&c, k](const std::string& v) { c.overrides[k] = v; }, "overrides config key " + key);
  }
}

Config make_config(const Common& c) {
  Config cfg = c.config_path.empty() ? Config{} : load_config_file(c.config_path);
  for (const auto& [key, value] : c.overrides)
    if (!cfg.set(key, value)) throw std::invalid_argument("unknown config key '" + key + "'");
  cfg.validate();
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  f << text;
}

// Writes `text` to the -o path when given, else to `out`.
void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.output.empty()) {
    out << text;
  } else {
    write_file(fs::path(c.out_dir) / c.output, text);
  }
}

int analyze(const std::string& path, const Common& common, std::ostream& out) {
  const Circuit c = parse_netlist_file(path);
  Config cfg = make_config(common);
  const double min_period = traditional_min_period(c);
  if (cfg.T <= 0.0) cfg.T = c.clock.T;
  const PlacedCircuit pc = place_from_graph(to_gate_graph(c));
  const TimingReport r = propagate_windows(pc, cfg);
  std::ostringstream os;
  os << "min period " << min_period << "\n";
  os << "T " << cfg.T << " r_u " << cfg.r_u << " r_l " << cfg.r_l << "\n";
  os << format_report(pc, r);
  os << (r.clean() ? "timing clean\n" : "timing violations: " + std::to_string(r.violations.size()) + "\n");
  emit(common, os.str(), out);
  return kExitOk;
}

void dump_models(const GateGraph& g, const Config& cfg, const FlowResult& fr, const std::string& path) {
  write_file(path, export_lp(build_relaxed_model(g, cfg).model));
  if (!fr.circuit) return;
  PlacementSet units;
  for (const auto& d : fr.circuit->decisions)
    if (d.unit_case != UnitKind::none) units.insert(d.edge);
  Config at = cfg;
  at.T = fr.circuit->T;
  write_file(path + ".legal", export_lp(build_legalization_model(g, at, units).model));
}

int optimize(const std::string& path, const Common& common, bool sweep, const std::string& dump, std::ostream& out,
             std::ostream& err) {
  const Circuit c = parse_netlist_file(path);
  Config cfg = make_config(common);
  if (cfg.T <= 0.0) cfg.T = c.clock.T;
  const GateGraph g = to_gate_graph(c);
  const FlowResult fr = sweep ? sweep_clock_period(g, cfg, cfg.sweep_step) : run_flow(g, cfg);
  if (!dump.empty()) dump_models(g, cfg, fr, dump);

  const std::string stem = fs::path(path).stem().string();
  const fs::path dir(common.out_dir);
  write_file(dir / (stem + ".report.txt"), fr.report.to_key_values() + fr.report.to_text());
  out << fr.report.to_text();
  if (!fr.circuit) {
    err << "infeasible at stage " << fr.report.failed_stage << ": " << fr.report.diagnostic << "\n";
    return kExitInfeasible;
  }
  const Circuit opt = fr.circuit->to_circuit();
  const fs::path net = dir / (common.output.empty() ? stem + "_opt.net" : common.output);
  write_file(net, serialize_netlist(opt));
  const RetimeSolution anchors = extract_removals(g, to_gate_graph(opt), cfg);
  if (anchors.feasible) write_file(dir / (stem + ".anchors.txt"), format_anchors(g, anchors));
  out << "wrote " << net.string() << "\n";
  return kExitOk;
}

int extract(const std::string& orig_path, const std::string& opt_path, const Common& common, std::ostream& out,
            std::ostream& err) {
  const Config cfg = make_config(common);
  const GateGraph orig = to_gate_graph(parse_netlist_file(orig_path));
  const GateGraph opt = to_gate_graph(parse_netlist_file(opt_path));
  const RetimeSolution sol = extract_removals(orig, opt, cfg);
  if (!sol.feasible) {
    err << "no consistent register removal: " << sol.diagnostic << "\n";
    return kExitInfeasible;
  }
  emit(common, format_anchors(orig, sol), out);
  return kExitOk;
}

int sdc(const std::string& orig_path, const std::string& opt_path, const Common& common, std::ostream& out,
        std::ostream& err) {
  Config cfg = make_config(common);
  const Circuit opt_c = parse_netlist_file(opt_path);
  if (cfg.T <= 0.0) cfg.T = opt_c.clock.T;
  const GateGraph orig = to_gate_graph(parse_netlist_file(orig_path));
  const GateGraph opt = to_gate_graph(opt_c);
  const RetimeSolution sol = extract_removals(orig, opt, cfg);
  if (!sol.feasible) {
    err << "no consistent register removal: " << sol.diagnostic << "\n";
    return kExitInfeasible;
  }
  auto classes = classify_paths(opt, sol);
  find_differentiating_pins(classes);
  for (const auto& cl : classes)
    if (!cl.constrainable) err << "warning: " << cl.diagnostic << "\n";
  emit(common, emit_sdc(classes, cfg), out);
  return kExitOk;
}

int verify(const std::string& orig_path, const std::string& opt_path, const Common& common, std::ostream& out) {
  const Config cfg = make_config(common);
  const EquivalenceResult r = check_equivalence(parse_netlist_file(orig_path), parse_netlist_file(opt_path), cfg);
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& d : r.diff) os << "  " << d << "\n";
  os << format_captures(r.optimized);
  emit(common, os.str(), out);
  return r.pass ? kExitOk : kExitFail;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"wavepipe: wave-pipelined register replacement for sequential circuits", "wavepipe"};
  app.require_subcommand(1);

  Common common;
  std::string net, orig, opt, dump;
  bool no_sweep = false;

  auto* an = app.add_subcommand("analyze", "traditional minimum period and timing windows");
  an->add_option("netlist", net)->required()->check(CLI::ExistingFile);
  add_common(an, common);

  auto* op = app.add_subcommand("optimize", "run the optimization flow and the clock sweep");
  op->add_option("netlist", net)->required()->check(CLI::ExistingFile);
  op->add_option("--dump-model", dump, "write the LP form of the relaxed and final exact models");
  op->add_flag("--no-sweep", no_sweep, "optimize at T only");
  add_common(op, common);

  std::vector<CLI::App*> pairs;
  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"extract", "recover which registers each anchor replaces"},
           {"sdc", "timing constraints for the optimized netlist"},
           {"verify", "wave simulation equivalence check"}}) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("original", orig)->required()->check(CLI::ExistingFile);
    sub->add_option("optimized", opt)->required()->check(CLI::ExistingFile);
    add_common(sub, common);
    pairs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (an->parsed()) return analyze(net, common, out);
    if (op->parsed()) return optimize(net, common, !no_sweep, dump, out, err);
    if (pairs[0]->parsed()) return extract(orig, opt, common, out, err);
    if (pairs[1]->parsed()) return sdc(orig, opt, common, out, err);
    if (pairs[2]->parsed()) return verify(orig, opt, common, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace wavepipe
