// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include "wavepipe/netlist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace wavepipe {

std::string_view to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::input: return "input";
    case InstanceKind::output: return "output";
    case InstanceKind::flipflop: return "ff";
    case InstanceKind::latch: return "latch";
    case InstanceKind::anchor: return "anchor";
    case InstanceKind::buffer: return "buffer";
    case InstanceKind::gate: return "gate";
  }
  return "?";
}

NetlistError::NetlistError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      line_(line) {}

bool Instance::same_structure(const Instance& o) const {
  return name == o.name && kind == o.kind && inputs == o.inputs && fn == o.fn && delay == o.delay &&
         lib == o.lib && boundary == o.boundary && phase == o.phase && cycle == o.cycle;
}

const Instance* Circuit::find(std::string_view n) const {
  auto it = index_.find(std::string(n));
  return it == index_.end() ? nullptr : &instances_[it->second];
}

const Instance& Circuit::at(std::string_view n) const {
  const Instance* inst = find(n);
  if (!inst) throw NetlistError(0, "undefined reference '" + std::string(n) + "'");
  return *inst;
}

void Circuit::add(Instance inst) {
  if (index_.count(inst.name)) {
    throw NetlistError(inst.line, "duplicate name '" + inst.name + "'");
  }
  index_.emplace(inst.name, instances_.size());
  instances_.push_back(std::move(inst));
}

void Circuit::replace(const Instance& inst) {
  auto it = index_.find(inst.name);
  if (it == index_.end()) throw NetlistError(0, "undefined reference '" + inst.name + "'");
  instances_[it->second] = inst;
}

std::vector<const Instance*> Circuit::of_kind(InstanceKind kind) const {
  std::vector<const Instance*> out;
  for (const auto& inst : instances_)
    if (inst.kind == kind) out.push_back(&inst);
  return out;
}

std::size_t Circuit::count(InstanceKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(instances_.begin(), instances_.end(), [&](const Instance& i) { return i.kind == kind; }));
}

bool Circuit::same_structure(const Circuit& o) const {
  if (name != o.name || !(clock == o.clock) || !(ff_params == o.ff_params)) return false;
  if (instances_.size() != o.instances_.size()) return false;
  for (std::size_t i = 0; i < instances_.size(); ++i)
    if (!instances_[i].same_structure(o.instances_[i])) return false;
  return true;
}

namespace {

bool breaks_loops(const Instance& inst) {
  return inst.kind == InstanceKind::flipflop || inst.kind == InstanceKind::latch ||
         inst.kind == InstanceKind::anchor || inst.kind == InstanceKind::input;
}

}  // namespace

void Circuit::validate() const {
  for (const auto& inst : instances_) {
    const std::size_t arity = inst.inputs.size();
    switch (inst.kind) {
      case InstanceKind::input:
        if (arity != 0) throw NetlistError(inst.line, "input '" + inst.name + "' cannot have a driver");
        break;
      case InstanceKind::gate:
        if (arity == 0) throw NetlistError(inst.line, "gate '" + inst.name + "' has no inputs");
        if (!(inst.delay > 0.0)) throw NetlistError(inst.line, "gate '" + inst.name + "' needs delay > 0");
        if (inst.lib.empty()) throw NetlistError(inst.line, "gate '" + inst.name + "' has an empty library");
        for (double v : inst.lib)
          if (!(v > 0.0)) throw NetlistError(inst.line, "gate '" + inst.name + "' library entries must be > 0");
        break;
      case InstanceKind::buffer:
        if (!(inst.delay > 0.0)) throw NetlistError(inst.line, "buffer '" + inst.name + "' needs delay > 0");
        [[fallthrough]];
      default:
        if (arity != 1) throw NetlistError(inst.line, "'" + inst.name + "' needs exactly one driver");
    }
    for (const auto& in : inst.inputs) {
      const Instance* src = find(in);
      if (!src) throw NetlistError(inst.line, "undefined reference '" + in + "'");
      if (src->kind == InstanceKind::output)
        throw NetlistError(inst.line, "output '" + in + "' cannot drive '" + inst.name + "'");
    }
  }

  // Depth-first search over combinational dependencies only.
  enum Mark : unsigned char { white, grey, black };
  std::vector<Mark> mark(instances_.size(), white);
  std::function<void(std::size_t)> visit = [&](std::size_t i) {
    mark[i] = grey;
    const Instance& inst = instances_[i];
    if (!breaks_loops(inst)) {
      for (const auto& in : inst.inputs) {
        const std::size_t j = index_.at(in);
        if (breaks_loops(instances_[j])) continue;
        if (mark[j] == grey)
          throw NetlistError(inst.line, "combinational loop through '" + inst.name + "'");
        if (mark[j] == white) visit(j);
      }
    }
    mark[i] = black;
  };
  for (std::size_t i = 0; i < instances_.size(); ++i)
    if (mark[i] == white) visit(i);

  if (clock.T <= 0.0) throw NetlistError(0, "clock period must be positive");
  if (clock.duty <= 0.0 || clock.duty >= 1.0) throw NetlistError(0, "duty cycle must lie in (0,1)");
  const FlipFlopParams& p = ff_params;
  if (p.t_cq < 0 || p.t_su < 0 || p.t_h < 0 || p.t_dq < 0)
    throw NetlistError(0, "flip-flop parameters must be non-negative");
}

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream is{std::string(line)};
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw NetlistError(line, "syntax error: bad number '" + s + "' for " + what);
  return v;
}

int parse_int(const std::string& s, int line, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw NetlistError(line, "syntax error: bad integer '" + s + "' for " + what);
  return v;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '[' || ch == ']' ||
           ch == '$';
  });
}

struct Statement {
  std::string keyword;
  std::vector<std::string> positional;
  std::map<std::string, std::string> attrs;
  int line = 0;

  const std::string& attr(const std::string& key) const {
    auto it = attrs.find(key);
    if (it == attrs.end()) throw NetlistError(line, "syntax error: '" + keyword + "' needs " + key + "=");
    return it->second;
  }
  bool has(const std::string& key) const { return attrs.count(key) != 0; }
  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : attrs) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw NetlistError(line, "syntax error: unknown attribute '" + k + "' in '" + keyword + "'");
    }
  }
};

Statement tokenize(std::string_view raw, int line) {
  const auto toks = split_ws(raw);
  Statement st;
  st.line = line;
  st.keyword = toks.front();
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos) {
      st.positional.push_back(toks[i]);
    } else {
      const std::string key = toks[i].substr(0, eq);
      if (key.empty() || st.attrs.count(key))
        throw NetlistError(line, "syntax error: bad or repeated attribute '" + toks[i] + "'");
      st.attrs[key] = toks[i].substr(eq + 1);
    }
  }
  return st;
}

std::string expect_name(const Statement& st) {
  if (st.positional.empty()) throw NetlistError(st.line, "syntax error: '" + st.keyword + "' needs a name");
  if (!valid_name(st.positional[0]))
    throw NetlistError(st.line, "syntax error: invalid name '" + st.positional[0] + "'");
  return st.positional[0];
}

void expect_positional(const Statement& st, std::size_t n) {
  if (st.positional.size() != n)
    throw NetlistError(st.line, "syntax error: unexpected token in '" + st.keyword + "' statement");
}

std::string ref(const Statement& st, const std::string& key) {
  const std::string& r = st.attr(key);
  if (!valid_name(r)) throw NetlistError(st.line, "syntax error: invalid reference '" + r + "'");
  return r;
}

}  // namespace

Circuit parse_netlist(std::string_view text) {
  Circuit c;
  bool have_circuit = false;
  bool have_clock = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    if (split_ws(raw).empty()) {
      if (end == text.size()) break;
      continue;
    }
    Statement st = tokenize(raw, line_no);

    if (st.keyword == "circuit") {
      if (have_circuit) throw NetlistError(line_no, "syntax error: circuit declared twice");
      st.allow({});
      expect_positional(st, 1);
      c.name = expect_name(st);
      have_circuit = true;
      continue;
    }
    if (!have_circuit) throw NetlistError(line_no, "no circuit declared");

    Instance inst;
    inst.line = line_no;
    if (st.keyword == "clock") {
      st.allow({"period", "duty"});
      expect_positional(st, 0);
      c.clock.T = parse_double(st.attr("period"), line_no, "period");
      if (st.has("duty")) c.clock.duty = parse_double(st.attr("duty"), line_no, "duty");
      have_clock = true;
      continue;
    } else if (st.keyword == "ffparams") {
      st.allow({"tcq", "tsu", "th", "tdq"});
      expect_positional(st, 0);
      c.ff_params.t_cq = parse_double(st.attr("tcq"), line_no, "tcq");
      c.ff_params.t_su = parse_double(st.attr("tsu"), line_no, "tsu");
      c.ff_params.t_h = parse_double(st.attr("th"), line_no, "th");
      c.ff_params.t_dq = st.has("tdq") ? parse_double(st.attr("tdq"), line_no, "tdq") : c.ff_params.t_cq;
      continue;
    } else if (st.keyword == "input") {
      st.allow({});
      expect_positional(st, 1);
      inst.kind = InstanceKind::input;
      inst.name = expect_name(st);
    } else if (st.keyword == "output") {
      st.allow({"from"});
      expect_positional(st, 1);
      inst.kind = InstanceKind::output;
      inst.name = expect_name(st);
      inst.inputs = {ref(st, "from")};
    } else if (st.keyword == "ff" || st.keyword == "latch") {
      st.allow({"from", "phase", "cycle"});
      inst.kind = st.keyword == "ff" ? InstanceKind::flipflop : InstanceKind::latch;
      inst.name = expect_name(st);
      inst.inputs = {ref(st, "from")};
      for (std::size_t i = 1; i < st.positional.size(); ++i) {
        if (st.positional[i] == "boundary" && inst.kind == InstanceKind::flipflop && !inst.boundary)
          inst.boundary = true;
        else
          throw NetlistError(line_no, "syntax error: unexpected token '" + st.positional[i] + "'");
      }
      if (st.has("phase")) inst.phase = parse_double(st.attr("phase"), line_no, "phase");
      if (st.has("cycle")) inst.cycle = parse_int(st.attr("cycle"), line_no, "cycle");
      if (inst.boundary && (inst.phase || inst.cycle))
        throw NetlistError(line_no, "syntax error: boundary flip-flops take no phase or cycle");
    } else if (st.keyword == "anchor") {
      st.allow({"from"});
      expect_positional(st, 1);
      inst.kind = InstanceKind::anchor;
      inst.name = expect_name(st);
      inst.inputs = {ref(st, "from")};
    } else if (st.keyword == "buffer") {
      st.allow({"from", "delay"});
      expect_positional(st, 1);
      inst.kind = InstanceKind::buffer;
      inst.name = expect_name(st);
      inst.inputs = {ref(st, "from")};
      inst.delay = parse_double(st.attr("delay"), line_no, "delay");
    } else if (st.keyword == "gate") {
      st.allow({"fn", "delay", "lib", "in"});
      expect_positional(st, 1);
      inst.kind = InstanceKind::gate;
      inst.name = expect_name(st);
      inst.fn = st.attr("fn");
      if (inst.fn.empty()) throw NetlistError(line_no, "syntax error: empty fn label");
      inst.delay = parse_double(st.attr("delay"), line_no, "delay");
      if (st.has("lib")) {
        for (const auto& v : split_list(st.attr("lib"))) inst.lib.push_back(parse_double(v, line_no, "lib"));
      } else {
        inst.lib = {inst.delay};
      }
      std::sort(inst.lib.begin(), inst.lib.end());
      inst.lib.erase(std::unique(inst.lib.begin(), inst.lib.end()), inst.lib.end());
      for (const auto& r : split_list(st.attr("in"))) {
        if (!valid_name(r)) throw NetlistError(line_no, "syntax error: invalid reference '" + r + "'");
        inst.inputs.push_back(r);
      }
    } else {
      throw NetlistError(line_no, "syntax error: unknown statement '" + st.keyword + "'");
    }
    c.add(std::move(inst));
  }
  if (!have_circuit) throw NetlistError(0, "no circuit declared");
  if (!have_clock) throw NetlistError(0, "missing clock statement");
  c.validate();
  return c;
}

Circuit parse_netlist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetlistError(0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  std::string shortest;
  // Prefer the shortest representation that round-trips.
  for (int p = 1; p <= 17; ++p) {
    std::ostringstream t;
    t << std::setprecision(p) << v;
    if (std::stod(t.str()) == v) return t.str();
  }
  return os.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
  return out;
}

}  // namespace

std::string serialize_netlist(const Circuit& c) {
  std::ostringstream os;
  os << "circuit " << c.name << "\n";
  os << "clock period=" << num(c.clock.T) << " duty=" << num(c.clock.duty) << "\n";
  const auto& p = c.ff_params;
  os << "ffparams tcq=" << num(p.t_cq) << " tsu=" << num(p.t_su) << " th=" << num(p.t_h)
     << " tdq=" << num(p.t_dq) << "\n";
  for (const auto& inst : c.instances()) {
    switch (inst.kind) {
      case InstanceKind::input:
        os << "input " << inst.name;
        break;
      case InstanceKind::output:
        os << "output " << inst.name << " from=" << inst.inputs[0];
        break;
      case InstanceKind::flipflop:
      case InstanceKind::latch:
        os << to_string(inst.kind) << " " << inst.name << " from=" << inst.inputs[0];
        if (inst.boundary) os << " boundary";
        if (inst.phase) os << " phase=" << num(*inst.phase);
        if (inst.cycle) os << " cycle=" << *inst.cycle;
        break;
      case InstanceKind::anchor:
        os << "anchor " << inst.name << " from=" << inst.inputs[0];
        break;
      case InstanceKind::buffer:
        os << "buffer " << inst.name << " from=" << inst.inputs[0] << " delay=" << num(inst.delay);
        break;
      case InstanceKind::gate: {
        os << "gate " << inst.name << " fn=" << inst.fn << " delay=" << num(inst.delay);
        if (!(inst.lib.size() == 1 && inst.lib[0] == inst.delay)) {
          std::vector<std::string> lib;
          for (double v : inst.lib) lib.push_back(num(v));
          os << " lib=" << join(lib);
        }
        os << " in=" << join(inst.inputs);
        break;
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace wavepipe
