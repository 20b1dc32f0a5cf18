// Copyright 2026 The wavepipe Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "properties.hpp"
#include "wavepipe/cli.hpp"

using namespace wavepipe;
using namespace wavepipe::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wavepipe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("wavepipe_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("analyze reports the traditional minimum period") {
  const Run r = cli({"analyze", circuit_path("fig1a.net")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("min period 21\n") != std::string::npos);
}

TEST_CASE("optimize then verify") {
  const fs::path dir = scratch_dir("flow");
  const Run opt = cli({"optimize", circuit_path("fig1c_open.net"), "--T", "9", "--ru", "1", "--rl", "1", "--no-sweep",
                       "--out-dir", dir.string()});
  REQUIRE(opt.code == kExitOk);
  const fs::path net = dir / "fig1c_open_opt.net";
  CHECK(fs::exists(net));
  CHECK(fs::exists(dir / "fig1c_open.report.txt"));
  CHECK(fs::exists(dir / "fig1c_open.anchors.txt"));
  const Run ver = cli({"verify", circuit_path("fig1c_open.net"), net.string(), "--T", "9", "--ru", "1", "--rl", "1"});
  CHECK(ver.code == kExitOk);
  CHECK(ver.out.rfind("PASS\n", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("infeasible period exits 3") {
  const fs::path dir = scratch_dir("infeasible");
  const Run r = cli({"optimize", circuit_path("fig1c.net"), "--T", "8", "--ru", "1", "--rl", "1", "--no-sweep",
                     "--out-dir", dir.string()});
  CHECK(r.code == kExitInfeasible);
  CHECK(r.err.find("infeasible at stage") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("extract and sdc on Fig. 5") {
  const Run ex = cli({"extract", circuit_path("fig5_orig.net"), circuit_path("fig5_opt.net")});
  CHECK(ex.code == kExitOk);
  CHECK(ex.out == "edge g_1 g_2 removed=1\nedge g_2 g_5 removed=1\nedge g_4 g_5 removed=1\n");
  const Run sdc = cli({"sdc", circuit_path("fig5_orig.net"), circuit_path("fig5_opt.net")});
  CHECK(sdc.code == kExitOk);
  CHECK(sdc.out.find("set_max_delay 20 -through g_4/ZN -through g_5/A2\n") != std::string::npos);
}

TEST_CASE("a failing verification exits 1") {
  const Run r = cli({"verify", circuit_path("fig1c_open.net"), circuit_path("fig1d_no_f5.net"), "--T", "9", "--ru", "1",
                     "--rl", "1"});
  CHECK(r.code == kExitFail);
  CHECK(r.out.rfind("FAIL\n", 0) == 0);
}

TEST_CASE("usage errors exit 2") {
  CHECK(cli({"analyze", circuit_path("fig1a.net"), "--bogus"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"analyze", "/nonexistent/file.net"}).code == kExitUsage);
  CHECK(cli({"analyze", circuit_path("fig1a.net"), "--ru", "0.5"}).code == kExitUsage);
}

TEST_CASE("--help exits 0") { CHECK(cli({"--help"}).code == kExitOk); }

TEST_CASE("cli invariants") {
  for (const auto& o : cli_properties(100)) CHECK_MESSAGE(o.ok(100), describe(o));
}
