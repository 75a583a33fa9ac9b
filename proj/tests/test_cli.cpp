#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"

namespace {

// Path of the qddsim binary: env override first, then the build directory
// baked in at compile time.
std::string qddsim_bin() {
  if (const char* p = std::getenv("QDDSIM_BIN")) return p;
#ifdef QDDSIM_BIN_DIR
  return std::string(QDDSIM_BIN_DIR) + "/qddsim";
#else
  return "";
#endif
}

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path temp_dir(const std::string& leaf) {
  const auto d = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("qddsim presets --list names every preset", "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const CmdResult r = run_cmd(bin + " presets --list");
  REQUIRE(r.exit_code == 0);
  for (const std::string& name :
       {"press", "circle_2cm", "snatch_ball", "coin_slide",
        "motor_torque_linearity"}) {
    INFO(r.output);
    REQUIRE(r.output.find(name) != std::string::npos);
  }
}

TEST_CASE("qddsim presets --dump emits loadable JSON", "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const CmdResult r = run_cmd(bin + " presets --dump grasp_hold");
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.output.find("\"name\"") != std::string::npos);
  REQUIRE(r.output.find("grasp_hold") != std::string::npos);
}

TEST_CASE("qddsim workspace --grid 2 writes 8 tagged rows", "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const auto dir = temp_dir("qdd_cli_ws");
  const CmdResult r =
      run_cmd(bin + " workspace --grid 2 --out-dir " + dir.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream csv(dir / "workspace.csv");
  REQUIRE(csv.good());
  std::string line;
  REQUIRE(std::getline(csv, line));
  REQUIRE(line == "finger,x_m,y_m");
  int rows = 0, finger1 = 0;
  while (std::getline(csv, line)) {
    ++rows;
    if (line.rfind("1,", 0) == 0) ++finger1;
  }
  REQUIRE(rows == 8);
  REQUIRE(finger1 == 4);
}

TEST_CASE("qddsim closure exit codes", "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const auto dir = temp_dir("qdd_cli_closure");
  std::filesystem::create_directories(dir);
  {
    std::ofstream g(dir / "pinch.json");
    g << R"({"contacts":[
      {"position":[-0.01,0.06],"normal":[1,0],"mu":0.5},
      {"position":[0.01,0.06],"normal":[-1,0],"mu":0.5}]})";
  }
  // Analysis succeeds regardless of the verdict: exit 0.
  const CmdResult ok =
      run_cmd(bin + " closure --grasp " + (dir / "pinch.json").string());
  REQUIRE(ok.exit_code == 0);
  {
    std::ofstream g(dir / "open.json");
    g << R"({"contacts":[
      {"position":[-0.01,0.06],"normal":[0,1],"mu":0.1},
      {"position":[0.01,0.06],"normal":[0,1],"mu":0.1}]})";
  }
  const CmdResult open_grasp =
      run_cmd(bin + " closure --grasp " + (dir / "open.json").string());
  REQUIRE(open_grasp.exit_code == 0);
  // Malformed file: exit 2.
  {
    std::ofstream g(dir / "bad.json");
    g << R"({"contacts":[{"position":[0,0]}]})";
  }
  const CmdResult bad =
      run_cmd(bin + " closure --grasp " + (dir / "bad.json").string());
  REQUIRE(bad.exit_code == 2);
  const CmdResult missing =
      run_cmd(bin + " closure --grasp " + (dir / "nope.json").string());
  REQUIRE(missing.exit_code == 2);
}

TEST_CASE("qddsim run rejects malformed configs with exit 2", "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const auto dir = temp_dir("qdd_cli_run");
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "bad.json");
    cfg << R"({"bogus": 1})";
  }
  const CmdResult r =
      run_cmd(bin + " run --config " + (dir / "bad.json").string());
  REQUIRE(r.exit_code == 2);
}

TEST_CASE("qddsim run executes a short scenario and writes artifacts",
          "[cli]") {
  const std::string bin = qddsim_bin();
  if (bin.empty() || !std::filesystem::exists(bin)) {
    SKIP("qddsim binary not found");
  }
  const auto dir = temp_dir("qdd_cli_short");
  std::filesystem::create_directories(dir);
  {
    std::ofstream cfg(dir / "short.json");
    cfg << R"({"name": "short", "duration_s": 0.05,
               "success": {"kind": "none"}})";
  }
  const CmdResult r = run_cmd(bin + " run --config " +
                              (dir / "short.json").string() + " --out-dir " +
                              (dir / "out").string());
  INFO(r.output);
  REQUIRE(r.exit_code == 0);
  for (const std::string& f :
       {"config_resolved.json", "controller_0.csv", "controller_1.csv",
        "motor_0.csv", "motor_3.csv", "contacts.csv", "summary.json"}) {
    REQUIRE(std::filesystem::exists(dir / "out" / f));
  }
}
