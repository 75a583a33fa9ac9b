// qddsim: scenario runner and grasp analysis for the two-finger hand simulator.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qdd/runner.hpp"

namespace {

// Output directory precedence: --out-dir flag > QDDSIM_OUT env > config key.
std::string resolve_out_dir(const std::string& flag_value,
                            const std::string& config_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("QDDSIM_OUT"); env && *env) return env;
  return config_value;
}

int cmd_run(const std::string& config_path, const std::string& preset,
            const std::string& out_dir, bool seed_set, uint64_t seed) {
  qdd::ScenarioConfig config;
  try {
    if (!config_path.empty()) {
      config = qdd::load_config(config_path);
    } else if (!preset.empty()) {
      // Round-trip through JSON so presets obey the same validation.
      config = qdd::load_config_json(
          qdd::scenario_to_json(qdd::presets::get(preset)));
    } else {
      std::cerr << "error: run needs --config or --preset\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (seed_set) config.seed = seed;

  const std::string dir = resolve_out_dir(out_dir, config.out_dir);
  qdd::ScenarioOutcome outcome;
  try {
    outcome = qdd::run_scenario(config, dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "scenario: " << config.name << "\n"
            << "out_dir: " << outcome.out_dir << "\n"
            << "success: " << (outcome.ok ? "true" : "false") << "\n";
  if (!outcome.ok) {
    std::cerr << "reason: " << outcome.reason << "\n";
    return 1;
  }
  return 0;
}

int cmd_presets(bool list, const std::string& dump) {
  if (!dump.empty()) {
    try {
      std::cout << qdd::scenario_to_json(qdd::presets::get(dump)).dump(2)
                << "\n";
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    return 0;
  }
  (void)list;  // default action
  for (const std::string& name : qdd::presets::names()) {
    std::cout << name << "\n";
  }
  return 0;
}

int cmd_closure(const std::string& grasp_path) {
  qdd::ContactSet contacts;
  try {
    std::ifstream in(grasp_path);
    if (!in) throw std::runtime_error("cannot open " + grasp_path);
    contacts = qdd::grasp_from_json(qdd::json::parse(in));
  } catch (const std::exception& e) {
    std::cerr << "error: malformed grasp file: " << e.what() << "\n";
    return 2;
  }
  const qdd::GraspAnalysis a = qdd::analyze_grasp(contacts);
  std::cout << "contacts: " << a.n_contacts << "\n"
            << "force_closure: " << (a.force_closure ? "true" : "false") << "\n"
            << "form_closure: " << (a.form_closure ? "true" : "false") << "\n";
  if (a.form_closure) {
    std::cout << "lambda:";
    for (double l : a.lambda) std::printf(" %.6g", l);
    std::cout << "\n";
  }
  return 0;
}

int cmd_workspace(int grid, const std::string& out_dir) {
  std::array<std::vector<qdd::Vec2>, 2> clouds;
  try {
    clouds = qdd::hand_workspace(qdd::FingerGeometry{}, qdd::HandConfig{},
                                 grid);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  const std::string dir = resolve_out_dir(out_dir, "out");
  std::filesystem::create_directories(dir);
  qdd::write_workspace_csv(dir + "/workspace.csv", clouds);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  size_t n = 0;
  for (const auto& cloud : clouds) {
    n += cloud.size();
    for (const qdd::Vec2& p : cloud) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
  }
  std::cout << "points: " << n << "\n"
            << "x_range_m: [" << xmin << ", " << xmax << "]\n"
            << "y_range_m: [" << ymin << ", " << ymax << "]\n"
            << "written: " << dir << "/workspace.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-finger quasi-direct-drive hand simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario");
  std::string config_path, preset, out_dir;
  uint64_t seed = 0;
  run->add_option("--config", config_path, "Scenario config (JSON)");
  run->add_option("--preset", preset, "Built-in preset name");
  run->add_option("--out-dir", out_dir, "Output directory");
  auto* seed_opt = run->add_option("--seed", seed, "Override the RNG seed");

  auto* presets = app.add_subcommand("presets", "List built-in presets");
  bool list = false;
  std::string dump;
  presets->add_flag("--list", list, "List preset names (default)");
  presets->add_option("--dump", dump, "Print one preset's config as JSON");

  auto* closure = app.add_subcommand("closure", "Analyze a grasp file");
  std::string grasp_path;
  closure->add_option("--grasp", grasp_path, "Grasp contacts (JSON)")
      ->required();

  auto* workspace = app.add_subcommand("workspace",
                                       "Sample the reachable fingertip set");
  int grid = 120;
  workspace->add_option("--grid", grid, "Samples per joint axis");
  workspace->add_option("--out-dir", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return cmd_run(config_path, preset, out_dir, seed_opt->count() > 0, seed);
  }
  if (presets->parsed()) return cmd_presets(list, dump);
  if (closure->parsed()) return cmd_closure(grasp_path);
  if (workspace->parsed()) return cmd_workspace(grid, out_dir);
  return 2;
}
