#include <CLI11.hpp>
#include <iostream>

#include "heatlab/heatlab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"heatlab: experiment runner for the parabolic-systems laboratory"};

  std::string config_path = "configs/default.cfg";
  std::string output_root;
  std::vector<std::string> only;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool calibrate = false;
  bool list_only = false;
  int threads = 0;

  app.add_option("-c,--config", config_path, "Configuration file")->capture_default_str();
  app.add_option("-o,--out", output_root, "Output root directory (overrides the config)");
  app.add_option("--only", only, "Run only the named experiments (repeatable)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed override");
  app.add_flag("--calibrate", calibrate, "Force dial recalibration");
  app.add_flag("--list", list_only, "List experiment ids and exit");
  app.add_option("-j,--threads", threads, "Worker threads (default from the config)");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  if (list_only) {
    for (const auto& id : heatlab::experiment_ids()) std::cout << id << "\n";
    return 0;
  }

  try {
    const auto cfg = heatlab::Config::parse_file(config_path);
    const auto specs = heatlab::specs_from_config(
        cfg, only, seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt,
        output_root.empty() ? std::nullopt : std::optional<std::string>(output_root),
        calibrate ? std::optional<bool>(true) : std::nullopt);
    if (threads <= 0) threads = static_cast<int>(cfg.get_int("global", "threads", 2));
    const auto manifests = heatlab::run_experiments(specs, threads);
    for (const auto& m : manifests)
      std::cout << m.experiment << ": " << m.checksums.size() << " outputs, "
                << m.wall_clock_sec << " s\n";
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
