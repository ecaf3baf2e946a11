#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ehlab/errors.hpp"
#include "ehlab/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

template <typename F>
int guarded(F&& f) {
  try {
    f();
    return 0;
  } catch (const ehlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ehlab::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic-hierarchy experiments for the kicked rotator"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();

  std::string manifest_path;
  auto* plot = app.add_subcommand("plot", "Write gnuplot scripts for a finished run");
  plot->add_option("--manifest", manifest_path, "manifest.json of a run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) {
    return guarded([&] {
      const auto config = ehlab::harness::load_config(config_path);
      const auto manifest = ehlab::harness::run(config);
      std::cout << "wrote " << manifest.artifacts.size() << " artifact(s) to "
                << config.output_dir.string() << " in " << manifest.wall_time_seconds << " s\n";
    });
  }
  return guarded([&] {
    for (const auto& p : ehlab::harness::emit_plot_scripts(manifest_path, std::cerr)) {
      std::cout << p.string() << "\n";
    }
  });
}
