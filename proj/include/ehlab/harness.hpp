#pragma once

// Config-driven experiment runner. One JSON document describes a run:
//
//   {"kind": "classical-scan", "seed": 7, "output_dir": "out/scan",
//    "parameters": {"lambdas": [0, 0.5, 2], "grid_side": 64, "n_steps": 2000}}
//
// Every parameter is checked before any file is touched. Artifacts are written
// into output_dir and the manifest is written last.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ehlab::harness {

inline const std::vector<std::string> kKinds = {"classical-scan",     "transition-fit",
                                                "quantum-evolve",     "correlation-series",
                                                "volume-fraction",    "geometry-check"};

struct ExperimentConfig {
  std::string kind;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  /// The document as given, echoed into the manifest.
  nlohmann::json source;
};

/// Structural checks only (kind, seed, output_dir, parameters object).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full parameter validation for the kind, without running anything.
void validate(const ExperimentConfig& config);

struct Artifact {
  std::string role;
  /// Relative to the manifest's directory.
  std::string path;
  std::string sha256;
};

struct RunManifest {
  nlohmann::json config;
  std::string kind;
  double wall_time_seconds = 0.0;
  std::vector<Artifact> artifacts;
  /// Input files read by the run, as given in the config.
  std::vector<std::string> inputs;

  nlohmann::json to_json() const;
};

inline constexpr const char* kManifestName = "manifest.json";

/// Validates, runs the experiment, writes artifacts and finally
/// <output_dir>/manifest.json. ConfigError and NumericError propagate.
RunManifest run(const ExperimentConfig& config);

/// Writes gnuplot scripts next to the manifest: mu(A) against lambda with the
/// fitted cubic, ln p(k) against |k| with the localization fit, and C_Q with
/// its Cesaro average. Returns the scripts written. An empty manifest only
/// prints a warning to `warn`. A referenced CSV that does not exist raises
/// ConfigError.
std::vector<std::filesystem::path> emit_plot_scripts(const std::filesystem::path& manifest_path,
                                                     std::ostream& warn);

}  // namespace ehlab::harness
