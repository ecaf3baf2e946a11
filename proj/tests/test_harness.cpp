#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "ehlab/errors.hpp"
#include "ehlab/harness.hpp"
#include "ehlab/io.hpp"

using namespace ehlab;
using namespace ehlab::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("ehlab_test_" + std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  json config(const std::string& kind, const std::string& dir, json params) const {
    return {{"kind", kind}, {"seed", 3}, {"output_dir", (root_ / dir).string()}, {"parameters", std::move(params)}};
  }

  RunManifest run_json(const json& j) { return run(parse_config(j)); }

  std::string read(const std::string& rel) const { return io::read_file(root_ / rel); }

  fs::path root_;
};

json small_scan() { return {{"lambdas", {0.0, 0.5, 2.0}}, {"grid_side", 16}, {"n_steps", 1000}}; }

std::string expect_config_error(const json& j) {
  try {
    run(parse_config(j));
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for " << j.dump();
  return "";
}

}  // namespace

TEST_F(HarnessTest, StructuralValidation) {
  EXPECT_THROW(parse_config(json::array()), ConfigError);
  EXPECT_THROW(parse_config({{"seed", 1}, {"output_dir", "x"}}), ConfigError);
  EXPECT_THROW(parse_config({{"kind", "nope"}, {"seed", 1}, {"output_dir", "x"}}), ConfigError);
  EXPECT_THROW(parse_config({{"kind", "geometry-check"}, {"seed", -1}, {"output_dir", "x"}}), ConfigError);
  EXPECT_THROW(parse_config({{"kind", "geometry-check"}, {"seed", 1}}), ConfigError);
  EXPECT_THROW(parse_config({{"kind", "geometry-check"}, {"seed", 1}, {"output_dir", "x"}, {"extra", 1}}),
               ConfigError);
  EXPECT_NO_THROW(parse_config({{"kind", "geometry-check"}, {"seed", 1}, {"output_dir", "x"}}));
}

TEST_F(HarnessTest, FieldLevelMessagesAndNoPartialOutput) {
  struct Case {
    json config;
    std::string field;
  };
  const std::vector<Case> cases = {
      {config("classical-scan", "a", {{"lambdas", {0.0, -1.0}}}), "parameters.lambdas"},
      {config("classical-scan", "b", {{"lambdas", {0.5}}, {"grid_side", 8}}), "parameters.grid_side"},
      {config("classical-scan", "c", {{"lambdas", {0.5}}, {"n_steps", 10}}), "parameters.n_steps"},
      {config("classical-scan", "d", {{"lambdas", {0.5}}, {"typo", 1}}), "parameters.typo"},
      {config("transition-fit", "e", {{"sweep_csv", (root_ / "missing.csv").string()}}), "parameters.sweep_csv"},
      {config("quantum-evolve", "f", {{"dim", 64}, {"lambda", 1.0}, {"initial", {{"type", "haar"}}}}),
       "parameters"},
      {config("quantum-evolve", "g", {{"dim", 65}, {"lambda", 1.0}, {"initial", {{"type", "bogus"}}}}),
       "parameters.initial"},
      {config("correlation-series", "h",
              {{"dim", 65}, {"lambda", 1.0}, {"initial", {{"type", "haar"}}}, {"observable", {{"type", "x"}}}}),
       "parameters.observable"},
      {config("volume-fraction", "i", {{"dim", 65}, {"lambda", 1.0}, {"n_states", 10}}), "parameters.n_states"},
      {config("geometry-check", "j", {{"dims", {0}}}), "parameters.dims"},
  };
  for (const auto& c : cases) {
    const std::string msg = expect_config_error(c.config);
    EXPECT_NE(msg.find(c.field), std::string::npos) << msg;
    EXPECT_FALSE(fs::exists(c.config["output_dir"].get<std::string>())) << msg;
  }
}

TEST_F(HarnessTest, ClassicalScanWritesSweepAndManifest) {
  const auto m = run_json(config("classical-scan", "scan", small_scan()));
  ASSERT_EQ(m.artifacts.size(), 1u);
  EXPECT_EQ(m.artifacts[0].role, "region_sweep");
  const std::string csv = read("scan/region_sweep.csv");
  EXPECT_EQ(csv.rfind("lambda,mu_A,mu_E,n_samples,threshold,ci_halfwidth\n0,0,1,256,", 0), 0u);
  EXPECT_EQ(m.artifacts[0].sha256, io::sha256_file(root_ / "scan/region_sweep.csv"));
  EXPECT_EQ(m.artifacts[0].sha256.size(), 64u);

  const json manifest = json::parse(read("scan/manifest.json"));
  EXPECT_EQ(manifest["kind"], "classical-scan");
  EXPECT_EQ(manifest["config"]["parameters"], small_scan());
  EXPECT_GE(manifest["wall_time_seconds"].get<double>(), 0.0);
  // The manifest is the completion marker: nothing is newer than it.
  const auto manifest_time = fs::last_write_time(root_ / "scan" / kManifestName);
  for (const auto& a : m.artifacts) EXPECT_LE(fs::last_write_time(root_ / "scan" / a.path), manifest_time);
}

TEST_F(HarnessTest, RerunIsByteIdentical) {
  const std::vector<std::pair<std::string, json>> kinds = {
      {"classical-scan", small_scan()},
      {"quantum-evolve", {{"dim", 33}, {"lambda", 3.0}, {"initial", {{"type", "haar"}}}, {"n_kicks", 50}}},
      {"correlation-series",
       {{"dim", 33}, {"lambda", 3.0}, {"quasi_momentum", 0.3}, {"initial", {{"type", "haar"}}},
        {"observable", {{"type", "window"}, {"k_min", -4}, {"k_max", 5}}}, {"horizon", 200}}},
      {"volume-fraction", {{"dim", 33}, {"lambda", 3.0}, {"quasi_momentum", 0.3}, {"horizon", 100}}},
      {"geometry-check", {{"dims", {4, 65}}, {"random_ranks", 3}}},
  };
  for (const auto& [kind, params] : kinds) {
    const auto a = run_json(config(kind, kind + "_1", params));
    const auto b = run_json(config(kind, kind + "_2", params));
    ASSERT_EQ(a.artifacts.size(), b.artifacts.size()) << kind;
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
      EXPECT_EQ(a.artifacts[i].sha256, b.artifacts[i].sha256) << kind << " " << a.artifacts[i].path;
      EXPECT_EQ(read(kind + "_1/" + a.artifacts[i].path), read(kind + "_2/" + b.artifacts[i].path));
    }
  }
}

TEST_F(HarnessTest, SeedChangesRandomStates) {
  const json params = {{"dim", 33}, {"lambda", 3.0}, {"initial", {{"type", "haar"}}}, {"n_kicks", 5}};
  auto c1 = config("quantum-evolve", "s1", params);
  auto c2 = config("quantum-evolve", "s2", params);
  c2["seed"] = 4;
  run_json(c1);
  run_json(c2);
  EXPECT_NE(read("s1/momentum.csv"), read("s2/momentum.csv"));
}

TEST_F(HarnessTest, TransitionFitOnScanOutput) {
  run_json(config("classical-scan", "scan",
                  {{"lambdas", {0.0, 0.3, 0.6, 0.9, 1.2, 1.6, 2.0, 3.0}}, {"grid_side", 16}, {"n_steps", 1000},
                   {"fit", false}}));
  const std::string sweep = (root_ / "scan/region_sweep.csv").string();
  const auto m = run_json(config("transition-fit", "fit", {{"sweep_csv", sweep}}));
  ASSERT_EQ(m.inputs.size(), 1u);
  EXPECT_EQ(m.inputs[0], sweep);
  const json fit = json::parse(read("fit/fit.json"));
  for (const char* key : {"lambda_c", "mu_c", "rss", "n_points", "fit_window"}) EXPECT_TRUE(fit.contains(key));
  EXPECT_TRUE(fs::exists(root_ / "fit/critical.json"));
  EXPECT_EQ(read("fit/region_sweep.csv"), read("scan/region_sweep.csv"));
}

TEST_F(HarnessTest, GeometryCheckResiduals) {
  run_json(config("geometry-check", "geo", {{"dims", {4, 65, 257, 1024}}, {"random_ranks", 5}, {"mu", {1, 2}}}));
  std::istringstream csv(read("geo/identity.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "N,mu,d2,residual");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto fields = io::split_csv_line(line);
    ASSERT_EQ(fields.size(), 4u);
    EXPECT_LE(std::abs(io::parse_double(fields[3], "residual")), 1e-12) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 4 * 7);
}

TEST_F(HarnessTest, NumericFailurePropagates) {
  // beta = 0 leaves parity doublets that the Cesaro limit refuses.
  EXPECT_THROW(run_json(config("correlation-series", "deg",
                               {{"dim", 33}, {"lambda", 0.0}, {"initial", {{"type", "haar"}}},
                                {"observable", {{"type", "cos_theta"}}}, {"horizon", 10}})),
               NumericError);
}

TEST_F(HarnessTest, PlotScriptsPerKind) {
  run_json(config("classical-scan", "scan",
                  {{"lambdas", {0.0, 0.4, 0.8, 1.2, 1.6, 2.0}}, {"grid_side", 16}, {"n_steps", 1000}}));
  std::ostringstream warn;
  const auto scan_scripts = emit_plot_scripts(root_ / "scan" / kManifestName, warn);
  ASSERT_EQ(scan_scripts.size(), 1u);
  const std::string gp = io::read_file(scan_scripts[0]);
  EXPECT_NE(gp.find("'region_sweep.csv'"), std::string::npos);
  EXPECT_NE(gp.find("cubic(x)"), std::string::npos);
  EXPECT_NE(gp.find("# rss = "), std::string::npos);

  run_json(config("correlation-series", "series",
                  {{"dim", 17}, {"lambda", 2.0}, {"quasi_momentum", 0.3}, {"initial", {{"type", "haar"}}},
                   {"observable", {{"type", "L2"}}}, {"horizon", 20}}));
  const auto series_scripts = emit_plot_scripts(root_ / "series" / kManifestName, warn);
  ASSERT_EQ(series_scripts.size(), 1u);
  const std::string cgp = io::read_file(series_scripts[0]);
  EXPECT_NE(cgp.find("using 1:2"), std::string::npos);
  EXPECT_NE(cgp.find("using 1:3"), std::string::npos);

  run_json(config("quantum-evolve", "evolve",
                  {{"dim", 33}, {"lambda", 3.0}, {"initial", {{"type", "momentum"}, {"k", 0}}}, {"n_kicks", 20}}));
  const auto loc_scripts = emit_plot_scripts(root_ / "evolve" / kManifestName, warn);
  ASSERT_EQ(loc_scripts.size(), 1u);
  EXPECT_EQ(loc_scripts[0].filename(), "plot_localization.gp");
  EXPECT_TRUE(warn.str().empty());
}

TEST_F(HarnessTest, PlotEmptyManifestWarns) {
  io::write_file(root_ / "empty.json", R"({"kind": "classical-scan", "artifacts": []})");
  std::ostringstream warn;
  EXPECT_TRUE(emit_plot_scripts(root_ / "empty.json", warn).empty());
  EXPECT_NE(warn.str().find("warning"), std::string::npos);
}

TEST_F(HarnessTest, PlotMissingCsvIsConfigError) {
  run_json(config("classical-scan", "scan", small_scan()));
  fs::remove(root_ / "scan/region_sweep.csv");
  std::ostringstream warn;
  EXPECT_THROW(emit_plot_scripts(root_ / "scan" / kManifestName, warn), ConfigError);
  EXPECT_THROW(emit_plot_scripts(root_ / "nope.json", warn), ConfigError);
}

#ifdef EHLAB_CLI
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(EHLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_F(HarnessTest, CliExitCodes) {
  const fs::path good = root_ / "good.json";
  io::write_file(good, config("geometry-check", "cli_out", {{"dims", {5}}, {"mu", {2}}}).dump());
  EXPECT_EQ(cli("run --config " + good.string()), 0);
  EXPECT_TRUE(fs::exists(root_ / "cli_out" / kManifestName));
  EXPECT_EQ(cli("plot --manifest " + (root_ / "cli_out" / kManifestName).string()), 0);

  const fs::path bad = root_ / "bad.json";
  io::write_file(bad, config("geometry-check", "cli_bad", {{"dims", {-3}}}).dump());
  EXPECT_EQ(cli("run --config " + bad.string()), 2);
  EXPECT_FALSE(fs::exists(root_ / "cli_bad"));

  io::write_file(root_ / "broken.json", "{not json");
  EXPECT_EQ(cli("run --config " + (root_ / "broken.json").string()), 2);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);

  const fs::path numeric = root_ / "numeric.json";
  io::write_file(numeric, config("correlation-series", "cli_num",
                                 {{"dim", 33}, {"lambda", 0.0}, {"initial", {{"type", "haar"}}},
                                  {"observable", {{"type", "cos_theta"}}}, {"horizon", 10}})
                              .dump());
  EXPECT_EQ(cli("run --config " + numeric.string()), 3);

  fs::remove(root_ / "cli_out/identity.csv");
  EXPECT_EQ(cli("plot --manifest " + (root_ / "cli_out" / kManifestName).string()), 2);
}
#endif
