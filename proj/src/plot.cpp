#include <ostream>
#include <sstream>

#include "ehlab/errors.hpp"
#include "ehlab/harness.hpp"
#include "ehlab/io.hpp"

namespace ehlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ManifestView {
  fs::path dir;
  std::string kind;
  std::vector<Artifact> artifacts;

  const Artifact* find(const std::string& role) const {
    for (const auto& a : artifacts) {
      if (a.role == role) return &a;
    }
    return nullptr;
  }
};

json load_json(const fs::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
}

ManifestView load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("manifest not found: " + path.string());
  const json j = load_json(path);
  if (!j.is_object()) throw ConfigError(path.string() + ": manifest must be a JSON object");
  ManifestView m;
  m.dir = path.parent_path();
  m.kind = j.value("kind", "");
  if (j.contains("artifacts")) {
    if (!j["artifacts"].is_array()) throw ConfigError(path.string() + ": artifacts must be an array");
    for (const auto& a : j["artifacts"]) {
      try {
        m.artifacts.push_back({a.at("role").get<std::string>(), a.at("path").get<std::string>(),
                               a.value("sha256", "")});
      } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": malformed artifact entry: " + e.what());
      }
    }
  }
  return m;
}

// Data files are referenced relative to the script, which lives next to them.
std::string quoted(const std::string& s) { return "'" + s + "'"; }

void require_file(const ManifestView& m, const Artifact& a) {
  const fs::path p = m.dir / a.path;
  if (!fs::is_regular_file(p)) throw ConfigError("artifact '" + a.role + "' missing: " + p.string());
}

std::string mu_vs_lambda_script(const ManifestView& m, const Artifact& sweep) {
  std::ostringstream s;
  s << "# mu(A) against lambda\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 'lambda'\n"
    << "set ylabel 'mu(A)'\n"
    << "set yrange [0:1.05]\n";
  std::string overlay;
  if (const Artifact* fit_art = m.find("fit")) {
    require_file(m, *fit_art);
    const json fit = load_json(m.dir / fit_art->path);
    const double lc = fit.at("lambda_c").get<double>();
    const double muc = fit.at("mu_c").get<double>();
    const double end = fit.at("fit_window").at(1).get<double>();
    s << "lambda_c = " << io::format_double(lc) << "\n"
      << "mu_c = " << io::format_double(muc) << "\n"
      << "window_end = " << io::format_double(end) << "\n"
      << "# rss = " << io::format_double(fit.at("rss").get<double>()) << "\n"
      << "cubic(x) = (x <= window_end) ? mu_c * (1.5 * (x / lambda_c)**2 - 0.5 * (x / lambda_c)**3) : 1/0\n"
      << "set samples 400\n";
    overlay = ", \\\n     cubic(x) with lines lw 2 title sprintf('cubic fit, lambda_c = %.4f', lambda_c)";
  }
  s << "plot " << quoted(sweep.path) << " using 1:2:6 with yerrorbars pt 7 title 'mu_A'" << overlay << "\n";
  return s.str();
}

std::string localization_script(const ManifestView& m, const Artifact& momentum) {
  std::ostringstream s;
  s << "# ln p(k) against |k|\n"
    << "set datafile separator ','\n"
    << "set xlabel '|k|'\n"
    << "set ylabel 'ln p(k)'\n";
  std::string overlay;
  if (const Artifact* loc_art = m.find("localization")) {
    require_file(m, *loc_art);
    const json loc = load_json(m.dir / loc_art->path);
    if (loc.contains("slope") && loc.contains("intercept")) {
      s << "slope = " << io::format_double(loc["slope"].get<double>()) << "\n"
        << "intercept = " << io::format_double(loc["intercept"].get<double>()) << "\n"
        << "fit_line(x) = intercept + slope * x\n";
      overlay = ", \\\n     fit_line(x) with lines lw 2 title sprintf('slope %.4g', slope)";
    }
  }
  s << "plot " << quoted(momentum.path)
    << " every ::1 using (abs($1)):($2 > 0 ? log($2) : 1/0) with points pt 7 ps 0.5 title 'ln p'" << overlay
    << "\n";
  return s.str();
}

std::string correlation_script(const Artifact& series) {
  std::ostringstream s;
  s << "# C_Q and its Cesaro average against t\n"
    << "set datafile separator ','\n"
    << "set key autotitle columnhead\n"
    << "set xlabel 't'\n"
    << "set ylabel 'C_Q'\n"
    << "plot " << quoted(series.path) << " using 1:2 with lines title 'c_q', \\\n"
    << "     " << quoted(series.path) << " using 1:3 with lines lw 2 title 'cesaro'\n";
  return s.str();
}

}  // namespace

std::vector<fs::path> emit_plot_scripts(const fs::path& manifest_path, std::ostream& warn) {
  const ManifestView m = load_manifest(manifest_path);
  std::vector<fs::path> written;
  if (m.artifacts.empty()) {
    warn << "warning: manifest " << manifest_path.string() << " lists no artifacts; nothing to plot\n";
    return written;
  }
  for (const auto& a : m.artifacts) require_file(m, a);

  std::vector<std::pair<std::string, std::string>> scripts;
  if (const Artifact* a = m.find("region_sweep")) scripts.emplace_back("plot_mu_vs_lambda.gp", mu_vs_lambda_script(m, *a));
  if (const Artifact* a = m.find("momentum")) scripts.emplace_back("plot_localization.gp", localization_script(m, *a));
  if (const Artifact* a = m.find("series")) scripts.emplace_back("plot_correlation.gp", correlation_script(*a));

  if (scripts.empty()) {
    warn << "warning: manifest of kind '" << m.kind << "' has no plottable artifacts\n";
    return written;
  }
  for (const auto& [name, body] : scripts) {
    const fs::path out = m.dir / name;
    io::write_file(out, body);
    written.push_back(out);
  }
  return written;
}

}  // namespace ehlab::harness
