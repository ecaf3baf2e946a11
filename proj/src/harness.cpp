#include "ehlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "ehlab/classical.hpp"
#include "ehlab/errors.hpp"
#include "ehlab/geometry.hpp"
#include "ehlab/io.hpp"
#include "ehlab/parallel.hpp"
#include "ehlab/quantum.hpp"
#include "ehlab/transition.hpp"

namespace ehlab::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads typed values out of the "parameters" object, remembering which keys
// were consumed so leftovers can be reported as unknown.
class ParamReader {
 public:
  explicit ParamReader(const json& p, std::string prefix = "parameters.")
      : p_(p), prefix_(std::move(prefix)) {}

  bool has(const std::string& key) const { return p_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_number()) error(key, "must be a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) error(key, "must be finite");
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_number_integer()) error(key, "must be an integer");
    return v->get<long long>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) error(key, "must be true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_string()) error(key, "must be a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_array() || v->empty()) error(key, "must be a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& x : *v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) error(key, "must contain only finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<long long> integers(const std::string& key,
                                  std::optional<std::vector<long long>> fallback = std::nullopt) {
    const json* v = find(key);
    if (!v) return require(key, fallback);
    if (!v->is_array() || v->empty()) error(key, "must be a non-empty array of integers");
    std::vector<long long> out;
    for (const auto& x : *v) {
      if (!x.is_number_integer()) error(key, "must contain only integers");
      out.push_back(x.get<long long>());
    }
    return out;
  }

  /// Raw sub-document, or null when absent.
  json raw(const std::string& key) {
    const json* v = find(key);
    return v ? *v : json();
  }

  void finish() const {
    for (const auto& [key, value] : p_.items()) {
      if (!used_.count(key)) error(key, "unknown parameter");
    }
  }

  [[noreturn]] void error(const std::string& key, const std::string& what) const {
    throw ConfigError(prefix_ + key + ": " + what);
  }

  [[noreturn]] static void fail(const std::string& key, const std::string& what) {
    throw ConfigError("parameters." + key + ": " + what);
  }

 private:
  const json* find(const std::string& key) {
    used_.insert(key);
    const auto it = p_.find(key);
    return it == p_.end() ? nullptr : &*it;
  }

  template <typename T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) error(key, "is required");
    return *fallback;
  }

  const json& p_;
  std::string prefix_;
  std::set<std::string> used_;
};

// Re-throws module validation errors with the parameter block prefixed.
template <typename F>
void checked(const std::string& where, F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Plans: fully validated, typed versions of each kind's parameters.

struct ClassicalPlan {
  std::vector<double> lambdas;
  std::size_t grid_side = 64;
  std::size_t n_steps = 2000;
  double threshold = classical::kDefaultThreshold;
  double tau = 1.0;
  bool fit = false;
  transition::FitOptions fit_options;
};

bool sweep_supports_fit(const std::vector<double>& lambdas) {
  if (lambdas.size() < 6) return false;
  const auto [lo, hi] = std::minmax_element(lambdas.begin(), lambdas.end());
  return *lo == 0.0 && *hi >= 2.0;
}

transition::FitOptions read_fit_options(ParamReader& r) {
  transition::FitOptions o;
  o.epsilon_fraction = r.number("epsilon_fraction", transition::kDefaultEpsilonFraction);
  if (!(o.epsilon_fraction >= 0.0 && o.epsilon_fraction <= transition::kMaxEpsilonFraction)) {
    ParamReader::fail("epsilon_fraction", "must lie in [0, 0.5]");
  }
  o.weight_floor = r.number("weight_floor", o.weight_floor);
  if (!(o.weight_floor > 0.0)) ParamReader::fail("weight_floor", "must be > 0");
  o.exclusion_cost = r.number("exclusion_cost", o.exclusion_cost);
  if (!(o.exclusion_cost >= 0.0)) ParamReader::fail("exclusion_cost", "must be >= 0");
  return o;
}

ClassicalPlan plan_classical(const json& params) {
  ParamReader r(params);
  ClassicalPlan p;
  p.lambdas = r.numbers("lambdas");
  for (double l : p.lambdas) {
    if (l < 0.0) ParamReader::fail("lambdas", "values must be >= 0");
  }
  const long long g = r.integer("grid_side", 64);
  if (g < 16) ParamReader::fail("grid_side", "must be >= 16");
  p.grid_side = static_cast<std::size_t>(g);
  const long long s = r.integer("n_steps", 2000);
  if (s < static_cast<long long>(classical::kMinLyapunovSteps)) ParamReader::fail("n_steps", "must be >= 1000");
  p.n_steps = static_cast<std::size_t>(s);
  p.threshold = r.number("threshold", classical::kDefaultThreshold);
  if (!(p.threshold > 0.0)) ParamReader::fail("threshold", "must be > 0");
  p.tau = r.number("tau", 1.0);
  if (!(p.tau > 0.0)) ParamReader::fail("tau", "must be > 0");
  const bool supports = sweep_supports_fit(p.lambdas);
  p.fit = r.boolean("fit", supports);
  if (p.fit && !supports) {
    ParamReader::fail("fit", "needs at least 6 lambdas including 0 and one >= 2");
  }
  p.fit_options = read_fit_options(r);
  r.finish();
  return p;
}

struct FitPlan {
  std::string sweep_csv;
  std::string sweep_bytes;
  std::vector<classical::RegionEstimate> rows;
  transition::FitOptions fit_options;
};

FitPlan plan_fit(const json& params) {
  ParamReader r(params);
  FitPlan p;
  p.sweep_csv = r.string("sweep_csv");
  p.fit_options = read_fit_options(r);
  r.finish();
  if (!fs::is_regular_file(p.sweep_csv)) ParamReader::fail("sweep_csv", "file not found: " + p.sweep_csv);
  p.sweep_bytes = io::read_file(p.sweep_csv);
  std::istringstream in(p.sweep_bytes);
  checked("parameters.sweep_csv", [&] { p.rows = classical::read_region_csv(in); });
  std::vector<double> lambdas;
  for (const auto& row : p.rows) lambdas.push_back(row.lambda);
  if (!sweep_supports_fit(lambdas)) {
    ParamReader::fail("sweep_csv", "needs at least 6 rows including lambda = 0 and one lambda >= 2");
  }
  return p;
}

struct QuantumCommon {
  quantum::QuantumParams params;
  double gap_tol = quantum::kDefaultGapTol;
};

QuantumCommon read_quantum_common(ParamReader& r, double lambda) {
  QuantumCommon c;
  const long long dim = r.integer("dim");
  if (dim < 1 || dim > 8193) ParamReader::fail("dim", "must lie in [1, 8193]");
  c.params.dim = static_cast<int>(dim);
  c.params.lambda = lambda;
  c.params.hbar = r.number("hbar", 1.0);
  c.params.tau = r.number("tau", 1.0);
  c.params.quasi_momentum = r.number("quasi_momentum", 0.0);
  c.gap_tol = r.number("gap_tol", quantum::kDefaultGapTol);
  if (!(c.gap_tol >= 0.0)) ParamReader::fail("gap_tol", "must be >= 0");
  checked("parameters", [&] { c.params.validate(); });
  return c;
}

struct InitialSpec {
  std::string type = "momentum";
  int k = 0;
  json to_json() const {
    json j = {{"type", type}};
    if (type == "momentum") j["k"] = k;
    return j;
  }
};

InitialSpec read_initial(const json& j, const quantum::QuantumParams& qp) {
  InitialSpec s;
  if (j.is_null()) return s;
  if (!j.is_object()) ParamReader::fail("initial", "must be an object");
  ParamReader r(j, "parameters.initial.");
  s.type = r.string("type");
  if (s.type == "momentum") {
    const long long k = r.integer("k", 0);
    if (std::llabs(k) > qp.k_max()) r.error("k", "outside the momentum ladder");
    s.k = static_cast<int>(k);
  } else if (s.type != "haar" && s.type != "mixed") {
    r.error("type", "must be one of momentum, haar, mixed");
  }
  r.finish();
  return s;
}

quantum::DensityState make_initial(const InitialSpec& s, const quantum::QuantumParams& qp,
                                   std::uint64_t seed) {
  if (s.type == "haar") {
    auto rng = stream_rng(seed, 0);
    return quantum::DensityState::pure(quantum::haar_random_state(qp.dim, rng));
  }
  if (s.type == "mixed") return quantum::DensityState::maximally_mixed(qp.dim);
  return quantum::DensityState::momentum_eigenstate(qp, s.k);
}

struct ObservableSpec {
  std::string type = "window";
  int k_min = 0;
  int k_max = 0;
  json to_json() const {
    json j = {{"type", type}};
    if (type == "window") {
      j["k_min"] = k_min;
      j["k_max"] = k_max;
    }
    return j;
  }
};

ObservableSpec read_observable(const json& j, const quantum::QuantumParams& qp) {
  ObservableSpec s;
  const int w = qp.dim / 8;
  s.k_min = -w;
  s.k_max = w + 1;
  if (j.is_null()) return s;
  if (!j.is_object()) ParamReader::fail("observable", "must be an object");
  ParamReader r(j, "parameters.observable.");
  s.type = r.string("type");
  if (s.type == "window") {
    s.k_min = static_cast<int>(r.integer("k_min", s.k_min));
    s.k_max = static_cast<int>(r.integer("k_max", s.k_max));
    if (!(s.k_min < s.k_max)) r.error("k_max", "must exceed k_min");
  } else if (s.type != "cos_theta" && s.type != "L2") {
    r.error("type", "must be one of window, cos_theta, L2");
  }
  r.finish();
  return s;
}

quantum::ObservableMatrix make_observable(const ObservableSpec& s, const quantum::QuantumParams& qp) {
  if (s.type == "cos_theta") return quantum::cos_theta_observable(qp);
  if (s.type == "L2") return quantum::momentum_squared_observable(qp);
  return quantum::momentum_window_projector(qp, s.k_min, s.k_max);
}

struct EvolvePlan {
  QuantumCommon q;
  InitialSpec initial;
  long long n_kicks = 10000;
  double bulk_fraction = 0.9;
};

EvolvePlan plan_evolve(const json& params) {
  ParamReader r(params);
  EvolvePlan p;
  p.q = read_quantum_common(r, r.number("lambda"));
  p.initial = read_initial(r.raw("initial"), p.q.params);
  p.n_kicks = r.integer("n_kicks", 10000);
  if (p.n_kicks < 0) ParamReader::fail("n_kicks", "must be >= 0");
  p.bulk_fraction = r.number("bulk_fraction", 0.9);
  if (!(p.bulk_fraction > 0.0 && p.bulk_fraction <= 1.0)) ParamReader::fail("bulk_fraction", "must lie in (0, 1]");
  r.finish();
  return p;
}

struct SeriesPlan {
  QuantumCommon q;
  InitialSpec initial;
  ObservableSpec observable;
  long long horizon = 10000;
};

SeriesPlan plan_series(const json& params) {
  ParamReader r(params);
  SeriesPlan p;
  p.q = read_quantum_common(r, r.number("lambda"));
  p.initial = read_initial(r.raw("initial"), p.q.params);
  p.observable = read_observable(r.raw("observable"), p.q.params);
  p.horizon = r.integer("horizon", 10000);
  if (p.horizon < 2) ParamReader::fail("horizon", "must be >= 2");
  r.finish();
  return p;
}

struct VolumePlan {
  std::vector<QuantumCommon> systems;
  std::size_t n_states = 100;
  long long horizon = 1000;
  std::vector<double> tols;
};

VolumePlan plan_volume(const json& params) {
  ParamReader r(params);
  VolumePlan p;
  std::vector<double> lambdas;
  if (r.has("lambda") && r.has("lambdas")) ParamReader::fail("lambdas", "give either lambda or lambdas");
  if (r.has("lambda")) {
    lambdas = {r.number("lambda")};
  } else {
    lambdas = r.numbers("lambdas");
  }
  const QuantumCommon base = read_quantum_common(r, lambdas.front());
  for (double l : lambdas) {
    QuantumCommon q = base;
    q.params.lambda = l;
    checked("parameters", [&] { q.params.validate(); });
    p.systems.push_back(q);
  }
  const long long n = r.integer("n_states", 100);
  if (n < 100) ParamReader::fail("n_states", "must be >= 100");
  p.n_states = static_cast<std::size_t>(n);
  p.horizon = r.integer("horizon", 1000);
  if (p.horizon < 10) ParamReader::fail("horizon", "must be >= 10");
  p.tols = r.numbers("tols", std::vector<double>{0.02});
  for (double t : p.tols) {
    if (!(t >= 0.0)) ParamReader::fail("tols", "values must be >= 0");
  }
  r.finish();
  return p;
}

struct GeometryPlan {
  std::vector<int> dims;
  std::vector<long long> mus;
  std::size_t random_ranks = 0;
};

GeometryPlan plan_geometry(const json& params) {
  ParamReader r(params);
  GeometryPlan p;
  for (long long d : r.integers("dims", std::vector<long long>{65, 129, 257, 513, 1024})) {
    if (d < 1 || d > 4096) ParamReader::fail("dims", "values must lie in [1, 4096]");
    p.dims.push_back(static_cast<int>(d));
  }
  p.mus = r.integers("mu", std::vector<long long>{});
  for (long long m : p.mus) {
    if (m < 1) ParamReader::fail("mu", "values must be >= 1");
  }
  if (r.has("mu") && p.mus.empty()) ParamReader::fail("mu", "must be non-empty when given");
  const long long k = r.integer("random_ranks", p.mus.empty() ? 20 : 0);
  if (k < 0) ParamReader::fail("random_ranks", "must be >= 0");
  p.random_ranks = static_cast<std::size_t>(k);
  if (p.mus.empty() && p.random_ranks == 0) ParamReader::fail("random_ranks", "nothing to check: give mu or random_ranks > 0");
  r.finish();
  return p;
}

// ---------------------------------------------------------------------------
// Execution

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

  void text(const std::string& role, const std::string& name, const std::string& contents) {
    const fs::path path = dir_ / name;
    io::write_file(path, contents);
    artifacts_.push_back({role, name, io::sha256_file(path)});
  }

  void json_doc(const std::string& role, const std::string& name, const json& doc) {
    text(role, name, doc.dump(2) + "\n");
  }

  std::vector<Artifact> take() { return std::move(artifacts_); }

 private:
  fs::path dir_;
  std::vector<Artifact> artifacts_;
};

template <typename F>
std::string to_csv(F&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

// A grid estimate with zero or all chaotic cells reports a zero-width
// interval, which would pin the fit through that point. The Agresti-Coull
// halfwidth stays positive at the boundaries and matches the Wald width
// elsewhere.
std::vector<transition::FitSample> fit_samples(const std::vector<classical::RegionEstimate>& rows) {
  std::vector<transition::FitSample> out;
  for (const auto& r : rows) {
    const double n = static_cast<double>(r.n_samples);
    double half = r.ci_halfwidth;
    if (n > 0.0) {
      const double z2 = 1.96 * 1.96;
      const double p = (r.mu_A * n + 0.5 * z2) / (n + z2);
      half = std::max(half, 1.96 * std::sqrt(p * (1.0 - p) / (n + z2)));
    }
    out.push_back({r.lambda, r.mu_A, half});
  }
  return out;
}

json sidecar(const QuantumCommon& q, std::uint64_t seed) {
  return {{"params", quantum::to_json(q.params)}, {"gap_tol", q.gap_tol}, {"seed", seed}};
}

void run_classical(const ClassicalPlan& p, ArtifactWriter& w) {
  std::vector<classical::RegionEstimate> rows;
  for (double lambda : p.lambdas) {
    classical::MapParams mp;
    mp.lambda = lambda;
    mp.tau = p.tau;
    rows.push_back(classical::estimate_chaotic_measure(mp, p.grid_side, p.n_steps, p.threshold));
  }
  w.text("region_sweep", "region_sweep.csv", to_csv([&](std::ostream& o) { classical::write_region_csv(o, rows); }));
  if (!p.fit) return;
  w.json_doc("fit", "fit.json", transition::to_json(transition::fit_transition(fit_samples(rows), p.fit_options)));
}

void run_fit(const FitPlan& p, ArtifactWriter& w) {
  const auto fit = transition::fit_transition(fit_samples(p.rows), p.fit_options);
  w.text("region_sweep", "region_sweep.csv", p.sweep_bytes);
  w.json_doc("fit", "fit.json", transition::to_json(fit));

  std::vector<transition::CurveSample> curve;
  for (const auto& r : p.rows) curve.push_back({r.lambda, r.mu_A});
  std::sort(curve.begin(), curve.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  json critical;
  if (curve.size() >= 5 && fit.lambda_c > curve.front().lambda && fit.lambda_c < curve.back().lambda) {
    critical = transition::to_json(transition::check_critical_conditions(curve, fit.lambda_c));
  }
  w.json_doc("critical", "critical.json", critical);
}

json localization_json(const std::vector<quantum::MomentumProbability>& dist, double bulk_fraction) {
  try {
    const auto fit = quantum::localization_length(dist, bulk_fraction);
    return {{"length", fit.localized() ? json(fit.length) : json()},
            {"localized", fit.localized()},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"n_points", fit.n_points},
            {"bulk_fraction", bulk_fraction}};
  } catch (const InsufficientDataError& e) {
    return {{"length", nullptr}, {"localized", false}, {"error", e.what()}, {"bulk_fraction", bulk_fraction}};
  }
}

void run_evolve(const EvolvePlan& p, std::uint64_t seed, ArtifactWriter& w) {
  const auto sys = quantum::build_floquet(p.q.params, p.q.gap_tol);
  const auto rho0 = make_initial(p.initial, p.q.params, seed);
  const auto rho = quantum::evolve(rho0, sys, p.n_kicks);
  const auto dist = quantum::momentum_distribution(rho);

  json side = sidecar(p.q, seed);
  side["initial"] = p.initial.to_json();
  side["n_kicks"] = p.n_kicks;
  side["eigen_residual"] = sys.eigen_residual();
  side["degenerate_pairs"] = sys.degeneracy_flags().size();
  w.json_doc("params", "params.json", side);
  w.text("momentum", "momentum.csv", to_csv([&](std::ostream& o) { quantum::write_momentum_csv(o, dist); }));
  w.text("spectrum", "spectrum.csv", to_csv([&](std::ostream& o) { quantum::write_spectrum_csv(o, sys); }));
  w.json_doc("localization", "localization.json", localization_json(dist, p.bulk_fraction));
}

void run_series(const SeriesPlan& p, std::uint64_t seed, ArtifactWriter& w) {
  const auto sys = quantum::build_floquet(p.q.params, p.q.gap_tol);
  const auto rho0 = make_initial(p.initial, p.q.params, seed);
  const auto obs = make_observable(p.observable, p.q.params);
  const auto series = quantum::correlation_series(rho0, sys, obs, p.horizon, p.initial.type);

  json side = sidecar(p.q, seed);
  side["initial"] = p.initial.to_json();
  side["observable"] = p.observable.to_json();
  side["horizon"] = p.horizon;
  side["equilibrium_value"] = series.equilibrium_value;
  side["cesaro_constant"] = series.cesaro_constant;
  w.json_doc("params", "params.json", side);
  w.text("series", "series.csv", to_csv([&](std::ostream& o) { quantum::write_series_csv(o, series); }));
}

void run_volume(const VolumePlan& p, std::uint64_t seed, ArtifactWriter& w) {
  std::ostringstream csv;
  csv << "lambda,n_states,horizon,tol,fraction\n";
  json systems = json::array();
  for (const auto& q : p.systems) {
    const auto sys = quantum::build_floquet(q.params, q.gap_tol);
    const auto o_set = quantum::default_observable_set(q.params);
    for (double tol : p.tols) {
      const double f = quantum::mixing_volume_fraction(sys, o_set, p.n_states, p.horizon, tol, seed);
      csv << io::format_double(q.params.lambda) << ',' << p.n_states << ',' << p.horizon << ','
          << io::format_double(tol) << ',' << io::format_double(f) << '\n';
    }
    systems.push_back(sidecar(q, seed));
  }
  w.json_doc("params", "params.json", {{"systems", systems}, {"observables", {"window", "cos_theta", "L2"}}});
  w.text("volume_fraction", "volume_fraction.csv", csv.str());
}

void run_geometry(const GeometryPlan& p, std::uint64_t seed, ArtifactWriter& w) {
  std::vector<geometry::IdentityCheck> rows;
  for (std::size_t di = 0; di < p.dims.size(); ++di) {
    const int n = p.dims[di];
    std::vector<std::size_t> ranks;
    for (long long m : p.mus) {
      if (m <= n) ranks.push_back(static_cast<std::size_t>(m));
    }
    auto rng = stream_rng(seed, di);
    std::uniform_int_distribution<int> pick(1, n);
    for (std::size_t i = 0; i < p.random_ranks; ++i) ranks.push_back(static_cast<std::size_t>(pick(rng)));

    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t mu : ranks) {
      std::shuffle(all.begin(), all.end(), rng);
      std::vector<int> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(mu));
      rows.push_back(geometry::verify_theorem2(geometry::make_region_projector(n, chosen)));
    }
  }
  w.text("identity", "identity.csv", to_csv([&](std::ostream& o) { geometry::write_identity_csv(o, rows); }));
}

struct Plan {
  std::optional<ClassicalPlan> classical;
  std::optional<FitPlan> fit;
  std::optional<EvolvePlan> evolve;
  std::optional<SeriesPlan> series;
  std::optional<VolumePlan> volume;
  std::optional<GeometryPlan> geometry;
};

Plan make_plan(const ExperimentConfig& c) {
  Plan p;
  if (c.kind == "classical-scan") p.classical = plan_classical(c.parameters);
  else if (c.kind == "transition-fit") p.fit = plan_fit(c.parameters);
  else if (c.kind == "quantum-evolve") p.evolve = plan_evolve(c.parameters);
  else if (c.kind == "correlation-series") p.series = plan_series(c.parameters);
  else if (c.kind == "volume-fraction") p.volume = plan_volume(c.parameters);
  else if (c.kind == "geometry-check") p.geometry = plan_geometry(c.parameters);
  else throw ConfigError("kind: unknown experiment kind '" + c.kind + "'");
  return p;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "kind" && key != "parameters" && key != "seed" && key != "output_dir") {
      throw ConfigError(key + ": unknown top-level field");
    }
  }
  ExperimentConfig c;
  c.source = j;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("kind: required string");
  c.kind = j["kind"].get<std::string>();
  if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end()) {
    throw ConfigError("kind: unknown experiment kind '" + c.kind + "'");
  }
  // Literals built in code are stored signed, parsed text unsigned.
  const bool seed_ok = j.contains("seed") && (j["seed"].is_number_unsigned() ||
                                              (j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0));
  if (!seed_ok) {
    throw ConfigError("seed: required non-negative integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();
  if (!j.contains("output_dir") || !j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty()) {
    throw ConfigError("output_dir: required non-empty string");
  }
  c.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw ConfigError("parameters: must be an object");
    c.parameters = j["parameters"];
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

void validate(const ExperimentConfig& config) { make_plan(config); }

json RunManifest::to_json() const {
  json arts = json::array();
  for (const auto& a : artifacts) arts.push_back({{"role", a.role}, {"path", a.path}, {"sha256", a.sha256}});
  return {{"kind", kind},
          {"config", config},
          {"wall_time_seconds", wall_time_seconds},
          {"artifacts", arts},
          {"inputs", inputs}};
}

RunManifest run(const ExperimentConfig& config) {
  const Plan plan = make_plan(config);

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    throw ConfigError("output_dir: cannot create " + config.output_dir.string() +
                      (ec ? ": " + ec.message() : ""));
  }

  const auto start = std::chrono::steady_clock::now();
  ArtifactWriter w(config.output_dir);
  RunManifest m;
  m.kind = config.kind;
  m.config = config.source;
  if (plan.classical) run_classical(*plan.classical, w);
  if (plan.fit) {
    run_fit(*plan.fit, w);
    m.inputs.push_back(plan.fit->sweep_csv);
  }
  if (plan.evolve) run_evolve(*plan.evolve, config.seed, w);
  if (plan.series) run_series(*plan.series, config.seed, w);
  if (plan.volume) run_volume(*plan.volume, config.seed, w);
  if (plan.geometry) run_geometry(*plan.geometry, config.seed, w);
  m.artifacts = w.take();
  m.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  io::write_file(config.output_dir / kManifestName, m.to_json().dump(2) + "\n");
  return m;
}

}  // namespace ehlab::harness
