#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ehlab/classical.hpp"
#include "ehlab/errors.hpp"
#include "ehlab/geometry.hpp"
#include "ehlab/harness.hpp"
#include "ehlab/quantum.hpp"
#include "ehlab/transition.hpp"

namespace py = pybind11;
using namespace ehlab;

namespace {

py::dict region_dict(const classical::RegionEstimate& r) {
  py::dict d;
  d["lambda"] = r.lambda;
  d["mu_A"] = r.mu_A;
  d["mu_E"] = r.mu_E;
  d["n_samples"] = r.n_samples;
  d["threshold"] = r.threshold;
  d["ci_halfwidth"] = r.ci_halfwidth;
  return d;
}

classical::CellSet cells_from_tuples(const std::vector<std::array<double, 4>>& cells) {
  classical::CellSet out;
  for (const auto& c : cells) out.push_back({c[0], c[1], c[2], c[3]});
  return out;
}

quantum::DensityState density(const quantum::Matrix& m) { return quantum::DensityState::from_matrix(m); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kicked-rotator ergodic-hierarchy toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  // classical
  py::class_<classical::MapParams>(m, "MapParams")
      .def(py::init([](double lambda, double tau) {
             classical::MapParams p{lambda, tau};
             p.validate();
             return p;
           }),
           py::arg("lambda_"), py::arg("tau") = 1.0)
      .def_readonly("lambda_", &classical::MapParams::lambda)
      .def_readonly("tau", &classical::MapParams::tau);

  m.def("step_map", [](double theta, double p, const classical::MapParams& params) {
    const auto x = classical::step_map({theta, p}, params);
    return std::make_pair(x.theta, x.p);
  });
  m.def("inverse_step_map", [](double theta, double p, const classical::MapParams& params) {
    const auto x = classical::inverse_step_map({theta, p}, params);
    return std::make_pair(x.theta, x.p);
  });
  m.def("lyapunov_exponent",
        [](double theta, double p, const classical::MapParams& params, std::size_t n_steps) {
          return classical::lyapunov_exponent({theta, p}, params, n_steps);
        },
        py::arg("theta"), py::arg("p"), py::arg("params"), py::arg("n_steps") = 5000);
  m.def("classify_orbit",
        [](double theta, double p, const classical::MapParams& params, std::size_t n_steps, double threshold) {
          const auto c = classical::classify_orbit({theta, p}, params, n_steps, threshold);
          return std::make_pair(classical::to_string(c.label), c.lyapunov);
        },
        py::arg("theta"), py::arg("p"), py::arg("params"), py::arg("n_steps") = 5000,
        py::arg("threshold") = classical::kDefaultThreshold);
  m.def("estimate_chaotic_measure",
        [](const classical::MapParams& params, std::size_t grid_side, std::size_t n_steps, double threshold) {
          classical::RegionEstimate r;
          {
            py::gil_scoped_release release;
            r = classical::estimate_chaotic_measure(params, grid_side, n_steps, threshold);
          }
          return region_dict(r);
        },
        py::arg("params"), py::arg("grid_side") = 64, py::arg("n_steps") = 2000,
        py::arg("threshold") = classical::kDefaultThreshold);
  m.def("set_correlation",
        [](const std::vector<std::array<double, 4>>& a, const std::vector<std::array<double, 4>>& b,
           const classical::MapParams& params, std::size_t t, std::size_t n_samples, std::uint64_t seed) {
          const auto c = classical::set_correlation(cells_from_tuples(a), cells_from_tuples(b), params, t,
                                                    n_samples, seed);
          py::dict d;
          d["value"] = c.value;
          d["std_error"] = c.std_error;
          d["mu_a"] = c.mu_a;
          d["mu_b"] = c.mu_b;
          d["mu_intersection"] = c.mu_intersection;
          d["empty_input"] = c.empty_input;
          return d;
        },
        "Cells are (theta_min, theta_max, p_min, p_max).", py::arg("a"), py::arg("b"), py::arg("params"),
        py::arg("t"), py::arg("n_samples") = 100000, py::arg("seed") = 0);

  // transition
  m.def("cubic_transition",
        [](double lambda, double lambda_c, double mu_c, double epsilon_fraction) {
          return transition::cubic_transition(lambda, {lambda_c, mu_c, epsilon_fraction});
        },
        py::arg("lambda_"), py::arg("lambda_c"), py::arg("mu_c") = 1.0,
        py::arg("epsilon_fraction") = transition::kDefaultEpsilonFraction);
  m.def("quadratic_small_lambda",
        [](double lambda, double lambda_c, double mu_c) {
          return transition::quadratic_small_lambda(lambda, {lambda_c, mu_c, transition::kDefaultEpsilonFraction});
        },
        py::arg("lambda_"), py::arg("lambda_c"), py::arg("mu_c") = 1.0);
  m.def("fit_transition",
        [](const std::vector<double>& lambdas, const std::vector<double>& mus, const std::vector<double>& ci,
           double epsilon_fraction) {
          if (lambdas.size() != mus.size() || lambdas.size() != ci.size()) {
            throw ConfigError("lambdas, mus and ci must have equal length");
          }
          std::vector<transition::FitSample> samples;
          for (std::size_t i = 0; i < lambdas.size(); ++i) samples.push_back({lambdas[i], mus[i], ci[i]});
          transition::FitOptions opt;
          opt.epsilon_fraction = epsilon_fraction;
          const auto r = transition::fit_transition(samples, opt);
          py::dict d;
          d["lambda_c"] = r.lambda_c;
          d["mu_c"] = r.mu_c;
          d["rss"] = r.rss;
          d["n_points"] = r.n_points;
          d["fit_window"] = py::make_tuple(r.fit_window[0], r.fit_window[1]);
          return d;
        },
        py::arg("lambdas"), py::arg("mus"), py::arg("ci"),
        py::arg("epsilon_fraction") = transition::kDefaultEpsilonFraction);

  // quantum
  py::class_<quantum::QuantumParams>(m, "QuantumParams")
      .def(py::init([](int dim, double lambda, double hbar, double tau, double beta) {
             quantum::QuantumParams p{dim, lambda, hbar, tau, beta};
             p.validate();
             return p;
           }),
           py::arg("dim"), py::arg("lambda_"), py::arg("hbar") = 1.0, py::arg("tau") = 1.0,
           py::arg("quasi_momentum") = 0.0)
      .def_readonly("dim", &quantum::QuantumParams::dim)
      .def_readonly("lambda_", &quantum::QuantumParams::lambda)
      .def_readonly("hbar", &quantum::QuantumParams::hbar)
      .def_readonly("tau", &quantum::QuantumParams::tau)
      .def_readonly("quasi_momentum", &quantum::QuantumParams::quasi_momentum);

  py::class_<quantum::FloquetSystem>(m, "FloquetSystem")
      .def_property_readonly("params", &quantum::FloquetSystem::params)
      .def_property_readonly("unitary", &quantum::FloquetSystem::unitary)
      .def_property_readonly("quasi_energies", &quantum::FloquetSystem::quasi_energies)
      .def_property_readonly("eigenbasis", &quantum::FloquetSystem::eigenbasis)
      .def_property_readonly("degeneracy_flags", &quantum::FloquetSystem::degeneracy_flags)
      .def_property_readonly("eigen_residual", &quantum::FloquetSystem::eigen_residual);

  m.def("build_floquet", &quantum::build_floquet, py::arg("params"), py::arg("gap_tol") = quantum::kDefaultGapTol,
        py::call_guard<py::gil_scoped_release>());
  m.def("kick_operator", &quantum::kick_operator);
  m.def("evolve",
        [](const quantum::Matrix& rho, const quantum::FloquetSystem& sys, long long n) {
          return quantum::evolve(density(rho), sys, n).matrix();
        });
  m.def("cesaro_limit_state",
        [](const quantum::Matrix& rho, const quantum::FloquetSystem& sys) {
          return quantum::cesaro_limit_state(density(rho), sys).matrix();
        });
  m.def("expectation", [](const quantum::Matrix& rho, const quantum::Matrix& o) {
    return quantum::expectation(density(rho), quantum::ObservableMatrix(o, "O"));
  });
  m.def("correlation_series",
        [](const quantum::Matrix& rho0, const quantum::FloquetSystem& sys, const quantum::Matrix& o,
           long long horizon) {
          const auto s = quantum::correlation_series(density(rho0), sys, quantum::ObservableMatrix(o, "O"), horizon);
          py::dict d;
          d["t"] = s.times;
          d["c_q"] = s.c_q;
          d["cesaro"] = s.cesaro;
          d["equilibrium_value"] = s.equilibrium_value;
          d["cesaro_constant"] = s.cesaro_constant;
          return d;
        },
        py::arg("rho0"), py::arg("system"), py::arg("observable"), py::arg("horizon"));
  m.def("momentum_window_projector",
        [](const quantum::QuantumParams& p, int k_min, int k_max) {
          return quantum::momentum_window_projector(p, k_min, k_max).matrix();
        });
  m.def("momentum_eigenstate", [](const quantum::QuantumParams& p, int k) {
    return quantum::DensityState::momentum_eigenstate(p, k).matrix();
  });
  m.def("localization_length",
        [](const std::vector<double>& p, double bulk_fraction) {
          const int k_max = (static_cast<int>(p.size()) - 1) / 2;
          std::vector<quantum::MomentumProbability> dist;
          for (std::size_t i = 0; i < p.size(); ++i) dist.push_back({static_cast<int>(i) - k_max, p[i]});
          const auto f = quantum::localization_length(dist, bulk_fraction);
          py::dict d;
          d["length"] = f.length;
          d["slope"] = f.slope;
          d["intercept"] = f.intercept;
          d["r_squared"] = f.r_squared;
          d["n_points"] = f.n_points;
          return d;
        },
        "p is the momentum distribution on the symmetric ladder.", py::arg("p"), py::arg("bulk_fraction") = 0.9);

  // geometry
  m.def("hs_distance", &geometry::hs_distance);
  m.def("verify_theorem2",
        [](int dim, std::vector<int> indices) {
          const auto c = geometry::verify_theorem2(geometry::make_region_projector(dim, std::move(indices)));
          py::dict d;
          d["N"] = c.dim;
          d["mu"] = c.mu;
          d["d2"] = c.d2;
          d["residual"] = c.residual;
          return d;
        },
        py::arg("dim"), py::arg("indices"));

  // harness
  m.def("run_experiment",
        [](const std::string& config_json) {
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(config_json);
          } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("invalid JSON: ") + e.what());
          }
          const auto config = harness::parse_config(j);
          return harness::run(config).to_json().dump();
        },
        "Runs a JSON experiment config and returns the manifest as JSON text.", py::arg("config_json"));
}
