import json
import math

import numpy as np
import pytest

import ehlab

BETA = (math.sqrt(5.0) - 1.0) / 4.0


def test_step_map_examples():
    p = ehlab.MapParams(lambda_=1.0)
    theta, mom = ehlab.step_map(math.pi / 2, 0.0, p)
    assert theta == pytest.approx(math.pi / 2 + 1.0)
    assert mom == pytest.approx(1.0)
    back = ehlab.inverse_step_map(theta, mom, p)
    assert back[0] == pytest.approx(math.pi / 2)
    assert back[1] == pytest.approx(0.0, abs=1e-12)


def test_invalid_params_raise_value_error():
    with pytest.raises(ValueError):
        ehlab.MapParams(lambda_=-1.0)
    with pytest.raises(ehlab.ConfigError):
        ehlab.QuantumParams(dim=64, lambda_=1.0)


def test_cubic_headline():
    assert ehlab.cubic_transition(0.2, 0.9716) == pytest.approx(0.05919, abs=1e-4)
    with pytest.raises(ValueError):
        ehlab.cubic_transition(1.2, 0.9716)


def test_fit_round_trip():
    lam = np.arange(0, 101) * 0.02
    x = lam / 0.9716
    mu = 0.9 * (1.5 * x**2 - 0.5 * x**3)
    r = ehlab.fit_transition(lam.tolist(), mu.tolist(), [0.0] * len(lam))
    assert r["lambda_c"] == pytest.approx(0.9716, abs=1e-3)
    assert r["mu_c"] == pytest.approx(0.9, abs=1e-3)


def test_chaotic_measure_endpoints():
    assert ehlab.estimate_chaotic_measure(ehlab.MapParams(lambda_=0.0), 16, 1000)["mu_A"] == 0.0
    assert ehlab.estimate_chaotic_measure(ehlab.MapParams(lambda_=10.0), 16, 1000)["mu_A"] > 0.9


def test_floquet_unitary_and_evolution():
    q = ehlab.QuantumParams(dim=33, lambda_=3.0, quasi_momentum=BETA)
    sys = ehlab.build_floquet(q)
    f = sys.unitary
    assert np.abs(f @ f.conj().T - np.eye(33)).max() < 1e-10
    rho0 = ehlab.momentum_eigenstate(q, 0)
    rho = ehlab.evolve(rho0, sys, 25)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
    direct = np.linalg.matrix_power(f, 25) @ rho0 @ np.linalg.matrix_power(f, 25).conj().T
    assert np.abs(rho - direct).max() < 1e-9
    star = ehlab.cesaro_limit_state(rho0, sys)
    o = ehlab.momentum_window_projector(q, -4, 5)
    s = ehlab.correlation_series(rho0, sys, o, 100)
    assert len(s["c_q"]) == 100
    assert s["equilibrium_value"] == pytest.approx(ehlab.expectation(star, o), abs=1e-12)


def test_geometry_identity():
    d = ehlab.verify_theorem2(4, [0, 3])
    assert d["d2"] == pytest.approx(0.25, abs=1e-15)
    assert abs(d["residual"]) <= 1e-12
    assert ehlab.hs_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(math.sqrt(2.0))


def test_run_experiment(tmp_path):
    cfg = {"kind": "geometry-check", "seed": 1, "output_dir": str(tmp_path / "geo"),
           "parameters": {"dims": [4, 65], "random_ranks": 3}}
    manifest = json.loads(ehlab.run_experiment(json.dumps(cfg)))
    assert manifest["kind"] == "geometry-check"
    assert (tmp_path / "geo" / "identity.csv").exists()
    with pytest.raises(ValueError):
        ehlab.run_experiment(json.dumps({"kind": "nope", "seed": 1, "output_dir": str(tmp_path)}))
