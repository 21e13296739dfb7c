import math

import numpy as np
import pytest

import dsgda


def test_scalar_game_operator_and_saddle():
    g = dsgda.QuadraticGame.scalar(1.0, 2.0, 0.5)
    fu, fv = g.operator(np.array([1.0]), np.array([1.0]))
    assert fu[0] == pytest.approx(1.5)
    assert fv[0] == pytest.approx(1.5)
    u, v = g.saddle()
    assert np.allclose(u, 0) and np.allclose(v, 0)


def test_analyze_fields():
    c = dsgda.analyze(dsgda.QuadraticGame.scalar(1.0, 10.0, 0.0))
    assert c.L == pytest.approx(10.0)
    assert c.mu == pytest.approx(1.0)
    assert c.kappa_c == 0.0
    assert dsgda.classify(dsgda.QuadraticGame.scalar(1.0, 1.0, 2.7))["regime"] == "general"


def test_decoupled_k1_matches_gda():
    rng = np.random.default_rng(0)
    A = np.diag(rng.uniform(1, 3, 3))
    B = np.diag(rng.uniform(1, 3, 2))
    C = rng.normal(size=(3, 2)) * 0.3
    g = dsgda.QuadraticGame(A, B, C)
    kw = dict(gamma=0.05, K=1, R=20, u0=np.ones(3), v0=-np.ones(2), seed=4, sigma_bar=0.2)
    a = dsgda.run(g, method="decoupled", **kw)
    b = dsgda.run(g, method="gda", **kw)
    assert np.array_equal(a["points"], b["points"])
    assert a["points"].shape == (21, 5)
    assert a["oracle_calls"][-1] == 40


def test_closed_form_matches_loop():
    g = dsgda.QuadraticGame.scalar(1.0, 1.0, 0.3)
    trace = dsgda.run(g, gamma=0.1, K=3, R=1, u0=np.array([1.0]), v0=np.array([1.0]))
    u, v = dsgda.explicit_iterate(g, np.array([1.0]), np.array([1.0]), 0.1, 3)
    assert np.allclose(trace["points"][-1], [u[0], v[0]], atol=1e-14)
    assert u[0] == pytest.approx(0.9**3 - 0.03 * (1 + 0.9 + 0.81), abs=1e-14)


def test_stop_rule_and_status():
    g = dsgda.QuadraticGame.scalar(1.0, 1.0, 0.0)
    t = dsgda.run(g, gamma=0.1, K=10, R=100, u0=np.array([1.0]), v0=np.array([1.0]), stop_epsilon=1e-3)
    assert t["status"] == "converged"
    assert math.sqrt(t["dist_sq"][-1]) <= 1e-3


def test_errors_map_to_python_exceptions():
    with pytest.raises(dsgda.DsgdaError):
        dsgda.QuadraticGame(np.eye(2), np.eye(1), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        dsgda.run(dsgda.QuadraticGame.scalar(1, 1, 0), method="bogus", gamma=0.1, u0=np.ones(1), v0=np.ones(1))
    with pytest.raises(dsgda.DivergenceError):
        dsgda.run(dsgda.QuadraticGame.scalar(1, 1, 0), method="gda", gamma=5.0, R=2000, u0=np.ones(1), v0=np.ones(1))


def test_toygan_gradients():
    g = dsgda.ToyGanGame(np.array([[2.0]]), 0.5, 0.5)
    du, dv = g.gradients(np.array([1.0]), np.array([1.0]))
    assert du[0] == pytest.approx(-1.0)
    assert dv[0] == pytest.approx(0.0)


def test_federated_homogeneous_matches_single_client():
    g = dsgda.QuadraticGame.scalar(1.0, 2.0, 0.3)
    kw = dict(gamma=0.05, K=4, R=5, u0=np.ones(1), v0=-np.ones(1))
    one = dsgda.federated_run([g], **kw)
    three = dsgda.federated_run([g, g, g], **kw)
    assert np.allclose(one["points"], three["points"], atol=1e-14)
    assert three["clients"] == 3


def test_sweep_csv():
    csv = dsgda.sweep({"experiment": "trajectory", "scalar_games": [[1, 10, 2.7]], "K_list": [2], "budget": 4})
    lines = csv.strip().splitlines()
    assert lines[0].startswith("schema_version,experiment,method")
    assert len(lines) == 5
