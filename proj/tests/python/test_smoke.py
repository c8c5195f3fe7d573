"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import tentacle


def hex_matrix():
    return np.diag([1.0, -1.0, 1.0, 1.0])


def test_classify_running_example():
    dec = tentacle.classify(hex_matrix(), 0.5)
    assert dec["semisimple"] is True
    kinds = [b["kind"] for b in dec["blocks"]]
    assert kinds == ["a", "c"]
    assert dec["blocks"][1]["params"]["gamma"] == 1
    assert dec["signature"] == [3, 1]


def test_classify_rejects_asymmetric():
    bad = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        tentacle.classify(bad, 1.0)


def test_check_verifies_and_replays():
    report = tentacle.check(hex_matrix(), 0.5)
    assert report["overall"] == "strongly_tentacular"
    assert report["replay_passed"] is True
    statuses = {v["axiom"]: v["status"] for v in report["verdicts"]}
    assert statuses == {k: "verified" for k in ("h1", "h2", "h3", "h4")}


def test_orbits_match_closed_forms():
    orbits = tentacle.orbits(hex_matrix(), 0.5, k_max=2)
    assert len(orbits) == 4
    for orb in orbits:
        assert orb["action"] == pytest.approx(math.pi * orb["k"], abs=1e-9)
        assert orb["length"] == pytest.approx(2.0 * math.pi * abs(orb["k"]), abs=1e-6)
        assert orb["cz_transverse"] == 0.0


def test_resonant_spectrum_raises():
    with pytest.raises(RuntimeError):
        tentacle.orbits(np.eye(4), 1.0)


def circle_state(n):
    v = np.zeros((n, 4))
    phases = 2.0 * math.pi * np.arange(n) / n
    v[:, 0] = np.cos(phases)
    v[:, 2] = -np.sin(phases)
    return v, n * math.sin(2.0 * math.pi / n)


def test_discrete_calculus_at_the_circle():
    v, eta = circle_state(64)
    action = tentacle.discrete_action(hex_matrix(), 0.5, eta, v)
    assert action == pytest.approx(0.5 * 64 * math.sin(2.0 * math.pi / 64), abs=1e-12)

    dv, deta = tentacle.discrete_gradient(hex_matrix(), 0.5, eta, v)
    assert np.max(np.abs(dv)) < 1e-12
    assert abs(deta) < 1e-12

    # Kernel has 3 directions: the phase mode plus the aliased pair at
    # wavenumber N/2 - 1, which shares the central-difference symbol of k = 1.
    spec = tentacle.hessian_spectrum(hex_matrix(), 0.5, eta, v, n_low=6)
    assert sum(1 for s in spec if abs(s) < 10.0 / 64**2) == 3


def test_flow_reports_convergence():
    v, eta = circle_state(64)
    ds = 0.5 / ((1.0 + 1.0) * 64)
    diag = tentacle.integrate_flow(hex_matrix(), 0.5, eta, v, s_max=1.0, ds=ds)
    assert diag["converged"] is True
    assert diag["limit"]["N"] == 64


def test_newton_refines_perturbed_circle():
    v, _ = circle_state(128)
    rng = np.random.default_rng(5)
    phases = 2.0 * math.pi * np.arange(128) / 128
    for i in range(4):
        v[:, i] += 1e-3 * rng.standard_normal() * np.cos(phases)
    result = tentacle.newton_refine(hex_matrix(), 0.5, 2.0 * math.pi, v)
    assert result["converged"] is True
    assert result["residual_norm"] < 1e-10
    assert result["eta"] == pytest.approx(128 * math.sin(2.0 * math.pi / 128), abs=1e-9)
