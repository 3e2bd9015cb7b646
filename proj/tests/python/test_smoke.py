import math

import numpy as np
import pytest

import liegeo


def test_builtins_construct():
    assert liegeo.builtin_models() == ["heisenberg", "hyperbolic", "so3", "sh2", "se2"]
    m = liegeo.build_model("so3", a=1.0, b=2.0)
    assert (m.dim, m.rank, m.rep_dim) == (3, 2, 3)
    assert m.filtration == [2, 3]
    assert m.bracket([1, 0, 0], [0, 1, 0])[2] == pytest.approx(2.0)


def test_heisenberg_geodesic_matches_closed_form():
    m = liegeo.build_model("heisenberg")
    xi, beta = 0.4, 1.0
    tr = liegeo.integrate_costate(m, liegeo.angle_costate(xi, beta), T=2 * math.pi, step=1e-3)
    assert tr.g.shape == (len(tr), 3, 3)
    assert tr.psi.shape == (len(tr), 3)
    assert tr.u.shape == (len(tr), 2)
    end = liegeo.heisenberg_tilde(tr.g[-1])
    assert np.allclose(end, [0.0, 0.0, math.pi], atol=1e-9)
    mid = liegeo.heisenberg_tilde(tr.g[1000])
    assert np.allclose(mid, liegeo.heisenberg_closed_form(xi, beta, tr.t[1000]), atol=1e-10)
    assert tr.max_speed_deviation < 1e-12


def test_field_route_agrees():
    m = liegeo.build_model("se2")
    psi0 = liegeo.angle_costate(1.0, 0.3)
    a = liegeo.integrate_costate(m, psi0, T=2.0)
    b = liegeo.integrate_field(m, psi0, T=2.0)
    assert liegeo.compare_methods(a, b) < 1e-9
    assert b.method == "field"


def test_errors_surface_as_exceptions():
    m = liegeo.build_model("heisenberg")
    with pytest.raises(liegeo.LiegeoError, match="unnormalized"):
        liegeo.integrate_costate(m, [2.0, 0.0, 0.0], T=1.0)
    with pytest.raises(ValueError):
        liegeo.build_model("nosuch")


def test_distance_and_pendulum():
    assert liegeo.hyperbolic_distance([0, 1], [0, math.e]) == pytest.approx(1.0, abs=1e-14)
    m = liegeo.build_model("sh2")
    tr = liegeo.integrate_costate(m, liegeo.angle_costate(0.3, 0.7), T=10.0)
    red = liegeo.pendulum(tr, alpha=0.3, beta=0.7)
    assert red["max_residual"] < 1e-4
    assert len(red["angle"]) == len(tr)


def test_steer_and_simulate():
    m = liegeo.build_model("heisenberg")
    target = liegeo.phi(m, [0.1, -0.2, 0.3])
    res = liegeo.steer(m, target)
    assert res["converged"]
    end = liegeo.simulate_schedule(m, res["schedule"])
    assert np.max(np.abs(end - target)) < 1e-6
    assert np.allclose(liegeo.phi_inverse_local(m, target), [0.1, -0.2, 0.3], atol=1e-8)
