import dataclasses
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lsl import family
from lsl.errors import DomainError, ParameterError
from lsl.immersion import sample_grid

BASE = family.FamilyConfig(lambda1=0.7, lambda2=0.9, C=1.2, alpha=-1.0, alpha1=1.0, alpha2=2.0,
                           phi1=0.3, phi2=0.1, theta0=0.2, s_range=(0.0, 3.0))


@settings(max_examples=12)
@given(seed=st.integers(0, 10_000), case=st.sampled_from(["i", "ii"]))
def test_first_integral_and_constants(seed, case):
    cfg = family.random_config(np.random.default_rng(seed), case, length=2.0)
    t = family.integrate(cfg)
    assert t.first_integral_drift() < 1e-8
    assert t.radius_residual() < 1e-10
    assert t.angle_height_drift() < 1e-10
    assert t.product_residual() < 1e-10


def test_negative_exponent_is_not_conserved():
    t = family.integrate(BASE)
    p = family.first_integral_negative_exponent(t.states, BASE)
    assert np.max(np.abs(p - p[0])) > 1e-2
    assert t.first_integral_drift() < 1e-10


def test_complex_equations_hold():
    assert family.w_derivative_residual(family.integrate(BASE)) < 1e-8


def test_fixed_step_rk4_is_fourth_order():
    drifts = [family.integrate(dataclasses.replace(BASE, tol=None, h0=h)).first_integral_drift()
              for h in (0.1, 0.05)]
    assert 12 < drifts[0] / drifts[1] < 20


def test_initial_height_matches_angle():
    assert BASE.initial_z == pytest.approx(2 * BASE.theta0 / BASE.alpha)
    np.testing.assert_allclose(BASE.initial_state()[5:], [1.0, np.sqrt(2.0)])


def test_surface_is_a_shrinker():
    t = family.integrate(dataclasses.replace(BASE, s_range=(0.0, 2.0)))
    ch = family.assemble_surface(t)
    rep = sample_grid(ch, alpha=BASE.alpha, shape=(12, 12))
    assert np.nanmax(rep.legendrian_residual) < 1e-8
    assert np.nanmax(rep.shrinker_residual) < 1e-4


def test_run_stops_at_the_radius_boundary():
    cfg = family.FamilyConfig(1.0, -2.0, 1.0, -1.0, s_range=(0.0, 50.0))
    t = family.integrate(cfg)
    assert t.terminated
    assert "nonpositive" in t.message
    assert t.last_s < 50.0
    assert t.first_integral_drift() < 1e-8


@pytest.mark.parametrize("kw", [dict(lambda1=0.0), dict(C=-1.0), dict(alpha=0.0),
                                dict(alpha1=-1.0), dict(s_range=(1.0, 0.0)),
                                dict(lambda1=-1.0)])
def test_config_validation(kw):
    with pytest.raises(ParameterError):
        dataclasses.replace(BASE, **kw)


def test_inconsistent_height_warns():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        dataclasses.replace(BASE, z0=5.0)
    assert any("shrinker" in str(x.message) for x in w)


def test_state_derivative_outside_domain():
    state = BASE.initial_state()
    state[0] = -10.0
    with pytest.raises(DomainError):
        family.state_derivative(state, BASE)


def test_trajectory_csv():
    t = family.integrate(dataclasses.replace(BASE, s_range=(0.0, 0.1)))
    lines = t.to_csv().splitlines()
    assert lines[0] == "s,u,phi1,phi2,theta_tilde,z,A"
    assert len(lines) == len(t.s) + 1
