import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsl import models
from lsl.errors import ParameterError
from lsl.immersion import geometry, jet, legendrian_residual, sample_grid, shrinker_residual


def interior(chart, m=12):
    u = chart.grid((m, m))
    return u[~chart.excluded(u)]


def test_torus_at_origin():
    F = models.model_torus(-0.125)
    np.testing.assert_allclose(F(np.array([0.0, 0.0])), [2, 0, 2, 0, 0], atol=1e-15)
    np.testing.assert_allclose(F(np.array([np.pi / 2, 0.0])), [0, 2, 2, 0, -np.pi], atol=1e-14)


def test_torus_matches_clifford_chart():
    F, _ = models.clifford_pair()
    T = models.model_torus(-0.125)
    u = F.grid((16, 16))
    np.testing.assert_allclose(T(u), F(u), atol=1e-12)
    np.testing.assert_allclose(F(u)[..., 4], -2 * (u[..., 0] + u[..., 1]), atol=1e-12)


def test_clifford_cone_section_on_sphere():
    _, Fbar = models.clifford_pair()
    u = Fbar.grid((9, 9))
    np.testing.assert_allclose(np.sum(Fbar(u) ** 2, -1), 3.0, atol=1e-13)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_legendrian_psi_is_conformal(nu):
    ch = models.model_psi(nu=nu)
    s = geometry(ch, interior(ch, 8))
    g = s.induced_metric
    np.testing.assert_allclose(g[..., 0, 0], g[..., 1, 1], rtol=1e-12)
    np.testing.assert_allclose(g[..., 0, 1], 0.0, atol=1e-12)


def test_other_variants_fail_the_contact_condition():
    for ch in (models.model_psi(variant="sin-sin"), models.model_upsilon(variant="sin-phase"),
               models.model_upsilon(variant="linear-phase")):
        assert np.max(legendrian_residual(ch, interior(ch))) > 1e-2


@pytest.mark.parametrize("gamma", [0.3, np.pi / 4, 1.2])
def test_legendrian_upsilon_is_a_shrinker(gamma):
    ch = models.model_upsilon(gamma=gamma, variant="legendrian")
    u = interior(ch)
    assert np.max(legendrian_residual(ch, u)) < 1e-10
    rep = sample_grid(ch, alpha=-1.0, shape=(16, 16))
    assert np.nanmax(rep.shrinker_residual) < 1e-9


@given(a=st.floats(-2.0, -0.02), C=st.floats(-5, 5))
def test_cylinder_and_torus_are_shrinkers_for_any_scale(a, C):
    for ch in (models.model_cylinder(a, C), models.model_torus(a, C)):
        u = ch.grid((6, 6))
        assert np.max(legendrian_residual(ch, u)) < 1e-10
        res, _ = shrinker_residual(ch, u, 8 * a)
        assert np.max(res) < 1e-9 * max(1.0, 1 / np.sqrt(-a))


@pytest.mark.parametrize("bad", [dict(a=0.1), dict(gamma=0.0), dict(nu=-1.0), dict(B=0.0)])
def test_model_params_validation(bad):
    with pytest.raises(ParameterError):
        models.ModelParams(**bad)


def test_model_constructors_reject_bad_parameters():
    with pytest.raises(ParameterError):
        models.model_torus(a=0.0)
    with pytest.raises(ParameterError):
        models.model_psi(variant="nope")
    with pytest.raises(ParameterError):
        models.model_upsilon(gamma=2.0)


# -- curve model ----------------------------------------------------------------

def test_al_fixed_point_is_a_helix():
    c = models.abresch_langer_curve(1.0, 1.0, 0.0, 0.0, (0.0, 2 * np.pi))
    np.testing.assert_allclose(c.states[:, 0], 1.0, atol=1e-14)
    np.testing.assert_allclose(c.states[-1, 2], 2 * np.pi, atol=1e-12)
    assert c.conserved_drift() == 0.0


def test_al_conserved_quantity_formula():
    assert models.al_conserved(2.0, [1.0, 0.0]) == pytest.approx(-0.5)
    assert models.al_conserved(1.0, [np.e, 1.0]) == pytest.approx(1 - (np.e ** 2 + 1) / 2)


@given(B=st.floats(0.5, 2.0), frac=st.floats(0.3, 0.9))
def test_al_curve_is_a_legendrian_shrinker(B, frac):
    c = models.abresch_langer_curve(B, frac * np.sqrt(B), 0.0, 0.0, (0.0, 4.0), n_steps=4000)
    u = np.linspace(0.0, 4.0, 81)[:, None]
    assert np.max(legendrian_residual(c.chart, u)) < 1e-12
    res, _ = shrinker_residual(c.chart, u, -4.0 / B)
    assert np.max(res) < 1e-9
    assert c.conserved_drift() < 1e-8


def test_al_curve_derivatives_match_finite_differences():
    c = models.abresch_langer_curve(1.0, 0.6, 0.1, 0.3, (0.0, 5.0))
    u = np.linspace(0.5, 4.5, 7)[:, None]
    a, b = jet(c.chart, u), jet(c.chart.numeric(1e-3), u)
    np.testing.assert_allclose(b.dF, a.dF, atol=1e-8)


def test_closed_orbit_turns_by_two_thirds():
    x0 = models.closed_al_x0(1.0)
    T, turn = models.al_angle_increment(1.0, x0)
    assert turn == pytest.approx(4 * np.pi / 3, abs=1e-10)
    c = models.abresch_langer_curve(1.0, x0, 0.0, 0.0, (0.0, 3 * T), n_steps=6000)
    p0, p1 = c.chart(np.array([[0.0], [3 * T]]))
    np.testing.assert_allclose(p1[:2], p0[:2], atol=1e-8)


def test_al_rejects_bad_input():
    with pytest.raises(ParameterError):
        models.abresch_langer_curve(B=-1.0)
    with pytest.raises(ParameterError):
        models.abresch_langer_curve(x0=0.0)
    with pytest.raises(ParameterError):
        models.abresch_langer_curve(t_range=(1.0, 1.0))
