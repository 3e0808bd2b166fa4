import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsl.ambient import AmbientSpace
from lsl.errors import DomainError
from lsl.immersion import (ImmersionChart, geometry, grid_laplacian, jet, legendrian_residual,
                           mean_curvature, sample_grid, second_fundamental_norm,
                           second_fundamental_norm_transverse, shrinker_residual, unwrap_grid)
from lsl.models import clifford_pair, model_torus


def line_chart(direction):
    d = np.asarray(direction, float)
    return ImmersionChart(func=lambda u: u[..., :1] * d, dim=1, domain=((-1.0, 1.0),),
                          space=AmbientSpace(1), name="line")


def test_horizontal_line_through_origin_is_legendrian_geodesic():
    ch = line_chart([1.0, 0.0, 0.0])
    u = np.linspace(-1, 1, 9)[:, None]
    assert np.max(legendrian_residual(ch, u)) < 1e-15
    assert np.max(np.abs(mean_curvature(ch, u))) < 1e-8


def test_vertical_line_is_not_legendrian():
    ch = line_chart([0.0, 0.0, 1.0])
    u = np.linspace(-1, 1, 5)[:, None]
    np.testing.assert_allclose(legendrian_residual(ch, u), 1.0, atol=1e-14)


def test_numeric_jet_matches_analytic():
    ch = model_torus()
    u = ch.grid((6, 6)).reshape(-1, 2)
    a, b = jet(ch, u), jet(ch.numeric(1e-3), u)
    np.testing.assert_allclose(b.dF, a.dF, atol=1e-9)
    np.testing.assert_allclose(b.d2F, a.d2F, atol=1e-6)


def test_jet_rejects_wrong_parameter_size():
    with pytest.raises(DomainError):
        jet(model_torus(), np.zeros(3))


def test_jet_refuses_excluded_points():
    ch = ImmersionChart(func=lambda u: np.stack([u[..., 0], 0 * u[..., 0], 0 * u[..., 0]], -1),
                        dim=1, domain=((-1.0, 1.0),), space=AmbientSpace(1),
                        exclusions=(lambda u: np.abs(u[..., 0]),))
    with pytest.raises(DomainError):
        jet(ch, np.array([0.01]))


def test_chart_dimension_must_match_space():
    with pytest.raises(DomainError):
        ImmersionChart(func=lambda u: u, dim=1, domain=((0, 1),), space=AmbientSpace(2))


def test_clifford_second_fundamental_form():
    F, _ = clifford_pair()
    u = F.grid((8, 8)).reshape(-1, 2)
    np.testing.assert_allclose(second_fundamental_norm(F, u), 2.0, atol=1e-10)
    np.testing.assert_allclose(second_fundamental_norm_transverse(F, u), 2.0, atol=1e-10)


def test_angle_relation_holds_on_torus():
    rep = sample_grid(model_torus(), alpha=-1.0, shape=(12, 12))
    assert np.nanmax(rep.angle_residual) < 1e-8


def test_shrinker_sign_matters():
    F, _ = clifford_pair()
    u = F.grid((10, 10))
    good, _ = shrinker_residual(F, u, -1.0)
    bad, _ = shrinker_residual(F, u, 1.0)
    assert np.max(good) < 1e-10
    assert np.min(bad) > 0.1
    with pytest.raises(DomainError):
        shrinker_residual(F, u, 0.0)


def test_geometry_tangent_frame_is_orthonormal():
    ch = model_torus()
    s = geometry(ch, ch.grid((5, 5)).reshape(-1, 2))
    gram = np.einsum("nad,nde,nbe->nab", s.frame, s.metric_at_F, s.frame)
    np.testing.assert_allclose(gram, np.broadcast_to(np.eye(2), gram.shape), atol=1e-12)


# -- discrete Laplacian ---------------------------------------------------------

def _flat_grid(m=21):
    t = np.linspace(-1, 1, m)
    U, V = np.meshgrid(t, t, indexing="ij")
    G = np.broadcast_to(np.eye(2), (m, m, 2, 2)).copy()
    return U, V, G, (t[1] - t[0], t[1] - t[0])


def test_laplacian_of_quadratic_on_flat_grid():
    U, V, G, h = _flat_grid()
    lap = grid_laplacian(U ** 2 + V ** 2, G, h)
    inner = lap[2:-2, 2:-2]
    np.testing.assert_allclose(inner, 4.0, atol=1e-10)
    assert np.isnan(lap[0, 0])


@given(a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(-3, 3))
def test_laplacian_of_affine_function_vanishes(a, b, c):
    U, V, G, h = _flat_grid(11)
    lap = grid_laplacian(a * U + b * V + c, G, h)
    assert np.nanmax(np.abs(lap)) < 1e-9


def test_laplacian_of_log_radius_in_polar_coordinates():
    r = np.linspace(1.0, 2.0, 81)
    t = np.linspace(0, 1, 41)
    R, _ = np.meshgrid(r, t, indexing="ij")
    G = np.zeros(R.shape + (2, 2))
    G[..., 0, 0] = 1.0
    G[..., 1, 1] = R ** 2
    lap = grid_laplacian(np.log(R), G, (r[1] - r[0], t[1] - t[0]))
    assert np.nanmax(np.abs(lap)) < 1e-3


# -- unwrapping and export ------------------------------------------------------

@given(shift=st.floats(-10, 10), slope=st.floats(-1.0, 1.0))
def test_unwrap_grid_recovers_smooth_angle(shift, slope):
    t = np.linspace(0, 6, 30)
    U, V = np.meshgrid(t, t, indexing="ij")
    exact = shift + slope * U + 0.8 * V
    wrapped = np.angle(np.exp(1j * exact))
    out = unwrap_grid(wrapped)
    diff = out - exact
    np.testing.assert_allclose(diff, diff[0, 0], atol=1e-9)
    assert abs(diff[0, 0] / (2 * np.pi) - np.round(diff[0, 0] / (2 * np.pi))) < 1e-9


def test_unwrap_skips_nan():
    th = np.array([0.1, np.nan, 3.1, -3.1, -3.0])
    out = unwrap_grid(th)
    assert np.isnan(out[1])
    assert out[3] > 3.0


def test_grid_report_exports():
    rep = sample_grid(model_torus(), alpha=-1.0, shape=(8, 8))
    lines = rep.to_csv().splitlines()
    assert lines[0].startswith("u,v,theta")
    assert len(lines) == 65
    s = json.loads(rep.to_json())
    assert s["valid_points"] == 64
    assert s["shrinker_residual"]["max"] < 1e-10
