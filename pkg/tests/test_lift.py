import numpy as np
import pytest
from hypothesis import given, strategies as st

from lsl import lift
from lsl.errors import DomainError, LiftRefusedError
from lsl.models import clifford_pair, model_psi


def circle(r):
    return lift.LagrangianChart(
        func=lambda u: r * np.stack([np.cos(u[..., 0]), np.sin(u[..., 0])], -1),
        dim=1, domain=((0.0, 2 * np.pi),), periodic=(True,), name="circle")


def gerono():
    # figure eight (sin t, sin t cos t); double point at t = 0 and t = pi
    return lift.LagrangianChart(
        func=lambda u: np.stack([np.sin(u[..., 0]), np.sin(u[..., 0]) * np.cos(u[..., 0])], -1),
        dim=1, domain=((0.0, 2 * np.pi),), periodic=(True,), name="figure-eight")


@given(r=st.floats(0.1, 5.0))
def test_circle_holonomy_is_minus_pi_r_squared(r):
    assert lift.loop_holonomy(circle(r)) == pytest.approx(-np.pi * r * r, rel=1e-12)


def test_circle_lift_quantization():
    res = lift.with_holonomies(lift.lift_chart(circle(2.0), shape=(64,)), circle(2.0))
    assert res.global_lift is True
    res = lift.with_holonomies(lift.lift_chart(circle(1.0), shape=(64,)), circle(1.0))
    assert res.global_lift is False


def test_figure_eight_lobe_integral():
    # half of int_0^pi sin^3 t dt = 2/3; the two lobes cancel around the loop
    f = gerono()
    assert lift.loop_holonomy(f) == pytest.approx(0.0, abs=1e-12)
    [(val, separated)] = lift.embedding_obstruction(f, [((0.0,), (np.pi,))])
    assert val == pytest.approx(2.0 / 3.0, abs=1e-6)
    assert separated


def test_embedding_obstruction_needs_a_double_point():
    with pytest.raises(DomainError):
        lift.embedding_obstruction(gerono(), [((0.0,), (1.0,))])


def test_clifford_lift_is_exact():
    F, _ = clifford_pair()
    f = lift.project(F)
    res = lift.lift_chart(f, basepoint=(0.0, 0.0), shape=(32, 32))
    np.testing.assert_allclose(res.z, -2 * (res.u[..., 0] + res.u[..., 1]), atol=1e-12)
    assert res.z[0, 0] == 0.0
    assert res.closure_residual < 1e-12
    for d in (0, 1):
        assert lift.loop_holonomy(f, d) == pytest.approx(-4 * np.pi, abs=1e-12)
    assert lift.loop_holonomy(f, 0, loops=2) == pytest.approx(-8 * np.pi, abs=1e-11)
    res = lift.with_holonomies(res, f)
    assert res.global_lift is True


def test_basepoint_shift_changes_height_by_a_constant():
    F, _ = clifford_pair()
    f = lift.project(F)
    a = lift.lift_chart(f, basepoint=(0.0, 0.0), shape=(16, 16))
    b = lift.lift_chart(f, basepoint=(a.u[3, 5, 0], a.u[3, 5, 1]), shape=(16, 16))
    d = b.z - a.z
    np.testing.assert_allclose(d, d[0, 0], atol=1e-12)
    assert b.z[3, 5] == 0.0


def test_grid_lift_converges_to_chart_lift():
    F, _ = clifford_pair()
    errs = []
    for m in (33, 65):
        u = F.grid((m, m))
        grid = lift.LagrangianGrid(u, F(u)[..., :4], periodic=(True, True))
        res = lift.lift_chart(grid)
        errs.append(np.max(np.abs(res.z + 2 * (u[..., 0] + u[..., 1]))))
        assert lift.grid_holonomy(grid, 0) == pytest.approx(-4 * np.pi, rel=1e-2)
    assert errs[1] < errs[0] / 3.5


def test_non_lagrangian_surface_is_refused():
    f = lift.LagrangianChart(func=lambda u: np.stack([u[..., 0], u[..., 1], 0 * u[..., 0],
                                                      0 * u[..., 0]], -1),
                             dim=2, domain=((0, 1), (0, 1)))
    with pytest.raises(LiftRefusedError):
        lift.lift_chart(f, shape=(8, 8))


def test_lagrangian_plane_lifts_to_zero_height():
    f = lift.LagrangianChart(func=lambda u: np.stack([u[..., 0], 0 * u[..., 0], u[..., 1],
                                                      0 * u[..., 0]], -1),
                             dim=2, domain=((0, 1), (0, 1)))
    res = lift.lift_chart(f, shape=(8, 8))
    np.testing.assert_allclose(res.z, 0.0, atol=1e-15)


def test_projection_refuses_non_legendrian_chart():
    with pytest.raises(LiftRefusedError):
        lift.project(model_psi(variant="sin-sin"))


def test_lift_exports():
    F, _ = clifford_pair()
    res = lift.with_holonomies(lift.lift_chart(lift.project(F), shape=(4, 4)), lift.project(F))
    assert res.to_csv().splitlines()[0] == "u,v,z"
    assert '"global_lift": true' in res.to_json()


@given(k=st.integers(-5, 5), eps=st.floats(1e-3, 1.0))
def test_is_quantized(k, eps):
    assert lift.is_quantized(2 * np.pi * k)
    assert not lift.is_quantized(2 * np.pi * k + eps)
