import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lsl.ambient import (AmbientSpace, AmbientVector, VectorField, connection_table, eval_eta,
                         eval_metric, eval_phi, phi_basis)
from lsl.errors import DomainError, StructuralError

coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def points(n):
    return arrays(np.float64, (2 * n + 1,), elements=coord)


# -- hand-computed oracles ---------------------------------------------------

def test_eta_on_reeb_is_one():
    sp = AmbientSpace(2)
    p = np.array([0.3, -1.2, 2.0, 0.7, 5.0])
    assert eval_eta(sp, AmbientVector(sp.reeb(), p)) == pytest.approx(1.0, abs=1e-15)


def test_eta_at_point_on_x_direction():
    # eta(d/dx1) = -y1/4 at p = (1, 2, 0, 0, 0)
    sp = AmbientSpace(2)
    v = AmbientVector([1, 0, 0, 0, 0], [1, 2, 0, 0, 0])
    assert eval_eta(sp, v) == pytest.approx(-0.5, abs=1e-15)


def test_metric_at_origin_is_quarter_euclidean_plus_eta_squared():
    sp = AmbientSpace(1)
    G = sp.metric_matrix(np.zeros(3))
    np.testing.assert_allclose(G, np.diag([0.25, 0.25, 0.25]), atol=1e-15)


def test_phi_of_x_direction():
    # Phi(d/dx1) = -d/dy1 + (x1/2) d/dz
    sp = AmbientSpace(1)
    w = eval_phi(sp, AmbientVector([1, 0, 0], [3.0, 1.0, 0.0]))
    np.testing.assert_allclose(w.components, [0.0, -1.0, 1.5], atol=1e-15)


def test_frame_at_origin():
    sp = AmbientSpace(2)
    E = sp.frame(np.zeros(5))
    np.testing.assert_allclose(E[0], [2, 0, 0, 0, 0])
    np.testing.assert_allclose(E[2], [0, -2, 0, 0, 0])
    np.testing.assert_allclose(E[4], [0, 0, 0, 0, 2])


def test_phi_basis_maps_e_i_to_e_n_plus_i():
    sp = AmbientSpace(2)
    p = np.array([0.4, -0.1, 1.3, 2.2, -0.5])
    basis = phi_basis(sp, p)
    for i in range(2):
        np.testing.assert_allclose(eval_phi(sp, basis[i]).components, basis[2 + i].components,
                                   atol=1e-14)


def test_bracket_of_frame_fields():
    # [E_1, Phi E_1] = E_1(x) dz - Phi E_1(y) dz = 4 dz = 2 xi
    sp = AmbientSpace(1)
    p = np.array([0.7, -0.3, 1.1])
    br = sp.lie_bracket(sp.frame_field(0), sp.frame_field(1), p)
    np.testing.assert_allclose(br, [0, 0, 4.0], atol=1e-9)


# -- structural errors ------------------------------------------------------

def test_unsupported_dimension():
    with pytest.raises(DomainError):
        AmbientSpace(3)


def test_wrong_length_vector():
    sp = AmbientSpace(2)
    with pytest.raises(StructuralError):
        eval_eta(sp, AmbientVector([1, 0, 0], [0, 0, 0]))


def test_vectors_at_different_points():
    sp = AmbientSpace(1)
    with pytest.raises(StructuralError):
        eval_metric(sp, AmbientVector([1, 0, 0], [0, 0, 0]), AmbientVector([1, 0, 0], [1, 0, 0]))


def test_phi_sectional_needs_horizontal_vector():
    sp = AmbientSpace(1)
    with pytest.raises(DomainError):
        sp.phi_sectional_curvature(np.zeros(3), sp.reeb())


# -- properties ---------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
@given(data=st.data())
def test_sasakian_axioms(n, data):
    p = data.draw(points(n))
    assert max(AmbientSpace(n).sasakian_residuals(p)) < 1e-12


@given(p=points(2), v=arrays(np.float64, (5,), elements=coord))
def test_metric_positive_definite(p, v):
    sp = AmbientSpace(2)
    assert np.all(np.linalg.eigvalsh(sp.metric_matrix(p)) > 0)
    if np.linalg.norm(v) > 1e-3:
        assert sp.metric(p, v, v) > 0


@given(p=points(2))
def test_frame_is_orthonormal(p):
    sp = AmbientSpace(2)
    E = sp.frame(p)
    gram = E @ sp.metric_matrix(p) @ E.T
    np.testing.assert_allclose(gram, np.eye(5), atol=1e-12)


@given(p=points(1), v=arrays(np.float64, (3,), elements=coord))
def test_phi_squared(p, v):
    sp = AmbientSpace(1)
    lhs = sp.phi(p, sp.phi(p, v))
    rhs = -v + sp.eta(p, v) * sp.reeb()
    np.testing.assert_allclose(lhs, rhs, atol=1e-11)


@given(p=points(1))
def test_connection_is_metric_and_torsion_free(p):
    sp = AmbientSpace(1)
    # polynomial test fields
    X = VectorField(lambda q: np.stack([q[..., 1] ** 2, 1 + q[..., 0], q[..., 2] * q[..., 0]], -1))
    Y = VectorField(lambda q: np.stack([np.sin(q[..., 2]), q[..., 0] * q[..., 1], 1.0 + 0 * q[..., 0]], -1))
    tors = (sp.covariant_derivative(X(p), Y, p) - sp.covariant_derivative(Y(p), X, p)
            - sp.lie_bracket(X, Y, p))
    assert np.max(np.abs(tors)) < 1e-6 * (1 + np.max(np.abs(p)) ** 2)


@given(p=points(2))
def test_reeb_field_is_killing_direction(p):
    # nabla_X xi = -Phi X for the Sasakian convention used here
    sp = AmbientSpace(2)
    xi = VectorField(lambda q: sp.reeb(q))
    for k in range(4):
        X = sp.frame(p)[k]
        np.testing.assert_allclose(sp.covariant_derivative(X, xi, p), -sp.phi(p, X), atol=1e-8)


@given(seed=st.integers(0, 2 ** 16), scale=st.floats(0.1, 10))
def test_phi_sectional_curvature_is_scale_invariant(seed, scale):
    sp = AmbientSpace(2)
    r = np.random.default_rng(seed)
    p = r.uniform(-3, 3, 5)
    X = r.normal(size=4) @ sp.frame(p)[:4]
    assert sp.phi_sectional_curvature(p, scale * X) == pytest.approx(-3.0, abs=1e-8)


def test_ricci_identity():
    sp = AmbientSpace(2)
    for p in np.random.default_rng(1).uniform(-2, 2, (5, 5)):
        assert sp.ricci_residual(p) < 1e-8


def test_perturbed_phi_breaks_the_axioms(monkeypatch):
    # a checker that cannot see a broken structure is useless
    sp = AmbientSpace(1)
    orig = AmbientSpace.phi_matrix

    def bent(self, p):
        M = orig(self, p).copy()
        M[..., 0, 0] += 1e-3
        return M

    monkeypatch.setattr(AmbientSpace, "phi_matrix", bent)
    r = sp.sasakian_residuals(np.array([0.2, 0.5, -1.0]))
    assert r[0] > 1e-4 and r[1] > 1e-4


# -- connection table ---------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2])
def test_connection_table_consistent_clauses(n):
    sp = AmbientSpace(n)
    for p in np.random.default_rng(n).uniform(-3, 3, (10, sp.dim)):
        for c in connection_table(sp, p):
            if not c.reversed_reeb:
                assert c.residual < 1e-12, c


def test_reeb_derivative_of_frame_equals_frame_derivative_of_reeb():
    # [E_i, xi] = 0 and torsion-freeness force nabla_xi E_i = nabla_{E_i} xi
    sp = AmbientSpace(2)
    p = np.array([0.4, 1.0, -0.7, 0.2, 3.0])
    W = sp.frame_connection(p)
    np.testing.assert_allclose(sp.frame_brackets(p)[:4, 4], 0.0, atol=1e-12)
    np.testing.assert_allclose(W[4, :4], W[:4, 4], atol=1e-12)


def test_table_lists_eleven_identities_for_n2():
    clauses = connection_table(AmbientSpace(2), np.zeros(5))
    assert len({c.identity for c in clauses}) == 11
    # the nabla_xi E_i halves miss by exactly 2
    rev = [c.residual for c in clauses if c.reversed_reeb]
    assert len(rev) == 4
    np.testing.assert_allclose(rev, 2.0, atol=1e-12)
