"""Sasakian structure of the contact Euclidean space R^(2n+1).

Coordinates are ordered ``(x1, y1, ..., xn, yn, z)``.  The structure is

    eta = dz/2 - (1/4) sum_i (y_i dx_i - x_i dy_i)
    g   = eta (x) eta + (1/4) sum_i (dx_i^2 + dy_i^2)
    xi  = 2 d/dz
    Phi(d/dx_i) = -d/dy_i + (x_i/2) d/dz,   Phi(d/dy_i) = d/dx_i + (y_i/2) d/dz

Every tensor here has polynomial coefficients of degree <= 2, so all first
derivatives are available in closed form and the Christoffel symbols, the
Sasakian axioms and the frame connection table are evaluated without any
differentiation error.  Only user supplied vector fields fall back to finite
differences.

All array routines broadcast over leading axes: a point has shape ``(..., d)``
with ``d = 2n + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import DomainError, NumericalDerivativeError, StructuralError

ArrayLike = Union[np.ndarray, float]

#: default step for 4th-order central differences of generic vector fields
FD_STEP = 1e-4


def fd_jacobian(func: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                h: float = FD_STEP) -> np.ndarray:
    """4th-order central-difference Jacobian ``J[a, c] = d f_a / d p_c``."""
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    cols = []
    for c in range(d):
        step = np.zeros(d)
        step[c] = h
        df = (-np.asarray(func(p + 2 * step)) + 8 * np.asarray(func(p + step))
              - 8 * np.asarray(func(p - step)) + np.asarray(func(p - 2 * step))) / (12 * h)
        cols.append(df)
    jac = np.stack(cols, axis=-1)
    if not np.all(np.isfinite(jac)):
        raise NumericalDerivativeError("finite-difference Jacobian is not finite")
    return jac


@dataclass(frozen=True)
class VectorField:
    """A vector field ``p -> V(p)`` with an optional closed-form Jacobian.

    ``jacobian(p)[a, c]`` is ``dV_a/dp_c``.  Without one, ``covariant_derivative``
    differentiates ``func`` numerically.
    """

    func: Callable[[np.ndarray], np.ndarray]
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, p):
        return np.asarray(self.func(np.asarray(p, dtype=float)), dtype=float)

    def jac(self, p, h: float = FD_STEP) -> np.ndarray:
        if self.jacobian is not None:
            return np.asarray(self.jacobian(np.asarray(p, dtype=float)), dtype=float)
        return fd_jacobian(self.func, p, h)


@dataclass(frozen=True)
class AmbientSpace:
    """The contact Euclidean space R^(2n+1) with its Sasakian structure.

    Parameters
    ----------
    n : int
        Transverse complex dimension, 1 or 2.
    """

    n: int = 2

    def __post_init__(self):
        if self.n not in (1, 2):
            raise DomainError(f"only n in {{1, 2}} is supported, got n={self.n}")

    # -- indexing -------------------------------------------------------
    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @property
    def z_index(self) -> int:
        return 2 * self.n

    def x_index(self, i: int) -> int:
        return 2 * i

    def y_index(self, i: int) -> int:
        return 2 * i + 1

    def check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1:] != (self.dim,):
            raise StructuralError(
                f"expected trailing dimension {self.dim}, got shape {p.shape}")
        return p

    # -- contact form -----------------------------------------------------
    def eta_covector(self, p) -> np.ndarray:
        """Coefficients of eta in the coordinate coframe, shape ``(..., d)``."""
        p = self.check_point(p)
        out = np.zeros_like(p)
        for i in range(self.n):
            xi_, yi_ = self.x_index(i), self.y_index(i)
            out[..., xi_] = -p[..., yi_] / 4
            out[..., yi_] = p[..., xi_] / 4
        out[..., self.z_index] = 0.5
        return out

    def eta_gradient(self) -> np.ndarray:
        """Constant matrix ``D[c, a] = d eta_a / d p_c``."""
        d = self.dim
        D = np.zeros((d, d))
        for i in range(self.n):
            xi_, yi_ = self.x_index(i), self.y_index(i)
            D[yi_, xi_] = -0.25
            D[xi_, yi_] = 0.25
        return D

    def eta(self, p, v) -> np.ndarray:
        v = self.check_point(v)
        return np.einsum("...a,...a->...", self.eta_covector(p), v)

    def d_eta_matrix(self) -> np.ndarray:
        """``d eta(d_a, d_b) = d_a eta_b - d_b eta_a`` (constant)."""
        D = self.eta_gradient()
        return D - D.T

    # -- metric -----------------------------------------------------------
    def transverse_matrix(self) -> np.ndarray:
        T = np.eye(self.dim) / 4
        T[self.z_index, self.z_index] = 0.0
        return T

    def metric_matrix(self, p) -> np.ndarray:
        e = self.eta_covector(p)
        return e[..., :, None] * e[..., None, :] + self.transverse_matrix()

    def metric(self, p, v, w) -> np.ndarray:
        G = self.metric_matrix(p)
        return np.einsum("...a,...ab,...b->...", np.asarray(v, float), G,
                         np.asarray(w, float))

    def transverse_metric(self, v, w) -> np.ndarray:
        """The transverse part ``g^T = (1/4) sum (dx^2 + dy^2)``."""
        return np.einsum("...a,ab,...b->...", np.asarray(v, float),
                         self.transverse_matrix(), np.asarray(w, float))

    def norm(self, p, v) -> np.ndarray:
        return np.sqrt(np.maximum(self.metric(p, v, v), 0.0))

    # -- Phi, Reeb field, frame --------------------------------------------
    def phi_matrix(self, p) -> np.ndarray:
        """Matrix ``M`` with ``Phi(v) = M v``; columns are images of d/dp_a."""
        p = self.check_point(p)
        M = np.zeros(p.shape + (self.dim,))
        zi = self.z_index
        for i in range(self.n):
            xi_, yi_ = self.x_index(i), self.y_index(i)
            M[..., yi_, xi_] = -1.0
            M[..., zi, xi_] = p[..., xi_] / 2
            M[..., xi_, yi_] = 1.0
            M[..., zi, yi_] = p[..., yi_] / 2
        return M

    def phi_jacobian(self, p) -> np.ndarray:
        """``dM[a, b, c] = d M[a, b] / d p_c`` at ``p``."""
        p = self.check_point(p)
        d = self.dim
        dM = np.zeros(p.shape[:-1] + (d, d, d))
        zi = self.z_index
        for i in range(self.n):
            xi_, yi_ = self.x_index(i), self.y_index(i)
            dM[..., zi, xi_, xi_] = 0.5
            dM[..., zi, yi_, yi_] = 0.5
        return dM

    def phi(self, p, v) -> np.ndarray:
        return np.einsum("...ab,...b->...a", self.phi_matrix(p), np.asarray(v, float))

    def reeb(self, p=None) -> np.ndarray:
        xi = np.zeros(self.dim)
        xi[self.z_index] = 2.0
        if p is None:
            return xi
        p = self.check_point(p)
        return np.broadcast_to(xi, p.shape).copy()

    def frame(self, p) -> np.ndarray:
        """Adapted frame ``(E_1, ..., E_2n, xi)`` as rows, shape ``(..., d, d)``.

        ``E_i = 2 d/dx_i + y_i d/dz`` and ``E_{n+i} = -2 d/dy_i + x_i d/dz``.
        """
        p = self.check_point(p)
        d, zi = self.dim, self.z_index
        E = np.zeros(p.shape[:-1] + (d, d))
        for i in range(self.n):
            xi_, yi_ = self.x_index(i), self.y_index(i)
            E[..., i, xi_] = 2.0
            E[..., i, zi] = p[..., yi_]
            E[..., self.n + i, yi_] = -2.0
            E[..., self.n + i, zi] = p[..., xi_]
        E[..., 2 * self.n, zi] = 2.0
        return E

    def frame_jacobian(self) -> np.ndarray:
        """``DE[k, a, c] = d (E_k)_a / d p_c`` (constant)."""
        d, zi = self.dim, self.z_index
        DE = np.zeros((d, d, d))
        for i in range(self.n):
            DE[i, zi, self.y_index(i)] = 1.0
            DE[self.n + i, zi, self.x_index(i)] = 1.0
        return DE

    def frame_field(self, k: int) -> VectorField:
        DE = self.frame_jacobian()[k]
        return VectorField(lambda p: self.frame(p)[..., k, :],
                           lambda p: np.broadcast_to(DE, np.shape(p)[:-1] + DE.shape))

    def frame_coefficients(self, p, v) -> np.ndarray:
        """Components of ``v`` in the orthonormal frame at ``p``."""
        E = self.frame(p)
        G = self.metric_matrix(p)
        return np.einsum("...kb,...ab,...a->...k", E, G, np.asarray(v, float))

    # -- Levi-Civita connection ---------------------------------------------
    def christoffel(self, p) -> np.ndarray:
        """Christoffel symbols ``Gamma[k, i, j]`` of ``g`` at ``p``.

        The metric derivative is exact: ``d_c g_ab = D[c,a] eta_b + eta_a D[c,b]``.
        """
        e = self.eta_covector(p)
        D = self.eta_gradient()
        dg = (D[:, :, None] * e[..., None, None, :]
              + e[..., None, :, None] * D[:, None, :])       # dg[..., c, a, b]
        G = self.metric_matrix(p)
        Ginv = np.linalg.inv(G)
        # lower[l, i, j] = d_i g_jl + d_j g_il - d_l g_ij
        lower = (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg)
        return 0.5 * np.einsum("...kl,...lij->...kij", Ginv, lower)

    def connection_term(self, p, X, Y) -> np.ndarray:
        """``Gamma(X, Y)^k = Gamma[k, i, j] X^i Y^j``."""
        return np.einsum("...kij,...i,...j->...k", self.christoffel(p),
                         np.asarray(X, float), np.asarray(Y, float))

    def covariant_derivative(self, X, Y: VectorField, p, h: float = FD_STEP) -> np.ndarray:
        """Levi-Civita derivative ``(nabla_X Y)(p)``.

        ``X`` may be a vector at ``p`` or a VectorField; ``Y`` must be a field.
        """
        p = self.check_point(p)
        Xp = X(p) if callable(X) else np.asarray(X, float)
        if not isinstance(Y, VectorField):
            Y = VectorField(Y)
        DY = Y.jac(p, h)
        return np.einsum("...ac,...c->...a", DY, Xp) + self.connection_term(p, Xp, Y(p))

    def lie_bracket(self, X: VectorField, Y: VectorField, p, h: float = FD_STEP) -> np.ndarray:
        p = self.check_point(p)
        return (np.einsum("...ac,...c->...a", Y.jac(p, h), X(p))
                - np.einsum("...ac,...c->...a", X.jac(p, h), Y(p)))

    def frame_connection(self, p) -> np.ndarray:
        """``W[a, b, c] = g(nabla_{E_a} E_b, E_c)`` at ``p``."""
        p = self.check_point(p)
        E = self.frame(p)
        DE = self.frame_jacobian()
        Gam = self.christoffel(p)
        nab = (np.einsum("bxc,...ac->...abx", DE, E)
               + np.einsum("...kij,...ai,...bj->...abk", Gam, E, E))
        G = self.metric_matrix(p)
        return np.einsum("...abx,...xy,...cy->...abc", nab, G, E)

    def frame_brackets(self, p) -> np.ndarray:
        """``B[a, b, c] = g([E_a, E_b], E_c)`` from the closed-form Jacobians."""
        p = self.check_point(p)
        E = self.frame(p)
        DE = self.frame_jacobian()
        br = (np.einsum("bxc,...ac->...abx", DE, E)
              - np.einsum("axc,...bc->...abx", DE, E))
        G = self.metric_matrix(p)
        return np.einsum("...abx,...xy,...cy->...abc", br, G, E)

    # -- curvature -------------------------------------------------------
    def curvature_frame(self, p, h: float = FD_STEP) -> np.ndarray:
        """Frame components ``R[a, b, c, e]`` of ``R(E_a, E_b) E_c``.

        ``R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``.
        Derivatives of the connection coefficients along the frame are taken
        by central differences; for this space they vanish identically.
        """
        p = self.check_point(p)
        if p.ndim != 1:
            raise StructuralError("curvature_frame takes a single point")
        W = self.frame_connection(p)
        B = self.frame_brackets(p)
        E = self.frame(p)
        d = self.dim
        dW = np.empty((d, d, d, d))                     # dW[a] = E_a(W)
        for a in range(d):
            dW[a] = (self.frame_connection(p + h * E[a])
                     - self.frame_connection(p - h * E[a])) / (2 * h)
        # nabla_a (W[b,c,k] E_k) = E_a(W[b,c,k]) E_k + W[b,c,k] W[a,k,:]
        R = (dW - np.swapaxes(dW, 0, 1)
             + np.einsum("bck,ake->abce", W, W)
             - np.einsum("ack,bke->abce", W, W)
             - np.einsum("abk,kce->abce", B, W))
        return R

    def curvature(self, p, X, Y, Z) -> np.ndarray:
        """``R(X, Y) Z`` for vectors at ``p`` (constant frame coefficients)."""
        R = self.curvature_frame(p)
        x, y, z = (self.frame_coefficients(p, V) for V in (X, Y, Z))
        coeff = np.einsum("abce,a,b,c->e", R, x, y, z)
        return coeff @ self.frame(p)

    def sectional_curvature(self, p, X, Y) -> float:
        RXYY = self.curvature(p, X, Y, Y)
        num = self.metric(p, RXYY, X)
        den = (self.metric(p, X, X) * self.metric(p, Y, Y)
               - self.metric(p, X, Y) ** 2)
        if abs(den) < 1e-300:
            raise DomainError("X and Y are linearly dependent")
        return float(num / den)

    def phi_sectional_curvature(self, p, X, tol: float = 1e-10) -> float:
        """Sectional curvature of ``span(X, Phi X)`` for ``X`` orthogonal to xi."""
        p = self.check_point(p)
        X = np.asarray(X, float)
        nX = float(self.norm(p, X))
        if nX == 0.0:
            raise DomainError("X must be nonzero")
        if abs(float(self.eta(p, X))) > tol * nX:
            raise DomainError("X must be g-orthogonal to the Reeb field")
        return self.sectional_curvature(p, X, self.phi(p, X))

    def ricci_frame(self, p) -> np.ndarray:
        """``Ric(E_b, E_c) = sum_a g(R(E_a, E_b) E_c, E_a)``."""
        R = self.curvature_frame(p)
        return np.einsum("abca->bc", R)

    def ricci_residual(self, p) -> float:
        """Max-norm of ``Ric - (-2 g + (2n+2) eta (x) eta)`` on the frame."""
        Ric = self.ricci_frame(p)
        target = -2.0 * np.eye(self.dim)
        target[-1, -1] += 2 * self.n + 2
        return float(np.max(np.abs(Ric - target)))

    # -- Sasakian axioms ---------------------------------------------------
    def nijenhuis(self, p) -> np.ndarray:
        """``N[a, b, :] = N_Phi(d_a, d_b)`` on the coordinate basis."""
        M = self.phi_matrix(p)
        dM = self.phi_jacobian(p)
        # [Phi d_a, Phi d_b] = D(M e_b) M e_a - D(M e_a) M e_b
        t_pp = (np.einsum("...xbc,...ca->...abx", dM, M)
                - np.einsum("...xac,...cb->...abx", dM, M))
        # Phi [Phi d_a, d_b] = -M (d_b M)[:, a];  Phi [d_a, Phi d_b] = M (d_a M)[:, b]
        t_1 = -np.einsum("...xy,...yab->...abx", M, dM)
        t_2 = np.einsum("...xy,...yba->...abx", M, dM)
        # [d_a, d_b] = 0 so the Phi^2 term drops
        return t_pp - t_1 - t_2

    def sasakian_residuals(self, p) -> tuple:
        """Max-norm residuals of the four Sasakian axioms on the coordinate basis.

        Returns ``(r1, r2, r3, r4)`` for
        ``Phi^2 + I - xi (x) eta``, ``d eta / 2 - g(., Phi .)``,
        ``g - g(Phi ., Phi .) - eta (x) eta`` and ``N_Phi + d eta (x) xi``.
        """
        p = self.check_point(p)
        d = self.dim
        M = self.phi_matrix(p)
        e = self.eta_covector(p)
        G = self.metric_matrix(p)
        xi = self.reeb(p)
        dEta = self.d_eta_matrix()
        r1 = M @ M + np.eye(d) - xi[..., :, None] * e[..., None, :]
        r2 = 0.5 * dEta - G @ M
        r3 = G - np.swapaxes(M, -1, -2) @ G @ M - e[..., :, None] * e[..., None, :]
        r4 = self.nijenhuis(p) + dEta[..., :, :, None] * xi[..., None, None, :]

        def mx(a):
            return float(np.max(np.abs(a)))

        return mx(r1), mx(r2), mx(r3), mx(r4)


@dataclass(frozen=True)
class AmbientVector:
    """A tangent vector ``components`` based at ``basepoint``."""

    components: np.ndarray
    basepoint: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.components, dtype=float)
        b = np.asarray(self.basepoint, dtype=float)
        if c.shape != b.shape or c.ndim != 1:
            raise StructuralError("components and basepoint must be 1-d of equal length")
        object.__setattr__(self, "components", c)
        object.__setattr__(self, "basepoint", b)


def _check(space: AmbientSpace, *vs: AmbientVector):
    for v in vs:
        if v.components.shape != (space.dim,):
            raise StructuralError(
                f"vector has {v.components.shape[0]} components, space needs {space.dim}")
    if len(vs) == 2 and not np.array_equal(vs[0].basepoint, vs[1].basepoint):
        raise StructuralError("vectors live at different basepoints")


def eval_eta(space: AmbientSpace, v: AmbientVector) -> float:
    _check(space, v)
    return float(space.eta(v.basepoint, v.components))


def eval_metric(space: AmbientSpace, v: AmbientVector, w: AmbientVector) -> float:
    _check(space, v, w)
    return float(space.metric(v.basepoint, v.components, w.components))


def eval_phi(space: AmbientSpace, v: AmbientVector) -> AmbientVector:
    _check(space, v)
    return AmbientVector(space.phi(v.basepoint, v.components), v.basepoint)


def phi_basis(space: AmbientSpace, p) -> list:
    """The adapted frame ``(E_1, ..., E_2n, xi)`` at ``p`` as AmbientVectors."""
    p = space.check_point(p)
    return [AmbientVector(row, p) for row in space.frame(p)]


# ---------------------------------------------------------------------------
# Connection table of the adapted frame (named for n = 2; n = 1 keeps E1, E3, xi)

#: Eleven identities, each a list of clauses ``(X, Y, sign, target)`` meaning
#: ``nabla_X Y = sign * target``.  Clauses flagged ``True`` as the fifth entry
#: are the ``nabla_xi E_i`` halves.  In this table they carry the opposite sign
#: of ``nabla_{E_i} xi`` even though ``[E_i, xi] = 0``; the check reports them
#: separately rather than dropping them.
CONNECTION_TABLE = (
    ("nabla_Ei Ei = nabla_xi xi = 0",
     [("E1", "E1", 1, None), ("E2", "E2", 1, None), ("E3", "E3", 1, None),
      ("E4", "E4", 1, None), ("xi", "xi", 1, None)]),
    ("nabla_E1 E2 = nabla_E2 E1 = 0", [("E1", "E2", 1, None), ("E2", "E1", 1, None)]),
    ("nabla_E1 E3 = xi = -nabla_E3 E1", [("E1", "E3", 1, "xi"), ("E3", "E1", -1, "xi")]),
    ("nabla_E1 E4 = nabla_E4 E1 = 0", [("E1", "E4", 1, None), ("E4", "E1", 1, None)]),
    ("nabla_E1 xi = -E3 = -nabla_xi E1", [("E1", "xi", -1, "E3"), ("xi", "E1", 1, "E3", True)]),
    ("nabla_E2 E3 = nabla_E3 E2 = 0", [("E2", "E3", 1, None), ("E3", "E2", 1, None)]),
    ("nabla_E2 E4 = xi = -nabla_E4 E2", [("E2", "E4", 1, "xi"), ("E4", "E2", -1, "xi")]),
    ("nabla_E2 xi = -E4 = -nabla_xi E2", [("E2", "xi", -1, "E4"), ("xi", "E2", 1, "E4", True)]),
    ("nabla_E3 E4 = nabla_E4 E3 = 0", [("E3", "E4", 1, None), ("E4", "E3", 1, None)]),
    ("nabla_E3 xi = E1 = -nabla_xi E3", [("E3", "xi", 1, "E1"), ("xi", "E3", -1, "E1", True)]),
    ("nabla_E4 xi = E2 = -nabla_xi E4", [("E4", "xi", 1, "E2"), ("xi", "E4", -1, "E2", True)]),
)


def _frame_index(space: AmbientSpace, name: str) -> Optional[int]:
    if name == "xi":
        return space.dim - 1
    k = int(name[1:])
    if space.n == 2:
        return k - 1
    return {1: 0, 3: 1}.get(k)


@dataclass(frozen=True)
class TableClause:
    identity: str
    clause: str
    residual: float          # max-norm of nabla_X Y - tabulated value, in frame components
    reversed_reeb: bool      # one of the nabla_xi E_i halves


def connection_table(space: AmbientSpace, p) -> list:
    """Check every clause of the frame connection table at ``p``.

    For ``n = 1`` identities that mention ``E2`` or ``E4`` are skipped and
    ``E3`` stands for ``Phi E1``.  ``reversed_reeb`` clauses are expected to
    fail by exactly 2: the correct value is ``nabla_xi E_i = nabla_{E_i} xi``.
    """
    W = space.frame_connection(space.check_point(p))
    out = []
    for label, clauses in CONNECTION_TABLE:
        rows = []
        for clause in clauses:
            X, Y, sign, target = clause[:4]
            idx = [_frame_index(space, name) for name in (X, Y)]
            tgt = None if target is None else _frame_index(space, target)
            if None in idx or (target is not None and tgt is None):
                rows = None
                break
            want = np.zeros(space.dim)
            if tgt is not None:
                want[tgt] = sign
            res = float(np.max(np.abs(W[idx[0], idx[1]] - want)))
            text = f"nabla_{X} {Y} = {'' if sign > 0 else '-'}{target or '0'}"
            rows.append(TableClause(label, text, res, len(clause) > 4 and clause[4]))
        if rows:
            out.extend(rows)
    return out
