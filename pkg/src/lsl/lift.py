"""Lagrangian projection and Legendrian lifting.

Dropping ``z`` sends a Legendrian immersion to a Lagrangian one in ``C^n``.
Conversely ``eta = 0`` forces ``dz = (1/2) sum (y_i dx_i - x_i dy_i)``, and
integrating that 1-form from a basepoint recovers ``z``.  Around a closed
parameter loop the integral is the holonomy; the lift closes up in the
circle bundle iff every holonomy lies in ``2 pi Z``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, LiftRefusedError
from .immersion import ImmersionChart, jet, legendrian_residual

LAGRANGIAN_TOL = 1e-8
GRID_LAGRANGIAN_TOL = 1e-3
HOLONOMY_TOL = 1e-6
TWO_PI = 2 * np.pi


def contact_primitive(f: np.ndarray, df: np.ndarray) -> np.ndarray:
    """``(1/2) sum_i (y_i x_i' - x_i y_i')`` for points ``f`` and velocities ``df``."""
    x, y = f[..., 0::2], f[..., 1::2]
    dx, dy = df[..., 0::2], df[..., 1::2]
    return 0.5 * np.sum(y * dx - x * dy, axis=-1)


def chord_primitive(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Integral of the contact primitive along the straight chord ``p -> q``.

    Equals the trapezoid rule on the chord since the integrand is affine there.
    """
    return 0.5 * np.sum(p[..., 1::2] * q[..., 0::2] - p[..., 0::2] * q[..., 1::2], axis=-1)


def symplectic_pullback(df: np.ndarray) -> np.ndarray:
    """``omega_can(f_u, f_v) = sum_i (x_u y_v - y_u x_v)`` from partials ``(..., 2, 2n)``."""
    fu, fv = df[..., 0, :], df[..., 1, :]
    return np.sum(fu[..., 0::2] * fv[..., 1::2] - fu[..., 1::2] * fv[..., 0::2], axis=-1)


@dataclass(frozen=True)
class LagrangianChart:
    """Map from a parameter box into ``C^n`` as real ``(x1, y1, ..., xn, yn)``."""

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    domain: tuple
    periodic: tuple = ()
    d1: Optional[Callable] = None
    name: str = "lagrangian"
    fd_step: float = 1e-3

    def __post_init__(self):
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * self.dim)

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)

    def partials(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.d1 is not None:
            return np.asarray(self.d1(u), dtype=float)
        h, out = self.fd_step, []
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h
            out.append((-self(u + 2 * e) + 8 * self(u + e) - 8 * self(u - e) + self(u - 2 * e))
                       / (12 * h))
        return np.stack(out, axis=-2)

    def grid(self, shape: Sequence[int]) -> np.ndarray:
        axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(self.domain, shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def lagrangian_residual(self, u) -> float:
        """Max of ``|omega(f_u, f_v)| / (|f_u| |f_v|)``; zero for curves."""
        if self.dim == 1:
            return 0.0
        df = self.partials(u)
        nrm = np.linalg.norm(df[..., 0, :], axis=-1) * np.linalg.norm(df[..., 1, :], axis=-1)
        return float(np.max(np.abs(symplectic_pullback(df)) / nrm))


@dataclass(frozen=True)
class LagrangianGrid:
    """Transverse coordinates sampled on a rectangular parameter grid (no derivatives).

    ``u`` has shape ``(m1, m2, 2)`` (or ``(m, 1)`` for curves) and ``values``
    the matching ``(..., 2n)``.
    """

    u: np.ndarray
    values: np.ndarray
    periodic: tuple = (False, False)
    name: str = "grid"

    @property
    def dim(self) -> int:
        return self.u.shape[-1]

    def lagrangian_residual(self) -> float:
        """Symplectic area of each grid cell relative to the cell's size."""
        if self.dim == 1:
            return 0.0
        f = self.values
        a, b, c, d = f[:-1, :-1], f[:-1, 1:], f[1:, 1:], f[1:, :-1]
        area = (chord_primitive(a, b) + chord_primitive(b, c)
                + chord_primitive(c, d) + chord_primitive(d, a))
        size = (np.linalg.norm(b - a, axis=-1) * np.linalg.norm(d - a, axis=-1))
        return float(np.max(np.abs(area) / np.maximum(size, 1e-300)))


def project(chart: ImmersionChart, tol: float = 1e-10, shape=(16, 16)) -> LagrangianChart:
    """Drop the ``z`` coordinate after checking the chart is Legendrian."""
    if not chart.is_contact:
        raise DomainError("projection needs a contact chart")
    u = chart.grid(shape[:chart.dim])
    u = u[~chart.excluded(u)]
    res = float(np.max(legendrian_residual(chart, u)))
    if not res < tol:
        raise LiftRefusedError(f"{chart.name}: Legendrian residual {res:.3e} exceeds {tol:.1e}")
    m = 2 * chart.space.n
    d1 = None
    if chart.use_analytic and chart.d1 is not None:
        d1 = lambda w: np.asarray(chart.d1(w))[..., :m]  # noqa: E731
    else:
        d1 = lambda w: jet(chart, w, check=False).dF[..., :m]  # noqa: E731
    return LagrangianChart(func=lambda w: chart(w)[..., :m], dim=chart.dim,
                           domain=chart.domain, periodic=chart.periodic, d1=d1,
                           name=f"{chart.name}-projection")


@dataclass
class LiftResult:
    """Lifted height on a grid plus holonomy and embedding diagnostics."""

    u: np.ndarray
    z: np.ndarray
    basepoint: tuple
    closure_residual: float
    lagrangian_residual: float
    holonomies: dict = field(default_factory=dict)
    global_lift: Optional[bool] = None
    embedding: Optional[list] = None

    def summary(self) -> dict:
        return {
            "basepoint": [float(b) for b in self.basepoint],
            "grid": list(self.z.shape),
            "closure_residual": self.closure_residual,
            "lagrangian_residual": self.lagrangian_residual,
            "holonomies": {k: float(v) for k, v in sorted(self.holonomies.items())},
            "global_lift": self.global_lift,
            "embedding": self.embedding,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)

    def to_csv(self) -> str:
        rows = ["u,v,z"]
        flat_u = self.u.reshape(-1, self.u.shape[-1])
        for uu, zz in zip(flat_u, self.z.reshape(-1)):
            v = uu[1] if uu.shape[0] > 1 else 0.0
            rows.append(f"{uu[0]:.17g},{v:.17g},{zz:.17g}")
        return "\n".join(rows) + "\n"


def _edge_integrals(f, u):
    """Edge integrals along each parameter axis, shapes ``(m1-1, m2)`` and ``(m1, m2-1)``."""
    if isinstance(f, LagrangianGrid):
        vals = f.values
        I0 = chord_primitive(vals[:-1], vals[1:])
        I1 = chord_primitive(vals[:, :-1], vals[:, 1:]) if f.dim == 2 else None
        return I0, I1
    vals = f(u)
    df = f.partials(u)
    g0 = contact_primitive(vals, df[..., 0, :])
    du0 = np.diff(u[..., 0], axis=0)
    I0 = 0.5 * (g0[:-1] + g0[1:]) * du0
    if f.dim == 1:
        return I0, None
    g1 = contact_primitive(vals, df[..., 1, :])
    du1 = np.diff(u[..., 1], axis=1)
    I1 = 0.5 * (g1[:, :-1] + g1[:, 1:]) * du1
    return I0, I1


def _snap(u, basepoint):
    dist = np.linalg.norm(u - np.asarray(basepoint, float), axis=-1)
    return np.unravel_index(np.argmin(dist), dist.shape)


def lift_chart(f, basepoint=None, shape=(64, 64), tol: Optional[float] = None) -> LiftResult:
    """Integrate the contact primitive over the grid from ``basepoint``.

    The height is integrated along the basepoint's row (second parameter)
    first, then down every column (first parameter), by the composite
    trapezoid rule.  The basepoint is snapped to the nearest grid node.
    """
    if isinstance(f, LagrangianGrid):
        u = f.u
        lag = f.lagrangian_residual()
        tol = GRID_LAGRANGIAN_TOL if tol is None else tol
    else:
        u = f.grid(shape[:f.dim])
        lag = f.lagrangian_residual(u)
        tol = LAGRANGIAN_TOL if tol is None else tol
    if not lag < tol:
        raise LiftRefusedError(f"Lagrangian residual {lag:.3e} exceeds {tol:.1e}; "
                               "the lift would be path dependent")
    if basepoint is None:
        basepoint = u.reshape(-1, u.shape[-1])[0]
    idx = _snap(u, basepoint)
    I0, I1 = _edge_integrals(f, u)
    z = np.zeros(u.shape[:-1])
    i0 = idx[0]
    if f.dim == 1:
        c = np.concatenate([[0.0], np.cumsum(I0)])
        z = c - c[i0]
        closure = 0.0
    else:
        j0 = idx[1]
        row = np.concatenate([[0.0], np.cumsum(I1[i0])])
        row -= row[j0]
        col = np.concatenate([np.zeros((1, z.shape[1])), np.cumsum(I0, axis=0)], axis=0)
        z = row[None, :] + col - col[i0][None, :]
        cell = I1[:-1] + I0[:, 1:] - I1[1:] - I0[:, :-1]
        closure = float(np.max(np.abs(cell))) if cell.size else 0.0
    return LiftResult(u=u, z=z, basepoint=tuple(float(b) for b in u[idx]),
                      closure_residual=closure, lagrangian_residual=lag)


def loop_holonomy(f: LagrangianChart, direction: int = 0, at=None, n: int = 4096,
                  loops: int = 1) -> float:
    """Contact-primitive integral once (or ``loops`` times) around a periodic direction.

    The loop runs over the full domain interval of ``direction`` with the
    other parameter fixed at ``at`` (default: its lower bound).  The
    periodic trapezoid rule is spectrally accurate for smooth loops.
    """
    if isinstance(f, LagrangianGrid):
        raise DomainError("holonomy needs a chart; grids are handled by grid_holonomy")
    if not (0 <= direction < f.dim) or not f.periodic[direction]:
        raise DomainError(f"direction {direction} is not periodic")
    lo, hi = f.domain[direction]
    period = hi - lo
    tau = lo + np.arange(n * loops) * (period / n)
    u = np.empty((tau.size, f.dim))
    for k in range(f.dim):
        u[:, k] = tau if k == direction else (f.domain[k][0] if at is None else at[k])
    vals = f(u)
    df = f.partials(u)[..., direction, :]
    return float(np.sum(contact_primitive(vals, df)) * period / n)


def grid_holonomy(grid: LagrangianGrid, direction: int = 0, index: int = 0) -> float:
    """Holonomy from sampled data: chord rule around a closed grid line.

    The last sample along ``direction`` must coincide with the first.
    """
    if not grid.periodic[direction]:
        raise DomainError(f"direction {direction} is not periodic")
    vals = np.moveaxis(grid.values, direction, 0)
    if grid.dim == 2:
        vals = vals[:, index]
    return float(np.sum(chord_primitive(vals[:-1], vals[1:])))


def is_quantized(value: float, tol: float = HOLONOMY_TOL) -> bool:
    """True iff ``value`` lies in ``2 pi Z`` within ``tol``."""
    k = np.round(value / TWO_PI)
    return bool(abs(value - k * TWO_PI) < tol)


def with_holonomies(result: LiftResult, f: LagrangianChart, tol: float = HOLONOMY_TOL) -> LiftResult:
    """Fill in holonomies of every periodic direction and the global-lift flag."""
    hol = {}
    for d in range(f.dim):
        if f.periodic[d]:
            hol[f"direction_{d}"] = loop_holonomy(f, d)
    result.holonomies = hol
    result.global_lift = all(is_quantized(v, tol) for v in hol.values()) if hol else True
    return result


def path_integral(f: LagrangianChart, u0, u1, n: int = 4096) -> float:
    """Contact-primitive integral along the L-shaped parameter path ``u0 -> u1``.

    Moves the first parameter, then the second, each leg by composite
    trapezoid with ``n`` panels.
    """
    u0, u1 = np.asarray(u0, float), np.asarray(u1, float)
    total = 0.0
    cur = u0.copy()
    for d in range(f.dim):
        if cur[d] == u1[d]:
            continue
        tau = np.linspace(cur[d], u1[d], n + 1)
        pts = np.repeat(cur[None, :], n + 1, axis=0)
        pts[:, d] = tau
        g = contact_primitive(f(pts), f.partials(pts)[..., d, :])
        total += float(np.sum(0.5 * (g[:-1] + g[1:])) * (tau[1] - tau[0]))
        cur[d] = u1[d]
    return total


def embedding_obstruction(f: LagrangianChart, point_pairs, tol: float = HOLONOMY_TOL,
                          match_tol: float = 1e-8, n: int = 4096) -> list:
    """For each double-point pair, whether the lift separates it.

    Returns ``[(integral, separated)]`` where ``separated`` is true iff the
    integral is nonzero modulo ``2 pi`` within ``tol``.
    """
    out = []
    for u0, u1 in point_pairs:
        gap = float(np.linalg.norm(f(np.asarray(u0, float)) - f(np.asarray(u1, float))))
        if gap > match_tol:
            raise DomainError(f"pair {tuple(u0)}, {tuple(u1)} is not a double point (gap {gap:.2e})")
        val = path_integral(f, u0, u1, n=n)
        out.append((val, not is_quantized(val, tol)))
    return out
