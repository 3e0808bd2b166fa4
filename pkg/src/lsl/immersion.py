"""Extrinsic geometry of parametrized Legendrian immersions.

A chart maps parameters ``u`` of shape ``(..., k)`` (``k`` = 1 or 2) into the
contact space ``R^(2k+1)``.  Everything below is vectorized over the leading
axes, so a 64x64 grid is processed in a handful of numpy calls.

For a Legendrian immersion the normal bundle is ``Phi TL + R xi``.  With an
orthonormal tangent frame ``e_a`` the code evaluates

* ``H = sum_a (nabla_{e_a} e_a)^perp`` with the ambient Levi-Civita connection,
* ``|A|^2 = sum_{a,b} |(nabla_{e_a} e_b)^perp|^2``,
* ``F^perp = sum_a <F, Phi e_a> Phi e_a + <F, xi> xi`` (``F`` = position vector),
* the Legendre angle ``theta`` from ``F^* Omega = e^{i theta} vol`` where
  ``Omega = (1/4) dz_1 ^ dz_2`` (for curves: the argument of the transverse
  tangent),

and the self-shrinker residual ``|H + (theta + c) xi - alpha F^perp|_g`` with
one additive angle constant ``c`` fitted over the sample set.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .ambient import AmbientSpace
from .errors import AngleUndefinedError, DomainError, RankError

#: default exclusion margin around declared degenerate loci
EXCLUSION_MARGIN = 0.05
#: default finite-difference step for charts without analytic partials
CHART_FD_STEP = 1e-3
#: step for differentiating the Legendre angle
ANGLE_FD_STEP = 1e-3
RANK_TOL = 1e-10


@dataclass(frozen=True)
class ImmersionChart:
    """A parametrized map from a box in R^k into R^(2k+1) (or Euclidean R^d).

    Parameters
    ----------
    func : callable
        ``u -> F(u)`` with ``u[..., i]`` the i-th parameter.
    dim : int
        Intrinsic dimension ``k``.
    domain : sequence of (lo, hi)
        Parameter box.
    space : AmbientSpace or None
        Contact target; ``None`` marks a plain Euclidean chart (no contact
        structure) of target dimension ``target_dim``.
    d1, d2 : callable, optional
        Analytic partials, shapes ``(..., k, d)`` and ``(..., k, k, d)``.
    exclusions : sequence of callables
        Each returns a nonnegative distance-like quantity to a degenerate
        locus; points closer than ``margin`` are refused.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    domain: tuple
    space: Optional[AmbientSpace] = None
    target_dim: Optional[int] = None
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    exclusions: tuple = ()
    margin: float = EXCLUSION_MARGIN
    periodic: tuple = ()
    name: str = "chart"
    fd_step: float = CHART_FD_STEP
    use_analytic: bool = True

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError("intrinsic dimension must be 1 or 2")
        if self.space is not None and self.space.n != self.dim:
            raise DomainError("a Legendrian chart into R^(2n+1) must have dimension n")
        if len(self.domain) != self.dim:
            raise DomainError("domain needs one interval per parameter")
        if not self.periodic:
            object.__setattr__(self, "periodic", (False,) * self.dim)

    @property
    def is_contact(self) -> bool:
        return self.space is not None

    def __call__(self, u) -> np.ndarray:
        return np.asarray(self.func(np.asarray(u, dtype=float)), dtype=float)

    def numeric(self, fd_step: Optional[float] = None) -> "ImmersionChart":
        """Copy that ignores analytic partials (optionally with a new step)."""
        return dataclasses.replace(self, use_analytic=False,
                                   fd_step=self.fd_step if fd_step is None else fd_step)

    def excluded(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        mask = np.zeros(u.shape[:-1], dtype=bool)
        for dist in self.exclusions:
            mask |= np.asarray(dist(u)) < self.margin
        return mask

    def grid(self, shape: Sequence[int] = (64, 64)) -> np.ndarray:
        """Parameter grid over the domain, shape ``(*shape, k)`` (``ij`` indexing)."""
        axes = [np.linspace(lo, hi, m) for (lo, hi), m in zip(self.domain, shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


@dataclass(frozen=True)
class Jet:
    F: np.ndarray        # (..., d)
    dF: np.ndarray       # (..., k, d)
    d2F: np.ndarray      # (..., k, k, d)


def _fd_first(f, u, i, h):
    e = np.zeros(u.shape[-1])
    e[i] = h
    return (-f(u + 2 * e) + 8 * f(u + e) - 8 * f(u - e) + f(u - 2 * e)) / (12 * h)


def _fd_partials(f, u, h, k):
    dF = np.stack([_fd_first(f, u, i, h) for i in range(k)], axis=-2)
    F0 = f(u)
    rows = []
    for i in range(k):
        row = []
        for j in range(k):
            if i == j:
                e = np.zeros(k)
                e[i] = h
                row.append((-f(u + 2 * e) + 16 * f(u + e) - 30 * F0
                            + 16 * f(u - e) - f(u - 2 * e)) / (12 * h * h))
            else:
                row.append(_fd_first(lambda w: _fd_first(f, w, j, h), u, i, h))
        rows.append(np.stack(row, axis=-2))
    return dF, np.stack(rows, axis=-3)


def jet(chart: ImmersionChart, u, check: bool = True) -> Jet:
    """Position and first/second partials of ``chart`` at ``u``.

    Analytic partials are used when the chart has them and ``use_analytic``
    is set; otherwise 4th-order central differences with ``chart.fd_step``.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1:] != (chart.dim,):
        raise DomainError(f"parameter must have trailing size {chart.dim}")
    if check and np.any(chart.excluded(u)):
        raise DomainError(f"{chart.name}: parameter inside an exclusion zone")
    F = chart(u)
    if chart.use_analytic and chart.d1 is not None:
        dF = np.asarray(chart.d1(u), dtype=float)
    else:
        dF = None
    if chart.use_analytic and chart.d2 is not None and dF is not None:
        d2F = np.asarray(chart.d2(u), dtype=float)
    else:
        dF_fd, d2F = _fd_partials(chart, u, chart.fd_step, chart.dim)
        if dF is None:
            dF = dF_fd
    return Jet(F, dF, d2F)


# ---------------------------------------------------------------------------
# pointwise geometry

@dataclass
class GeometrySample:
    """Geometric state at a batch of parameter points (leading axes of ``u``).

    Vectors are coordinate components in ``R^(2k+1)``.  ``theta`` is the raw
    (wrapped) Legendre angle; grid routines unwrap it.
    """

    u: np.ndarray
    F: np.ndarray
    tangents: np.ndarray          # (..., k, d)  F_u, F_v
    frame: np.ndarray             # (..., k, d)  orthonormal e_a
    induced_metric: np.ndarray    # (..., k, k)
    theta: np.ndarray             # (...)
    H: np.ndarray                 # (..., d)
    F_perp: np.ndarray            # (..., d)
    A_norm_sq: np.ndarray         # (...)
    legendrian_residual: np.ndarray
    xi: np.ndarray                # (d,)
    phi_frame: np.ndarray         # (..., k, d)  Phi e_a
    second_form: np.ndarray       # (..., k, k, d)  (nabla_{e_a} e_b)^perp
    frame_coeffs: np.ndarray      # (..., k, k)  e_a = C[a, i] F_i
    metric_at_F: np.ndarray       # (..., d, d)

    def g(self, v, w):
        return np.einsum("...a,...ab,...b->...", v, self.metric_at_F, w)

    def gnorm(self, v):
        return np.sqrt(np.maximum(self.g(v, v), 0.0))


def _orthonormalize(G_amb, T):
    """Gram-Schmidt of tangent vectors ``T[..., i, :]`` in the metric ``G_amb``.

    Returns ``(e, C)`` with ``e[..., a, :] = C[..., a, i] T[..., i, :]``.
    """
    k = T.shape[-2]
    gij = np.einsum("...ia,...ab,...jb->...ij", T, G_amb, T)
    if k == 1:
        C = 1.0 / np.sqrt(gij)
        return C * T, C
    g11, g12, g22 = gij[..., 0, 0], gij[..., 0, 1], gij[..., 1, 1]
    n1 = np.sqrt(g11)
    det = g11 * g22 - g12 ** 2
    n2 = np.sqrt(det / g11)
    C = np.zeros(gij.shape)
    C[..., 0, 0] = 1.0 / n1
    C[..., 1, 0] = -g12 / g11 / n2
    C[..., 1, 1] = 1.0 / n2
    e = np.einsum("...ai,...id->...ad", C, T)
    return e, C


def _normal_part(space, G, phi_e, xi, V):
    """Projection of ``V`` onto ``Phi TL + R xi``."""
    coef = np.einsum("...a,...ab,...kb->...k", V, G, phi_e)
    out = np.einsum("...k,...kd->...d", coef, phi_e)
    out = out + np.einsum("...a,...ab,b->...", V, G, xi)[..., None] * xi
    return out


def holomorphic_pullback(space: AmbientSpace, dF: np.ndarray) -> np.ndarray:
    """Complex pullback of the transverse volume form on the tangent basis.

    ``n = 2``: ``(1/4) dz_1 ^ dz_2 (F_u, F_v)``;  ``n = 1``: ``(1/2) dz (F_t)``.
    """
    if space.n == 1:
        return 0.5 * (dF[..., 0, 0] + 1j * dF[..., 0, 1])
    w1 = dF[..., :, 0] + 1j * dF[..., :, 1]
    w2 = dF[..., :, 2] + 1j * dF[..., :, 3]
    return 0.25 * (w1[..., 0] * w2[..., 1] - w1[..., 1] * w2[..., 0])


def _angle_phase(chart: ImmersionChart, u, G=None) -> np.ndarray:
    """Unit complex number ``e^{i theta}`` at ``u``."""
    space = chart.space
    jt = jet(chart, u, check=False)
    dF = jt.dF
    if G is None:
        G = space.metric_matrix(jt.F)
    gij = np.einsum("...ia,...ab,...jb->...ij", dF, G, dF)
    vol = np.sqrt(np.abs(np.linalg.det(gij)))
    omega = holomorphic_pullback(space, dF)
    if np.any(np.abs(omega) <= 1e-12 * np.maximum(vol, 1e-300)) or np.any(vol == 0):
        raise AngleUndefinedError(f"{chart.name}: holomorphic volume pullback vanishes")
    return omega / np.abs(omega)


def angle_gradient_coords(chart: ImmersionChart, u, h: float = ANGLE_FD_STEP) -> np.ndarray:
    """Parameter derivatives ``d theta / d u_i``, shape ``(..., k)``.

    4th-order central differences of the phase, taken as wrapped differences
    so no global unwrapping is needed.
    """
    u = np.asarray(u, dtype=float)
    base = _angle_phase(chart, u)
    out = []
    for i in range(chart.dim):
        e = np.zeros(chart.dim)
        e[i] = h

        def rel(s):
            return np.angle(_angle_phase(chart, u + s * e) / base)

        out.append((-rel(2) + 8 * rel(1) - 8 * rel(-1) + rel(-2)) / (12 * h))
    return np.stack(out, axis=-1)


def geometry(chart: ImmersionChart, u, check: bool = True) -> GeometrySample:
    """Evaluate the full extrinsic geometry of a contact chart at ``u``."""
    if not chart.is_contact:
        raise DomainError("geometry() needs a chart into the contact space")
    space = chart.space
    u = np.asarray(u, dtype=float)
    jt = jet(chart, u, check=check)
    F, T, T2 = jt.F, jt.dF, jt.d2F
    G = space.metric_matrix(F)
    gij = np.einsum("...ia,...ab,...jb->...ij", T, G, T)
    det = np.linalg.det(gij)
    if np.any(~(det > RANK_TOL)):
        raise RankError(f"{chart.name}: induced metric degenerate (det <= {RANK_TOL})")
    e, C = _orthonormalize(G, T)
    xi = space.reeb()
    phi_e = space.phi(F[..., None, :], e)

    # nabla_{F_i} F_j = F_ij + Gamma(F_i, F_j)
    Gam = space.christoffel(F)
    nab = T2 + np.einsum("...kab,...ia,...jb->...ijk", Gam, T, T)
    nab_e = np.einsum("...ai,...bj,...ijd->...abd", C, C, nab)
    II = _normal_part(space, G[..., None, None, :, :], phi_e[..., None, None, :, :], xi, nab_e)
    H = np.einsum("...aad->...d", II)
    A2 = np.einsum("...abx,...xy,...aby->...", II, G, II)

    Fperp = _normal_part(space, G, phi_e, xi, F)
    eta_T = np.abs(np.einsum("...a,...ia->...i", space.eta_covector(F), T))
    leg = np.max(eta_T / np.sqrt(np.einsum("...ii->...i", gij)), axis=-1)

    omega = holomorphic_pullback(space, T)
    vol = np.sqrt(det)
    if np.any(np.abs(omega) <= 1e-12 * vol):
        raise AngleUndefinedError(f"{chart.name}: holomorphic volume pullback vanishes")
    theta = np.angle(omega)
    return GeometrySample(u=u, F=F, tangents=T, frame=e, induced_metric=gij,
                          theta=theta, H=H, F_perp=Fperp, A_norm_sq=A2,
                          legendrian_residual=leg, xi=xi, phi_frame=phi_e,
                          second_form=II, frame_coeffs=C, metric_at_F=G)


def legendrian_residual(chart: ImmersionChart, u) -> np.ndarray:
    """``max_i |eta(F_i)| / |F_i|_g`` over the tangent basis."""
    space = chart.space
    jt = jet(chart, u)
    G = space.metric_matrix(jt.F)
    gii = np.einsum("...ia,...ab,...ib->...i", jt.dF, G, jt.dF)
    if np.any(~(gii > RANK_TOL)):
        raise RankError(f"{chart.name}: degenerate tangent vector")
    eta_T = np.abs(np.einsum("...a,...ia->...i", space.eta_covector(jt.F), jt.dF))
    return np.max(eta_T / np.sqrt(gii), axis=-1)


def normal_projection(chart: ImmersionChart, u) -> np.ndarray:
    return geometry(chart, u).F_perp


def mean_curvature(chart: ImmersionChart, u) -> np.ndarray:
    return geometry(chart, u).H


def second_fundamental_norm(chart: ImmersionChart, u) -> np.ndarray:
    return geometry(chart, u).A_norm_sq


def second_fundamental_norm_transverse(chart: ImmersionChart, u) -> np.ndarray:
    """``|A|^2`` of the Lagrangian projection in ``(C^n, g^T)``.

    Uses the flat metric ``g^T = (1/4) Euclidean`` on the transverse
    coordinates only, independently of the contact connection.
    """
    space = chart.space
    jt = jet(chart, u)
    m = 2 * space.n
    T, T2 = jt.dF[..., :m], jt.d2F[..., :m]
    e, C = _orthonormalize(np.eye(m) / 4, T)
    nab = np.einsum("...ai,...bj,...ijd->...abd", C, C, T2)
    tang = np.einsum("...abx,xy,...cy->...abc", nab, np.eye(m) / 4, e)
    normal = nab - np.einsum("...abc,...cd->...abd", tang, e)
    return np.einsum("...abx,xy,...aby->...", normal, np.eye(m) / 4, normal)


def legendre_angle(chart: ImmersionChart, u) -> np.ndarray:
    """Wrapped Legendre angle in ``(-pi, pi]`` (see ``unwrap_grid``)."""
    return np.angle(_angle_phase(chart, u))


def unwrap_grid(theta: np.ndarray) -> np.ndarray:
    """Unwrap a 1-d or 2-d angle array, row 0 first, then down each column.

    NaN entries (excluded points) are skipped.
    """
    th = np.array(theta, dtype=float)

    def _unwrap1(a):
        m = np.isfinite(a)
        if m.sum() > 1:
            a[m] = np.unwrap(a[m])
        return a

    if th.ndim == 1:
        return _unwrap1(th)
    _unwrap1(th[0])
    for j in range(th.shape[1]):
        col = th[:, j]
        if not np.isfinite(col[0]):
            continue
        th[:, j] = _unwrap1(col)
    return th


def angle_residual(sample: GeometrySample, dtheta: np.ndarray) -> np.ndarray:
    """``|H + Phi grad theta|_g`` given parameter derivatives of theta."""
    # grad theta = sum_a e_a(theta) e_a,  e_a(theta) = C[a, i] d_i theta
    ea_theta = np.einsum("...ai,...i->...a", sample.frame_coeffs, dtheta)
    V = sample.H + np.einsum("...a,...ad->...d", ea_theta, sample.phi_frame)
    return sample.gnorm(V)


def fit_angle_offset(sample: GeometrySample, theta: np.ndarray, alpha: float,
                     mask: Optional[np.ndarray] = None) -> float:
    """Least-squares additive constant ``c`` for ``H + (theta + c) xi - alpha F^perp``."""
    V = sample.H + theta[..., None] * sample.xi - alpha * sample.F_perp
    comp = np.einsum("...a,...ab,b->...", V, sample.metric_at_F, sample.xi)
    if mask is not None:
        comp = comp[mask]
    return float(-np.nanmean(comp))


def shrinker_vector(sample: GeometrySample, theta: np.ndarray, alpha: float,
                    offset: float) -> np.ndarray:
    return sample.H + (theta + offset)[..., None] * sample.xi - alpha * sample.F_perp


def shrinker_residual(chart: ImmersionChart, u, alpha: float,
                      angle_offset: Optional[float] = None):
    """Pointwise ``|H + (theta + c) xi - alpha F^perp|_g`` on a curve or grid.

    ``u`` is an ordered 1-d sequence of parameters (shape ``(m, k)``) or a
    grid (shape ``(m1, m2, 2)``) so the angle can be unwrapped.  When
    ``angle_offset`` is ``None`` the constant ``c`` is fitted.

    Returns ``(residuals, c)``.
    """
    if alpha == 0:
        raise DomainError("alpha must be nonzero")
    s = geometry(chart, u)
    theta = unwrap_grid(s.theta)
    c = fit_angle_offset(s, theta, alpha) if angle_offset is None else float(angle_offset)
    return s.gnorm(shrinker_vector(s, theta, alpha, c)), c


# ---------------------------------------------------------------------------
# grid sweeps and export

CSV_COLUMNS = ("u", "v", "theta", "legendrian_residual", "shrinker_residual",
               "A_norm_sq", "H_norm")


@dataclass
class GridReport:
    """Geometry of a chart sampled on a parameter grid."""

    chart_name: str
    alpha: Optional[float]
    u: np.ndarray                 # (*shape, k)
    valid: np.ndarray             # (*shape,) bool
    theta: np.ndarray             # unwrapped, NaN where excluded
    legendrian_residual: np.ndarray
    shrinker_residual: np.ndarray
    A_norm_sq: np.ndarray
    H_norm: np.ndarray
    angle_residual: np.ndarray
    angle_offset: float
    extras: dict = field(default_factory=dict)

    def summary(self) -> dict:
        def stats(a):
            a = a[self.valid]
            a = a[np.isfinite(a)]
            if a.size == 0:
                return {"max": float("nan"), "mean": float("nan")}
            return {"max": float(np.max(a)), "mean": float(np.mean(a))}

        return {
            "chart": self.chart_name,
            "alpha": self.alpha,
            "grid": list(self.valid.shape),
            "valid_points": int(self.valid.sum()),
            "angle_offset": self.angle_offset,
            "legendrian_residual": stats(self.legendrian_residual),
            "shrinker_residual": stats(self.shrinker_residual),
            "angle_residual": stats(self.angle_residual),
            "A_norm_sq": stats(self.A_norm_sq),
            "H_norm": stats(self.H_norm),
            "angle_laplacian": stats(self.extras.get("angle_laplacian",
                                                    np.full(self.valid.shape, np.nan))),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        flat_u = self.u.reshape(-1, self.u.shape[-1])
        cols = [self.theta, self.legendrian_residual, self.shrinker_residual,
                self.A_norm_sq, self.H_norm]
        flat = [c.reshape(-1) for c in cols]
        for i in range(flat_u.shape[0]):
            uu = flat_u[i]
            v = uu[1] if uu.shape[0] > 1 else 0.0
            w.writerow([f"{float(uu[0]):.17g}", f"{float(v):.17g}"]
                       + [f"{float(c[i]):.17g}" for c in flat])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def grid_laplacian(values: np.ndarray, metric: np.ndarray, steps: Sequence[float]) -> np.ndarray:
    """Discrete Laplace-Beltrami of a scalar on a uniform 2-d parameter grid.

    Computes ``(1/sqrt|G|) d_i (sqrt|G| G^ij d_j f)`` with central differences.
    Points whose stencil touches a NaN (excluded or boundary) come out NaN.
    """
    f = np.asarray(values, dtype=float)
    G = np.asarray(metric, dtype=float)
    det = G[..., 0, 0] * G[..., 1, 1] - G[..., 0, 1] * G[..., 1, 0]
    root = np.sqrt(det)
    inv = np.linalg.inv(np.where(np.isfinite(G), G, np.eye(2)))
    inv[~np.isfinite(det)] = np.nan

    def central(a, axis, h):
        out = np.full_like(a, np.nan)
        lo = [slice(None)] * a.ndim
        hi = [slice(None)] * a.ndim
        mid = [slice(None)] * a.ndim
        lo[axis], hi[axis], mid[axis] = slice(None, -2), slice(2, None), slice(1, -1)
        out[tuple(mid)] = (a[tuple(hi)] - a[tuple(lo)]) / (2 * h)
        return out

    grad = [central(f, i, steps[i]) for i in range(2)]
    total = np.zeros_like(f)
    for i in range(2):
        flux = root * (inv[..., i, 0] * grad[0] + inv[..., i, 1] * grad[1])
        total = total + central(flux, i, steps[i])
    return total / root


def sample_grid(chart: ImmersionChart, alpha: Optional[float] = None,
                shape: Sequence[int] = (64, 64), u: Optional[np.ndarray] = None,
                angle_h: float = ANGLE_FD_STEP) -> GridReport:
    """Sample a chart on a grid, unwrap the angle and evaluate every residual.

    ``alpha=None`` skips the shrinker residual (reported as NaN).
    """
    if u is None:
        u = chart.grid(shape[:chart.dim])
    u = np.asarray(u, dtype=float)
    valid = ~chart.excluded(u)
    shp = u.shape[:-1]
    s = geometry(chart, u[valid])
    dtheta = angle_gradient_coords(chart, u[valid], h=angle_h)

    def scatter(vals, fill=np.nan):
        out = np.full(shp + vals.shape[1:], fill, dtype=float)
        out[valid] = vals
        return out

    theta = unwrap_grid(scatter(s.theta))
    extras = {}
    if chart.dim == 2 and u.ndim == 3 and min(shp) >= 3:
        steps = (u[1, 0, 0] - u[0, 0, 0], u[0, 1, 1] - u[0, 0, 1])
        lap = grid_laplacian(theta, scatter(s.induced_metric), steps)
        extras["angle_laplacian"] = np.abs(lap)
    theta_valid = theta[valid]
    leg = scatter(s.legendrian_residual)
    A2 = scatter(s.A_norm_sq)
    Hn = scatter(s.gnorm(s.H))
    ang = scatter(angle_residual(s, dtheta))
    if alpha is not None:
        c = fit_angle_offset(s, theta_valid, alpha)
        shr = scatter(s.gnorm(shrinker_vector(s, theta_valid, alpha, c)))
    else:
        c = float("nan")
        shr = np.full(shp, np.nan)
    return GridReport(chart_name=chart.name, alpha=alpha, u=u, valid=valid,
                      theta=theta, legendrian_residual=leg, shrinker_residual=shr,
                      A_norm_sq=A2, H_norm=Hn, angle_residual=ang, angle_offset=c,
                      extras=extras)


# ---------------------------------------------------------------------------
# Euclidean charts (used for the sphere checks of the Clifford lift)

@dataclass
class EuclideanSample:
    metric: np.ndarray            # (..., 2, 2)
    gauss_curvature: np.ndarray   # (...)
    laplacian: np.ndarray         # (..., d)  Delta F


def euclidean_geometry(chart: ImmersionChart, u) -> EuclideanSample:
    """Induced metric, Gauss curvature (Gauss equation) and ``Delta F``.

    ``Delta F = g^{ij} (F_ij - Gamma^k_ij F_k)`` equals the mean curvature
    vector in Euclidean space.
    """
    if chart.dim != 2:
        raise DomainError("euclidean_geometry needs a surface")
    jt = jet(chart, u)
    T, T2 = jt.dF, jt.d2F
    gij = np.einsum("...id,...jd->...ij", T, T)
    ginv = np.linalg.inv(gij)
    # tangential projection of second partials
    coef = np.einsum("...kl,...ijd,...ld->...ijk", ginv, T2, T)
    II = T2 - np.einsum("...ijk,...kd->...ijd", coef, T)
    det = np.linalg.det(gij)
    K = (np.einsum("...d,...d->...", II[..., 0, 0, :], II[..., 1, 1, :])
         - np.einsum("...d,...d->...", II[..., 0, 1, :], II[..., 0, 1, :])) / det
    lap = np.einsum("...ij,...ijd->...d", ginv, II)
    return EuclideanSample(metric=gij, gauss_curvature=K, laplacian=lap)
