"""ODE family of Legendrian self-similar surfaces in R^5.

The reduced state is ``(u, phi1, phi2, theta, z)`` plus two co-integrated
radii kept only as a check channel.  With ``r_j^2 = a_j + l_j u``,
``Q = r_1^2 r_2^2`` and ``D = phi1 + phi2 - theta``::

    u'     = 2 sqrt(Q) cos D
    phi_j' = -l_j / (a_j + l_j u) sqrt(Q) sin D
    z'     = (C/2) sqrt(Q) sin D
    theta' = (alpha C / 4) r_1 r_2 sin D
    r_j'   = l_j r_k cos D          (k != j, check channel)

The surface is ``(t, s) -> (x1(t) w1(s), x2(t) w2(s), z(s))`` with
``w_j = r_j e^{i phi_j}`` and ``l_1 x1^2 + l_2 x2^2 = C``.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ambient import AmbientSpace
from .errors import DomainError, ParameterError
from .immersion import ImmersionChart
from .ode import DenseTrajectory, integrate_adaptive

U, PHI1, PHI2, THETA, Z, R1, R2 = range(7)
STATE_NAMES = ("u", "phi1", "phi2", "theta_tilde", "z", "r1", "r2")


@dataclass(frozen=True)
class FamilyConfig:
    """Parameters and initial data of one trajectory.

    ``z0=None`` sets ``z(s0) = 2 theta0 / alpha`` so that the angle and the
    height agree at the start (the shrinker equation needs ``theta = alpha z/2``).
    ``tol=None`` integrates with the fixed step ``h0``.
    """

    lambda1: float
    lambda2: float
    C: float
    alpha: float
    alpha1: float = 1.0
    alpha2: float = 1.0
    phi1: float = 0.0
    phi2: float = 0.0
    theta0: float = 0.0
    s_range: tuple = (0.0, 5.0)
    z0: Optional[float] = None
    h0: float = 1e-2
    tol: Optional[float] = 1e-13
    h_min: float = 1e-6

    def __post_init__(self):
        if self.lambda1 * self.lambda2 * self.C == 0:
            raise ParameterError("lambda1, lambda2 and C must be nonzero")
        if self.alpha == 0:
            raise ParameterError("alpha must be nonzero")
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise ParameterError("initial squared radii must be positive")
        if not self.s_range[1] > self.s_range[0]:
            raise ParameterError("empty s_range")
        if self.case not in ("i", "ii"):
            raise ParameterError("sign pattern must be l1, l2, C > 0 or l1 > 0 > l2, C > 0")
        if self.z0 is not None and abs(self.z0 - 2 * self.theta0 / self.alpha) > 1e-12:
            warnings.warn("z0 overrides theta0 = alpha z0 / 2; the surface will not be a shrinker",
                          stacklevel=2)

    @property
    def case(self) -> str:
        if self.C > 0 and self.lambda1 > 0 and self.lambda2 > 0:
            return "i"
        if self.C > 0 and self.lambda1 > 0 > self.lambda2:
            return "ii"
        return "unsupported"

    @property
    def initial_z(self) -> float:
        return 2 * self.theta0 / self.alpha if self.z0 is None else float(self.z0)

    def initial_state(self) -> np.ndarray:
        return np.array([0.0, self.phi1, self.phi2, self.theta0, self.initial_z,
                         np.sqrt(self.alpha1), np.sqrt(self.alpha2)])

    def squared_radii(self, u):
        return self.alpha1 + self.lambda1 * u, self.alpha2 + self.lambda2 * u


def state_derivative(state, config: FamilyConfig) -> np.ndarray:
    """Rates of the reduced state (see module docstring)."""
    y = np.asarray(state, dtype=float)
    q1, q2 = config.squared_radii(y[..., U])
    if np.any(q1 <= 0) or np.any(q2 <= 0):
        raise DomainError("a squared radius a_j + l_j u became nonpositive")
    r1, r2 = np.sqrt(q1), np.sqrt(q2)
    sq = r1 * r2
    D = y[..., PHI1] + y[..., PHI2] - y[..., THETA]
    sD, cD = np.sin(D), np.cos(D)
    out = np.empty_like(y)
    out[..., U] = 2 * sq * cD
    out[..., PHI1] = -config.lambda1 / q1 * sq * sD
    out[..., PHI2] = -config.lambda2 / q2 * sq * sD
    out[..., Z] = config.C / 2 * sq * sD
    out[..., THETA] = config.alpha * config.C / 4 * sq * sD
    out[..., R1] = config.lambda1 * y[..., R2] * cD
    out[..., R2] = config.lambda2 * y[..., R1] * cD
    return out


def first_integral(state, config: FamilyConfig) -> np.ndarray:
    """``sqrt(Q) exp(+alpha C u / 8) sin(phi - theta)``, conserved by the flow."""
    y = np.asarray(state, dtype=float)
    q1, q2 = config.squared_radii(y[..., U])
    D = y[..., PHI1] + y[..., PHI2] - y[..., THETA]
    return np.sqrt(q1 * q2) * np.exp(config.alpha * config.C * y[..., U] / 8) * np.sin(D)


def first_integral_negative_exponent(state, config: FamilyConfig) -> np.ndarray:
    """Same expression with ``exp(-alpha C u / 8)``; not conserved, kept for comparison."""
    y = np.asarray(state, dtype=float)
    q1, q2 = config.squared_radii(y[..., U])
    D = y[..., PHI1] + y[..., PHI2] - y[..., THETA]
    return np.sqrt(q1 * q2) * np.exp(-config.alpha * config.C * y[..., U] / 8) * np.sin(D)


@dataclass
class ODETrajectory:
    config: FamilyConfig
    s: np.ndarray
    states: np.ndarray
    A: np.ndarray
    terminated: bool = False
    message: str = ""
    extras: dict = field(default_factory=dict)

    @property
    def last_s(self) -> float:
        return float(self.s[-1])

    def first_integral_drift(self) -> float:
        return float(np.max(np.abs(self.A - self.A[0])))

    def radius_residual(self) -> float:
        """Co-integrated radii against ``r_j^2 = a_j + l_j u``, relative to ``r_j^2``."""
        q1, q2 = self.config.squared_radii(self.states[:, U])
        return float(max(np.max(np.abs(self.states[:, R1] ** 2 - q1) / q1),
                         np.max(np.abs(self.states[:, R2] ** 2 - q2) / q2)))

    def product_residual(self) -> float:
        """``Q(u) - r_1^2 r_2^2`` with the co-integrated radii, relative to ``Q``."""
        q1, q2 = self.config.squared_radii(self.states[:, U])
        Q = q1 * q2
        return float(np.max(np.abs(Q - (self.states[:, R1] * self.states[:, R2]) ** 2) / Q))

    def angle_height_drift(self) -> float:
        """Variation of ``theta - alpha z / 2`` along the trajectory."""
        c = self.states[:, THETA] - self.config.alpha * self.states[:, Z] / 2
        return float(np.max(np.abs(c - c[0])))

    def dense(self) -> DenseTrajectory:
        return DenseTrajectory(lambda s, y: state_derivative(y, self.config), self.s, self.states)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("s", "u", "phi1", "phi2", "theta_tilde", "z", "A"))
        for s, y, a in zip(self.s, self.states, self.A):
            w.writerow([f"{v:.17g}" for v in (s, *y[:5], a)])
        return buf.getvalue()


def integrate(config: FamilyConfig) -> ODETrajectory:
    """RK4 with step-halving control; leaving the radius domain ends the run."""
    s0, s1 = map(float, config.s_range)
    res = integrate_adaptive(lambda s, y: state_derivative(y, config), config.initial_state(),
                             s0, s1, config.h0, tol=config.tol, h_min=config.h_min)
    A = first_integral(res.ys, config)
    return ODETrajectory(config, res.ts, res.ys, A, res.terminated, res.message)


def w_derivative_residual(traj: ODETrajectory) -> float:
    """Max of ``|w_j' - l_j e^{i theta} conj(w_k)|`` with ``w_j'`` by central differences.

    The complex equations are a consequence of the reduced system, so this
    checks the reduction rather than driving it.
    """
    cfg = traj.config
    dense = traj.dense()
    s = traj.s[1:-1]
    h = 1e-3
    lo, hi = traj.s[0] + 2 * h, traj.s[-1] - 2 * h
    s = s[(s > lo) & (s < hi)]
    if s.size == 0:
        return 0.0

    def w(ss):
        y = dense(ss)
        q1, q2 = cfg.squared_radii(y[..., U])
        return (np.sqrt(q1) * np.exp(1j * y[..., PHI1]), np.sqrt(q2) * np.exp(1j * y[..., PHI2]),
                y[..., THETA])

    p2, p1, m1, m2 = w(s + 2 * h), w(s + h), w(s - h), w(s - 2 * h)
    w1, w2, th = w(s)
    d1 = (-p2[0] + 8 * p1[0] - 8 * m1[0] + m2[0]) / (12 * h)
    d2 = (-p2[1] + 8 * p1[1] - 8 * m1[1] + m2[1]) / (12 * h)
    e = np.exp(1j * th)
    return float(max(np.max(np.abs(d1 - cfg.lambda1 * e * np.conj(w2))),
                     np.max(np.abs(d2 - cfg.lambda2 * e * np.conj(w1)))))


# ---------------------------------------------------------------------------
# surface assembly

def _conic(config: FamilyConfig):
    """``x_j(t)`` on ``l_1 x1^2 + l_2 x2^2 = C`` with first and second derivatives."""
    if config.case == "i":
        a1, a2 = np.sqrt(config.C / config.lambda1), np.sqrt(config.C / config.lambda2)

        def x(t):
            c, s = np.cos(t), np.sin(t)
            return ((a1 * c, -a1 * s, -a1 * c), (a2 * s, a2 * c, -a2 * s))
        return x, (0.0, 2 * np.pi), ()
    a1, a2 = np.sqrt(config.C / config.lambda1), np.sqrt(-config.C / config.lambda2)

    def x(t):
        sec, tan = 1 / np.cos(t), np.tan(t)
        return ((a1 * sec, a1 * sec * tan, a1 * (sec * tan ** 2 + sec ** 3)),
                (a2 * tan, a2 * sec ** 2, 2 * a2 * sec ** 2 * tan))
    return x, (-1.2, 1.2), (lambda u: np.abs(np.cos(u[..., 0])),)


def psi_squared(config: FamilyConfig, t, state) -> np.ndarray:
    """``|F_t|_g^2``; in case (i) ``(C/4l_1) r_1^2 sin^2 t + (C/4l_2) r_2^2 cos^2 t``."""
    x, _, _ = _conic(config)
    (x1, dx1, _), (x2, dx2, _) = x(np.asarray(t, float))
    q1, q2 = config.squared_radii(np.asarray(state)[..., U])
    return (dx1 ** 2 * q1 + dx2 ** 2 * q2) / 4


def surface_jets(config: FamilyConfig, dense: DenseTrajectory, u):
    """Position, first and second partials of the surface at ``u = (t, s)``."""
    x, _, _ = _conic(config)
    t, s = u[..., 0], u[..., 1]
    (x1, dx1, ddx1), (x2, dx2, ddx2) = x(t)
    y = dense(s)
    q1, q2 = config.squared_radii(y[..., U])
    if np.any(q1 <= 0) or np.any(q2 <= 0):
        raise DomainError("surface evaluated outside the trajectory's radius domain")
    r1, r2 = np.sqrt(q1), np.sqrt(q2)
    w1 = r1 * np.exp(1j * y[..., PHI1])
    w2 = r2 * np.exp(1j * y[..., PHI2])
    th = y[..., THETA]
    e = np.exp(1j * th)
    D = y[..., PHI1] + y[..., PHI2] - th
    dth = config.alpha * config.C / 4 * r1 * r2 * np.sin(D)
    l1, l2 = config.lambda1, config.lambda2
    dw1 = l1 * e * np.conj(w2)
    dw2 = l2 * e * np.conj(w1)
    ddw1 = l1 * (1j * dth * e * np.conj(w2) + l2 * w1)
    ddw2 = l2 * (1j * dth * e * np.conj(w1) + l1 * w2)
    z = y[..., Z]
    dz = config.C / 2 * r1 * r2 * np.sin(D)
    ddz = -config.C / 2 * dth * r1 * r2 * np.cos(D)
    zero = np.zeros_like(z)

    def pt(c1, c2, zz):
        return np.stack([c1.real, c1.imag, c2.real, c2.imag, zz], axis=-1)

    F = pt(x1 * w1, x2 * w2, z)
    Ft = pt(dx1 * w1, dx2 * w2, zero)
    Fs = pt(x1 * dw1, x2 * dw2, dz)
    Ftt = pt(ddx1 * w1, ddx2 * w2, zero)
    Fts = pt(dx1 * dw1, dx2 * dw2, zero)
    Fss = pt(x1 * ddw1, x2 * ddw2, ddz)
    d1 = np.stack([Ft, Fs], axis=-2)
    d2 = np.stack([np.stack([Ftt, Fts], axis=-2), np.stack([Fts, Fss], axis=-2)], axis=-3)
    return F, d1, d2


def assemble_surface(traj: ODETrajectory, t_range=None, s_margin: float = 0.0) -> ImmersionChart:
    """Wrap a trajectory as a surface chart in ``(t, s)``."""
    cfg = traj.config
    if traj.s.size < 2:
        raise DomainError("trajectory too short to assemble a surface")
    _, default_t, exclusions = _conic(cfg)
    t_range = default_t if t_range is None else tuple(map(float, t_range))
    if cfg.case == "ii" and not (-np.pi / 2 < t_range[0] < t_range[1] < np.pi / 2):
        raise DomainError("case (ii) needs a t-range inside (-pi/2, pi/2)")
    if not t_range[1] > t_range[0]:
        raise DomainError("empty t-range")
    s_lo, s_hi = traj.s[0] + s_margin, traj.s[-1] - s_margin
    if not s_hi > s_lo:
        raise DomainError("empty s-range after margin")
    dense = traj.dense()
    return ImmersionChart(
        func=lambda u: surface_jets(cfg, dense, u)[0],
        d1=lambda u: surface_jets(cfg, dense, u)[1],
        d2=lambda u: surface_jets(cfg, dense, u)[2],
        dim=2, domain=(t_range, (s_lo, s_hi)), space=AmbientSpace(2),
        exclusions=exclusions, name=f"family-{cfg.case}",
        periodic=(cfg.case == "i", False))


def random_config(rng: np.random.Generator, case: str, length: float = 5.0) -> FamilyConfig:
    """A reproducible config of the requested sign case.

    Case (ii) draws stay well inside the radius domain over ``length``
    with ``|l_2|`` small; runs may still end early, which is reported.
    """
    l1 = rng.uniform(0.3, 1.5)
    l2 = rng.uniform(0.3, 1.5) if case == "i" else -rng.uniform(0.05, 0.3)
    return FamilyConfig(lambda1=l1, lambda2=l2, C=rng.uniform(0.5, 2.0),
                        alpha=-rng.uniform(0.5, 2.0),
                        alpha1=rng.uniform(0.5, 2.0), alpha2=rng.uniform(1.0, 3.0),
                        phi1=rng.uniform(-np.pi, np.pi), phi2=rng.uniform(-np.pi, np.pi),
                        theta0=rng.uniform(-1.0, 1.0), s_range=(0.0, length))
