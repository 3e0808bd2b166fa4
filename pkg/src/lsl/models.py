"""Closed-form and ODE-defined Legendrian shrinker charts.

Surfaces live in ``R^5`` with coordinates ``(x1, y1, x2, y2, z)`` and are
written with complex components ``w_j = x_j + i y_j``.  All surface models
satisfy ``H + theta xi = 8a F^perp`` for ``a < 0``; the radius is
``R = 1/sqrt(-2a)``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .ambient import AmbientSpace
from .errors import ParameterError
from .immersion import ImmersionChart
from .ode import DenseTrajectory, integrate_fixed

TWO_PI = 2 * np.pi


@dataclass(frozen=True)
class ModelParams:
    """Parameters shared by the model constructors."""

    a: float = -0.125
    gamma: float = np.pi / 4
    nu: float = 1.0
    B: float = 1.0
    C0: float = 0.0
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 0.0
    C4: float = 0.0

    def __post_init__(self):
        if not self.a < 0:
            raise ParameterError("shrinker scale a must be negative")
        if not 0 < self.gamma < np.pi / 2:
            raise ParameterError("gamma must lie in (0, pi/2)")
        if not self.nu > 0:
            raise ParameterError("nu must be positive")
        if not self.B > 0:
            raise ParameterError("B must be positive")


def _radius(a: float) -> float:
    if not a < 0:
        raise ParameterError("shrinker scale a must be negative")
    return 1.0 / np.sqrt(-2.0 * a)


# ---------------------------------------------------------------------------
# jets of separable complex components  w = amp(u) * exp(i phase(u))

@dataclass
class _CJet:
    val: np.ndarray   # (...)
    d: np.ndarray     # (..., k)
    dd: np.ndarray    # (..., k, k)


def _polar(amp: _CJet, phase: _CJet) -> _CJet:
    e = np.exp(1j * phase.val)
    A, dA, ddA = amp.val, amp.d, amp.dd
    dP, ddP = phase.d, phase.dd
    val = A * e
    d = (dA + 1j * A[..., None] * dP) * e[..., None]
    dd = (ddA
          + 1j * (dA[..., :, None] * dP[..., None, :] + dA[..., None, :] * dP[..., :, None])
          + 1j * A[..., None, None] * ddP
          - A[..., None, None] * dP[..., :, None] * dP[..., None, :]) * e[..., None, None]
    return _CJet(val, d, dd)


def _const(u, c=0.0) -> _CJet:
    shp = u.shape[:-1]
    k = u.shape[-1]
    return _CJet(np.full(shp, c, dtype=complex), np.zeros(shp + (k,), complex),
                 np.zeros(shp + (k, k), complex))


def _linear(u, coeffs, const=0.0) -> _CJet:
    """``const + sum_i coeffs[i] u_i``."""
    coeffs = np.asarray(coeffs, dtype=float)
    j = _const(u, const)
    j.val = j.val + np.einsum("...i,i->...", u, coeffs)
    j.d = j.d + coeffs
    return j


def _of_param(u, i, f, df, ddf, scale=1.0) -> _CJet:
    """``scale * f(u_i)`` with its derivatives."""
    j = _const(u)
    x = u[..., i]
    j.val = scale * f(x) + 0j
    j.d[..., i] = scale * df(x)
    j.dd[..., i, i] = scale * ddf(x)
    return j


def _assemble(w1: _CJet, w2: _CJet, z: _CJet):
    """Real coordinates (x1, y1, x2, y2, z) and their partials."""
    def stack(attr):
        a1, a2, az = getattr(w1, attr), getattr(w2, attr), getattr(z, attr)
        return np.stack([a1.real, a1.imag, a2.real, a2.imag, az.real], axis=-1)
    return stack("val"), stack("d"), stack("dd")


def _surface_chart(builder, domain, name, exclusions=(), periodic=(False, False)):
    def func(u):
        return _assemble(*builder(u))[0]

    def d1(u):
        return _assemble(*builder(u))[1]

    def d2(u):
        return _assemble(*builder(u))[2]

    return ImmersionChart(func=func, dim=2, domain=domain, space=AmbientSpace(2),
                          d1=d1, d2=d2, exclusions=tuple(exclusions), name=name,
                          periodic=periodic)


_sin = (np.sin, np.cos, lambda x: -np.sin(x))
_cos = (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x))
_sinh = (np.sinh, np.cosh, np.sinh)


# ---------------------------------------------------------------------------
# surface models

def model_cylinder(a: float = -0.125, C1: float = 0.0) -> ImmersionChart:
    """``(R e^{it}, s, t/(4a) + C1)`` on ``(t, s)``."""
    R = _radius(a)

    def build(u):
        w1 = _polar(_const(u, R), _linear(u, [1.0, 0.0]))
        w2 = _linear(u, [0.0, 1.0])
        z = _linear(u, [1 / (4 * a), 0.0], C1)
        return w1, w2, z

    return _surface_chart(build, ((0.0, TWO_PI), (-2.0, 2.0)), "cylinder",
                          periodic=(True, False))


def model_torus(a: float = -0.125, C2: float = 0.0) -> ImmersionChart:
    """``(R e^{it}, R e^{is}, (t + s)/(4a) + C2)`` on ``(t, s)``."""
    R = _radius(a)

    def build(u):
        w1 = _polar(_const(u, R), _linear(u, [1.0, 0.0]))
        w2 = _polar(_const(u, R), _linear(u, [0.0, 1.0]))
        z = _linear(u, [1 / (4 * a), 1 / (4 * a)], C2)
        return w1, w2, z

    return _surface_chart(build, ((0.0, TWO_PI), (-2.0, 2.0)), "torus",
                          periodic=(True, True))


UPSILON_VARIANTS = ("sin-phase", "linear-phase", "legendrian")
_cosh = (np.cosh, np.sinh, np.cosh)


def model_upsilon(a: float = -0.125, gamma: float = np.pi / 4, C3: float = 0.0,
                  variant: str = "sin-phase") -> ImmersionChart:
    """Model on ``(s, t)`` with ``sinh t`` amplitudes.

    ``variant="sin-phase"`` uses the phase ``-sin s`` in the second factor;
    ``"linear-phase"`` uses ``-s sin(gamma)``.  Neither is Legendrian unless
    ``tan(gamma) = 1``, so residuals are reported rather than gated.
    ``"legendrian"`` is the hyperbolic counterpart of the Legendrian ``psi``::

        R (-i cos(g) cosh(t) e^{i s / sin g}, cot(g) sinh(t) e^{-i s sin g},
           cos(g)^2 / (4 a sin g) s + C3)
    """
    R = _radius(a)
    if not 0 < gamma < np.pi / 2:
        raise ParameterError("gamma must lie in (0, pi/2)")
    if variant not in UPSILON_VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    sg, cg, tg = np.sin(gamma), np.cos(gamma), np.tan(gamma)

    def build(u):
        if variant == "legendrian":
            w1 = _polar(_of_param(u, 1, *_cosh, scale=R * cg),
                        _linear(u, [1 / sg, 0.0], -np.pi / 2))
            w2 = _polar(_of_param(u, 1, *_sinh, scale=R * cg / sg), _linear(u, [-sg, 0.0]))
            z = _linear(u, [cg * cg / (4 * a * sg), 0.0], C3)
            return w1, w2, z
        w1 = _polar(_of_param(u, 1, *_sinh, scale=R * sg), _linear(u, [1 / sg, 0.0], -np.pi / 2))
        if variant == "sin-phase":
            ph = _of_param(u, 0, *_sin, scale=-1.0)
        else:
            ph = _linear(u, [-sg, 0.0])
        w2 = _polar(_of_param(u, 1, *_sinh, scale=R * tg), ph)
        z = _linear(u, [-sg * tg / 4, 0.0], R * C3)
        return w1, w2, z

    return _surface_chart(build, ((0.0, TWO_PI), (0.2, 2.0)), f"upsilon-{variant}",
                          exclusions=(lambda u: np.abs(np.sinh(u[..., 1])),))


PSI_VARIANTS = ("legendrian", "sin-sin")


def model_psi(a: float = -0.125, nu: float = 1.0, C4: float = 0.0,
              variant: str = "legendrian") -> ImmersionChart:
    """Model on ``(s, t)`` built from ``sinh nu``, ``cosh nu``, ``coth nu``.

    ``"legendrian"``::

        R (cosh(nu) sin(s) e^{i t / sinh nu}, coth(nu) cos(s) e^{i t sinh nu},
           cosh(nu)^2 / (4 a sinh nu) t + C4)

    which is Legendrian and conformal.  ``"sin-sin"`` uses ``sinh(nu) sin s``
    and ``coth(nu) sin s`` with ``z`` linear in ``s``; it fails the contact
    condition and is kept for diagnostics.
    """
    R = _radius(a)
    if not nu > 0:
        raise ParameterError("nu must be positive")
    if variant not in PSI_VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    sv, cv = np.sinh(nu), np.cosh(nu)
    tv = cv / sv

    def build(u):
        if variant == "legendrian":
            w1 = _polar(_of_param(u, 0, *_sin, scale=R * cv), _linear(u, [0.0, 1 / sv]))
            w2 = _polar(_of_param(u, 0, *_cos, scale=R * tv), _linear(u, [0.0, sv]))
            z = _linear(u, [0.0, cv * cv / (4 * a * sv)], C4)
        else:
            w1 = _polar(_of_param(u, 0, *_sin, scale=R * sv), _linear(u, [0.0, 1 / sv]))
            w2 = _polar(_of_param(u, 0, *_sin, scale=R * tv), _linear(u, [0.0, sv]))
            z = _linear(u, [-sv * tv / 4, 0.0], R * C4)
        return w1, w2, z

    return _surface_chart(build, ((0.2, np.pi - 0.2), (-2.0, 2.0)), f"psi-{variant}",
                          exclusions=(lambda u: np.abs(np.sin(u[..., 0])),))


# ---------------------------------------------------------------------------
# Clifford torus and its lift into C^3

def clifford_pair():
    """``(F, Fbar)``: the Legendrian Clifford shrinker and its cone section.

    ``F(t, s) = (2e^{it}, 2e^{is}, -2(t + s))`` in ``R^5`` and
    ``Fbar(t, s) = (e^{it}, e^{is}, e^{-i(t+s)})`` in ``R^6`` (Euclidean chart).
    """
    F = replace(model_torus(-0.125, 0.0), name="clifford",
                domain=((0.0, TWO_PI), (0.0, TWO_PI)))

    def fbar_build(u):
        one = _const(u, 1.0)
        return (_polar(one, _linear(u, [1.0, 0.0])),
                _polar(one, _linear(u, [0.0, 1.0])),
                _polar(one, _linear(u, [-1.0, -1.0])))

    def stack(js, attr):
        return np.stack(sum(([getattr(j, attr).real, getattr(j, attr).imag] for j in js), []),
                        axis=-1)

    Fbar = ImmersionChart(func=lambda u: stack(fbar_build(u), "val"), dim=2,
                          domain=((0.0, TWO_PI), (0.0, TWO_PI)), space=None,
                          target_dim=6, d1=lambda u: stack(fbar_build(u), "d"),
                          d2=lambda u: stack(fbar_build(u), "dd"),
                          periodic=(True, True), name="clifford-cone")
    return F, Fbar


# ---------------------------------------------------------------------------
# Legendrian Abresch-Langer curve

def al_rhs(B: float):
    """Right-hand side of ``x' = x y, y' = B - x^2, theta' = x``."""
    def f(t, y):
        x, yy = y[..., 0], y[..., 1]
        return np.stack([x * yy, B - x * x, x], axis=-1)
    return f


def al_conserved(B: float, state) -> np.ndarray:
    """``B ln x - (x^2 + y^2)/2``, constant along trajectories."""
    state = np.asarray(state, dtype=float)
    x, y = state[..., 0], state[..., 1]
    return B * np.log(x) - (x * x + y * y) / 2


def al_position(B: float, state) -> np.ndarray:
    x, y, th = state[..., 0], state[..., 1], state[..., 2]
    c, s = np.cos(th), np.sin(th)
    return np.stack([y * c + x * s, y * s - x * c, -B * th / 2], axis=-1)


@dataclass(frozen=True)
class ALCurve:
    """An integrated curve together with its chart."""

    B: float
    trajectory: DenseTrajectory
    chart: ImmersionChart

    @property
    def ts(self) -> np.ndarray:
        return self.trajectory.ts

    @property
    def states(self) -> np.ndarray:
        return self.trajectory.ys

    def conserved_drift(self) -> float:
        V = al_conserved(self.B, self.states)
        return float(np.max(np.abs(V - V[0])))


def abresch_langer_curve(B: float = 1.0, x0: float = 1.0, y0: float = 0.0,
                         theta0: float = 0.0, t_range=(0.0, 20.0),
                         n_steps: Optional[int] = None) -> ALCurve:
    """Integrate the curve ODE with RK4 and wrap it as a 1-d chart into ``R^3``.

    Derivatives come from the right-hand side:
    ``gamma' = B (cos th, sin th, -x/2)`` and
    ``gamma'' = B x (-sin th, cos th, -y/2)``.
    """
    if not B > 0:
        raise ParameterError("B must be positive")
    if not x0 > 0:
        raise ParameterError("x0 must be positive")
    t0, t1 = map(float, t_range)
    if not t1 > t0:
        raise ParameterError("empty t_range")
    if n_steps is None:
        n_steps = max(1, int(np.ceil((t1 - t0) / 1e-3)))
    f = al_rhs(B)
    ts, ys = integrate_fixed(f, np.array([x0, y0, theta0], float), t0, t1, n_steps)
    traj = DenseTrajectory(f, ts, ys)

    def func(u):
        return al_position(B, traj(u[..., 0]))

    def d1(u):
        st = traj(u[..., 0])
        x, th = st[..., 0], st[..., 2]
        v = np.stack([B * np.cos(th), B * np.sin(th), -B * x / 2], axis=-1)
        return v[..., None, :]

    def d2(u):
        st = traj(u[..., 0])
        x, y, th = st[..., 0], st[..., 1], st[..., 2]
        v = B * x[..., None] * np.stack([-np.sin(th), np.cos(th), -y / 2], axis=-1)
        return v[..., None, None, :]

    chart = ImmersionChart(func=func, dim=1, domain=((t0, t1),), space=AmbientSpace(1),
                           d1=d1, d2=d2, name="abresch-langer")
    return ALCurve(B=B, trajectory=traj, chart=chart)


def al_angle_increment(B: float, x0: float, t_max: float = 200.0):
    """Period ``T`` of ``(x, y)`` started at ``(x0, 0)`` and the angle gained over it.

    The system is reversible under ``(t, y) -> (-t, -y)``, so an orbit
    through ``y = 0`` closes after twice the time of its next ``y = 0``
    crossing.  That crossing is located with an adaptive high-order
    solver; this is a search utility, the curve itself is integrated with RK4.
    """
    from scipy.integrate import solve_ivp

    f = al_rhs(B)

    def half(t, y):
        return y[1]
    # y' = B - x0^2 at the start, so the half-period crossing has the other sign
    half.direction = -1.0 if B - x0 * x0 > 0 else 1.0
    half.terminal = True

    sol = solve_ivp(f, (0.0, t_max), [x0, 0.0, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-13, events=half)
    if not sol.t_events[0].size:
        raise ParameterError("no closed orbit found before t_max")
    return 2 * float(sol.t_events[0][0]), 2 * float(sol.y_events[0][0][2])


def closed_al_x0(B: float = 1.0, p: int = 2, q: int = 3, bracket=(0.05, 0.999)) -> float:
    """Initial ``x0`` (with ``y0 = 0``) whose orbit turns by ``2 pi p / q`` per period."""
    from scipy.optimize import brentq

    target = TWO_PI * p / q
    lo, hi = (b * np.sqrt(B) for b in bracket)
    return brentq(lambda x0: al_angle_increment(B, x0)[1] - target, lo, hi, xtol=1e-13)


MODEL_NAMES = ("cylinder", "torus", "upsilon", "psi", "abresch-langer", "clifford")
