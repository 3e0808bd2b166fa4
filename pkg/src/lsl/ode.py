"""Classical RK4 stepping shared by the curve and family integrators."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, ParameterError


def rk4_step(f: Callable, t, y: np.ndarray, h) -> np.ndarray:
    """One classical RK4 step; ``h`` may be an array broadcasting over ``y``'s leading axes."""
    h = np.asarray(h, dtype=float)
    hh = h[..., None] if h.ndim else h
    k1 = f(t, y)
    k2 = f(t + h / 2, y + hh / 2 * k1)
    k3 = f(t + h / 2, y + hh / 2 * k2)
    k4 = f(t + h, y + hh * k3)
    return y + hh / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate_fixed(f: Callable, y0, t0: float, t1: float, n_steps: int):
    """Fixed-step RK4 from ``t0`` to ``t1``; returns ``(ts, ys)``."""
    if n_steps < 1:
        raise ParameterError("n_steps must be positive")
    ts = np.linspace(t0, t1, n_steps + 1)
    ys = np.empty((n_steps + 1, len(y0)))
    ys[0] = y0
    h = (t1 - t0) / n_steps
    for i in range(n_steps):
        ys[i + 1] = rk4_step(f, ts[i], ys[i], h)
    return ts, ys


@dataclass
class AdaptiveResult:
    ts: np.ndarray
    ys: np.ndarray
    terminated: bool          # left the domain before t1
    message: str = ""


def integrate_adaptive(f: Callable, y0, t0: float, t1: float, h0: float,
                       tol: Optional[float] = 1e-10, h_min: float = 1e-6,
                       h_max: Optional[float] = None) -> AdaptiveResult:
    """RK4 with step-halving control.

    Each step is compared with two half steps; the local error estimate is
    ``|y_half - y_full| / 15`` (Richardson), measured relative to
    ``max(1, |y|)`` componentwise.  The accepted value is the extrapolated
    ``y_half + (y_half - y_full) / 15``, so the estimate is conservative.
    ``tol=None`` disables control and runs with the fixed step ``h0``.
    A ``DomainError`` raised by ``f`` ends the run at the last valid point.
    """
    if h0 <= 0 or t1 <= t0:
        raise ParameterError("need h0 > 0 and t1 > t0")
    h_max = h0 if h_max is None else h_max
    ts, ys = [t0], [np.asarray(y0, dtype=float)]
    t, y, h = t0, ys[0], h0
    while t < t1 - 1e-14 * max(1.0, abs(t1)):
        h = min(h, t1 - t)
        try:
            if tol is None:
                y_new = rk4_step(f, t, y, h)
            else:
                full = rk4_step(f, t, y, h)
                half = rk4_step(f, t + h / 2, rk4_step(f, t, y, h / 2), h / 2)
                err = float(np.max(np.abs(half - full) / np.maximum(1.0, np.abs(half)))) / 15.0
                if err > tol and h > h_min:
                    h = max(h / 2, h_min)
                    continue
                y_new = half + (half - full) / 15.0
            if not np.all(np.isfinite(y_new)):
                raise DomainError("non-finite state")
        except DomainError as exc:
            if tol is not None and h > h_min:
                h = max(h / 2, h_min)
                continue
            return AdaptiveResult(np.array(ts), np.array(ys), True, str(exc))
        t, y = t + h, y_new
        ts.append(t)
        ys.append(y)
        if tol is not None and err < tol / 64:
            h = min(2 * h, h_max)
    return AdaptiveResult(np.array(ts), np.array(ys), False)


@dataclass
class DenseTrajectory:
    """RK4 node values plus evaluation anywhere by one local RK4 step.

    Evaluating at ``t`` steps from the nearest node at or below ``t``, so
    the interpolant carries the integrator's own accuracy.
    """

    f: Callable
    ts: np.ndarray
    ys: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.ts, t, side="right") - 1, 0, len(self.ts) - 1)
        return rk4_step(self.f, self.ts[idx], self.ys[idx], t - self.ts[idx])
