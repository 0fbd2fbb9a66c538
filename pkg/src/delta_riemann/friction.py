"""Time-dependent friction coefficient alpha(t) and its primitives.

Every wave path in the friction problems has the form ``x(t) = c*t + B(t)``
with ``B(t) = int_0^t int_0^r alpha(s) ds dr``; velocities are shifted by
``A(t) = int_0^t alpha(s) ds``.  This module supplies ``alpha``, ``A`` and
``B`` for the zero, constant and time-gradually-degenerate families in closed
form, and by adaptive Gauss-Kronrod quadrature for arbitrary continuous
coefficients.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, QuadratureFailure

ZERO = "zero"
CONSTANT = "constant"
DEGENERATE = "degenerate"
GENERAL = "general"

DEFAULT_TOL = 1e-10
MAX_INTERVALS = 1_000_000
SMALL_T = 1e-3

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
_XGK = np.array([
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144845693013,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
])


def _call_vectorized(func: Callable, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(func(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(func(float(xi))) for xi in x])


def _gk15(func, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    y = _call_vectorized(func, mid + half * _XGK)
    kronrod = half * float(_WGK @ y)
    gauss = half * float(_WG @ y[1::2])
    return kronrod, abs(kronrod - gauss)


def adaptive_quad(func: Callable, a: float, b: float, tol: float = DEFAULT_TOL,
                  max_intervals: int = MAX_INTERVALS) -> float:
    """Integrate ``func`` over ``[a, b]`` by globally adaptive G7/K15 bisection.

    The interval with the largest error estimate is bisected until the summed
    estimate drops below the absolute tolerance ``tol``.

    Raises
    ------
    QuadratureFailure
        If ``max_intervals`` subintervals are not enough to reach ``tol``.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    val, err = _gk15(func, a, b)
    heap = [(-err, a, b, val)]
    total_val, total_err = val, err
    n_intervals = 1
    while total_err > tol:
        if n_intervals >= max_intervals:
            raise QuadratureFailure(
                f"adaptive quadrature on [{a}, {b}] reached {max_intervals} "
                f"intervals with error estimate {total_err:.3e} > {tol:.3e}")
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise QuadratureFailure(
                f"interval [{lo}, {hi}] cannot be bisected further")
        v1, e1 = _gk15(func, lo, mid)
        v2, e2 = _gk15(func, mid, hi)
        total_val += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n_intervals += 1
    # Re-sum to shed the drift of the running updates.
    return sign * math.fsum(item[3] for item in heap)


@dataclass(frozen=True)
class FrictionTerm:
    """Friction coefficient alpha(t) in the momentum source ``alpha(t)*rho``.

    Use the constructors :meth:`zero`, :meth:`constant`, :meth:`degenerate`
    and :meth:`general` rather than the raw fields.  For the degenerate family
    ``alpha(t) = theta / (1 + t)**beta`` and ``theta`` carries its own sign.
    """

    kind: str
    a: float = 0.0
    theta: float = 0.0
    beta: float = 0.0
    func: Optional[Callable[[float], float]] = field(default=None, compare=False)
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.kind not in (ZERO, CONSTANT, DEGENERATE, GENERAL):
            raise ConfigError(f"unknown friction kind {self.kind!r}")
        if self.kind == DEGENERATE and not self.beta >= 0:
            raise ConfigError(f"degenerate friction needs beta >= 0, got {self.beta}")
        if self.kind == GENERAL:
            if self.func is None:
                raise ConfigError("general friction needs a callable alpha(t)")
            if not self.tol > 0:
                raise ConfigError(f"quadrature tolerance must be positive, got {self.tol}")

    @classmethod
    def zero(cls) -> "FrictionTerm":
        return cls(ZERO)

    @classmethod
    def constant(cls, a: float) -> "FrictionTerm":
        return cls(CONSTANT, a=float(a))

    @classmethod
    def degenerate(cls, theta: float, beta: float) -> "FrictionTerm":
        return cls(DEGENERATE, theta=float(theta), beta=float(beta))

    @classmethod
    def general(cls, func: Callable[[float], float], tol: float = DEFAULT_TOL) -> "FrictionTerm":
        return cls(GENERAL, func=func, tol=float(tol))

    @classmethod
    def from_json(cls, spec: dict) -> "FrictionTerm":
        kind = spec.get("kind")
        if kind == ZERO:
            return cls.zero()
        if kind == CONSTANT:
            return cls.constant(spec["a"])
        if kind == DEGENERATE:
            return cls.degenerate(spec["theta"], spec["beta"])
        raise ConfigError(f"friction kind {kind!r} is not expressible in JSON")

    def to_json(self) -> dict:
        if self.kind == ZERO:
            return {"kind": ZERO}
        if self.kind == CONSTANT:
            return {"kind": CONSTANT, "a": self.a}
        if self.kind == DEGENERATE:
            return {"kind": DEGENERATE, "theta": self.theta, "beta": self.beta}
        raise ConfigError("general friction has no JSON form")

    # Each of the three evaluators accepts a scalar or an array of times.

    def alpha(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == ZERO:
            out = np.zeros_like(t)
        elif self.kind == CONSTANT:
            out = np.full_like(t, self.a)
        elif self.kind == DEGENERATE:
            out = self.theta * np.power(1.0 + t, -self.beta)
        else:
            out = _call_vectorized(self.func, np.atleast_1d(t)).reshape(t.shape)
        return out if out.ndim else float(out)

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == ZERO:
            out = np.zeros_like(t)
        elif self.kind == CONSTANT:
            out = self.a * t
        elif self.kind == DEGENERATE:
            out = self.theta * _degenerate_primitive(t, self.beta)
        else:
            out = np.array([adaptive_quad(self.func, 0.0, ti, self.tol)
                            for ti in np.atleast_1d(t)]).reshape(t.shape)
        return out if out.ndim else float(out)

    def double_primitive(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == ZERO:
            out = np.zeros_like(t)
        elif self.kind == CONSTANT:
            out = 0.5 * self.a * t * t
        elif self.kind == DEGENERATE:
            out = self.theta * _degenerate_double_primitive(t, self.beta)
        else:
            # Repeated integration collapses to int_0^t (t - s) alpha(s) ds.
            vals = []
            for ti in np.atleast_1d(t):
                kernel = lambda s, ti=ti: (ti - s) * _call_vectorized(self.func, np.atleast_1d(s))
                vals.append(adaptive_quad(kernel, 0.0, ti, self.tol))
            out = np.array(vals).reshape(t.shape)
        return out if out.ndim else float(out)


def _degenerate_primitive(t, beta):
    lt = np.log1p(t)
    if beta == 1.0:
        return lt
    if beta == 2.0:
        return t / (t + 1.0)
    return np.expm1((1.0 - beta) * lt) / (1.0 - beta)


def _degenerate_double_primitive(t, beta):
    # Integration by parts, B = (t+1) A(t) - int_0^t (1+s)^(1-beta) ds, which
    # stays accurate as beta -> 1 (the textbook form divides by 1 - beta).
    lt = np.log1p(t)
    if beta == 1.0:
        big = (t + 1.0) * lt - t
    elif beta == 2.0:
        big = t - lt
    else:
        big = (t + 1.0) * _degenerate_primitive(t, beta) - np.expm1((2.0 - beta) * lt) / (2.0 - beta)
    # Both terms are ~t for small t; use the Taylor series of (1+s)^-beta there.
    small = np.zeros_like(t)
    coef = 1.0
    for n in range(8):
        small = small + coef * t ** (n + 2) / ((n + 1) * (n + 2))
        coef *= -(beta + n) / (n + 1)
    return np.where(t < SMALL_T, small, big)


def eval_alpha(f: FrictionTerm, t):
    return f.alpha(t)


def primitive_A(f: FrictionTerm, t):
    """``A(t) = int_0^t alpha(s) ds``."""
    return f.primitive(t)


def double_primitive_B(f: FrictionTerm, t):
    """``B(t) = int_0^t int_0^r alpha(s) ds dr``."""
    return f.double_primitive(t)


@dataclass(frozen=True)
class Trajectory:
    """Wave path ``x(t) = speed_const*t + B(t)`` with velocity ``speed_const + A(t)``."""

    speed_const: float
    friction: FrictionTerm

    def position(self, t):
        if np.ndim(t):
            t = np.asarray(t, dtype=float)
        return self.speed_const * t + self.friction.double_primitive(t)

    def velocity(self, t):
        return self.speed_const + self.friction.primitive(t)
