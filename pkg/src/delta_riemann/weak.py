"""Distributional residuals of constructed solutions against bump test functions.

For a test function ``phi`` supported in ``t > 0`` the mass and momentum
residuals are

    r_mass = <rho, phi_t> + <rho u, phi_x>
    r_mom  = <rho u, phi_t> + <rho u^2, phi_x> + int int mu u phi_x + <alpha rho, phi>

where a Dirac part ``w delta_L`` on the curve ``x = x_delta(t)`` contributes
line integrals ``int w(t) G(u_delta(t)) phi(x_delta(t), t) dt``.  The
``mu u`` term sees only the two-sided smooth velocity.  An exact weak solution
makes both residuals vanish; the quadrature keeps every cell on one side of
every wave so the smooth part is integrated to spectral accuracy.

``form="transformed"`` evaluates the source-free system in the shifted
velocity ``u - A(t)`` instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EmptyInput, QuadratureFailure
from .friction import FrictionTerm
from .kk import DeltaShock, RiemannData, TwoContact
from .model import State
from .pressureless import SingleContact, VacuumFan

DEFAULT_ORDER = 64
PASS_THRESHOLD = 1e-8
# Residuals below this are roundoff; monotonicity is not required there.
QUADRATURE_FLOOR = 1e-12
_EDGE = 1e-14


@dataclass(frozen=True)
class TestFunction:
    """Product bump ``psi((x-x0)/rx) * psi((t-t0)/rt)`` with ``psi(s) = exp(-1/(1-s^2))``."""

    __test__ = False  # not a pytest class

    x0: float
    t0: float
    rx: float
    rt: float

    def __post_init__(self):
        if not (self.rx > 0 and self.rt > 0):
            raise ValueError("test-function half-widths must be positive")
        if not self.t0 - self.rt > 0:
            raise ValueError("test function must be supported in t > 0")

    @classmethod
    def from_json(cls, spec: dict) -> "TestFunction":
        return cls(float(spec["x0"]), float(spec["t0"]), float(spec["rx"]), float(spec["rt"]))

    def to_json(self) -> dict:
        return {"x0": self.x0, "t0": self.t0, "rx": self.rx, "rt": self.rt}

    def parts(self, x, t):
        """Return ``(phi, phi_x, phi_t)`` at broadcast points."""
        px, dpx = _bump((np.asarray(x) - self.x0) / self.rx)
        pt, dpt = _bump((np.asarray(t) - self.t0) / self.rt)
        return px * pt, dpx * pt / self.rx, px * dpt / self.rt


def _bump(s):
    s = np.asarray(s, dtype=float)
    gap = 1.0 - s * s
    inside = gap > _EDGE
    safe = np.where(inside, gap, 1.0)
    val = np.where(inside, np.exp(-1.0 / safe), 0.0)
    dval = np.where(inside, val * (-2.0 * s / (safe * safe)), 0.0)
    return val, dval


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def _rule(a, b, n):
    """Gauss-Legendre nodes/weights mapped to ``[a, b]`` (arrays broadcast)."""
    xg, wg = gauss_legendre(n)
    a = np.asarray(a, dtype=float)[..., None]
    b = np.asarray(b, dtype=float)[..., None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * xg, half * wg


def _crossing_times(waves, xa, xb, ta, tb, n_scan=256):
    """Times in ``(ta, tb)`` at which a wave path crosses ``xa`` or ``xb``, with the ends."""
    edges = [ta, tb]
    ts = np.linspace(ta, tb, n_scan + 1)
    for wave in waves:
        xs = np.broadcast_to(wave(ts), ts.shape)
        for level in (xa, xb):
            g = xs - level
            for i in np.nonzero(g[:-1] * g[1:] < 0)[0]:
                lo, hi, glo = ts[i], ts[i + 1], g[i]
                for _ in range(200):
                    mid = 0.5 * (lo + hi)
                    if not lo < mid < hi:
                        break
                    gm = float(wave(mid)) - level
                    if (gm < 0) == (glo < 0):
                        lo, glo = mid, gm
                    else:
                        hi = mid
                edges.append(0.5 * (lo + hi))
    return np.unique(edges)


@dataclass(frozen=True)
class DeltaPart:
    position: Callable
    weight: Callable
    velocity: Callable


@dataclass(frozen=True)
class PiecewiseField:
    """A solution as ordered wave paths, region states and an optional Dirac part.

    ``regions[k](x, t)`` returns the smooth ``(rho, u)`` between ``waves[k-1]``
    and ``waves[k]``; ``u`` is the physical (friction-shifted) velocity.
    """

    waves: tuple
    regions: tuple
    delta: Optional[DeltaPart]
    mu: float
    friction: FrictionTerm


def _const_region(state: State, f: FrictionTerm):
    def region(x, t):
        shape = np.broadcast(x, t).shape
        return (np.full(shape, state.rho),
                np.broadcast_to(state.u + f.primitive(t), shape).astype(float))
    return region


def _fan_region(f: FrictionTerm):
    def region(x, t):
        x, t = np.broadcast_arrays(np.asarray(x, float), np.asarray(t, float))
        return np.zeros(x.shape), (x - f.double_primitive(t)) / t + f.primitive(t)
    return region


def _delta_part(sol: DeltaShock) -> DeltaPart:
    return DeltaPart(sol.position, sol.weight, sol.velocity)


def kk_field(sol, data: RiemannData, f: FrictionTerm) -> PiecewiseField:
    lft, rgt = data.left, data.right
    if lft == rgt:
        # Zero-strength waves are not discontinuities; do not split at them.
        return PiecewiseField((), (_const_region(lft, f),), None, data.mu, f)
    if isinstance(sol, DeltaShock):
        return PiecewiseField((sol.position,), (_const_region(lft, f), _const_region(rgt, f)),
                              _delta_part(sol), data.mu, f)
    if isinstance(sol, TwoContact):
        return PiecewiseField(
            (sol.x1.position, sol.x2.position),
            (_const_region(lft, f), _const_region(sol.intermediate, f), _const_region(rgt, f)),
            None, data.mu, f)
    raise TypeError(f"not a Keyfitz-Kranzer solution: {sol!r}")


def pressureless_field(sol, left: State, right: State, f: FrictionTerm) -> PiecewiseField:
    if left == right:
        return PiecewiseField((), (_const_region(left, f),), None, 0.0, f)
    if isinstance(sol, DeltaShock):
        return PiecewiseField((sol.position,), (_const_region(left, f), _const_region(right, f)),
                              _delta_part(sol), 0.0, f)
    if isinstance(sol, VacuumFan):
        return PiecewiseField(
            (sol.x_minus.position, sol.x_plus.position),
            (_const_region(left, f), _fan_region(f), _const_region(right, f)),
            None, 0.0, f)
    if isinstance(sol, SingleContact):
        return PiecewiseField((sol.x_contact.position,),
                              (_const_region(left, f), _const_region(right, f)), None, 0.0, f)
    raise TypeError(f"not a pressureless solution: {sol!r}")


def scale_density(fld: PiecewiseField, c: float) -> PiecewiseField:
    """Same field with every density value and the Dirac weight multiplied by ``c``."""
    def scaled(region):
        def inner(x, t):
            rho, u = region(x, t)
            return c * rho, u
        return inner
    delta = None
    if fld.delta is not None:
        w = fld.delta.weight
        delta = replace(fld.delta, weight=lambda t: c * w(t))
    return replace(fld, regions=tuple(scaled(r) for r in fld.regions), delta=delta)


@dataclass
class ResidualReport:
    r_mass: float
    r_momentum: float
    quadrature_order: int
    decomposition: dict = field(default_factory=dict)

    @property
    def max_abs(self) -> float:
        return max(abs(self.r_mass), abs(self.r_momentum))


def residual(fld: PiecewiseField, phi: TestFunction, n: int = DEFAULT_ORDER,
             form: str = "original") -> ResidualReport:
    if form not in ("original", "transformed"):
        raise ValueError(f"unknown weak form {form!r}")
    f = fld.friction
    xa, xb = phi.x0 - phi.rx, phi.x0 + phi.rx
    # Each time segment sees a fixed set of waves inside the spatial support.
    t_edges = _crossing_times(fld.waves, xa, xb, phi.t0 - phi.rt, phi.t0 + phi.rt)
    t_nodes, t_weights = _rule(t_edges[:-1], t_edges[1:], n)
    t_nodes, t_weights = t_nodes.ravel(), t_weights.ravel()
    shift = f.primitive(t_nodes)
    alpha = f.alpha(t_nodes)

    # Wave positions per time node, clipped to the spatial support.
    pos = np.array([np.broadcast_to(w(t_nodes), t_nodes.shape) for w in fld.waves])
    pos = pos.reshape(len(fld.waves), t_nodes.size)
    if pos.size and np.any(np.diff(pos, axis=0) < 0):
        raise QuadratureFailure("wave paths are not ordered at a quadrature time")
    cuts = np.clip(pos, xa, xb)
    lo = np.vstack([np.full(t_nodes.shape, xa), cuts])
    hi = np.vstack([cuts, np.full(t_nodes.shape, xb)])

    decomposition = {}
    total_mass = total_mom = 0.0
    for k, region in enumerate(fld.regions):
        xs, wx = _rule(lo[k], hi[k], n)            # (n_t, n)
        ts = t_nodes[:, None]
        live = (hi[k] > lo[k])[:, None]
        if (k > 0 and np.any(live & (xs < pos[k - 1][:, None]))) or \
                (k < len(fld.waves) and np.any(live & (xs >= pos[k][:, None]))):
            raise QuadratureFailure(f"quadrature cell of region {k} straddles a wave")
        rho, u = region(xs, ts)
        ph, phx, pht = phi.parts(xs, ts)
        if form == "original":
            mass_int = rho * pht + rho * u * phx
            mom_int = rho * u * pht + (rho * u * u + fld.mu * u) * phx \
                + alpha[:, None] * rho * ph
        else:
            ut = u - shift[:, None]
            mass_int = rho * pht + rho * u * phx
            mom_int = rho * ut * pht + (rho * ut * u + fld.mu * ut) * phx
        m_k = float(t_weights @ np.sum(wx * mass_int, axis=1))
        p_k = float(t_weights @ np.sum(wx * mom_int, axis=1))
        decomposition[f"region_{k}"] = (m_k, p_k)
        total_mass += m_k
        total_mom += p_k

    if fld.delta is not None:
        xd = np.broadcast_to(fld.delta.position(t_nodes), t_nodes.shape)
        wd = np.broadcast_to(fld.delta.weight(t_nodes), t_nodes.shape)
        ud = np.broadcast_to(fld.delta.velocity(t_nodes), t_nodes.shape)
        ph, phx, pht = phi.parts(xd, t_nodes)
        mass_line = wd * (pht + ud * phx)
        if form == "original":
            mom_line = wd * ud * (pht + ud * phx) + alpha * wd * ph
        else:
            ut = ud - shift
            mom_line = wd * ut * (pht + ud * phx)
        m_l = float(t_weights @ mass_line)
        p_l = float(t_weights @ mom_line)
        decomposition["line"] = (m_l, p_l)
        total_mass += m_l
        total_mom += p_l

    return ResidualReport(total_mass, total_mom, n, decomposition)


def residual_kk(sol, data: RiemannData, f: FrictionTerm, phi: TestFunction,
                n: int = DEFAULT_ORDER, form: str = "original") -> ResidualReport:
    return residual(kk_field(sol, data, f), phi, n, form)


def residual_pressureless(sol, left: State, right: State, f: FrictionTerm,
                          phi: TestFunction, n: int = DEFAULT_ORDER,
                          form: str = "original") -> ResidualReport:
    return residual(pressureless_field(sol, left, right, f), phi, n, form)


@dataclass
class SweepRow:
    order: int
    max_mass: float
    max_momentum: float

    @property
    def max_residual(self) -> float:
        return max(self.max_mass, self.max_momentum)


@dataclass
class SweepTable:
    rows: list[SweepRow]
    monotone: bool

    def final(self) -> float:
        return self.rows[-1].max_residual


def _supported(phi) -> bool:
    return phi.rx > 0 and phi.rt > 0 and phi.t0 - phi.rt > 0


def residual_sweep(sol, data, f: FrictionTerm, phis: Sequence[TestFunction],
                   orders: Sequence[int], floor: float = QUADRATURE_FLOOR) -> SweepTable:
    """Maximum residual over ``phis`` at each quadrature order.

    ``data`` is a :class:`RiemannData` for the Keyfitz-Kranzer system or a
    ``(left, right)`` pair for the pressureless one.  ``monotone`` reports
    whether the maximum decreases strictly from order to order until it
    reaches ``floor`` and then stays below it.
    """
    phis = [p for p in phis if _supported(p)]
    if not phis or not orders:
        raise EmptyInput("residual sweep needs at least one supported test function and order")
    if isinstance(data, RiemannData):
        fld = kk_field(sol, data, f)
    else:
        left, right = data
        fld = pressureless_field(sol, left, right, f)
    rows = []
    for n in orders:
        reports = [residual(fld, phi, n) for phi in phis]
        rows.append(SweepRow(int(n), max(abs(r.r_mass) for r in reports),
                             max(abs(r.r_momentum) for r in reports)))
    return SweepTable(rows, is_monotone_to_floor([r.max_residual for r in rows], floor))


def is_monotone_to_floor(values: Sequence[float], floor: float = QUADRATURE_FLOOR) -> bool:
    for prev, cur in zip(values, values[1:]):
        if prev <= floor:
            if cur > floor:
                return False
        elif not cur < prev:
            return False
    return True
