"""Exact Riemann solver for the Chaplygin Keyfitz-Kranzer system with friction.

    rho_t + (rho u)_x = 0
    (rho u)_t + (rho u (u + mu/rho))_x = alpha(t) rho

Both characteristic fields are linearly degenerate.  When
``u_- < u_+ + mu/rho_+`` the solution is two contact discontinuities around an
intermediate state; otherwise it is a delta-shock whose position, weight and
velocity follow from the generalized Rankine-Hugoniot relations.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, DegenerateData, InvalidTime, NotDeltaRegime, NumericalFailure
from .friction import FrictionTerm, Trajectory
from .model import Profile, SingularPart, State, as_grid

EPS_CLS = 1e-12


@dataclass(frozen=True)
class RiemannData:
    left: State
    right: State
    mu: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ConfigError(f"Chaplygin coefficient mu must be positive, got {self.mu}")


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    S_DELTA = "S_delta"

    @property
    def is_delta(self) -> bool:
        return self in (Region.V, Region.S_DELTA)


@dataclass(frozen=True)
class TwoContact:
    intermediate: State
    x1: Trajectory
    x2: Trajectory


@dataclass(frozen=True)
class DeltaShock:
    """Delta-shock with weight ``w_slope*t`` and velocity ``u_delta0 + A(t)``."""

    u_delta0: float
    w_slope: float
    x_delta: Trajectory

    def weight(self, t):
        return self.w_slope * t

    def velocity(self, t):
        return self.u_delta0 + self.x_delta.friction.primitive(t)

    def position(self, t):
        return self.x_delta.position(t)


KKSolution = Union[TwoContact, DeltaShock]


def classify(data: RiemannData) -> Region:
    """Locate the right state in the phase-plane regions of the left state.

    Boundary conventions: the line ``u_+ = u_-`` and the 2-contact curve
    through the left state are folded into I (``rho_+ >= mu/v1``) or II on the
    upper side and into IV on the lower side; a right state within relative
    distance ``EPS_CLS`` of the curve ``rho_+ = mu/v2`` is ``S_DELTA``.
    """
    lft, rgt, mu = data.left, data.right, data.mu
    if lft == rgt:
        raise DegenerateData("left and right states are identical")
    eta = lft.u + mu / lft.rho
    v1 = eta - rgt.u
    if rgt.u < lft.u:
        rho_crit = mu / (lft.u - rgt.u)
        if abs(rgt.rho - rho_crit) <= EPS_CLS * rho_crit:
            return Region.S_DELTA
        if rgt.rho > rho_crit:
            return Region.V
        return Region.IV if rgt.rho >= mu / v1 else Region.III
    if rgt.u >= eta:
        return Region.II
    return Region.I if rgt.rho >= mu / v1 else Region.II


def _jumps(data: RiemannData):
    lft, rgt, mu = data.left, data.right, data.mu
    j_rho = lft.rho - rgt.rho
    j_m = lft.rho * lft.u - rgt.rho * rgt.u
    j_q = lft.rho * lft.u ** 2 - rgt.rho * rgt.u ** 2 + mu * (lft.u - rgt.u)
    return j_rho, j_m, j_q


def discriminant(data: RiemannData) -> float:
    """Reduced discriminant ``[rho u]^2 - [rho][rho u^2 + mu u]`` in factored form."""
    lft, rgt, mu = data.left, data.right, data.mu
    du = lft.u - rgt.u
    return lft.rho * rgt.rho * du * ((du - mu / rgt.rho) + mu / lft.rho)


def delta_shock_params(data: RiemannData) -> tuple[float, float]:
    """Constant part of the delta velocity and the weight growth rate.

    Returns ``(u_delta0, w_slope)`` with ``w(t) = w_slope*t`` and
    ``u_delta(t) = u_delta0 + A(t)``.  The admissible root of
    ``[rho] x^2 - 2[rho u] x + [rho u^2 + mu u] = 0`` is evaluated in whichever
    algebraically equivalent form avoids cancellation.
    """
    lft, rgt, mu = data.left, data.right, data.mu
    if lft == rgt or rgt.u >= lft.u or not classify(data).is_delta:
        raise NotDeltaRegime(
            f"delta-shock needs u_- >= u_+ + mu/rho_+ (got u_-={lft.u}, "
            f"u_+ + mu/rho_+={rgt.u + mu / rgt.rho})")
    j_rho, j_m, j_q = _jumps(data)
    if j_rho == 0.0:
        return 0.5 * (lft.u + rgt.u + mu / rgt.rho), rgt.rho * (lft.u - rgt.u)
    disc = discriminant(data)
    if not disc >= 0.0:
        raise NumericalFailure(f"negative discriminant {disc} in the delta regime")
    sq = math.sqrt(disc)
    if j_m > 0.0:
        u_delta0 = j_q / (j_m + sq)
    else:
        u_delta0 = (j_m - sq) / j_rho
    return u_delta0, sq


def intermediate_density(data: RiemannData) -> float:
    lft, rgt, mu = data.left, data.right, data.mu
    return mu * rgt.rho / (mu + rgt.rho * (rgt.u - lft.u))


def solve(data: RiemannData, f: FrictionTerm) -> KKSolution:
    """Riemann solution for data ``data`` under friction ``f``.

    Identical states give a :class:`TwoContact` whose two waves have zero
    strength.
    """
    lft, rgt, mu = data.left, data.right, data.mu
    try:
        region = classify(data)
    except DegenerateData:
        region = Region.I
    if region.is_delta:
        u_delta0, w_slope = delta_shock_params(data)
        return DeltaShock(u_delta0, w_slope, Trajectory(u_delta0, f))
    rho_star = intermediate_density(data)
    return TwoContact(
        intermediate=State(rho_star, lft.u),
        x1=Trajectory(lft.u, f),
        x2=Trajectory(rgt.u + mu / rgt.rho, f),
    )


@dataclass
class EntropyCheck:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def check_entropy(sol: KKSolution, data: RiemannData, f: FrictionTerm,
                  t_samples: Sequence[float], rtol: float = EPS_CLS) -> EntropyCheck:
    """Over-compressive bracket for delta-shocks, Lax conditions for contacts."""
    lft, rgt, mu = data.left, data.right, data.mu
    violations = []
    for t in t_samples:
        shift = f.primitive(t)
        if isinstance(sol, DeltaShock):
            lo = rgt.u + mu / rgt.rho + shift
            mid = sol.u_delta0 + shift
            hi = lft.u + shift
            slack = rtol * max(1.0, abs(lo), abs(hi))
            if mid < lo - slack:
                violations.append(
                    f"t={t}: u_delta={mid} < lambda_2(right)={lo}")
            if mid > hi + slack:
                violations.append(
                    f"t={t}: u_delta={mid} > lambda_1(left)={hi}")
        else:
            star = sol.intermediate
            if not star.rho > 0:
                violations.append(f"t={t}: intermediate density {star.rho} <= 0")
            lam2_star = star.u + mu / star.rho + shift
            lam1_star = star.u + shift
            if not sol.x1.velocity(t) < lam2_star:
                violations.append(
                    f"t={t}: x1'={sol.x1.velocity(t)} >= lambda_2(star)={lam2_star}")
            if not sol.x2.velocity(t) > lam1_star:
                violations.append(
                    f"t={t}: x2'={sol.x2.velocity(t)} <= lambda_1(star)={lam1_star}")
    return EntropyCheck(not violations, violations)


def sample(sol: KKSolution, data: RiemannData, f: FrictionTerm, t: float, grid) -> Profile:
    """Sample the solution at time ``t > 0``; points on a wave take the right limit."""
    if not t > 0:
        raise InvalidTime(f"sampling time must be positive, got {t}")
    x = as_grid(grid)
    shift = f.primitive(t)
    lft, rgt = data.left, data.right
    singular = None
    if isinstance(sol, DeltaShock):
        xd = sol.position(t)
        right = x >= xd
        rho = np.where(right, rgt.rho, lft.rho)
        u = np.where(right, rgt.u, lft.u) + shift
        singular = SingularPart(float(xd), sol.weight(t), sol.velocity(t))
    else:
        x1, x2 = sol.x1.position(t), sol.x2.position(t)
        star = sol.intermediate
        rho = np.select([x < x1, x < x2], [lft.rho, star.rho], rgt.rho)
        u = np.select([x < x1, x < x2], [lft.u, star.u], rgt.u) + shift
    return Profile(x, rho.astype(float), u.astype(float), singular)
