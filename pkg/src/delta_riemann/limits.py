"""Vanishing-pressure and critical-coefficient limits of the Keyfitz-Kranzer solutions.

Two limits are studied for Chaplygin coefficient ``mu``:

* ``mu -> 0``: the solutions tend to the pressureless ones (vacuum fan for
  ``u_- < u_+``, delta-shock for ``u_- > u_+``);
* ``mu -> mu0+`` with ``mu0 = rho_+ (u_- - u_+)``: the intermediate plateau of
  the two-contact solution collapses onto ``x = u_- t + B(t)`` while carrying
  mass ``mu t``, so it concentrates into a Dirac mass ``mu0 t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import MuBelowCritical, NotApplicable
from .friction import FrictionTerm, Trajectory
from .kk import DeltaShock, Region, RiemannData, classify, delta_shock_params, intermediate_density
from .model import State
from .pressureless import PressurelessSolution, solve_pressureless

DEFAULT_K_MAX = 40


def mu_critical(left: State, right: State) -> float:
    if not left.u > right.u:
        raise NotApplicable(f"critical mu needs u_- > u_+ (got {left.u} <= {right.u})")
    return right.rho * (left.u - right.u)


def critical_sequence(mu0: float, k_max: int = DEFAULT_K_MAX) -> np.ndarray:
    return mu0 * (1.0 + 2.0 ** -np.arange(1, k_max + 1))


def vanishing_sequence(k_max: int = DEFAULT_K_MAX) -> np.ndarray:
    return 2.0 ** -np.arange(1, k_max + 1, dtype=float)


def richardson(values: Sequence[float], order: int = 1) -> float:
    """Extrapolate a sequence sampled at halving parameters to parameter 0.

    Uses the last two entries: ``(2**p f(h/2) - f(h)) / (2**p - 1)``.
    """
    if len(values) < 2:
        raise ValueError("need at least two values to extrapolate")
    fac = 2.0 ** order
    return (fac * values[-1] - values[-2]) / (fac - 1.0)


def mu_zero_limit(left: State, right: State, f: FrictionTerm) -> PressurelessSolution:
    """Pressureless solution reached by the Keyfitz-Kranzer solutions as mu -> 0."""
    if left.u == right.u:
        raise NotApplicable("vanishing-pressure limit needs u_- != u_+")
    return solve_pressureless(left, right, f)


def concentration_limit(left: State, right: State, f: FrictionTerm) -> DeltaShock:
    """Delta-shock obtained as mu decreases to mu0 from the classical side.

    It travels with the left velocity and carries weight ``mu0*t``; this is
    a different object from the region-V delta-shock at a fixed ``mu``.
    """
    mu0 = mu_critical(left, right)
    return DeltaShock(left.u, mu0, Trajectory(left.u, f))


@dataclass(frozen=True)
class LimitRecord:
    mu: float
    region: Region
    rho_star: Optional[float] = None
    speed1: Optional[float] = None
    speed2: Optional[float] = None
    plateau_mass: Optional[float] = None
    plateau_momentum: Optional[float] = None
    u_delta0: Optional[float] = None
    w_slope: Optional[float] = None


@dataclass
class LimitStudy:
    mu_values: np.ndarray
    records: list[LimitRecord]
    t: float
    # Order-1 Richardson estimates of the limits, keyed by record field.
    extrapolated: dict = field(default_factory=dict)


def _check_decreasing(mus) -> np.ndarray:
    mus = np.asarray(mus, dtype=float)
    if mus.size == 0 or np.any(mus <= 0) or np.any(np.diff(mus) >= 0):
        raise ValueError("mu values must be positive and strictly decreasing")
    return mus


def mu_to_mu0_study(left: State, right: State, f: FrictionTerm,
                    mu_seq: Optional[Sequence[float]] = None, t: float = 1.0) -> LimitStudy:
    """Classical solutions for mu decreasing to mu0 from above.

    The speed gap ``x2' - x1'`` is evaluated as ``(mu - mu0)/rho_+``, which is
    exact algebra and avoids the cancellation of subtracting two speeds.
    """
    mu0 = mu_critical(left, right)
    mus = _check_decreasing(critical_sequence(mu0) if mu_seq is None else mu_seq)
    if np.any(mus <= mu0):
        raise MuBelowCritical(f"every mu must exceed mu0={mu0}")
    shift = f.primitive(t)
    records = []
    for mu in mus:
        mu = float(mu)
        data = RiemannData(left, right, mu)
        rho_star = intermediate_density(data)
        gap = (mu - mu0) / right.rho
        speed1 = left.u + shift
        mass = rho_star * gap * t
        records.append(LimitRecord(
            mu=mu, region=classify(data), rho_star=rho_star,
            speed1=speed1, speed2=right.u + mu / right.rho + shift,
            plateau_mass=mass, plateau_momentum=mass * speed1))
    extrapolated = {
        "speed2": richardson([r.speed2 for r in records]),
        "plateau_mass": richardson([r.plateau_mass for r in records]),
        "plateau_momentum": richardson([r.plateau_momentum for r in records]),
    }
    return LimitStudy(mus, records, t, extrapolated)


def vanishing_pressure_study(left: State, right: State, f: FrictionTerm,
                             mu_seq: Optional[Sequence[float]] = None,
                             t: float = 1.0) -> LimitStudy:
    """Keyfitz-Kranzer solution parameters along a sequence mu -> 0."""
    if left.u == right.u:
        raise NotApplicable("vanishing-pressure limit needs u_- != u_+")
    mus = _check_decreasing(vanishing_sequence() if mu_seq is None else mu_seq)
    shift = f.primitive(t)
    records = []
    for mu in mus:
        mu = float(mu)
        data = RiemannData(left, right, mu)
        region = classify(data)
        if region.is_delta:
            u_delta0, w_slope = delta_shock_params(data)
            records.append(LimitRecord(mu=mu, region=region, speed1=u_delta0 + shift,
                                       speed2=u_delta0 + shift,
                                       u_delta0=u_delta0, w_slope=w_slope))
        else:
            rho_star = intermediate_density(data)
            speed1 = left.u + shift
            speed2 = right.u + mu / right.rho + shift
            records.append(LimitRecord(mu=mu, region=region, rho_star=rho_star,
                                       speed1=speed1, speed2=speed2,
                                       plateau_mass=rho_star * (speed2 - speed1) * t))
    extrapolated = {}
    for name in ("rho_star", "speed1", "speed2", "u_delta0", "w_slope"):
        vals = [getattr(r, name) for r in records[-2:]]
        if len(vals) == 2 and None not in vals:
            extrapolated[name] = richardson(vals)
    return LimitStudy(mus, records, t, extrapolated)


def delta_weight_below_mu0(left: State, right: State,
                           k_max: int = DEFAULT_K_MAX) -> tuple[np.ndarray, np.ndarray]:
    """Weight slopes of the region-V delta-shock for ``mu = mu0 (1 - 2**-k)``."""
    mu0 = mu_critical(left, right)
    mus = mu0 * (1.0 - 2.0 ** -np.arange(1, k_max + 1))
    slopes = np.array([delta_shock_params(RiemannData(left, right, float(mu)))[1]
                       for mu in mus])
    return mus, slopes
