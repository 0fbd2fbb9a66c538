"""Exact Riemann solver for the pressureless gas system with friction.

    rho_t + (rho u)_x = 0
    (rho u)_t + (rho u^2)_x = alpha(t) rho

``u_- < u_+`` opens a vacuum fan, ``u_- > u_+`` concentrates mass in a
delta-shock, and ``u_- = u_+`` leaves a single contact discontinuity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidTime
from .friction import FrictionTerm, Trajectory
from .kk import DeltaShock
from .model import Profile, SingularPart, State, as_grid


@dataclass(frozen=True)
class VacuumFan:
    x_minus: Trajectory
    x_plus: Trajectory


@dataclass(frozen=True)
class SingleContact:
    """Contact moving with the common velocity; zero strength for equal states."""

    x_contact: Trajectory


PressurelessSolution = Union[VacuumFan, DeltaShock, SingleContact]


def branch_name(left: State, right: State) -> str:
    if left.u < right.u:
        return "vacuum_fan"
    if left.u > right.u:
        return "delta_shock"
    return "single_contact"


def pressureless_delta_params(left: State, right: State) -> tuple[float, float]:
    """``(u_delta0, w_slope)`` for ``u_- > u_+``: density-weighted mean velocity and
    ``sqrt(rho_- rho_+)(u_- - u_+)``."""
    sl, sr = math.sqrt(left.rho), math.sqrt(right.rho)
    u_delta0 = (sl * left.u + sr * right.u) / (sl + sr)
    w_slope = math.sqrt(left.rho * right.rho) * (left.u - right.u)
    return u_delta0, w_slope


def solve_pressureless(left: State, right: State, f: FrictionTerm) -> PressurelessSolution:
    if left.u < right.u:
        return VacuumFan(Trajectory(left.u, f), Trajectory(right.u, f))
    if left.u > right.u:
        u_delta0, w_slope = pressureless_delta_params(left, right)
        return DeltaShock(u_delta0, w_slope, Trajectory(u_delta0, f))
    return SingleContact(Trajectory(left.u, f))


def sample_pressureless(sol: PressurelessSolution, left: State, right: State,
                        f: FrictionTerm, t: float, grid) -> Profile:
    if not t > 0:
        raise InvalidTime(f"sampling time must be positive, got {t}")
    x = as_grid(grid)
    shift = f.primitive(t)
    singular = None
    if isinstance(sol, VacuumFan):
        xm, xp = sol.x_minus.position(t), sol.x_plus.position(t)
        fan_u = (x - f.double_primitive(t)) / t
        rho = np.select([x < xm, x < xp], [left.rho, 0.0], right.rho)
        u = np.select([x < xm, x < xp], [left.u + shift, fan_u + shift], right.u + shift)
    else:
        if isinstance(sol, DeltaShock):
            xw = sol.position(t)
            singular = SingularPart(float(xw), sol.weight(t), sol.velocity(t))
        else:
            xw = sol.x_contact.position(t)
        right_side = x >= xw
        rho = np.where(right_side, right.rho, left.rho)
        u = np.where(right_side, right.u, left.u) + shift
    return Profile(x, rho.astype(float), u.astype(float), singular)
