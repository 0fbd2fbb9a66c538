"""Gas states and sampled solution profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class State:
    """Constant gas state with density ``rho > 0`` and velocity ``u``."""

    rho: float
    u: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ConfigError(f"density must be finite and positive, got {self.rho}")
        if not math.isfinite(self.u):
            raise ConfigError(f"velocity must be finite, got {self.u}")

    @property
    def m(self) -> float:
        return self.rho * self.u

    @classmethod
    def from_json(cls, spec: dict) -> "State":
        return cls(float(spec["rho"]), float(spec["u"]))

    def to_json(self) -> dict:
        return {"rho": self.rho, "u": self.u}


@dataclass(frozen=True)
class SingularPart:
    """Dirac component ``weight * delta(x - x_pos)`` carried with velocity ``u_delta``."""

    x_pos: float
    weight: float
    u_delta: float


@dataclass(frozen=True)
class Profile:
    grid: np.ndarray
    rho_vals: np.ndarray
    u_vals: np.ndarray
    singular: Optional[SingularPart] = None

    def __post_init__(self):
        if self.grid.ndim != 1 or self.rho_vals.shape != self.grid.shape \
                or self.u_vals.shape != self.grid.shape:
            raise ConfigError("profile arrays must be one-dimensional and of equal length")
        if self.grid.size > 1 and not np.all(np.diff(self.grid) > 0):
            raise ConfigError("profile grid must be strictly increasing")
        if self.singular is not None and self.singular.weight < 0:
            raise ConfigError("singular weight must be non-negative")

    @property
    def m_vals(self) -> np.ndarray:
        return self.rho_vals * self.u_vals


def as_grid(grid) -> np.ndarray:
    g = np.asarray(grid, dtype=float).ravel()
    if g.size > 1 and not np.all(np.diff(g) > 0):
        raise ConfigError("grid must be strictly increasing")
    return g
