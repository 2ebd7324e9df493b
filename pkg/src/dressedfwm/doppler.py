"""Thermal velocity classes and weighted ensemble averages."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

import numpy as np
from scipy.constants import atomic_mass, k as k_B

RB85_MASS = 84.9117897 * atomic_mass
DEFAULT_TEMPERATURE = 400.0

T = TypeVar("T")


@dataclass(frozen=True)
class VelocityGrid:
    temperature: float
    mass: float
    velocities: np.ndarray
    weights: np.ndarray
    truncation: float

    @property
    def point_count(self) -> int:
        return self.velocities.size

    @property
    def thermal_width(self) -> float:
        """1-D rms velocity sqrt(k_B T / m)."""
        return thermal_width(self.temperature, self.mass)

    def __iter__(self):
        return iter(zip(self.velocities, self.weights))


def thermal_width(temperature: float, mass: float) -> float:
    return float(np.sqrt(k_B * temperature / mass))


def build_velocity_grid(
    temperature: float = DEFAULT_TEMPERATURE,
    mass: float = RB85_MASS,
    point_count: int = 41,
    truncation: float = 4.0,
    rule: str = "trapezoid",
) -> VelocityGrid:
    """Quadrature over the 1-D Maxwell-Boltzmann distribution.

    ``rule="trapezoid"`` uses equally spaced nodes on ``[-truncation, truncation]``
    thermal widths weighted by the Gaussian density; ``rule="hermite"`` uses
    Gauss-Hermite nodes (``truncation`` is then ignored). Weights are normalised
    to sum to one. ``point_count == 1`` returns the single stationary class.
    """
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if point_count == 1 or temperature == 0:
        return VelocityGrid(temperature, mass, np.zeros(1), np.ones(1), truncation)
    if point_count < 3 or point_count % 2 == 0:
        raise ValueError("point_count must be an odd integer >= 3")
    if not truncation > 0:
        raise ValueError("truncation must be > 0")
    sigma = thermal_width(temperature, mass)
    if rule == "trapezoid":
        u = np.linspace(-truncation, truncation, point_count)
        w = np.exp(-0.5 * u**2)
        w[[0, -1]] *= 0.5
    elif rule == "hermite":
        u, w = np.polynomial.hermite_e.hermegauss(point_count)
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    # exact mirror symmetry
    u = 0.5 * (u - u[::-1])
    w = 0.5 * (w + w[::-1])
    return VelocityGrid(temperature, mass, sigma * u, w / w.sum(), truncation)


def doppler_average(observable: Callable[[float], T], grid: VelocityGrid) -> T:
    """Weighted sum of ``observable(v)`` over the velocity classes.

    Works for scalars and numpy arrays alike; the reduction runs in grid order
    so the result is reproducible bit for bit.
    """
    total = None
    for v, w in grid:
        term = w * np.asarray(observable(float(v)))
        total = term if total is None else total + term
    return total


def weighted_sum(values: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    total = None
    for val, w in zip(values, weights):
        term = w * np.asarray(val)
        total = term if total is None else total + term
    return total
