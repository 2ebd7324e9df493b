"""Carrier propagation through the medium and parametric gain."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .doppler import VelocityGrid
from .model import (
    C_LIGHT,
    DriveParameters,
    LevelScheme,
    LiouvilleSystem,
    build_liouville_system,
    resolvent_solve,
)


class SingularGeneratorError(np.linalg.LinAlgError):
    pass


class PropagationOverflowError(OverflowError):
    pass


@dataclass(frozen=True)
class Medium:
    """Velocity classes sharing one parameter point: ``(weight, system)`` pairs."""

    weights: tuple[float, ...]
    systems: tuple[LiouvilleSystem, ...]
    length: float

    def __iter__(self):
        return iter(zip(self.weights, self.systems))


def build_medium(
    scheme: LevelScheme,
    drives: DriveParameters,
    grid: VelocityGrid | None = None,
    diffusion: str | None = "einstein",
) -> Medium:
    if grid is None:
        pairs = [(1.0, 0.0)]
    else:
        pairs = [(float(w), float(v)) for v, w in grid]
    systems = tuple(build_liouville_system(scheme, drives, v, diffusion) for _, v in pairs)
    return Medium(tuple(w for w, _ in pairs), systems, drives.length)


def carrier_generator(system: LiouvilleSystem) -> np.ndarray:
    """``R = -(N/c) T M^-1 G_x`` for one velocity class.

    The sign makes ``R`` identical to the zero-frequency fluctuation generator:
    the adiabatic atomic response is ``X = -M^-1 G_x A``, with ``M^-1`` taken
    on the traceless subspace (see :func:`resolvent_solve`).
    """
    if system.atom_number == 0 or not np.any(system.T) or not np.any(system.G_x):
        return np.zeros((4, 4), dtype=complex)
    try:
        resp = resolvent_solve(np.asarray(system.M), np.asarray(system.G_x))
    except np.linalg.LinAlgError as exc:
        raise SingularGeneratorError("atomic generator M is singular at this parameter point") from exc
    return -(system.atom_number / C_LIGHT) * (system.T @ resp)


def medium_generator(medium: Medium) -> np.ndarray:
    R = np.zeros((4, 4), dtype=complex)
    for w, sys_ in medium:
        R = R + w * carrier_generator(sys_)
    return R


def matrix_exponential(R: np.ndarray, z: float) -> np.ndarray:
    """``exp(R z)`` via scaling and squaring with a Pade kernel."""
    A = np.asarray(R, dtype=complex) * z
    if not np.all(np.isfinite(A)):
        raise ValueError("propagation generator has non-finite entries")
    # ||e^A|| <= e^||A||; refuse anything that could overflow a double
    if np.linalg.norm(A, 1) > 700.0:
        raise PropagationOverflowError(f"||R z||_1 = {np.linalg.norm(A, 1):.3g} is too large")
    J = expm(A)
    if not np.all(np.isfinite(J)):
        raise PropagationOverflowError("matrix exponential overflowed")
    return J


@dataclass(frozen=True)
class FieldPropagator:
    R: np.ndarray
    z: float

    @property
    def J(self) -> np.ndarray:
        return matrix_exponential(self.R, self.z)

    def at(self, z: float) -> np.ndarray:
        return matrix_exponential(self.R, z)


def coherent_input(alpha: complex) -> np.ndarray:
    """Input moments <A_mu A_nu> for a coherent probe and a vacuum conjugate."""
    a2 = abs(alpha) ** 2
    return np.array(
        [
            [alpha**2, a2 + 1.0, 0, 0],
            [a2, np.conj(alpha) ** 2, 0, 0],
            [0, 0, 0, 1.0],
            [0, 0, 0, 0],
        ],
        dtype=complex,
    )


def gain_matrix(J: np.ndarray, alpha: complex) -> np.ndarray:
    """``C(z) = J C(0) J^T`` for the coherent-state input."""
    return J @ coherent_input(alpha) @ J.T


@dataclass(frozen=True)
class CarrierState:
    mode_vector: np.ndarray  # (alpha, alpha*, beta, beta*) at the output
    gain_a: float
    gain_b: float

    @property
    def alpha(self) -> complex:
        return complex(self.mode_vector[0])

    @property
    def beta(self) -> complex:
        return complex(self.mode_vector[2])


def propagate_carrier(J: np.ndarray, alpha: complex = 1.0e5) -> CarrierState:
    """Output carrier and power gains for probe amplitude ``alpha`` at the input.

    Gains are the photon-number ratios ``<a^dag a>_out / |alpha|^2`` read off
    ``C(z)``, with the vacuum term of the input kept exactly.
    """
    if alpha == 0:
        raise ValueError("the probe must be seeded (alpha != 0)")
    A0 = np.array([alpha, np.conj(alpha), 0.0, 0.0], dtype=complex)
    A = J @ A0
    C = gain_matrix(J, alpha)
    n_in = abs(alpha) ** 2
    return CarrierState(A, float(C[1, 0].real / n_in), float(C[3, 2].real / n_in))


def classical_gains(J: np.ndarray) -> tuple[float, float]:
    """Gains in the intense-beam limit: ``|J11 + J12|^2`` and ``|J31 + J32|^2`` for real alpha."""
    return float(abs(J[0, 0] + J[0, 1]) ** 2), float(abs(J[2, 0] + J[2, 1]) ** 2)


def gain_spectrum(
    scheme: LevelScheme,
    drives: DriveParameters,
    deltas: Sequence[float],
    grid: VelocityGrid | None = None,
    alpha: complex = 1.0e5,
) -> np.ndarray:
    """Probe and conjugate gain at ``z = L`` for each two-photon detuning.

    Returns an array of shape ``(len(deltas), 2)``.
    """
    deltas = list(deltas)
    if not deltas:
        raise ValueError("empty detuning grid")
    out = np.empty((len(deltas), 2))
    for n, delta in enumerate(deltas):
        medium = build_medium(
            scheme, drives.replace(two_photon_detuning=float(delta)), grid, diffusion=None
        )
        J = matrix_exponential(medium_generator(medium), drives.length)
        st = propagate_carrier(J, alpha)
        out[n] = st.gain_a, st.gain_b
    return out
