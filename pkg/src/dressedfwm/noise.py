"""Frequency-domain propagation of field fluctuations.

Conventions
-----------
Fluctuations carry time dependence ``exp(-i w t)``. Second moments are
symmetrised and normalised to the vacuum commutator, so
``<A_mu(z, w) A_nu(z, w')>_sym = (L/c) S_mu,nu(z, w) delta(w + w')``. The
vacuum (and coherent-state) input is then

    S_vac = 1/2 [[0, 1], [1, 0]]  per mode,

and the quadrature covariance ``V = U S U^T`` equals the identity: shot noise
is 1. The ``2 pi c / L`` prefactors of the continuum normalisation drop out.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .model import C_LIGHT, LiouvilleSystem
from .propagation import CarrierState, Medium, matrix_exponential

SYMPLECTIC = np.kron(np.eye(2), np.array([[0.0, 1.0], [-1.0, 0.0]]))


class ResolventError(np.linalg.LinAlgError):
    pass


def vacuum_moments() -> np.ndarray:
    """Symmetrised vacuum moments in the (a, a^dag, b, b^dag) basis."""
    return 0.5 * np.kron(np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])).astype(complex)


def as_medium(system_or_medium, length: float | None = None) -> Medium:
    if isinstance(system_or_medium, Medium):
        return system_or_medium
    if length is None:
        raise ValueError("a bare LiouvilleSystem needs an explicit medium length")
    return Medium((1.0,), (system_or_medium,), length)


def _projector(system: LiouvilleSystem, omega: float) -> np.ndarray:
    """``K(w) = T [i w I + M]^-1`` (4 x d^2)."""
    A = np.asarray(system.M) + 1j * omega * np.eye(system.dim)
    try:
        return np.linalg.solve(A.T, np.asarray(system.T).T).T
    except np.linalg.LinAlgError as exc:
        raise ResolventError(f"i w + M is singular at w = {omega:.6g} rad/s") from exc


def response_matrices(system: LiouvilleSystem, omega: float) -> tuple[np.ndarray, np.ndarray]:
    """``R(w) = -(N/c) T M~(w) G_x + i (w/c) I`` and ``R_F(w) = (N/c) T M~(w)``.

    ``omega`` must be nonzero; the zero-frequency limit is the carrier
    generator of :mod:`dressedfwm.propagation`.
    """
    if omega == 0.0:
        raise ResolventError("use carrier_generator for the w = 0 response")
    K = _projector(system, omega)
    n_c = system.atom_number / C_LIGHT
    R = -n_c * (K @ system.G_x) + 1j * (omega / C_LIGHT) * np.eye(4)
    return R, n_c * K


def _sym(D: np.ndarray) -> np.ndarray:
    return 0.5 * (D + D.T)


@dataclass(frozen=True)
class FluctuationGenerators:
    """Medium-averaged drift and source matrices at +w and -w."""

    omega: float
    R_plus: np.ndarray
    R_minus: np.ndarray
    source: np.ndarray  # Q(w): d S / dz source term
    source_minus: np.ndarray  # Q(-w)


def fluctuation_generators(medium: Medium, omega: float) -> FluctuationGenerators:
    """Doppler-weighted ``R(+-w)`` and source ``Q(+-w) = sum_v w_v R_F D R_F^T c/N``."""
    Rp = np.zeros((4, 4), dtype=complex)
    Rm = np.zeros((4, 4), dtype=complex)
    Qp = np.zeros((4, 4), dtype=complex)
    Qm = np.zeros((4, 4), dtype=complex)
    for w, sys_ in medium:
        Rp_v, Fp = response_matrices(sys_, omega)
        Rm_v, Fm = response_matrices(sys_, -omega)
        Rp = Rp + w * Rp_v
        Rm = Rm + w * Rm_v
        if sys_.atom_number > 0:
            Dsym = _sym(np.asarray(sys_.D))
            scale = w * C_LIGHT / sys_.atom_number
            Qp = Qp + scale * (Fp @ Dsym @ Fm.T)
            Qm = Qm + scale * (Fm @ Dsym @ Fp.T)
    return FluctuationGenerators(omega, Rp, Rm, Qp, Qm)


def propagate_moments(
    R_plus: np.ndarray,
    R_minus: np.ndarray,
    source: np.ndarray,
    S0: np.ndarray,
    z: float,
) -> np.ndarray:
    """Solve ``dS/dz = R(w) S + S R(-w)^T + Q`` from ``S(0) = S0`` exactly.

    The vectorised equation is affine with constant coefficients, so one
    augmented matrix exponential gives ``S(z)`` without step-size control.
    """
    n = 16
    K = np.kron(R_plus, np.eye(4)) + np.kron(np.eye(4), R_minus)
    aug = np.zeros((n + 1, n + 1), dtype=complex)
    aug[:n, :n] = K
    aug[:n, n] = source.reshape(-1)
    if np.linalg.norm(aug, 1) * z > 700.0:
        raise OverflowError("fluctuation generator too large for exact propagation")
    E = expm(aug * z)
    if not np.all(np.isfinite(E)):
        raise OverflowError("non-finite fluctuation propagator")
    s = E[:n, :n] @ S0.reshape(-1) + E[:n, n]
    return s.reshape(4, 4)


def source_integral_quadrature(
    R_plus: np.ndarray,
    R_minus: np.ndarray,
    source: np.ndarray,
    z: float,
    panels: int = 20,
    order: int = 5,
) -> np.ndarray:
    """``S_F(z) = int_0^z e^{-R(w) z'} Q e^{-R(-w)^T z'} dz'`` by composite Gauss-Legendre."""
    x, wts = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, z, panels + 1)
    acc = np.zeros((4, 4), dtype=complex)
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        for xi, wi in zip(x, wts):
            zp = a + half * (xi + 1.0)
            acc += half * wi * (
                matrix_exponential(-R_plus, zp) @ source @ matrix_exponential(-R_minus, zp).T
            )
    return acc


@dataclass(frozen=True)
class SpectralCovariance:
    omega: float
    S: np.ndarray  # amplitude moments at +w
    S_minus: np.ndarray  # amplitude moments at -w
    V_out: np.ndarray  # quadrature covariance (X_a, P_a, X_b, P_b) at +w
    V_minus: np.ndarray  # same at -w

    @property
    def doubled(self) -> np.ndarray:
        """8x8 covariance of (Y(w), Y(-w)); cross blocks vanish by stationarity."""
        out = np.zeros((8, 8), dtype=complex)
        out[:4, :4] = self.V_out
        out[4:, 4:] = self.V_minus
        return out


def noise_covariance(
    medium,
    omega: float,
    z: float | None = None,
    S0: np.ndarray | None = None,
    length: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude moments ``S(z, +w)`` and ``S(z, -w)`` at the output (or at ``z``)."""
    medium = as_medium(medium, length)
    z = medium.length if z is None else z
    S0 = vacuum_moments() if S0 is None else S0
    gen = fluctuation_generators(medium, omega)
    Sp = propagate_moments(gen.R_plus, gen.R_minus, gen.source, S0, z)
    Sm = propagate_moments(gen.R_minus, gen.R_plus, gen.source_minus, S0.T, z)
    return Sp, Sm


def quadrature_transform(phi_a: float = 0.0, phi_b: float = 0.0) -> np.ndarray:
    """Map (a, a^dag, b, b^dag) to (X_a, P_a, X_b, P_b).

    ``X = e^{i phi} a + e^{-i phi} a^dag`` and ``P = -i e^{i phi} a + i e^{-i phi} a^dag``.
    """
    ea, eb = np.exp(1j * phi_a), np.exp(1j * phi_b)
    U = np.zeros((4, 4), dtype=complex)
    U[0, :2] = ea, np.conj(ea)
    U[1, :2] = -1j * ea, 1j * np.conj(ea)
    U[2, 2:] = eb, np.conj(eb)
    U[3, 2:] = -1j * eb, 1j * np.conj(eb)
    return U


def carrier_phases(carrier: CarrierState) -> tuple[float, float]:
    """Quadrature phases aligning X with each output carrier.

    The amplitude quadrature of a field ``|alpha| e^{i theta}`` is
    ``e^{-i theta} a + h.c.``, hence ``phi = -arg``. A mode without carrier
    gets phase 0.
    """
    def phase(x: complex) -> float:
        return float(-np.angle(x)) if abs(x) > 0 else 0.0

    return phase(carrier.alpha), phase(carrier.beta)


def output_covariance(
    medium,
    omega: float,
    carrier: CarrierState,
    S0: np.ndarray | None = None,
    length: float | None = None,
) -> SpectralCovariance:
    """Quadrature covariance ``V_out(L, w) = U S(L, w) U^T`` and its ``-w`` partner."""
    Sp, Sm = noise_covariance(medium, omega, S0=S0, length=length)
    U = quadrature_transform(*carrier_phases(carrier))
    return SpectralCovariance(omega, Sp, Sm, U @ Sp @ U.T, U @ Sm @ U.T)


def min_physicality_eigenvalue(V: np.ndarray) -> float:
    """Smallest eigenvalue of ``V + i Omega``; >= 0 for a physical state."""
    H = V + 1j * SYMPLECTIC
    H = 0.5 * (H + H.conj().T)
    return float(np.linalg.eigvalsh(H)[0])


def apply_detection_efficiency(V: np.ndarray, eta_a: float = 1.0, eta_b: float | None = None) -> np.ndarray:
    """Beam-splitter loss per detector: ``V -> E V E + (1 - E^2)``."""
    eta_b = eta_a if eta_b is None else eta_b
    for eta in (eta_a, eta_b):
        if not 0.0 <= eta <= 1.0:
            raise ValueError("detection efficiency must lie in [0, 1]")
    e = np.sqrt(np.array([eta_a, eta_a, eta_b, eta_b]))
    return (e[:, None] * V * e[None, :]) + np.diag(1.0 - e**2)
