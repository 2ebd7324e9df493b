"""Observables built from the quadrature covariance.

All variances are normalised to shot noise: a single vacuum quadrature has
variance 1, the unnormalised sum or difference of two vacuum quadratures 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .noise import apply_detection_efficiency

XA, PA, XB, PB = range(4)

# symmetric (Y(w), Y(-w)) -> independent sidebands (Y_w, Y_-w)
SIDEBAND_TRANSFORM = 0.5 * np.array(
    [
        [1, 1j, 0, 0, 1, -1j, 0, 0],
        [-1j, 1, 0, 0, 1j, 1, 0, 0],
        [0, 0, 1, 1j, 0, 0, 1, -1j],
        [0, 0, -1j, 1, 0, 0, 1j, 1],
        [1, -1j, 0, 0, 1, 1j, 0, 0],
        [1j, 1, 0, 0, -1j, 1, 0, 0],
        [0, 0, 1, -1j, 0, 0, 1, 1j],
        [0, 0, 1j, 1, 0, 0, -1j, 1],
    ],
    dtype=complex,
)
SIDEBAND_TRANSFORM.setflags(write=False)

# independent-basis indices: (X, P) of a at +w, b at +w, a at -w, b at -w
A_UP, B_UP, A_LOW, B_LOW = (0, 1), (2, 3), (4, 5), (6, 7)
PAIRS = {"P1": (A_UP, B_LOW), "P2": (A_LOW, B_UP)}


class NonHermitianCovarianceError(ValueError):
    pass


def to_db(variance):
    return 10.0 * np.log10(variance)


def intensity_spectra(
    V: np.ndarray, alpha_abs: float, beta_abs: float, eta: float = 1.0
) -> tuple[float, float]:
    """Normalised intensity-sum and -difference noise ``(dI_+^2, dI_-^2)``.

    ``dI_+- = |alpha| dX_a +- |beta| dX_b``, divided by the shot noise
    ``|alpha|^2 + |beta|^2`` of two uncorrelated coherent beams.
    """
    if alpha_abs == 0 and beta_abs == 0:
        raise ValueError("no carrier: intensity noise is undefined for |alpha| = |beta| = 0")
    V = apply_detection_efficiency(V, eta) if eta != 1.0 else V
    a, b = alpha_abs, beta_abs
    base = a * a * V[XA, XA].real + b * b * V[XB, XB].real
    cross = 2.0 * a * b * V[XA, XB].real
    shot = a * a + b * b
    return (base + cross) / shot, (base - cross) / shot


def duan_criterion(V: np.ndarray, eta: float = 1.0) -> float:
    """``Var(X_-) + Var(P_+)`` with ``X_+- = (X_a +- X_b)/sqrt 2``; below 2 means entangled."""
    V = apply_detection_efficiency(V, eta) if eta != 1.0 else V
    x_minus = V[XA, XA] + V[XB, XB] - 2.0 * V[XA, XB].real
    p_plus = V[PA, PA] + V[PB, PB] + 2.0 * V[PA, PB].real
    return float(0.5 * (x_minus + p_plus).real)


def quadrature_sum_difference(V: np.ndarray) -> dict[str, float]:
    """Unnormalised ``Var(X_a +- X_b)`` and ``Var(P_a +- P_b)`` (vacuum: 2)."""
    out = {}
    for name, (i, j) in {"X": (XA, XB), "P": (PA, PB)}.items():
        base = (V[i, i] + V[j, j]).real
        cross = 2.0 * V[i, j].real
        out[f"{name}+"] = float(base + cross)
        out[f"{name}-"] = float(base - cross)
    return out


def sideband_decomposition(doubled: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Covariance of the independent sideband quadratures, ``L V L^dag``."""
    doubled = np.asarray(doubled)
    scale = max(1.0, np.abs(doubled).max())
    if np.abs(doubled - doubled.conj().T).max() > tol * scale:
        raise NonHermitianCovarianceError("doubled covariance is not Hermitian")
    return SIDEBAND_TRANSFORM @ doubled @ SIDEBAND_TRANSFORM.conj().T


def symmetric_from_sidebands(four_mode: np.ndarray) -> np.ndarray:
    """Inverse of :func:`sideband_decomposition`."""
    return SIDEBAND_TRANSFORM.conj().T @ four_mode @ SIDEBAND_TRANSFORM


@dataclass(frozen=True)
class PairCorrelations:
    pair_id: str
    sum_variance: float
    diff_variance: float
    duan_value: float


def pair_correlations(four_mode: np.ndarray, swap: bool = False) -> tuple[PairCorrelations, PairCorrelations]:
    """Amplitude sum/difference variances and Duan value of the two sideband pairs.

    P1 couples the upper sideband of the probe to the lower sideband of the
    conjugate, P2 the lower probe sideband to the upper conjugate one; both
    conserve energy around the pump. ``swap=True`` exchanges the labels.
    """
    C = np.asarray(four_mode)
    out = []
    for pid, ((xa, pa), (xb, pb)) in PAIRS.items():
        base = (C[xa, xa] + C[xb, xb]).real
        cross = 2.0 * C[xa, xb].real
        p_sum = (C[pa, pa] + C[pb, pb]).real + 2.0 * C[pa, pb].real
        diff = float(base - cross)
        out.append(PairCorrelations(pid, float(base + cross), diff, 0.5 * (diff + float(p_sum))))
    p1, p2 = out
    if swap:
        p1 = PairCorrelations("P1", p2.sum_variance, p2.diff_variance, p2.duan_value)
        p2 = PairCorrelations("P2", out[0].sum_variance, out[0].diff_variance, out[0].duan_value)
    return p1, p2
