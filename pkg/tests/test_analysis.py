import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from dressedfwm.analysis import (
    SIDEBAND_TRANSFORM,
    NonHermitianCovarianceError,
    duan_criterion,
    intensity_spectra,
    pair_correlations,
    quadrature_sum_difference,
    sideband_decomposition,
    symmetric_from_sidebands,
    to_db,
)

L = SIDEBAND_TRANSFORM


def test_sideband_transform_is_exactly_unitary():
    assert np.array_equal(L @ L.conj().T, np.eye(8))
    assert np.array_equal(L.conj().T @ L, np.eye(8))
    assert set(np.unique(np.abs(L))) == {0.0, 0.5}


def test_sideband_transform_is_read_only():
    with pytest.raises(ValueError):
        L[0, 0] = 0


def hermitian8(x):
    A = x[:64].reshape(8, 8) + 1j * x[64:].reshape(8, 8)
    return A + A.conj().T


@given(arrays(float, 128, elements=st.floats(-3, 3)))
def test_round_trip(x):
    V = hermitian8(x)
    back = symmetric_from_sidebands(sideband_decomposition(V))
    assert np.abs(back - V).max() <= 1e-12 * max(1.0, np.abs(V).max())


def test_non_hermitian_input_is_rejected():
    V = np.eye(8, dtype=complex)
    V[0, 1] = 1j
    with pytest.raises(NonHermitianCovarianceError):
        sideband_decomposition(V)


def test_vacuum_pairs_sit_at_the_classical_bound():
    four = sideband_decomposition(np.eye(8, dtype=complex))
    assert np.allclose(four, np.eye(8))
    for p in pair_correlations(four):
        assert p.sum_variance == pytest.approx(2.0)
        assert p.diff_variance == pytest.approx(2.0)
        assert p.duan_value == pytest.approx(2.0)


def tms_doubled(r):
    c2, s2 = np.cosh(2 * r), np.sinh(2 * r)
    V = np.array([[c2, 0, s2, 0], [0, c2, 0, -s2], [s2, 0, c2, 0], [0, -s2, 0, c2]], dtype=complex)
    out = np.zeros((8, 8), dtype=complex)
    out[:4, :4] = out[4:, 4:] = V
    return out


@given(r=st.floats(0.0, 1.5))
def test_broadband_squeezer_correlates_both_pairs_equally(r):
    p1, p2 = pair_correlations(sideband_decomposition(tms_doubled(r)))
    assert p1.diff_variance == pytest.approx(2 * np.exp(-2 * r), rel=1e-10)
    assert p2.diff_variance == pytest.approx(2 * np.exp(-2 * r), rel=1e-10)
    assert p1.duan_value == pytest.approx(2 * np.exp(-2 * r), rel=1e-10)


def test_symmetric_variances_are_reconstructed_from_sidebands(rng):
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    doubled = A @ A.conj().T
    doubled[:4, 4:] = doubled[4:, :4] = 0
    four = sideband_decomposition(doubled)
    back = symmetric_from_sidebands(four)
    direct = quadrature_sum_difference(doubled[:4, :4])
    rebuilt = quadrature_sum_difference(back[:4, :4])
    for k in direct:
        assert abs(direct[k] - rebuilt[k]) < 1e-10


def test_pair_swap_exchanges_labels(rng):
    A = rng.normal(size=(8, 8))
    four = sideband_decomposition((A @ A.T).astype(complex))
    p1, p2 = pair_correlations(four)
    q1, q2 = pair_correlations(four, swap=True)
    assert (q1.pair_id, q2.pair_id) == ("P1", "P2")
    assert q1.diff_variance == p2.diff_variance and q2.diff_variance == p1.diff_variance


def test_intensity_spectra_vacuum_and_degenerate():
    plus, minus = intensity_spectra(np.eye(4), 3.0, 4.0)
    assert plus == pytest.approx(1.0) and minus == pytest.approx(1.0)
    with pytest.raises(ValueError):
        intensity_spectra(np.eye(4), 0.0, 0.0)


def test_duan_of_vacuum_and_efficiency():
    assert duan_criterion(np.eye(4)) == 2.0
    V = np.diag([0.2, 0.2, 0.2, 0.2])
    assert duan_criterion(V, eta=0.0) == pytest.approx(2.0)


def test_to_db():
    assert to_db(1.0) == 0.0
    assert to_db(0.1) == pytest.approx(-10.0)
