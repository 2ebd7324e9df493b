import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dressedfwm.model import (
    ConfigurationError,
    DegenerateSteadyStateError,
    DriveParameters,
    build_liouville_system,
    diffusion_matrix,
    frame_energies,
    field_frequencies,
    heisenberg_generator,
    jump_operators,
    population_indices,
    rb_double_lambda,
    steady_state,
    unit_operator,
)
from dressedfwm.propagation import carrier_generator

from conftest import MHz, od_drives


def two_level(rabi, detuning, gamma):
    # |g> = 0, |e> = 1, frame with the laser: H = -detuning |e><e| + rabi (s_eg + s_ge)
    H = np.array([[0.0, rabi], [rabi, -detuning]], dtype=complex)
    L = np.sqrt(gamma) * unit_operator(2, 0, 1)
    return heisenberg_generator(H, [L])


@given(
    rabi=st.floats(0.01, 20.0),
    detuning=st.floats(-50.0, 50.0),
    gamma=st.floats(0.1, 10.0),
)
def test_two_level_saturation_formula(rabi, detuning, gamma):
    x = steady_state(two_level(rabi, detuning, gamma))
    expected = rabi**2 / (detuning**2 + gamma**2 / 4 + 2 * rabi**2)
    assert abs(x[3].real - expected) <= 1e-10 * max(1.0, expected)
    assert abs(x[0] + x[3] - 1.0) < 1e-12


def random_hermitian(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return A + A.conj().T


@pytest.mark.parametrize("dressed", [False, True])
def test_generator_preserves_trace_and_hermiticity(dressed, rng):
    sch = rb_double_lambda(dressed=dressed)
    drv = od_drives(dressing_rabi=96 * MHz if dressed else 0.0, dressing_detuning=-1000 * MHz)
    sys_ = build_liouville_system(sch, drv, velocity=37.0)
    d = sch.level_count
    M = np.asarray(sys_.M)
    # d/dt sum_i <s_ii> = 0 for any state
    assert np.abs(M[population_indices(d)].sum(axis=0)).max() < 1e-6
    X = random_hermitian(rng, d).reshape(-1)
    Y = (M @ X).reshape(d, d)
    assert np.abs(Y - Y.conj().T).max() <= 1e-12 * np.abs(Y).max()


def test_steady_state_is_a_density_matrix(scheme5):
    sys_ = build_liouville_system(scheme5, od_drives(dressing_rabi=96 * MHz, dressing_detuning=-1000 * MHz))
    rho = np.asarray(sys_.x_s).reshape(5, 5).T
    assert abs(np.trace(rho) - 1) < 1e-12
    assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() > -1e-12
    M = np.asarray(sys_.M)
    assert np.linalg.norm(M @ sys_.x_s) / np.linalg.norm(M, 2) < 1e-10


def test_steady_state_without_exchange_is_degenerate():
    # decoupled subspaces give a 2-D null space: no pump, no exchange
    H = np.zeros((3, 3), dtype=complex)
    L = unit_operator(3, 0, 2)
    with pytest.raises(DegenerateSteadyStateError):
        steady_state(heisenberg_generator(H, [L]))


def test_dressed_scheme_with_zero_dressing_matches_four_level(scheme4, scheme5):
    drv = od_drives()
    for v in (0.0, 150.0, -420.0):
        R4 = carrier_generator(build_liouville_system(scheme4, drv, v))
        R5 = carrier_generator(build_liouville_system(scheme5, drv, v))
        assert np.abs(R5 - R4).max() <= 1e-10 * np.abs(R4).max()


def test_dressing_needs_a_fifth_level(scheme4):
    with pytest.raises(ConfigurationError):
        build_liouville_system(scheme4, od_drives(dressing_rabi=10 * MHz))


def test_frame_closes_both_lambda_loops(scheme5):
    drv = od_drives(dressing_detuning=-1000 * MHz)
    for v in (0.0, 300.0):
        E = frame_energies(scheme5, field_frequencies(scheme5, drv, v))
        assert E[0] == 0.0
    E = frame_energies(scheme5, field_frequencies(scheme5, drv, 0.0))
    assert np.allclose(E / MHz, [0.0, 90.0, -800.0, -(800 + 3035 - 90), -800 + 1000])


def test_phase_matching_and_energy_conservation(scheme4):
    drv = od_drives()
    f = field_frequencies(scheme4, drv, 211.0)
    assert abs(f["a"] + f["b"] - 2 * f["pump"]) < 1e-3


def test_einstein_diffusion_is_gram_matrix(scheme4):
    sys_ = build_liouville_system(scheme4, od_drives())
    d2 = 16
    P = np.zeros((d2, d2))
    for i in range(4):
        for j in range(4):
            P[i * 4 + j, j * 4 + i] = 1
    # <F_mu^dag F_nu> = D[mu^dag, nu] is Hermitian positive semidefinite
    G = P @ np.asarray(sys_.D)
    assert np.abs(G - G.conj().T).max() < 1e-6
    assert np.linalg.eigvalsh(G).min() > -1e-6 * np.abs(G).max()


def test_einstein_diffusion_vanishes_without_damping():
    sch = rb_double_lambda(gamma=0.0, ground_decay=0.0, dressing_decay=0.0, dressed=False)
    x0 = np.zeros(16, dtype=complex)
    x0[0] = 1.0
    D = diffusion_matrix(jump_operators(sch), x0, "einstein")
    assert not np.any(D)


def test_einstein_diffusion_of_decaying_two_level():
    # ground state: only <s_ge s_eg> noise survives, at rate gamma
    gamma = 3.0
    L = np.sqrt(gamma) * unit_operator(2, 0, 1)
    x = np.array([1, 0, 0, 0], dtype=complex)
    D = diffusion_matrix([L], x, "einstein")
    expected = np.zeros((4, 4))
    expected[1, 2] = gamma  # mu = s_ge (0,1), nu = s_eg (1,0)
    assert np.allclose(D, expected)


def test_invalid_drive_parameters_are_reported():
    with pytest.raises(ConfigurationError, match="pump_rabi"):
        DriveParameters(pump_rabi=0.0)
    with pytest.raises(ConfigurationError, match="atom_number"):
        DriveParameters(pump_rabi=1.0, atom_number=-1.0)


def test_identity_diffusion_mode(scheme4):
    sys_ = build_liouville_system(scheme4, od_drives(), diffusion="identity")
    assert np.array_equal(sys_.D, np.eye(16))
    with pytest.raises(ValueError):
        sys_.M[0, 0] = 1.0


@settings(max_examples=20, deadline=None)
@given(v=st.floats(-800, 800))
def test_steady_state_populations_are_physical_for_every_velocity(v):
    sch = rb_double_lambda()
    drv = od_drives(dressing_rabi=96 * MHz, dressing_detuning=-1040 * MHz)
    pops = build_liouville_system(sch, drv, v).populations()
    assert np.all(pops.real > -1e-12)
    assert abs(pops.sum() - 1) < 1e-12
