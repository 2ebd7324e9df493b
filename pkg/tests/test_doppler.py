import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import voigt_profile

from dressedfwm.doppler import RB85_MASS, build_velocity_grid, doppler_average, thermal_width
from dressedfwm.model import heisenberg_generator, steady_state, unit_operator

K_D1 = 2 * np.pi / 794.98e-9


@given(
    temperature=st.floats(1.0, 600.0),
    points=st.integers(1, 60).map(lambda n: 2 * n + 1),
)
def test_grid_weights_are_normalised_and_symmetric(temperature, points):
    g = build_velocity_grid(temperature, point_count=points)
    assert abs(g.weights.sum() - 1.0) < 1e-12
    assert np.all(g.weights > 0)
    assert np.allclose(g.velocities, -g.velocities[::-1], atol=0)
    assert np.array_equal(g.weights, g.weights[::-1])


@pytest.mark.parametrize("rule", ["trapezoid", "hermite"])
def test_grid_reproduces_maxwell_boltzmann_moments(rule):
    g = build_velocity_grid(400.0, point_count=121, truncation=7.0, rule=rule)
    s = thermal_width(400.0, RB85_MASS)
    assert abs(np.sum(g.weights * g.velocities)) < 1e-12 * s
    assert abs(np.sum(g.weights * g.velocities**2) / s**2 - 1.0) < 1e-8
    assert abs(np.sum(g.weights * g.velocities**4) / s**4 - 3.0) < 1e-7


def test_single_class_and_zero_temperature():
    for g in (build_velocity_grid(400.0, point_count=1), build_velocity_grid(0.0, point_count=41)):
        assert g.velocities.tolist() == [0.0]
        assert g.weights.tolist() == [1.0]


def test_rejects_even_point_counts():
    with pytest.raises(ValueError):
        build_velocity_grid(300.0, point_count=20)


def test_doppler_average_of_weak_two_level_absorption_is_voigt():
    gamma = 2 * np.pi * 5.7e6
    rabi = 1e-4 * gamma
    temperature = 1.0
    grid = build_velocity_grid(temperature, point_count=601, truncation=7.0)
    L = np.sqrt(gamma) * unit_operator(2, 0, 1)
    sigma_w = K_D1 * thermal_width(temperature, RB85_MASS)

    def excited(detuning):
        def at(v):
            d = detuning - K_D1 * v
            H = np.array([[0.0, rabi], [rabi, -d]], dtype=complex)
            return steady_state(heisenberg_generator(H, [L]))[3].real

        return doppler_average(at, grid)

    hw = gamma / 2
    for detuning in np.array([0.0, 5.0, 20.0, 45.0]) * 2 * np.pi * 1e6:
        got = excited(detuning)
        # rabi^2 / (x^2 + hw^2) = rabi^2 (pi / hw) Lorentz(x; hw)
        want = rabi**2 * np.pi / hw * voigt_profile(detuning, sigma_w, hw)
        assert abs(got / want - 1.0) < 1e-4


def test_doppler_average_keeps_ordered_reduction():
    g = build_velocity_grid(300.0, point_count=11)
    out = doppler_average(lambda v: np.array([v, v * v]), g)
    assert out.shape == (2,)
    assert abs(out[0]) < 1e-9
