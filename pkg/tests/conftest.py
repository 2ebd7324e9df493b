import numpy as np
import pytest

from dressedfwm.model import C_LIGHT, TWO_PI, DriveParameters, rb_double_lambda

MHz = TWO_PI * 1e6


def od_drives(od=800.0, **kw):
    """Drives with the collective coupling N g^2 set by an optical depth."""
    n_g2 = od * C_LIGHT * 5.7 * MHz / 0.0125
    base = dict(
        pump_rabi=480 * MHz,
        one_photon_detuning=800 * MHz,
        two_photon_detuning=-90 * MHz,
        g_a=1e5,
        g_b=1e5,
        atom_number=n_g2 / 1e10,
        length=0.0125,
    )
    base.update(kw)
    return DriveParameters(**base)


@pytest.fixture
def scheme4():
    return rb_double_lambda(dressed=False)


@pytest.fixture
def scheme5():
    return rb_double_lambda(dressed=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
