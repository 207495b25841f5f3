import numpy as np
import pytest

from shocklab import ConstitutiveLaw, MediumSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def exp_law():
    return ConstitutiveLaw("exponential")


@pytest.fixture
def cubic():
    return ConstitutiveLaw("cubic", alpha=0.1, beta=0.0, gamma=5.0)


@pytest.fixture
def linear():
    return ConstitutiveLaw("cubic", alpha=1.0, beta=0.0, gamma=0.0)


def layered(theta=90.0, K=(1.0, 4.0), rho=(1.0, 1.0), fraction=0.5, period=1.0):
    return MediumSpec("layered", theta, K[0], K[1], rho[0], rho[1],
                      period=period, fraction=fraction)


def sinusoidal(theta=90.0, K=(1.0, 5.0), rho=(1.0, 1.0), period=1.0):
    return MediumSpec("sinusoidal", theta, K[0], K[1], rho[0], rho[1],
                      period=period)
