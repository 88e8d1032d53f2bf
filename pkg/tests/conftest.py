import numpy as np
import pytest

from atomscatter import Grid2D, PhysicalParams, sampled_pulse


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def smooth_random_pulse(rng, x_min=-16.0, x_max=4.0, dx=0.01, n_bumps=4):
    """Normalized random superposition of Gaussians, supported well inside
    the grid so the re-emission tail fits."""
    amps = rng.normal(size=n_bumps) + 1j * rng.normal(size=n_bumps)
    centers = rng.uniform(-1.5, 2.5, size=n_bumps)
    widths = rng.uniform(0.5, 1.0, size=n_bumps)

    def shape(x):
        return sum(a * np.exp(-((x - m) ** 2) / (2 * w * w)) for a, m, w in zip(amps, centers, widths))

    return sampled_pulse(shape, x_min, x_max, dx)


def symmetrized_product(a, b):
    """Normalized exchange-symmetric combination of two pulse shapes."""
    values = np.outer(a.values, b.values) + np.outer(b.values, a.values)
    grid = Grid2D(a.x_min, a.dx, values)
    return grid.with_values(values / grid.norm())
