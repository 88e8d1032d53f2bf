import math

import numpy as np
import pytest

from atomscatter import (
    GeometryError,
    Grid1D,
    Grid2D,
    GridExtentError,
    PhysicalParams,
    inner_product,
    local_fourier_1d,
    local_fourier_2d,
    rect_pulse,
    sampled_pulse,
    suggested_n_max,
)
from conftest import smooth_random_pulse


def test_params_validation():
    assert PhysicalParams(2.0, 0.5).coherence_length == 0.25
    assert PhysicalParams(gamma=0.0).coherence_length == math.inf
    with pytest.raises(ValueError):
        PhysicalParams(gamma=-1.0)
    with pytest.raises(ValueError):
        PhysicalParams(c=0.0)


def test_grid_basics():
    g = Grid1D(-1.0, 0.5, np.ones(4))
    assert g.n == 4
    np.testing.assert_allclose(g.x, [-0.75, -0.25, 0.25, 0.75])
    assert g.x_max == 1.0
    assert g.norm_sq() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        Grid1D(0.0, -0.1, np.ones(4))
    with pytest.raises(ValueError):
        Grid2D(0.0, 0.1, np.ones((3, 4)))


def test_rect_pulse_normalized_and_aligned():
    pulse = rect_pulse(20.0, 0.01, pad_left=10.0)
    assert pulse.norm_sq() == pytest.approx(1.0, abs=1e-12)
    assert pulse.x_min == -10.0
    # edges on cell boundaries: value flips exactly at x = 0 and x = 20
    inside = (pulse.x > 0) & (pulse.x < 20)
    assert np.all(pulse.values[inside] != 0)
    assert np.all(pulse.values[~inside] == 0)
    with pytest.raises(GeometryError):
        rect_pulse(1.0, 0.3)


def test_inner_product_basics():
    pulse = rect_pulse(4.0, 0.05)
    assert inner_product(pulse, pulse) == pytest.approx(1.0)
    # disjoint supports
    a = Grid1D(0.0, 0.1, np.concatenate([np.ones(5), np.zeros(5)]))
    b = Grid1D(0.0, 0.1, np.concatenate([np.zeros(5), np.ones(5)]))
    assert inner_product(a, b) == 0.0
    with pytest.raises(GeometryError):
        inner_product(a, Grid1D(0.5, 0.1, np.ones(10)))


def test_inner_product_conjugate_symmetry(rng):
    a = smooth_random_pulse(rng, dx=0.05)
    b = smooth_random_pulse(rng, dx=0.05)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))
    assert inner_product(a, a).imag == pytest.approx(0.0, abs=1e-15)
    assert inner_product(a, a).real >= 0.0


def test_plane_wave_transform():
    L, dx = 8.0, 0.05
    n = round(L / dx)
    psi = Grid2D(0.0, dx, np.full((n, n), 1.0 / L))
    dec = local_fourier_2d(psi, L, n_max=10)
    assert dec.coeff(0, 0) == pytest.approx(1.0, abs=1e-12)
    off = [abs(dec.coeff(n1, n2)) for n1 in range(-3, 4) for n2 in range(-3, 4) if (n1, n2) != (0, 0)]
    assert max(off) < 1e-12
    assert dec.dk == pytest.approx(2 * math.pi / L)


def test_parseval_1d_2d(rng):
    L, dx = 6.0, 0.02
    pulse = sampled_pulse(lambda x: np.exp(-((x - 3.0) ** 2)) * (1 + 0.3j), 0.0, L, dx)
    dec = local_fourier_1d(pulse, L)
    assert dec.total_weight() == pytest.approx(pulse.norm_sq(), rel=1e-9)

    g = sampled_pulse(lambda x: np.exp(-((x - 2.2) ** 2) / 1.5), 0.0, L, dx)
    psi = Grid2D.from_product(pulse, g)
    sym = psi.with_values(psi.values + psi.values.T)
    dec2 = local_fourier_2d(sym, L)
    assert dec2.total_weight() == pytest.approx(sym.norm_sq(), rel=1e-9)


def test_transform_symmetry_maps():
    L, dx = 4.0, 0.05
    n = round(L / dx)
    x = (np.arange(n) + 0.5) * dx
    anti = np.subtract.outer(x, x) * np.exp(-np.add.outer(x, x))
    dec = local_fourier_2d(Grid2D(0.0, dx, anti), L, n_max=8)
    m = dec.coeffs
    np.testing.assert_allclose(m, -m.T, atol=1e-14)

    sym = Grid2D(0.0, dx, np.exp(-np.abs(np.subtract.outer(x, x))))
    dec_s = local_fourier_2d(sym, L, n_max=8)
    np.testing.assert_allclose(dec_s.coeffs, dec_s.coeffs.T, atol=1e-14)


def test_long_pulse_pair_structure(params):
    # full two-photon output deep in the long-pulse regime: the
    # anti-diagonal matches the Lorentzian pair amplitude
    from atomscatter import rect_pair_nonlinear, rect_single_output
    from atomscatter.spectral import pair_amplitude

    L, dx = 200.0, 0.2
    n = round(L / dx)
    x = (np.arange(n) + 0.5) * dx
    f = rect_single_output(x, L, params)
    psi = Grid2D(0.0, dx, np.outer(f, f) + rect_pair_nonlinear(x[:, None], x[None, :], L, params))
    dec = local_fourier_2d(psi, L, n_max=25)
    for m in range(1, 21):
        ref = pair_amplitude(2 * math.pi * m / L, L, params)
        assert dec.coeff(m, -m).real == pytest.approx(ref, rel=0.05)
        assert abs(dec.coeff(m, -m).imag) < 1e-12


def test_window_errors():
    pulse = rect_pulse(4.0, 0.05, pad_left=1.0)
    with pytest.raises(GridExtentError):
        local_fourier_1d(pulse, 10.0)
    shifted = Grid1D(-1.03, 0.05, np.ones(100))
    with pytest.raises(GeometryError):
        local_fourier_1d(shifted, 2.0)
    dec = local_fourier_1d(pulse, 4.0, n_max=5)
    with pytest.raises(IndexError):
        dec.coeff(6)
    with pytest.raises(ValueError):
        local_fourier_1d(pulse, 4.0, n_max=10_000)


def test_suggested_n_max(params):
    n200 = suggested_n_max(200.0, params)
    n400 = suggested_n_max(400.0, params)
    assert n400 == pytest.approx(2 * n200, rel=0.02)
    assert suggested_n_max(200.0, params, tail_fraction=1e-4) > n200
    # cutoff covers the k range where the pair spectrum still matters
    assert 2 * math.pi * n200 / 200.0 > 5.0
