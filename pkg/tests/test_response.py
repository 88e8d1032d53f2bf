import math

import numpy as np
import pytest

from atomscatter import (
    Grid2D,
    GridExtentError,
    PhysicalParams,
    SymmetryError,
    cross_section,
    inner_product,
    nonlinear_component,
    rect_pair_nonlinear,
    rect_pulse,
    rect_single_output,
    scatter_pair,
    scatter_single,
    scattering_probability,
)
from conftest import smooth_random_pulse, symmetrized_product


def rect_overlap(length, params):
    """Analytic ⟨in|out⟩ for the rectangular pulse, -1 + (2c/gL)(1-e^{-gL/c})."""
    g = params.gamma / params.c
    return -1.0 + 2.0 / (g * length) * -math.expm1(-g * length)


def test_rect_closed_form_values(params):
    L = 20.0
    # trailing edge of the tail
    assert rect_single_output(-1e-12, L, params) == pytest.approx(
        -2 / math.sqrt(L) * (1 - math.exp(-L)), rel=1e-9
    )
    assert rect_single_output(-1e-12, L, params) == pytest.approx(-0.4472, abs=1e-4)
    # leading edge transmits unchanged
    assert rect_single_output(L, L, params) == pytest.approx(+1 / math.sqrt(L))
    # far tail and region ahead of the pulse
    assert rect_single_output(-80.0, L, params) == pytest.approx(0.0, abs=1e-30)
    assert rect_single_output(L + 1.0, L, params) == 0.0
    with pytest.raises(ValueError):
        rect_single_output(1.0, -3.0, params)


def test_scatter_single_matches_closed_form(params):
    pulse = rect_pulse(20.0, 0.01, pad_left=10.0)
    out = scatter_single(pulse, params)
    ref = rect_single_output(out.x, 20.0, params)
    assert np.max(np.abs(out.values - ref)) < 1e-12


def test_scatter_single_norm_and_overlap(params):
    # long pulse: norm preserved to quadrature accuracy
    pulse = rect_pulse(200.0, 0.01, pad_left=10.0)
    out = scatter_single(pulse, params)
    assert abs(out.norm_sq() - 1.0) < 1e-6
    assert abs(inner_product(pulse, out) - rect_overlap(200.0, params)) < 1e-6


def test_scatter_single_weak_coupling_identity():
    pulse = rect_pulse(5.0, 0.05, pad_left=5.0)
    out = scatter_single(pulse, PhysicalParams(gamma=0.0))
    np.testing.assert_array_equal(out.values, pulse.values)


def test_scatter_single_causality_bitwise(params, rng):
    pulse = smooth_random_pulse(rng, dx=0.02)
    base = scatter_single(pulse, params)
    k = pulse.n // 2
    bumped = pulse.with_values(pulse.values + 0.1 * (np.arange(pulse.n) == k))
    out = scatter_single(bumped, params, tail_tol=1.0)
    # output strictly ahead of the perturbation is bitwise unchanged
    np.testing.assert_array_equal(out.values[k + 1 :], base.values[k + 1 :])
    assert np.any(out.values[: k + 1] != base.values[: k + 1])


def test_scatter_single_unitary_random(params, rng):
    for _ in range(5):
        pulse = smooth_random_pulse(rng, dx=0.01)
        out = scatter_single(pulse, params)
        assert abs(out.norm_sq() - 1.0) < 1e-4


def test_scatter_single_grid_extent_error(params):
    pulse = rect_pulse(20.0, 0.05, pad_left=4.0)
    with pytest.raises(GridExtentError, match="extend the grid left"):
        scatter_single(pulse, params)


def test_nonlinear_component_matches_closed_form(params):
    pulse = rect_pulse(20.0, 0.05, pad_left=10.0)
    delta = nonlinear_component(pulse, params)
    x = delta.x
    ref = rect_pair_nonlinear(x[:, None], x[None, :], 20.0, params)
    assert np.max(np.abs(delta.values - ref)) < 1e-13
    assert delta.exchange_defect() == 0.0
    assert np.all(delta.values.real <= 1e-15)


def test_rect_pair_nonlinear_values(params):
    L = 20.0
    assert rect_pair_nonlinear(10.0, 10.0, L, params) == pytest.approx(-0.2000, abs=2e-5)
    # decay away from the diagonal: -1/L at separation ln(4), deep inside
    v = rect_pair_nonlinear(5.0, 5.0 + math.log(4.0), 200.0, params)
    assert v == pytest.approx(-1.0 / 200.0, rel=1e-6)
    # outside the pulse support
    assert rect_pair_nonlinear(25.0, 5.0, L, params) == 0.0
    assert rect_pair_nonlinear(5.0, 25.0, L, params) == 0.0
    # vanishes toward the leading edge (nothing absorbed yet)
    assert abs(rect_pair_nonlinear(L - 1e-9, L - 1e-9, L, params)) < 1e-8
    with pytest.raises(ValueError):
        rect_pair_nonlinear(1.0, 1.0, 0.0, params)


def test_scatter_pair_rect_features(params):
    L = 20.0
    pulse = rect_pulse(L, 0.05, pad_left=10.0)
    psi_in = Grid2D.from_product(pulse, pulse)
    out = scatter_pair(psi_in, params)
    assert abs(out.norm_sq() - 1.0) < 1e-3
    x = out.x
    # plateau at the input amplitude 1/L
    i, j = np.searchsorted(x, L / 2), np.searchsorted(x, L / 4)
    assert out.values[i, j].real == pytest.approx(1.0 / L, rel=2e-2)
    # interference trough on the diagonal reaches -3/L
    assert out.values.real.min() == pytest.approx(-3.0 / L, rel=1e-3)
    # both photons delayed behind the pulse is impossible: the quadrant
    # x1, x2 < 0 cancels exactly between linear and nonlinear parts
    neg = x < 0
    assert np.max(np.abs(out.values[np.ix_(neg, neg)])) < 1e-13


def test_scatter_pair_far_separated_product(params):
    from atomscatter import sampled_pulse

    dx = 0.05
    a = sampled_pulse(lambda x: np.exp(-((x + 4.0) ** 2) / 1.28), -38.0, 0.0, dx)
    b = sampled_pulse(lambda x: np.exp(-((x + 26.0) ** 2) / 1.28), -38.0, 0.0, dx)
    psi = symmetrized_product(a, b)
    out = scatter_pair(psi, params)
    ref = symmetrized_product(scatter_single(a, params), scatter_single(b, params))
    l2 = math.sqrt(np.sum(np.abs(out.values - ref.values) ** 2)) * dx
    assert l2 < 1e-4


def test_scatter_pair_unitary_random(params, rng):
    for _ in range(3):
        a = smooth_random_pulse(rng, dx=0.01)
        b = smooth_random_pulse(rng, dx=0.01)
        psi = symmetrized_product(a, b)
        out = scatter_pair(psi, params)
        assert abs(out.norm_sq() - 1.0) < 1e-4
        assert out.exchange_defect() < 1e-12


def test_scatter_pair_rejects_asymmetric(params):
    a = rect_pulse(2.0, 0.1, pad_left=4.0)
    vals = np.outer(a.values, np.roll(a.values, 5))
    with pytest.raises(SymmetryError):
        scatter_pair(Grid2D(a.x_min, a.dx, vals), params)


def test_scatter_pair_gamma_zero_identity():
    pulse = rect_pulse(4.0, 0.1, pad_left=2.0)
    psi = Grid2D.from_product(pulse, pulse)
    out = scatter_pair(psi, PhysicalParams(gamma=0.0))
    np.testing.assert_array_equal(out.values, psi.values)


def test_scattering_probability_and_cross_section(params):
    assert scattering_probability(100.0, params) == pytest.approx(0.16)
    assert scattering_probability(200.0, params) == pytest.approx(0.08)
    with pytest.warns(UserWarning, match="long-pulse"):
        scattering_probability(5.0, params)
    assert cross_section(params) == 8.0
    assert cross_section(PhysicalParams(gamma=2.0)) == 4.0
    p2 = PhysicalParams(gamma=0.7, c=2.3)
    assert cross_section(p2) == pytest.approx(8.0 * p2.coherence_length)


def test_pair_scattering_deficit_quadrature(params):
    # probability of leaving the linear-response pair mode, from closed
    # forms on a grid, against the long-pulse value 16 c / (gamma L)
    L, dx = 200.0, 0.1
    x = np.arange(-12.0, L, dx) + dx / 2
    f = rect_single_output(x, L, params)
    delta = rect_pair_nonlinear(x[:, None], x[None, :], L, params)
    ref = np.outer(f, f)
    ref_norm = np.sum(np.abs(ref) ** 2) * dx * dx
    overlap = np.sum(np.conj(ref) * (ref + delta)) * dx * dx
    deficit = 1.0 - abs(overlap) ** 2 / ref_norm
    expected = scattering_probability(L, params)
    assert deficit == pytest.approx(expected, rel=0.05)
