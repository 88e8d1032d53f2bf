import math

import numpy as np
import pytest

from atomscatter import (
    Grid2D,
    GridExtentError,
    PhysicalParams,
    ResidualExcitationError,
    SinglePhotonState,
    SymmetryError,
    TwoPhotonState,
    evolve_pair,
    evolve_single,
    extract_comoving,
    prepare_pair,
    prepare_single,
    rect_pulse,
    rect_single_output,
    sampled_pulse,
    scatter_pair,
    scatter_single,
    simulate_pair,
    simulate_single,
)
from conftest import symmetrized_product


def l2_distance(values, reference, dx, ndim=1):
    return math.sqrt(float(np.sum(np.abs(values - reference) ** 2)) * dx**ndim)


def test_spontaneous_decay_exact(params):
    """Excited atom with no field: exponential decay and an exponential
    emitted wavepacket, with total probability conserved."""
    dx = 0.002
    n = round(26.0 / dx)
    state = SinglePhotonState(
        x_min=-1.0, dx=dx, field=np.zeros(n), excited_amp=1.0, t=0.0, params=params
    )
    t_end = 12.0
    final = evolve_single(state, t_end)
    assert abs(final.excited_amp) ** 2 == pytest.approx(math.exp(-2 * t_end), rel=1e-9)
    assert final.norm_sq() == pytest.approx(1.0, abs=1e-6)
    r = final.r
    mask = (r > 0) & (r < t_end)
    ref = -1j * math.sqrt(2.0) * np.exp(-(t_end - r[mask]))
    assert l2_distance(final.field[mask], ref, dx) < 1e-5


def test_free_propagation_identity():
    params = PhysicalParams(gamma=0.0)
    pulse = rect_pulse(2.0, 0.1)
    state = prepare_single(pulse, params, padding=3.0)
    final = evolve_single(state, 2.0)
    np.testing.assert_array_equal(final.field[20:], state.field[:-20])
    out = extract_comoving(final, t_ref=0.0)
    shifted = out.values[round(-state.x_min / 0.1) :]
    assert np.max(np.abs(shifted[:20])) == 0.0


def test_simulate_single_matches_closed_form(params):
    pulse = rect_pulse(20.0, 0.02)
    out = simulate_single(pulse, params)
    ref = rect_single_output(out.x, 20.0, params)
    assert l2_distance(out.values, ref, out.dx) < 2e-2
    assert abs(out.norm_sq() - 1.0) < 1e-4


def test_simulate_single_converges(params):
    errs = []
    for dx in (0.04, 0.01):
        pulse = rect_pulse(8.0, dx)
        out = simulate_single(pulse, params)
        ref = rect_single_output(out.x, 8.0, params)
        errs.append(l2_distance(out.values, ref, dx))
    assert errs[1] < errs[0] / 2.5


def test_simulate_single_arbitrary_shapes(params):
    """The oracle agrees with the analytic response for non-rectangular
    pulses (Gaussian and double-hump)."""
    dx = 0.01
    shapes = [
        lambda x: np.exp(-((x - 2.0) ** 2)),
        lambda x: np.exp(-((x - 1.2) ** 2) / 0.5) + 0.8 * np.exp(-((x - 3.4) ** 2) / 0.3),
    ]
    for shape in shapes:
        pulse = sampled_pulse(shape, -14.0, 5.0, dx)
        sim = simulate_single(pulse, params)
        ana = scatter_single(pulse, params)
        off = round((ana.x_min - sim.x_min) / dx)
        assert l2_distance(sim.values[off : off + ana.n], ana.values, dx) < 5e-3


def test_prepare_and_errors(params):
    pulse = rect_pulse(2.0, 0.1)
    with pytest.raises(ValueError, match="r < 0"):
        prepare_single(pulse, params, right_edge=0.5)
    state = prepare_single(pulse, params, padding=2.0)
    with pytest.raises(ValueError, match="whole number of steps"):
        evolve_single(state, 0.05)
    # pulse runs off the grid when evolved too long
    with pytest.raises(GridExtentError, match="edge"):
        evolve_single(state, 30.0)
    # extraction before the interaction is over reports the residual
    mid = evolve_single(state, 3.0)
    with pytest.raises(ResidualExcitationError, match="residual"):
        extract_comoving(mid)


def test_atom_alignment_required(params):
    with pytest.raises(ValueError, match="cell boundary"):
        SinglePhotonState(x_min=-1.03, dx=0.1, field=np.zeros(40), excited_amp=0.0, t=0.0, params=params)
    with pytest.raises(GridExtentError):
        SinglePhotonState(x_min=1.0, dx=0.1, field=np.zeros(40), excited_amp=0.0, t=0.0, params=params)


def test_simulate_pair_matches_analytic(params):
    pulse = rect_pulse(6.0, 0.1, pad_left=10.0)
    psi_in = Grid2D.from_product(pulse, pulse)
    sim = simulate_pair(psi_in, params)
    ana = scatter_pair(psi_in, params)
    off = round((ana.x_min - sim.x_min) / sim.dx)
    win = sim.values[off : off + ana.n, off : off + ana.n]
    assert l2_distance(win, ana.values, sim.dx, ndim=2) < 3e-2


def test_pair_norm_conservation(params):
    pulse = rect_pulse(4.0, 0.01)
    state = prepare_pair(Grid2D.from_product(pulse, pulse), params, padding=4.0)
    final = evolve_pair(state, -state.x_min / params.c)
    assert abs(final.norm_sq() - state.norm_sq()) < 1e-4


def test_pair_exchange_symmetry_exact(params):
    pulse = rect_pulse(3.0, 0.05, pad_left=3.0)
    state = prepare_pair(Grid2D.from_product(pulse, pulse), params, padding=3.0)
    final = evolve_pair(state, 6.0)
    np.testing.assert_array_equal(final.field, final.field.T)
    np.testing.assert_array_equal(final.excited_row, final.excited_col)


def test_pair_rejects_asymmetric_initial(params):
    pulse = rect_pulse(2.0, 0.1, pad_left=2.0)
    vals = np.outer(pulse.values, np.roll(pulse.values, 3))
    with pytest.raises(SymmetryError):
        prepare_pair(Grid2D(pulse.x_min, pulse.dx, vals), params)


def test_pair_far_separated_independent(params):
    dx = 0.1
    a = sampled_pulse(lambda x: np.exp(-((x + 3.0) ** 2)), -30.0, 0.0, dx)
    b = sampled_pulse(lambda x: np.exp(-((x + 17.0) ** 2)), -30.0, 0.0, dx)
    psi = symmetrized_product(a, b)
    out = simulate_pair(psi, params)
    sa = simulate_single(a, params)
    sb = simulate_single(b, params)
    ref = (np.outer(sa.values, sb.values) + np.outer(sb.values, sa.values)) / math.sqrt(2.0)
    ref /= math.sqrt(float(np.sum(np.abs(ref) ** 2)) * dx * dx)
    assert l2_distance(out.values, ref, dx, ndim=2) < 1e-3


def test_harmonic_mode_removes_nonlinearity(params):
    """Allowing the double excitation makes the photons scatter
    independently: the output is the product of single-photon outputs."""
    pulse = rect_pulse(6.0, 0.05, pad_left=8.0)
    psi = Grid2D.from_product(pulse, pulse)
    out = simulate_pair(psi, params, harmonic=True)
    single = simulate_single(pulse, params)
    ref = np.outer(single.values, single.values)
    assert l2_distance(out.values, ref, out.dx, ndim=2) < 1e-3
    # while the two-level output differs by the nonlinear component
    out2 = simulate_pair(psi, params, harmonic=False)
    assert l2_distance(out2.values, ref, out2.dx, ndim=2) > 0.1


def test_extract_comoving_frames(params):
    pulse = rect_pulse(2.0, 0.1)
    state = prepare_single(pulse, params, padding=3.0)
    final = evolve_single(state, -state.x_min / params.c)
    out = extract_comoving(final)
    assert out.x_min == pytest.approx(final.x_min - params.c * final.t)
    # TwoPhotonState extraction must also pass residual checks
    st2 = prepare_pair(Grid2D.from_product(pulse, pulse), params, padding=3.0)
    fin2 = evolve_pair(st2, -st2.x_min / params.c)
    out2 = extract_comoving(fin2)
    assert out2.n == fin2.n
    with pytest.raises(TypeError):
        extract_comoving("not a state")
