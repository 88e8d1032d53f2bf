"""Time-domain integration of the one- and two-photon equations of motion.

An independent oracle for the analytic response kernels: the field is
advected exactly along characteristics (one cell per step, dt = dx/c), the
atomic amplitude follows an exact exponential update with the incoming
boundary cell as a constant drive, and the emission jump at r = 0 deposits
the step-averaged excitation amplitude into the crossing cell.

Coordinates: r < 0 propagates toward the atom at r = 0, r > 0 away from
it. The atom sits on a cell boundary so incoming and outgoing cells stay
distinct. State objects are immutable; evolve_* return new states.

The two-photon state stores the single-excitation channels psi(E, r2) and
psi(r1, E) as separate 1D arrays, so the two-level exclusion of a double
excitation is structural. The diagnostic harmonic mode reintroduces the
double-excitation amplitude with harmonic-oscillator couplings, which makes
the two photons scatter independently; comparing against the product of
single-photon outputs isolates the two-level nonlinearity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import Grid1D, Grid2D, GridExtentError, PhysicalParams, SymmetryError

__all__ = [
    "SinglePhotonState",
    "TwoPhotonState",
    "ResidualExcitationError",
    "prepare_single",
    "prepare_pair",
    "evolve_single",
    "evolve_pair",
    "extract_comoving",
    "simulate_single",
    "simulate_pair",
]

_ALIGN_TOL = 1e-6
# squared amplitude about to be pushed off the grid that triggers an error
_EXIT_MASS_TOL = 1e-12


class ResidualExcitationError(RuntimeError):
    """Raised when extraction is attempted with amplitude still at the atom."""


def _atom_boundary_index(x_min: float, dx: float, n: int) -> int:
    """Index of the first cell past r = 0; r = 0 must be a cell boundary."""
    kf = -x_min / dx
    k = round(kf)
    if abs(kf - k) > _ALIGN_TOL:
        raise ValueError("the atom position r = 0 must fall on a cell boundary")
    if not 1 <= k <= n - 1:
        raise GridExtentError("grid must contain r = 0 strictly in its interior")
    return k


@dataclass(frozen=True)
class SinglePhotonState:
    """Field amplitude over r plus the atomic excitation amplitude."""

    x_min: float
    dx: float
    field: np.ndarray
    excited_amp: complex
    t: float
    params: PhysicalParams

    def __post_init__(self):
        object.__setattr__(self, "field", np.asarray(self.field, dtype=complex))
        if self.dx <= 0 or self.field.ndim != 1:
            raise ValueError("field must be a 1D array on a positive spacing")
        _atom_boundary_index(self.x_min, self.dx, self.field.size)

    @property
    def n(self) -> int:
        return self.field.size

    @property
    def r(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def dt(self) -> float:
        return self.dx / self.params.c

    @property
    def atom_index(self) -> int:
        return _atom_boundary_index(self.x_min, self.dx, self.n)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.field) ** 2)) * self.dx + abs(self.excited_amp) ** 2


@dataclass(frozen=True)
class TwoPhotonState:
    """Two-photon field plus the two single-excitation channels.

    ``excited_row[j]`` holds psi(E, r2_j) (photon 1 absorbed), and
    ``excited_col[i]`` holds psi(r1_i, E). There is no storage for a double
    excitation; ``double_amp`` exists only for the harmonic diagnostic mode
    and stays exactly zero otherwise.
    """

    x_min: float
    dx: float
    field: np.ndarray
    excited_row: np.ndarray
    excited_col: np.ndarray
    t: float
    params: PhysicalParams
    double_amp: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "field", np.asarray(self.field, dtype=complex))
        object.__setattr__(self, "excited_row", np.asarray(self.excited_row, dtype=complex))
        object.__setattr__(self, "excited_col", np.asarray(self.excited_col, dtype=complex))
        f = self.field
        if self.dx <= 0 or f.ndim != 2 or f.shape[0] != f.shape[1]:
            raise ValueError("field must be a square 2D array on a positive spacing")
        if self.excited_row.shape != (f.shape[0],) or self.excited_col.shape != (f.shape[0],):
            raise ValueError("excitation channels must match the field axis length")
        _atom_boundary_index(self.x_min, self.dx, f.shape[0])
        scale = max(float(np.max(np.abs(f))), 1e-300)
        if float(np.max(np.abs(f - f.T))) > 1e-9 * scale:
            raise SymmetryError("two-photon field must be exchange symmetric")
        chan = max(float(np.max(np.abs(self.excited_row))), 1e-300)
        if float(np.max(np.abs(self.excited_row - self.excited_col))) > 1e-9 * max(chan, scale):
            raise SymmetryError("excitation channels must be exchange partners")

    @property
    def n(self) -> int:
        return self.field.shape[0]

    @property
    def r(self) -> np.ndarray:
        return self.x_min + (np.arange(self.n) + 0.5) * self.dx

    @property
    def dt(self) -> float:
        return self.dx / self.params.c

    @property
    def atom_index(self) -> int:
        return _atom_boundary_index(self.x_min, self.dx, self.n)

    def norm_sq(self) -> float:
        field = float(np.sum(np.abs(self.field) ** 2)) * self.dx**2
        chans = (
            float(np.sum(np.abs(self.excited_row) ** 2))
            + float(np.sum(np.abs(self.excited_col) ** 2))
        ) * self.dx
        return field + chans + abs(self.double_amp) ** 2


def _padding_cells(padding, params, dx) -> int:
    if padding is None:
        lc = params.coherence_length
        padding = 10.0 * lc if math.isfinite(lc) else 10.0
    cells = int(math.ceil(padding / dx - _ALIGN_TOL))
    return max(cells, 1)


def prepare_single(
    pulse: Grid1D,
    params: PhysicalParams,
    padding: float | None = None,
    right_edge: float = 0.0,
) -> SinglePhotonState:
    """Place an input pulse ahead of the atom, ready to evolve.

    The pulse (spanning W = x_max - x_min in its own frame) is positioned
    with its right edge at ``right_edge`` <= 0, and the grid is extended by
    ``padding`` (default 10 coherence lengths) on both sides to hold the
    re-emission tail below ~1e-8.
    """
    if right_edge > 0:
        raise ValueError("initial support must lie at r < 0; right_edge must be <= 0")
    dx = pulse.dx
    shift_cells = int(round(-right_edge / dx))
    if abs(-right_edge / dx - shift_cells) > _ALIGN_TOL:
        raise ValueError("right_edge must be a whole number of cells")
    pad = _padding_cells(padding, params, dx)
    w = pulse.n
    n = 2 * (w + pad) + shift_cells
    field = np.zeros(n, dtype=complex)
    lo = pad
    field[lo : lo + w] = pulse.values
    x_min = -(w + pad + shift_cells) * dx
    return SinglePhotonState(x_min=x_min, dx=dx, field=field, excited_amp=0.0, t=0.0, params=params)


def prepare_pair(
    psi_in: Grid2D,
    params: PhysicalParams,
    padding: float | None = None,
) -> TwoPhotonState:
    """Place a symmetric two-photon amplitude ahead of the atom."""
    dx = psi_in.dx
    pad = _padding_cells(padding, params, dx)
    w = psi_in.n
    n = 2 * (w + pad)
    field = np.zeros((n, n), dtype=complex)
    lo = pad
    field[lo : lo + w, lo : lo + w] = psi_in.values
    x_min = -(w + pad) * dx
    zeros = np.zeros(n, dtype=complex)
    return TwoPhotonState(
        x_min=x_min,
        dx=dx,
        field=field,
        excited_row=zeros,
        excited_col=zeros.copy(),
        t=0.0,
        params=params,
    )


def _step_count(state, t_end: float) -> int:
    span = t_end - state.t
    if span < -_ALIGN_TOL * state.dt:
        raise ValueError("t_end lies before the current state time")
    steps = round(span / state.dt)
    if abs(span / state.dt - steps) > _ALIGN_TOL:
        raise ValueError("t_end - t must be a whole number of steps dt = dx/c")
    return steps


def _step_coefficients(params: PhysicalParams, dt: float):
    """Exact exponential-integrator coefficients for one step.

    With constant drive D over the step, the excitation obeys
    e(t+dt) = a e(t) + b D, and its time average is p e(t) + q D; the
    average is what the crossing cell picks up through the emission jump.
    """
    gamma, c = params.gamma, params.c
    a = math.exp(-gamma * dt)
    one_m = -math.expm1(-gamma * dt)  # 1 - a
    drive = -1j * math.sqrt(2.0 * c * gamma)
    b = drive * one_m / gamma
    p = one_m / (gamma * dt)
    q = drive * (dt - one_m / gamma) / (gamma * dt)
    jump = -1j * math.sqrt(2.0 * gamma / c)
    return a, b, p, q, jump


def evolve_single(state: SinglePhotonState, t_end: float) -> SinglePhotonState:
    """Advance the single-photon state to t_end in steps of dt = dx/c."""
    steps = _step_count(state, t_end)
    field = state.field.copy()
    ex = complex(state.excited_amp)
    k = state.atom_index
    dt = state.dt
    gamma = state.params.gamma

    if gamma == 0.0:
        for _ in range(steps):
            if abs(field[-1]) ** 2 * state.dx > _EXIT_MASS_TOL:
                raise GridExtentError("pulse reached the right grid edge before t_end")
            field[1:] = field[:-1]
            field[0] = 0.0
        return replace(state, field=field, excited_amp=ex, t=state.t + steps * dt)

    a, b, p, q, jump = _step_coefficients(state.params, dt)
    for _ in range(steps):
        if abs(field[-1]) ** 2 * state.dx > _EXIT_MASS_TOL:
            raise GridExtentError("pulse reached the right grid edge before t_end")
        drive = field[k - 1]
        emit_avg = p * ex + q * drive
        ex = a * ex + b * drive
        field[1:] = field[:-1]
        field[0] = 0.0
        field[k] += jump * emit_avg
    return replace(state, field=field, excited_amp=ex, t=state.t + steps * dt)


def evolve_pair(state: TwoPhotonState, t_end: float, harmonic: bool = False) -> TwoPhotonState:
    """Advance the two-photon state to t_end.

    Each step is split by coordinate: every slice of the field evolves
    under the exact one-dimensional sub-step (advect one cell, drive the
    excitation channel, deposit the emission jump) first along r2 and then
    along r1. In the two-level case the channel belonging to the photon
    that is already absorbed advects freely during the other coordinate's
    sub-step; it cannot interact, which is exactly the blockade that makes
    the two-photon response nonlinear. With ``harmonic=True`` that frozen
    pair is evolved by the same one-dimensional sub-step into and out of a
    double-excitation amplitude, and the step factorizes exactly into two
    independent single-photon evolutions.

    The sub-step ordering is not exchange invariant, so the state is
    re-symmetrized after every step; the removed asymmetry is of the size
    of the splitting error.
    """
    steps = _step_count(state, t_end)
    field = state.field.copy()
    e_row = state.excited_row.copy()
    e_col = state.excited_col.copy()
    ee = complex(state.double_amp)
    k = state.atom_index
    dt = state.dt
    dx = state.dx
    gamma = state.params.gamma

    if gamma == 0.0:
        for _ in range(steps):
            field[1:, 1:] = field[:-1, :-1]
            field[0, :] = 0.0
            field[:, 0] = 0.0
        return replace(state, field=field, t=state.t + steps * dt)

    a, b, p, q, jump = _step_coefficients(state.params, dt)
    scratch = np.empty_like(field)

    def substep_rows(atom, passive):
        """Coordinate-2 dynamics: rows (field[i, :], atom[i]); the passive
        channel (and, in harmonic mode, the double amplitude) rides along r2."""
        nonlocal field, ee
        drive = field[:, k - 1].copy()
        avg = p * atom + q * drive
        atom_new = a * atom + b * drive
        field[:, 1:] = field[:, :-1]
        field[:, 0] = 0.0
        field[:, k] += jump * avg
        if harmonic:
            pass_drive = passive[k - 1]
            ee_avg = p * ee + q * pass_drive
            ee_new = a * ee + b * pass_drive
        passive[1:] = passive[:-1]
        passive[0] = 0.0
        if harmonic:
            passive[k] += jump * ee_avg
            ee = ee_new
        return atom_new, passive

    def substep_cols(atom, passive):
        """Coordinate-1 dynamics, mirror of :func:`substep_rows`."""
        nonlocal field, ee
        drive = field[k - 1, :].copy()
        avg = p * atom + q * drive
        atom_new = a * atom + b * drive
        field[1:, :] = field[:-1, :]
        field[0, :] = 0.0
        field[k, :] += jump * avg
        if harmonic:
            pass_drive = passive[k - 1]
            ee_avg = p * ee + q * pass_drive
            ee_new = a * ee + b * pass_drive
        passive[1:] = passive[:-1]
        passive[0] = 0.0
        if harmonic:
            passive[k] += jump * ee_avg
            ee = ee_new
        return atom_new, passive

    for _ in range(steps):
        exit_mass = (
            float(np.max(np.abs(field[-1, :]))) ** 2 + float(np.max(np.abs(field[:, -1]))) ** 2
        ) * dx**2 + (abs(e_row[-1]) ** 2 + abs(e_col[-1]) ** 2) * dx
        if exit_mass > _EXIT_MASS_TOL:
            raise GridExtentError("amplitude reached the grid edge before t_end")

        e_col, e_row = substep_rows(e_col, e_row)
        e_row, e_col = substep_cols(e_row, e_col)

        np.add(field, field.T, out=scratch)
        scratch *= 0.5
        field, scratch = scratch, field
        e_mean = 0.5 * (e_row + e_col)
        e_row = e_mean
        e_col = e_mean.copy()

    return replace(
        state,
        field=field,
        excited_row=e_row,
        excited_col=e_col,
        double_amp=ee,
        t=state.t + steps * dt,
    )


def extract_comoving(state, t_ref: float | None = None, residual_tol: float = 1e-8):
    """Output wavefunction in the comoving frame x = r - c*t_ref.

    Requires the interaction to be over: excitation amplitudes and any
    field still at r < 0 must carry less probability than residual_tol.
    """
    if t_ref is None:
        t_ref = state.t
    k = state.atom_index
    if isinstance(state, SinglePhotonState):
        residual = abs(state.excited_amp) ** 2
        residual += float(np.sum(np.abs(state.field[:k]) ** 2)) * state.dx
        if residual > residual_tol:
            raise ResidualExcitationError(
                f"residual probability {residual:.3e} at the atom exceeds {residual_tol:.1e}"
            )
        return Grid1D(state.x_min - state.params.c * t_ref, state.dx, state.field.copy())
    if isinstance(state, TwoPhotonState):
        residual = (
            float(np.sum(np.abs(state.excited_row) ** 2))
            + float(np.sum(np.abs(state.excited_col) ** 2))
        ) * state.dx + abs(state.double_amp) ** 2
        residual += (
            float(np.sum(np.abs(state.field[:k, :]) ** 2))
            + float(np.sum(np.abs(state.field[k:, :k]) ** 2))
        ) * state.dx**2
        if residual > residual_tol:
            raise ResidualExcitationError(
                f"residual probability {residual:.3e} at the atom exceeds {residual_tol:.1e}"
            )
        return Grid2D(state.x_min - state.params.c * t_ref, state.dx, state.field.copy())
    raise TypeError(f"unsupported state type {type(state).__name__}")


def simulate_single(
    pulse: Grid1D,
    params: PhysicalParams,
    padding: float | None = None,
    residual_tol: float = 1e-8,
) -> Grid1D:
    """Full pipeline: place, evolve past the atom, extract.

    The returned grid uses the same comoving coordinates as the input
    pulse, so it is directly comparable with the analytic response.
    """
    state = prepare_single(pulse, params, padding=padding)
    t_end = -state.x_min / params.c  # everything is at r > 0 afterwards
    final = evolve_single(state, t_end)
    out = extract_comoving(final, residual_tol=residual_tol)
    return Grid1D(out.x_min + pulse.x_max, out.dx, out.values)


def simulate_pair(
    psi_in: Grid2D,
    params: PhysicalParams,
    padding: float | None = None,
    harmonic: bool = False,
    residual_tol: float = 1e-8,
) -> Grid2D:
    """Two-photon pipeline analogous to :func:`simulate_single`."""
    state = prepare_pair(psi_in, params, padding=padding)
    t_end = -state.x_min / params.c
    final = evolve_pair(state, t_end, harmonic=harmonic)
    out = extract_comoving(final, residual_tol=residual_tol)
    return Grid2D(out.x_min + psi_in.x_max, out.dx, out.values)
