"""Photon-pair generation from weak coherent input light.

A weak coherent pulse |alpha> truncated at two photons is sent through the
atom; the linear part of the output is again coherent with a pi phase flip
(in the long-pulse limit), so displacing it away by interference with a
reference pulse of the input shape leaves vacuum plus the entangled
two-photon component. The displacement is modeled as amplitude bookkeeping
in the input mode, which is exact in the high-reflectivity limit of the
interference; the pulse-edge mismatch between the scattered single-photon
mode and the input mode at finite length shows up as a reported residual
one-photon amplitude.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import Grid1D, Grid2D, PhysicalParams, inner_product
from .response import LONG_PULSE_FACTOR, scatter_pair, scatter_single

__all__ = [
    "CoherentInput",
    "TruncatedState",
    "DisplacementMismatchError",
    "coherent_expand",
    "interact",
    "displace_remove",
    "mean_pairs_per_pulse",
    "pair_rate",
]

_MAX_MEAN_PHOTONS = 0.2
_WARN_MEAN_PHOTONS = 0.05


class DisplacementMismatchError(RuntimeError):
    """Displacement amplitude inconsistent with the state's coherent part."""


@dataclass(frozen=True)
class CoherentInput:
    """Weak coherent pulse: amplitude alpha in a normalized mode of length L."""

    alpha: complex
    pulse: Grid1D
    length: float

    def __post_init__(self):
        mean = abs(self.alpha) ** 2
        if mean >= _MAX_MEAN_PHOTONS:
            raise ValueError(
                f"|alpha|^2 = {mean:.3g} too large for the two-photon truncation "
                f"(must stay below {_MAX_MEAN_PHOTONS})"
            )
        if mean > _WARN_MEAN_PHOTONS:
            warnings.warn(
                f"|alpha|^2 = {mean:.3g} above {_WARN_MEAN_PHOTONS}; "
                "three-photon corrections are no longer negligible"
            )
        if self.length <= 0:
            raise ValueError("pulse length must be positive")
        if abs(self.pulse.norm_sq() - 1.0) > 1e-6:
            raise ValueError("pulse mode must be normalized to 1")


@dataclass(frozen=True)
class TruncatedState:
    """Zero-, one-, and two-photon components with separated amplitudes.

    Shapes are kept normalized (or zero) and multiply the stored
    amplitudes. ``pulse`` keeps the input mode for later displacement, and
    ``pulse_length`` the nominal length used by the long-pulse formulas.
    Truncation at two photons leaves a norm deficit of order |alpha|^6.
    """

    vac_amp: complex
    one_amp: complex
    one_shape: Grid1D
    two_amp: complex
    two_shape: Grid2D
    pulse: Grid1D
    pulse_length: float


def coherent_expand(inp: CoherentInput) -> TruncatedState:
    """Expand |alpha> into vacuum, one-, and two-photon components:
    amplitudes (1, alpha, alpha^2/sqrt(2)) in the modes phi and phi x phi."""
    two = Grid2D.from_product(inp.pulse, inp.pulse)
    return TruncatedState(
        vac_amp=1.0,
        one_amp=complex(inp.alpha),
        one_shape=inp.pulse,
        two_amp=complex(inp.alpha) ** 2 / math.sqrt(2.0),
        two_shape=two,
        pulse=inp.pulse,
        pulse_length=inp.length,
    )


def interact(state: TruncatedState, params: PhysicalParams) -> TruncatedState:
    """Scatter each photon-number component off the atom.

    Vacuum is untouched; the one-photon mode picks up the single-photon
    response (~ a pi phase flip for long pulses) and the two-photon mode
    the full pair response including the nonlinear component.
    """
    lc = params.coherence_length
    if math.isfinite(lc) and state.pulse_length < LONG_PULSE_FACTOR * lc:
        warnings.warn(
            f"interact: pulse length {state.pulse_length:g} below the long-pulse "
            "regime; the coherent part will not cancel cleanly"
        )
    return TruncatedState(
        vac_amp=state.vac_amp,
        one_amp=state.one_amp,
        one_shape=scatter_single(state.one_shape, params),
        two_amp=state.two_amp,
        two_shape=scatter_pair(state.two_shape, params),
        pulse=state.pulse,
        pulse_length=state.pulse_length,
    )


def _normalized(values: np.ndarray, template):
    """Split a raw component into (norm, unit-norm shape)."""
    grid = template.with_values(values)
    nrm = grid.norm()
    if nrm == 0.0:
        return 0.0j, grid
    return complex(nrm), grid.with_values(values / nrm)


def displace_remove(state: TruncatedState, alpha: complex) -> TruncatedState:
    """Apply the displacement of amplitude ``alpha`` in the input mode.

    For a state whose coherent part is |-alpha> this cancels the one-photon
    component up to the input/output mode mismatch and O(|alpha|^3) terms,
    leaving vacuum plus the two-photon pair component. The leftover
    one-photon amplitude is reported in the returned state; it only raises
    when it exceeds ten times the unavoidable estimate, which signals that
    ``alpha`` does not match the state's coherent part.
    """
    phi = state.pulse
    f = state.one_shape
    if not phi.geometry_matches(f):
        raise ValueError("one-photon shape must share the input-mode grid")
    d = complex(alpha)
    overlap = inner_product(phi, f)  # <phi|f>, ~ -1 for long pulses

    vac = state.vac_amp * (1.0 - abs(d) ** 2 / 2.0) - state.one_amp * np.conj(d) * overlap

    one_raw = state.vac_amp * d * phi.values + state.one_amp * f.values
    one_amp, one_shape = _normalized(one_raw, phi)

    two_template = state.two_shape
    pair_sym = (
        np.outer(phi.values, f.values) + np.outer(f.values, phi.values)
    ) / math.sqrt(2.0)
    two_raw = (
        state.vac_amp * (d**2 / math.sqrt(2.0)) * np.outer(phi.values, phi.values)
        + state.one_amp * d * pair_sym
        + state.two_amp * two_template.values
    )
    two_amp, two_shape = _normalized(two_raw, two_template)

    # the displacement that would exactly cancel the in-mode coherent part;
    # a request far from it signals a sign or magnitude error rather than
    # the unavoidable pulse-edge mode mismatch (which is only reported)
    if state.vac_amp != 0:
        ideal = -state.one_amp * overlap / state.vac_amp
        if abs(d - ideal) > 0.5 * abs(ideal) + 10.0 * abs(d) ** 3 + 1e-12:
            raise DisplacementMismatchError(
                f"displacement {d} inconsistent with the state's coherent part "
                f"(cancellation needs ~{complex(ideal):.3g}); one-photon residual "
                f"{abs(one_amp):.3e} would not be removable"
            )
    return TruncatedState(
        vac_amp=complex(vac),
        one_amp=complex(one_amp),
        one_shape=one_shape,
        two_amp=complex(two_amp),
        two_shape=two_shape,
        pulse=state.pulse,
        pulse_length=state.pulse_length,
    )


def mean_pairs_per_pulse(alpha: complex, length: float, params: PhysicalParams) -> float:
    """Average number of photon pairs per pulse, 8 c / (gamma L) * |alpha|^4."""
    if length <= 0:
        raise ValueError("pulse length must be positive")
    lc = params.coherence_length
    if math.isfinite(lc) and length < LONG_PULSE_FACTOR * lc:
        warnings.warn("mean_pairs_per_pulse assumes the long-pulse regime")
    return 8.0 * params.c / (params.gamma * length) * abs(alpha) ** 4


def pair_rate(intensity: float, params: PhysicalParams) -> float:
    """Pair creation rate 8 * I^2 / gamma for continuous pumping.

    Valid for intensities well below gamma photons per unit time, where
    higher photon-number effects stay negligible.
    """
    if intensity < 0:
        raise ValueError("intensity must be nonnegative")
    if intensity > 0.1 * params.gamma:
        warnings.warn(
            f"pair_rate: intensity {intensity:g} is not small against gamma = "
            f"{params.gamma:g}; higher-order photon effects are not negligible"
        )
    return 8.0 * intensity**2 / params.gamma
