"""Simulation of one- and two-photon wavepackets scattering at a single
two-level atom in a one-dimensional propagation model.

The atom can hold at most one excitation, which couples the two photons of
a pulse: the output acquires an entangled, phase-matched pair component on
top of the product of single-photon responses. The package provides the
analytic response kernels, a time-domain integration oracle to validate
them, k-space/Schmidt analysis of the scattered pairs, and the
pair-generation bookkeeping for weak coherent input light.
"""

from .core import (
    GeometryError,
    Grid1D,
    Grid2D,
    GridExtentError,
    KDecomposition,
    PhysicalParams,
    SymmetryError,
    inner_product,
    local_fourier_1d,
    local_fourier_2d,
    rect_pulse,
    sampled_pulse,
    suggested_n_max,
)
from .dynamics import (
    ResidualExcitationError,
    SinglePhotonState,
    TwoPhotonState,
    evolve_pair,
    evolve_single,
    extract_comoving,
    prepare_pair,
    prepare_single,
    simulate_pair,
    simulate_single,
)
from .pairgen import (
    CoherentInput,
    DisplacementMismatchError,
    TruncatedState,
    coherent_expand,
    displace_remove,
    interact,
    mean_pairs_per_pulse,
    pair_rate,
)
from .response import (
    LONG_PULSE_FACTOR,
    cross_section,
    nonlinear_component,
    rect_pair_nonlinear,
    rect_single_output,
    scatter_pair,
    scatter_single,
    scattering_probability,
)
from .spectral import (
    SchmidtForm,
    SpectralDensity,
    linewidth_ratio,
    pair_amplitude,
    scattering_spectrum,
    schmidt_decompose,
    single_photon_density,
    spontaneous_emission_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # core
    "PhysicalParams",
    "Grid1D",
    "Grid2D",
    "KDecomposition",
    "GeometryError",
    "GridExtentError",
    "SymmetryError",
    "inner_product",
    "local_fourier_1d",
    "local_fourier_2d",
    "rect_pulse",
    "sampled_pulse",
    "suggested_n_max",
    # response
    "scatter_single",
    "scatter_pair",
    "nonlinear_component",
    "rect_single_output",
    "rect_pair_nonlinear",
    "scattering_probability",
    "cross_section",
    "LONG_PULSE_FACTOR",
    # dynamics
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
    # spectral
    "SchmidtForm",
    "SpectralDensity",
    "schmidt_decompose",
    "single_photon_density",
    "pair_amplitude",
    "scattering_spectrum",
    "spontaneous_emission_spectrum",
    "linewidth_ratio",
    # pairgen
    "CoherentInput",
    "TruncatedState",
    "DisplacementMismatchError",
    "coherent_expand",
    "interact",
    "displace_remove",
    "mean_pairs_per_pulse",
    "pair_rate",
]
