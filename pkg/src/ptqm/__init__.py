"""Numerical toolkit for PT-symmetric Hamiltonians p^2 + x^2 (ix)^epsilon.

Computes real spectra on complex contours (shooting and oscillator-basis
backends), builds the positive-definite inner product under which the
eigenbasis is orthonormal, constructs the unitarily equivalent Hermitian
description, and verifies numerically that the two descriptions produce
identical real expectation values.
"""

from .errors import (
    ComplexSpectrumError,
    DegenerateSpectrumError,
    DimensionMismatchError,
    IllConditionedError,
    IntegrationError,
    NonHermitianObservableError,
    PTQMError,
    RootSearchError,
)
from .hilbert import (
    LinearMap,
    MetricSpace,
    StateVector,
    build_metric,
    check_unitary,
    euclidean_space,
    gram_matrix,
    inner_product_plus,
    is_hermitian_wrt,
    matrix_representation,
    metric_adjoint,
    random_state,
)
from .potentials import Contour, PotentialSpec, stokes_wedges, wkb_energy_estimates
from .spectrum import SampledEigenfunction, Spectrum
from .oscillator import (
    diagonalize_oscillator_basis,
    eigenbasis_matrix,
    hamiltonian_matrix,
    hermite_functions,
)
from .shooting import eigenvalue_fixed_step, find_eigenvalues, shoot
from .equivalence import (
    EquivalenceBundle,
    ObservableMatrix,
    build_bundle,
    build_calU,
    build_h,
    build_U,
    hamiltonian_matrix_rep,
    map_observable,
    random_observable,
    verify_bundle,
)
from .dynamics import (
    EquivalenceReport,
    EvolutionState,
    evolve,
    expectation_conventional,
    expectation_pt,
    verify_equivalence,
)

__version__ = "0.1.0"

__all__ = [
    "PTQMError",
    "DimensionMismatchError",
    "IllConditionedError",
    "ComplexSpectrumError",
    "DegenerateSpectrumError",
    "IntegrationError",
    "RootSearchError",
    "NonHermitianObservableError",
    "StateVector",
    "MetricSpace",
    "LinearMap",
    "build_metric",
    "euclidean_space",
    "inner_product_plus",
    "gram_matrix",
    "metric_adjoint",
    "is_hermitian_wrt",
    "check_unitary",
    "matrix_representation",
    "random_state",
    "PotentialSpec",
    "Contour",
    "stokes_wedges",
    "wkb_energy_estimates",
    "Spectrum",
    "SampledEigenfunction",
    "hamiltonian_matrix",
    "diagonalize_oscillator_basis",
    "eigenbasis_matrix",
    "hermite_functions",
    "shoot",
    "find_eigenvalues",
    "eigenvalue_fixed_step",
    "ObservableMatrix",
    "EquivalenceBundle",
    "build_U",
    "build_calU",
    "build_h",
    "hamiltonian_matrix_rep",
    "build_bundle",
    "verify_bundle",
    "map_observable",
    "random_observable",
    "EvolutionState",
    "evolve",
    "expectation_pt",
    "expectation_conventional",
    "verify_equivalence",
    "EquivalenceReport",
    "__version__",
]
