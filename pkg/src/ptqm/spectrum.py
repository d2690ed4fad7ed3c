"""Spectrum container shared by the two eigenvalue backends."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ComplexSpectrumError, DegenerateSpectrumError
from .potentials import Contour, PotentialSpec

__all__ = ["Spectrum", "SampledEigenfunction", "check_nondegenerate"]


def check_nondegenerate(eigenvalues, resolution, reality_tol=None):
    """Raise if two real eigenvalues coincide in real part within ``resolution``.

    When ``reality_tol`` is given, only levels real at that (relative)
    tolerance participate: complex-conjugate pairs necessarily share a real
    part and are not degeneracies of the real spectrum.
    """
    ev = np.asarray(eigenvalues, dtype=complex)
    if reality_tol is not None:
        ev = ev[np.abs(ev.imag) <= reality_tol * (1.0 + np.abs(ev.real))]
    re = ev.real
    gaps = np.diff(re)
    if len(gaps) and gaps.min() < resolution * (1.0 + np.abs(re[:-1]).max()):
        i = int(np.argmin(gaps))
        raise DegenerateSpectrumError(
            f"levels {i} and {i + 1} coincide within resolution "
            f"({re[i]:.9g} vs {re[i + 1]:.9g})"
        )


@dataclass(frozen=True)
class SampledEigenfunction:
    """Eigenfunction samples along the contour.

    ``arclength`` is signed: negative on the left ray, positive on the
    right, zero at the junction.
    """

    arclength: np.ndarray
    positions: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class Spectrum:
    """Ordered eigenvalues with provenance and per-level diagnostics.

    Eigenvalues are sorted by ascending real part and are strictly
    nondegenerate.  They may carry imaginary parts (e.g. when a deliberately
    off-wedge contour breaks spectral reality, or when a truncated matrix
    retains unconverged levels); consumers that require a real spectrum call
    :meth:`require_real`, which enforces the reality invariant at the point
    of use.

    ``coefficients`` (oscillator-basis backend) holds one column of ambient
    basis coefficients per level; ``samples`` (shooting backend) holds
    contour samples per level.
    """

    eigenvalues: np.ndarray
    potential: PotentialSpec
    backend: str
    residuals: np.ndarray
    error_estimates: np.ndarray | None = None
    converged: np.ndarray | None = None
    coefficients: np.ndarray | None = None
    samples: tuple = None
    contour: Contour | None = None
    n_basis: int | None = None
    reality_tol: float = 1e-8
    degeneracy_resolution: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        ev = np.atleast_1d(np.asarray(self.eigenvalues, dtype=complex))
        if not (np.all(np.isfinite(ev.real)) and np.all(np.isfinite(ev.imag))):
            raise ValueError("spectrum contains non-finite eigenvalues")
        if np.any(np.diff(ev.real) < 0):
            raise ValueError("eigenvalues must be sorted by ascending real part")
        check_nondegenerate(ev, self.degeneracy_resolution, reality_tol=self.reality_tol)
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "residuals", np.atleast_1d(np.asarray(self.residuals, float)))

    @property
    def n_levels(self):
        return len(self.eigenvalues)

    @property
    def imag_violation(self):
        """max |Im E_n| / (1 + |Re E_n|) over all retained levels."""
        ev = self.eigenvalues
        return float(np.max(np.abs(ev.imag) / (1.0 + np.abs(ev.real))))

    @property
    def is_real(self):
        return self.imag_violation <= self.reality_tol

    def require_real(self, tol=None):
        """Return the real eigenvalues, or raise if reality is violated."""
        tol = self.reality_tol if tol is None else tol
        ev = self.eigenvalues
        bad = np.abs(ev.imag) > tol * (1.0 + np.abs(ev.real))
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ComplexSpectrumError(
                f"level {i} has Im E = {ev[i].imag:.3e} beyond reality tolerance {tol:.1e}; "
                "the construction requires a real spectrum"
            )
        return ev.real.copy()

    def level(self, n):
        return complex(self.eigenvalues[n])
