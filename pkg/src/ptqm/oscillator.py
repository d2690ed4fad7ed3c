"""Oscillator-basis backend: matrix diagonalization on the real line.

The reference basis is the set of eigenfunctions of p^2 + x^2 (unit mass and
frequency in units where the harmonic spectrum is 2n + 1).  For integer
exponents eps < 2 the potential is polynomial and the Hamiltonian matrix is
assembled exactly from ladder-operator algebra; real-line truncation then
approximates the contour problem because the real axis lies strictly inside
the decay wedges.  For eps >= 2 the real axis leaves the wedges and this
backend refuses.
"""

from __future__ import annotations

import numpy as np

from .errors import PTQMError
from .potentials import PotentialSpec
from .spectrum import Spectrum

__all__ = [
    "position_matrix",
    "momentum_matrix",
    "hamiltonian_matrix",
    "diagonalize_oscillator_basis",
    "eigenbasis_matrix",
    "hermite_functions",
    "normalize_columns",
]


def _lowering(n):
    return np.diag(np.sqrt(np.arange(1.0, n)), 1)


def position_matrix(n):
    """<m|x|n> in the oscillator basis: x = (a + a^dagger)/sqrt(2)."""
    a = _lowering(n)
    return (a + a.T) / np.sqrt(2.0)


def momentum_matrix(n):
    """<m|p|n> in the oscillator basis: p = i (a^dagger - a)/sqrt(2)."""
    a = _lowering(n)
    return 1j * (a.T - a) / np.sqrt(2.0)


def _check_backend_applicable(potential):
    ieps = potential.integer_epsilon
    if ieps is None:
        raise PTQMError(
            "oscillator-basis backend needs an integer exponent: matrix elements "
            f"of the non-polynomial (ix)^{potential.epsilon} are out of scope"
        )
    if ieps >= 2:
        raise PTQMError(
            f"epsilon = {ieps} >= 2: the decay wedges exclude the real axis, so a "
            "real-line truncation does not approximate the contour problem; "
            "use the shooting backend"
        )
    return ieps


def hamiltonian_matrix(potential, n_basis):
    """Exact n_basis x n_basis matrix of p^2 + V(x) in the oscillator basis.

    Operators are built at a padded size and truncated after multiplying, so
    every retained entry is the exact matrix element (products of truncated
    matrices would differ near the truncation edge).
    """
    ieps = _check_backend_applicable(potential)
    pad = ieps + 2
    m = n_basis + pad
    x = position_matrix(m)
    p = momentum_matrix(m)
    h = p @ p
    if potential.mu != 0.0:
        h = h + potential.mu * (x @ x)
    if potential.lam != 0.0:
        h = h + potential.lam * (1j**ieps) * np.linalg.matrix_power(x, 2 + ieps)
    return np.ascontiguousarray(h[:n_basis, :n_basis])


def normalize_columns(v):
    """Unit Euclidean columns with the largest-magnitude entry real positive.

    This is the phase/scale convention for eigenbasis columns: under a
    declared-orthonormal metric any column scaling yields unit metric norm
    automatically, so the remaining freedom is fixed by unit ambient norm
    (for conditioning) and a real-positive anchor entry (for reproducibility).
    """
    v = np.array(v, dtype=complex)
    v /= np.linalg.norm(v, axis=0, keepdims=True)
    anchors = np.abs(v).argmax(axis=0)
    phases = v[anchors, np.arange(v.shape[1])]
    v *= (np.abs(phases) / phases)[None, :]
    return v


def _sorted_eig(h):
    if np.abs(h - h.conj().T).max() < 1e-12 * max(1.0, np.abs(h).max()):
        w, v = np.linalg.eigh(h)
        w = w.astype(complex)
    else:
        w, v = np.linalg.eig(h)
        order = np.lexsort((w.imag, w.real))
        w, v = w[order], v[:, order]
    return w, v


def diagonalize_oscillator_basis(
    potential,
    n_basis,
    *,
    keep="converged",
    conv_tol=1e-6,
    reality_tol=1e-8,
    artifact_threshold=1e-3,
):
    """Diagonalize the truncated Hamiltonian matrix.

    A finite truncation of a PT-symmetric matrix develops artifacts in its
    upper spectrum: grossly complex conjugate pairs (|Im E| of order the
    matrix norm) and unconverged real levels, interleaved by real part with
    the converged physical ones.  With ``keep="converged"`` (default) those
    conjugate-pair artifacts (relative |Im E| above ``artifact_threshold``)
    are discarded outright, and the retained list is the maximal prefix of
    remaining levels that are real within ``reality_tol`` (relative) and
    reproduced by the half-size diagonalization within ``conv_tol``
    (relative).  Stopping at the first failure keeps the retained list an
    honest "lowest levels" set: a level in the ambiguous zone between
    ``reality_tol`` and ``artifact_threshold`` marks the convergence
    frontier rather than being skipped.

    With ``keep="all"`` every level of the truncated matrix is retained,
    complex pairs included, and ``converged`` marks the trustworthy ones.
    This variant supplies full square eigenbases for metric studies at a
    fixed truncation dimension; downstream constructions that need a real
    spectrum will refuse it.

    Parameters
    ----------
    potential : PotentialSpec
        Must have integer epsilon < 2.
    n_basis : int
        Truncation dimension of the oscillator basis (>= 4).
    """
    if n_basis < 4:
        raise PTQMError("n_basis must be at least 4")
    if keep not in ("converged", "all"):
        raise ValueError(f"unknown keep mode {keep!r}")

    h = hamiltonian_matrix(potential, n_basis)
    w, v = _sorted_eig(h)
    v = normalize_columns(v)
    residuals = np.linalg.norm(h @ v - v * w[None, :], axis=0)

    w_half = _sorted_eig(hamiltonian_matrix(potential, n_basis // 2))[0]
    conv_est = np.array([np.abs(w_half - e).min() for e in w])
    converged = conv_est <= conv_tol * (1.0 + np.abs(w.real))
    rel_imag = np.abs(w.imag) / (1.0 + np.abs(w.real))

    if keep == "converged":
        candidates = np.nonzero(rel_imag <= artifact_threshold)[0]
        idx = []
        for i in candidates:
            if rel_imag[i] > reality_tol or not converged[i]:
                break
            idx.append(i)
        if not idx:
            raise PTQMError(
                f"no level of the size-{n_basis} truncation is converged and real; "
                "increase n_basis"
            )
        idx = np.asarray(idx)
    else:
        idx = np.arange(len(w))

    return Spectrum(
        eigenvalues=w[idx],
        potential=potential,
        backend="oscillator-basis",
        residuals=residuals[idx],
        error_estimates=conv_est[idx],
        converged=converged[idx],
        coefficients=v[:, idx].copy(),
        n_basis=n_basis,
        reality_tol=reality_tol,
    )


def hermite_functions(n_max, x):
    """Oscillator eigenfunctions Phi_0 .. Phi_{n_max-1} evaluated on real x.

    Uses the stable normalized recurrence
    Phi_{n+1} = sqrt(2/(n+1)) x Phi_n - sqrt(n/(n+1)) Phi_{n-1}.
    Returns an array of shape (n_max, len(x)).
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max, x.size))
    out[0] = np.pi**-0.25 * np.exp(-x * x / 2.0)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
    return out


def _coefficients_from_samples(spectrum, n_trunc):
    """Project shooting-backend eigenfunction samples on the oscillator basis."""
    from scipy.integrate import simpson

    contour = spectrum.contour
    if contour is None or spectrum.samples is None:
        raise PTQMError("shooting spectrum carries no eigenfunction samples")
    on_axis = (
        abs(contour.theta_right) < 1e-9
        and abs(contour.theta_left + np.pi) < 1e-9
        and abs(contour.junction) < 1e-12
    )
    if not on_axis:
        raise PTQMError(
            "position-space pathway unavailable: eigenfunctions were sampled on an "
            "off-axis contour, and their oscillator-basis coefficients are only "
            "defined by real-line overlaps; use the abstract coefficient pathway"
        )
    cols = []
    for ef in spectrum.samples:
        xs = ef.positions.real
        basis = hermite_functions(n_trunc, xs)
        cols.append(simpson(basis * ef.values[None, :], x=xs))
    return np.column_stack(cols)


def eigenbasis_matrix(spectrum, n_trunc):
    """Square basis-change matrix S: column n holds the first ``n_trunc``
    ambient (oscillator-basis) coefficients of eigenfunction n.

    For oscillator-backend spectra the coefficients are truncated from the
    diagonalization; truncation requires n_trunc <= n_levels and
    n_trunc <= n_basis.  For shooting-backend spectra on the real-axis
    contour the coefficients are computed by quadrature overlaps with the
    oscillator functions.  Columns are renormalized to the standard
    convention after truncation.  Feeding S to ``build_metric`` yields the
    declared-orthonormal space of the eigenbasis.
    """
    if n_trunc < 1:
        raise PTQMError("n_trunc must be positive")
    if spectrum.n_levels < n_trunc:
        raise PTQMError(
            f"spectrum retains {spectrum.n_levels} levels < n_trunc = {n_trunc}; "
            "a square eigenbasis needs one level per dimension "
            "(rerun the backend with more levels or a larger basis)"
        )
    if spectrum.backend == "oscillator-basis":
        if spectrum.coefficients is None:
            raise PTQMError("spectrum carries no coefficient data")
        if spectrum.n_basis < n_trunc:
            raise PTQMError(f"n_trunc = {n_trunc} exceeds the basis size {spectrum.n_basis}")
        s = spectrum.coefficients[:n_trunc, :n_trunc]
    elif spectrum.backend == "shooting":
        s = _coefficients_from_samples(spectrum, n_trunc)[:, :n_trunc]
    else:
        raise PTQMError(f"unknown backend {spectrum.backend!r}")
    return normalize_columns(s)
