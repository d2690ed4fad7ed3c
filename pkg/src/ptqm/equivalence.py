"""Unitary equivalence between the PT-symmetric and conventional descriptions.

Given a real spectrum {E_n} with eigenbasis-change matrix S, this module
builds the two unitary maps out of the declared-orthonormal space: U into the
truncated sequence space and calU into the ambient function-space model (the
oscillator-coefficient picture of L^2).  Both send the n-th eigenvector to
the n-th standard basis vector, so they share the matrix S^dagger eta =
S^{-1} and differ only in the role assigned to the codomain.  The
transported Hamiltonian is the real diagonal h = diag(E_n), and observables
keep their matrix entries in the two pictures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonHermitianObservableError, PTQMError
from .hilbert import (
    LinearMap,
    MetricSpace,
    build_metric,
    check_unitary,
    euclidean_space,
    is_hermitian_wrt,
)
from .oscillator import eigenbasis_matrix
from .spectrum import Spectrum

__all__ = [
    "ObservableMatrix",
    "EquivalenceBundle",
    "build_U",
    "build_calU",
    "build_h",
    "hamiltonian_matrix_rep",
    "build_bundle",
    "map_observable",
    "random_observable",
    "verify_bundle",
    "BundleCheck",
]


@dataclass(frozen=True)
class ObservableMatrix:
    """Hermitian matrix defining an observable in the eigenbasis.

    Hermiticity O[m, n] = conj(O[n, m]) is what makes every expectation
    value real; a non-Hermitian matrix is rejected outright.  ``picture``
    tags which description the matrix is currently read in ("pt" or
    "conventional"); the entries are identical in both.
    """

    entries: np.ndarray
    picture: str = "pt"

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"observable must be square, got {m.shape}")
        defect = np.abs(m - m.conj().T).max()
        if defect > 1e-12 * max(1.0, np.abs(m).max()):
            raise NonHermitianObservableError(
                f"matrix is not Hermitian (max |O - O^dagger| = {defect:.3e}); "
                "its expectation values would not all be real"
            )
        object.__setattr__(self, "entries", m)

    @property
    def dim(self):
        return self.entries.shape[0]


def random_observable(dim, rng, scale=1.0):
    """Random Hermitian observable (GUE-style) in the eigenbasis."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return ObservableMatrix(scale * (a + a.conj().T) / 2.0)


def build_U(space_H):
    """Unitary map onto the truncated sequence space: (U psi)(n) = <phi_n, psi>_+.

    In ambient coordinates the matrix is S^dagger eta, which equals S^{-1};
    it sends the n-th declared basis vector to the n-th standard basis vector
    of the sequence space.
    """
    mat = space_H.basis_change.conj().T @ space_H.metric
    return LinearMap(
        mat,
        domain_space=space_H,
        codomain_space=euclidean_space(space_H.dim, label="sequence"),
    )


def build_calU(space_H):
    """Unitary map onto the ambient function-space model, phi_n -> Phi_n.

    Same matrix as :func:`build_U`; the codomain is the reference
    orthonormal basis of the ambient model rather than abstract sequences.
    """
    mat = space_H.basis_change.conj().T @ space_H.metric
    return LinearMap(
        mat,
        domain_space=space_H,
        codomain_space=euclidean_space(space_H.dim, label="ambient-model"),
    )


def build_h(spectrum, n_trunc=None, reality_tol=None):
    """Equivalent Hermitian Hamiltonian: the real diagonal diag(E_0 .. E_{n-1}).

    Refuses spectra whose retained levels violate the reality tolerance,
    since the construction transports only real spectra.
    """
    energies = spectrum.require_real(reality_tol)
    n = len(energies) if n_trunc is None else int(n_trunc)
    if n > len(energies):
        raise PTQMError(f"spectrum retains {len(energies)} levels < n_trunc = {n}")
    return np.diag(energies[:n])


def hamiltonian_matrix_rep(spectrum, n_trunc=None, reality_tol=None):
    """Matrix of the Hamiltonian in its own eigenbasis: diag(E_n).

    The matrix is Hermitian because the eigenvalues are real; since the
    eigenbasis is orthonormal under the declared inner product, this
    certifies the Hamiltonian is Hermitian in that space.
    """
    h = build_h(spectrum, n_trunc, reality_tol)
    assert np.array_equal(h, h.conj().T)
    return h


@dataclass(frozen=True)
class EquivalenceBundle:
    """Everything needed to move between the two descriptions.

    ``pathway`` is "position" when the eigenbasis has ambient coefficients
    (so the metric space, U, and calU act on genuine ambient coordinates)
    or "coefficient" when only spectra and observable matrices are
    transported and the maps are identities on level indices.
    ``ambient_hamiltonian`` is the Hamiltonian's action on ambient
    coefficients, S diag(E) S^{-1}.
    """

    spectrum: Spectrum
    space_H: MetricSpace
    U_map: LinearMap
    calU_map: LinearMap
    h_matrix: np.ndarray
    ambient_hamiltonian: np.ndarray
    pathway: str

    @property
    def dim(self):
        return self.space_H.dim

    @property
    def cond(self):
        return self.space_H.cond

    @property
    def energies(self):
        return np.diag(self.h_matrix).real


def build_bundle(spectrum, n_trunc=None, *, cond_max=1e8, tol_scale=1e-8, seed=0):
    """Construct and validate the equivalence bundle from a real spectrum.

    ``n_trunc`` defaults to every retained level.  The position pathway is
    taken whenever oscillator-basis coefficients are available (or
    computable, for real-axis shooting spectra); otherwise the abstract
    coefficient pathway is used.  Construction fails loudly when cond(S)
    exceeds ``cond_max`` or when any unitarity/transport invariant misses
    the tolerance 10^-8 scaled by cond(S).
    """
    energies = spectrum.require_real()
    n = len(energies) if n_trunc is None else int(n_trunc)
    if n > len(energies):
        raise PTQMError(f"spectrum retains {len(energies)} levels < n_trunc = {n}")

    position = spectrum.coefficients is not None or spectrum.samples is not None
    if position:
        S = eigenbasis_matrix(spectrum, n)
        space_H = build_metric(S, cond_max=cond_max, label="pt-ambient")
        h = np.diag(energies[:n])
        h_amb = S @ np.linalg.solve(S.T, (h.T).astype(complex)).T  # S h S^{-1}
        bundle = EquivalenceBundle(
            spectrum=spectrum,
            space_H=space_H,
            U_map=build_U(space_H),
            calU_map=build_calU(space_H),
            h_matrix=h,
            ambient_hamiltonian=h_amb,
            pathway="position",
        )
    else:
        space_H = euclidean_space(n, label="pt-coefficient")
        h = np.diag(energies[:n])
        bundle = EquivalenceBundle(
            spectrum=spectrum,
            space_H=space_H,
            U_map=LinearMap(np.eye(n, dtype=complex), space_H, euclidean_space(n, "sequence")),
            calU_map=LinearMap(
                np.eye(n, dtype=complex), space_H, euclidean_space(n, "ambient-model")
            ),
            h_matrix=h,
            ambient_hamiltonian=h.astype(complex),
            pathway="coefficient",
        )

    tol = tol_scale * max(bundle.cond, 1.0)
    failures = [c for c in verify_bundle(bundle, tol=tol, seed=seed) if not c.passed]
    if failures:
        worst = max(failures, key=lambda c: c.violation)
        raise PTQMError(
            f"bundle invariant {worst.name!r} failed: violation {worst.violation:.3e} "
            f"exceeds tolerance {tol:.3e}"
        )
    return bundle


@dataclass(frozen=True)
class BundleCheck:
    name: str
    passed: bool
    violation: float
    tol: float


def verify_bundle(bundle, tol=None, seed=0, n_pairs=100):
    """Evaluate every bundle invariant; returns a list of named checks.

    Checks: unitarity (C1/C2/C3) of U and calU, calU mapping the declared
    basis onto the reference basis, the transported Hamiltonian being the
    real diagonal h, spectral preservation under the ambient action, and
    eta-Hermiticity of the ambient Hamiltonian action.
    """
    if tol is None:
        tol = 1e-8 * max(bundle.cond, 1.0)
    checks = []
    n = bundle.dim
    h_scale = max(1.0, np.abs(bundle.h_matrix).max())

    for label, lm in (("U", bundle.U_map), ("calU", bundle.calU_map)):
        rep = check_unitary(lm, tol=tol, n_pairs=n_pairs, seed=seed)
        checks.append(BundleCheck(f"{label}:C1-sampled", rep.c1, rep.c1_violation, tol))
        checks.append(BundleCheck(f"{label}:C2-matrix", rep.c2, rep.c2_violation, tol))
        checks.append(BundleCheck(f"{label}:C3-basis-gram", rep.c3, rep.c3_violation, tol))

    img = bundle.calU_map.matrix @ bundle.space_H.basis_change
    v = float(np.abs(img - np.eye(n)).max())
    checks.append(BundleCheck("calU-maps-basis-to-reference", v <= tol, v, tol))

    u = bundle.calU_map.matrix
    transported = u @ bundle.ambient_hamiltonian @ np.linalg.inv(u)
    v = float(np.abs(transported - bundle.h_matrix).max() / h_scale)
    checks.append(BundleCheck("transported-H-is-diagonal-h", v <= tol, v, tol))

    ev = np.sort(np.linalg.eigvals(bundle.ambient_hamiltonian).real)
    v = float(np.abs(ev - bundle.energies).max() / h_scale)
    checks.append(BundleCheck("spectral-preservation", v <= tol, v, tol))

    rep = is_hermitian_wrt(bundle.ambient_hamiltonian, bundle.space_H, tol=tol, seed=seed)
    checks.append(
        BundleCheck("ambient-H-hermitian-wrt-metric", rep.hermitian, rep.matrix_violation, tol)
    )
    return checks


def map_observable(observable, bundle, direction="to_conventional", tol_scale=1e-8):
    """Transport an observable between the two pictures.

    Because calU maps phi_n to Phi_n, the matrix entries coincide in both
    pictures; the operation retags the matrix and, on the position pathway,
    verifies the operator identity o = calU O_ambient calU^{-1} within
    tolerance before returning.
    """
    if direction not in ("to_conventional", "to_PT"):
        raise ValueError(f"unknown direction {direction!r}")
    if observable.dim != bundle.dim:
        raise DimensionMismatchError(
            f"observable dim {observable.dim} does not match bundle dim {bundle.dim}"
        )
    if bundle.pathway == "position":
        S = bundle.space_H.basis_change
        o_amb = S @ np.linalg.solve(S.T, observable.entries.T).T  # S O S^{-1}
        u = bundle.calU_map.matrix
        o_f = u @ o_amb @ np.linalg.inv(u)
        tol = tol_scale * max(bundle.cond, 1.0) * max(1.0, np.abs(observable.entries).max())
        defect = np.abs(o_f - observable.entries).max()
        if defect > tol:
            raise PTQMError(
                f"observable transport identity violated: {defect:.3e} > {tol:.3e}"
            )
    picture = "conventional" if direction == "to_conventional" else "pt"
    return ObservableMatrix(observable.entries.copy(), picture=picture)
