"""Finite-dimensional Hilbert-space machinery for declared-orthonormal bases.

A non-orthogonal (in the Euclidean sense) basis, given as the columns of an
invertible matrix S, is *declared* orthonormal.  That declaration fixes a
unique positive-definite inner product on the truncated coefficient space,
represented by the metric matrix

    eta = (S S^dagger)^{-1},      <psi, phi>_+ = psi^dagger eta phi.

Everything else in this module is bookkeeping around that fact: Gram
matrices, metric-aware adjoints, Hermiticity and unitarity checkers, and
matrix representations in the declared basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, IllConditionedError

__all__ = [
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
]

DEFAULT_TOL = 1e-8
DEFAULT_COND_MAX = 1e8


def _as_coeffs(v, dim=None, basis_tag=None):
    """Coerce a StateVector or array-like to a validated complex 1-D array."""
    if isinstance(v, StateVector):
        if basis_tag is not None and v.basis_tag != basis_tag:
            raise ValueError(
                f"state is expressed in basis {v.basis_tag!r}, expected {basis_tag!r}"
            )
        c = v.coeffs
    else:
        c = np.asarray(v, dtype=complex)
    if c.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {c.shape}")
    if dim is not None and c.shape[0] != dim:
        raise DimensionMismatchError(f"vector has length {c.shape[0]}, space has dim {dim}")
    if not (np.all(np.isfinite(c.real)) and np.all(np.isfinite(c.imag))):
        raise ValueError("state vector contains non-finite entries")
    return c


@dataclass(frozen=True)
class StateVector:
    """Coefficients of a state in a fixed basis.

    ``basis_tag`` records which basis the coefficients refer to: ``"F"`` for
    the ambient orthonormal reference basis, ``"B"`` for the declared
    (eigen)basis.
    """

    coeffs: np.ndarray
    basis_tag: str = "F"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1:
            raise DimensionMismatchError(f"coefficients must be 1-D, got shape {c.shape}")
        if not (np.all(np.isfinite(c.real)) and np.all(np.isfinite(c.imag))):
            raise ValueError("coefficients contain NaN/Inf")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return self.coeffs.shape[0]


@dataclass(frozen=True)
class MetricSpace:
    """Truncated coefficient space with a declared-orthonormal inner product.

    Attributes
    ----------
    dim : int
        Truncation dimension.
    metric : (dim, dim) complex ndarray
        Positive-definite Hermitian metric matrix eta.
    basis_change : (dim, dim) complex ndarray
        Column n holds the ambient coefficients of the n-th declared basis
        vector.  ``metric = (basis_change @ basis_change^dagger)^{-1}``.
    cond : float
        2-norm condition number of ``basis_change``.
    label : str
        Free-form tag used to tell otherwise identical spaces apart
        (e.g. the sequence space versus the ambient function-space model).
    """

    dim: int
    metric: np.ndarray
    basis_change: np.ndarray
    cond: float
    label: str = ""
    validate_tol: float = field(default=1e-10, repr=False)

    def __post_init__(self):
        eta = np.asarray(self.metric, dtype=complex)
        s = np.asarray(self.basis_change, dtype=complex)
        n = self.dim
        if eta.shape != (n, n) or s.shape != (n, n):
            raise DimensionMismatchError(
                f"metric {eta.shape} / basis_change {s.shape} inconsistent with dim {n}"
            )
        tol = self.validate_tol * max(self.cond, 1.0)
        herm = np.abs(eta - eta.conj().T).max()
        if herm > tol * max(1.0, np.abs(eta).max()):
            raise ValueError(f"metric is not Hermitian (max asymmetry {herm:.3e})")
        evals = np.linalg.eigvalsh((eta + eta.conj().T) / 2.0)
        if evals.min() <= 0:
            raise ValueError(f"metric is not positive-definite (min eigenvalue {evals.min():.3e})")
        resid = np.abs(eta @ (s @ s.conj().T) - np.eye(n)).max()
        if resid > tol:
            raise ValueError(
                f"metric does not invert S S^dagger (residual {resid:.3e}, allowed {tol:.3e})"
            )
        object.__setattr__(self, "metric", eta)
        object.__setattr__(self, "basis_change", s)

    @property
    def is_euclidean(self):
        return np.array_equal(self.metric, np.eye(self.dim))

    def norm(self, psi):
        return float(np.sqrt(inner_product_plus(psi, psi, self).real))


def euclidean_space(dim, label=""):
    """Standard coefficient space: identity metric, identity basis."""
    eye = np.eye(dim, dtype=complex)
    return MetricSpace(dim=dim, metric=eye, basis_change=eye.copy(), cond=1.0, label=label)


def build_metric(S, cond_max=DEFAULT_COND_MAX, label=""):
    """Construct the metric space in which the columns of S are orthonormal.

    The metric is eta = (S S^dagger)^{-1}, evaluated through the SVD of S so
    that Hermiticity and positive-definiteness hold by construction.

    Parameters
    ----------
    S : (n, n) array_like
        Invertible basis-change matrix; column n holds the ambient
        coefficients of the n-th basis vector.
    cond_max : float
        Reject S whose 2-norm condition number exceeds this bound.

    Raises
    ------
    IllConditionedError
        If S is singular or its condition number exceeds ``cond_max``.
    """
    S = np.asarray(S, dtype=complex)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatchError(f"basis-change matrix must be square, got {S.shape}")
    u, sig, _ = np.linalg.svd(S)
    if sig.min() == 0.0:
        raise IllConditionedError("basis-change matrix is singular", np.inf)
    cond = float(sig.max() / sig.min())
    if cond > cond_max:
        raise IllConditionedError("basis-change matrix exceeds the conditioning gate", cond)
    eta = (u * (1.0 / sig**2)) @ u.conj().T
    eta = (eta + eta.conj().T) / 2.0
    return MetricSpace(dim=S.shape[0], metric=eta, basis_change=S.copy(), cond=cond, label=label)


def inner_product_plus(psi, phi, space):
    """Declared-orthonormal inner product <psi, phi>_+ = psi^dagger eta phi.

    Sesquilinear (linear in the second argument), Hermitian, and positive
    definite.  Both states must be expressed in the ambient basis of
    ``space``.
    """
    a = _as_coeffs(psi, space.dim, basis_tag="F" if isinstance(psi, StateVector) else None)
    b = _as_coeffs(phi, space.dim, basis_tag="F" if isinstance(phi, StateVector) else None)
    return complex(a.conj() @ (space.metric @ b))


def gram_matrix(vectors, space):
    """Gram matrix G[m, n] = <v_m, v_n>_+ of a family of ambient vectors."""
    cols = np.column_stack([_as_coeffs(v, space.dim) for v in vectors])
    g = cols.conj().T @ space.metric @ cols
    return (g + g.conj().T) / 2.0 if g.shape[0] == g.shape[1] else g


@dataclass(frozen=True)
class LinearMap:
    """Dense matrix acting between the ambient coefficients of two spaces."""

    matrix: np.ndarray
    domain_space: MetricSpace
    codomain_space: MetricSpace

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.codomain_space.dim, self.domain_space.dim):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} inconsistent with spaces "
                f"({self.codomain_space.dim}, {self.domain_space.dim})"
            )
        object.__setattr__(self, "matrix", m)

    def __call__(self, psi):
        return self.matrix @ _as_coeffs(psi, self.domain_space.dim)


def metric_adjoint(L):
    """Adjoint of L with respect to the metrics of its two spaces.

    For L: H1 -> H2 the adjoint is eta_1^{-1} L^dagger eta_2, the unique map
    with <psi, L phi>_2 = <adjoint(L) psi, phi>_1.
    """
    eta1 = L.domain_space.metric
    eta2 = L.codomain_space.metric
    adj = np.linalg.solve(eta1, L.matrix.conj().T @ eta2)
    return LinearMap(adj, domain_space=L.codomain_space, codomain_space=L.domain_space)


def random_state(dim, rng, normalized=False, space=None):
    """Complex standard-normal coefficient vector (optionally unit norm)."""
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    if normalized:
        if space is not None:
            v = v / np.sqrt(inner_product_plus(v, v, space).real)
        else:
            v = v / np.linalg.norm(v)
    return v


@dataclass(frozen=True)
class HermiticityReport:
    """Outcome of an eta-Hermiticity check."""

    hermitian: bool
    matrix_violation: float
    max_im_expectation: float
    worst_state: np.ndarray
    n_samples: int
    seed: int
    tol: float

    def __bool__(self):
        return self.hermitian


def is_hermitian_wrt(A, space, tol=DEFAULT_TOL, n_samples=120, seed=0):
    """Check whether A is Hermitian with respect to the metric of ``space``.

    The verdict tests eta A = A^dagger eta entrywise, with the violation
    measured relative to ||eta||_2 ||A||_2.  Independently, the report
    samples ``n_samples`` random states plus the analytically worst state
    (the extremal eigenvector of the metric-Hermitian "imaginary part" of A)
    and records the largest |Im <psi, A psi>_+| / <psi, psi>_+, which must be
    small exactly when the verdict is true: an operator is Hermitian iff all
    its expectation values are real.

    Returns a :class:`HermiticityReport`; its truth value is the verdict.
    """
    A = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=complex)
    n = space.dim
    if A.shape != (n, n):
        raise DimensionMismatchError(f"operator shape {A.shape} does not match dim {n}")
    eta = space.metric
    B = eta @ A
    defect = B - B.conj().T  # eta A - A^dagger eta
    scale = np.linalg.norm(eta, 2) * max(np.linalg.norm(A, 2), 1e-300)
    violation = float(np.abs(defect).max() / scale)
    verdict = violation <= tol

    # Worst violator: extremal generalized eigenvector of the Hermitian
    # pencil (eta (A - A*)/2i, eta); its Rayleigh quotient is Im<psi,A psi>/<psi,psi>.
    M = defect / 2j
    M = (M + M.conj().T) / 2.0
    evals, evecs = scipy.linalg.eigh(M, (eta + eta.conj().T) / 2.0)
    worst = evecs[:, np.argmax(np.abs(evals))]

    rng = np.random.default_rng(seed)
    max_im = 0.0
    worst_state = worst
    for psi in [worst] + [random_state(n, rng) for _ in range(n_samples)]:
        quad = psi.conj() @ (eta @ (A @ psi))
        nrm = (psi.conj() @ (eta @ psi)).real
        ratio = abs(quad.imag) / nrm
        if ratio > max_im:
            max_im, worst_state = ratio, psi
    return HermiticityReport(
        hermitian=verdict,
        matrix_violation=violation,
        max_im_expectation=float(max_im),
        worst_state=worst_state,
        n_samples=n_samples,
        seed=seed,
        tol=tol,
    )


@dataclass(frozen=True)
class UnitarityReport:
    """Verdicts for the three equivalent unitarity conditions.

    C1: sampled inner-product preservation, C2: adjoint(L) L = identity as a
    matrix identity, C3: the declared basis maps to an orthonormal family.
    """

    c1: bool
    c2: bool
    c3: bool
    c1_violation: float
    c2_violation: float
    c3_violation: float
    n_pairs: int
    seed: int
    tol: float

    @property
    def unitary(self):
        return self.c1 and self.c2 and self.c3

    @property
    def consistent(self):
        return self.c1 == self.c2 == self.c3

    def __bool__(self):
        return self.unitary


def check_unitary(L, tol=DEFAULT_TOL, n_pairs=100, seed=0):
    """Test the three unitarity conditions for a map between metric spaces.

    The conditions are mathematically equivalent; numerically all three are
    evaluated independently and reported so disagreement would expose a
    broken metric or adjoint.
    """
    if L.domain_space.dim != L.codomain_space.dim:
        raise DimensionMismatchError("unitarity requires equal domain/codomain dimensions")
    n = L.domain_space.dim

    c2_resid = float(np.abs(metric_adjoint(L).matrix @ L.matrix - np.eye(n)).max())

    rng = np.random.default_rng(seed)
    c1_resid = 0.0
    for _ in range(n_pairs):
        psi = random_state(n, rng)
        phi = random_state(n, rng)
        lhs = inner_product_plus(L.matrix @ psi, L.matrix @ phi, L.codomain_space)
        rhs = inner_product_plus(psi, phi, L.domain_space)
        scale = L.domain_space.norm(psi) * L.domain_space.norm(phi)
        c1_resid = max(c1_resid, abs(lhs - rhs) / scale)

    images = L.matrix @ L.domain_space.basis_change
    g = gram_matrix(images.T, L.codomain_space)
    c3_resid = float(np.abs(g - np.eye(n)).max())

    return UnitarityReport(
        c1=c1_resid <= tol,
        c2=c2_resid <= tol,
        c3=c3_resid <= tol,
        c1_violation=c1_resid,
        c2_violation=c2_resid,
        c3_violation=c3_resid,
        n_pairs=n_pairs,
        seed=seed,
        tol=tol,
    )


def matrix_representation(A, space, basis=None):
    """Matrix of A in the declared basis: K[m, n] = <b_m, A b_n>_+.

    Because the declared basis is orthonormal under the metric, this equals
    the change-of-basis similarity transform S^{-1} A S; it is evaluated here
    as S^dagger eta A S, which requires no explicit solve.
    """
    A = A.matrix if isinstance(A, LinearMap) else np.asarray(A, dtype=complex)
    S = space.basis_change if basis is None else np.asarray(basis, dtype=complex)
    if A.shape != (space.dim, space.dim) or S.shape != (space.dim, space.dim):
        raise DimensionMismatchError("operator/basis shape inconsistent with the space")
    return S.conj().T @ space.metric @ A @ S
