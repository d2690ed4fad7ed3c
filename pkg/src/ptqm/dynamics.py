"""Schrodinger evolution and expectation values in both descriptions.

Units have hbar = 1.  Evolution in the eigenbasis is diagonal,
c_n(t) = exp(-i E_n (t - t0)) c_n(t0), and is unitary with respect to the
declared inner product exactly when the spectrum is real.  Expectation
values are evaluated twice: through the PT-symmetric pipeline (metric inner
products on ambient coefficients, with the propagator exponentiated from
the full ambient Hamiltonian action) and through the conventional pipeline
(diagonal h, Euclidean inner products).  The two must agree to numerical
tolerance; that agreement is the package's central verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, PTQMError
from .hilbert import random_state
from .equivalence import ObservableMatrix, map_observable, random_observable
from .spectrum import Spectrum

__all__ = [
    "EvolutionState",
    "evolve",
    "expectation_pt",
    "expectation_conventional",
    "verify_equivalence",
    "EquivalenceReport",
    "default_time_grid",
]


def _energies_of(spectrum_or_energies, reality_tol=None):
    if isinstance(spectrum_or_energies, Spectrum):
        return spectrum_or_energies.require_real(reality_tol)
    e = np.asarray(spectrum_or_energies)
    if np.iscomplexobj(e):
        if np.abs(e.imag).max() > 1e-12 * (1.0 + np.abs(e.real).max()):
            raise PTQMError("complex energies: evolution would not be unitary")
        e = e.real
    return e.astype(float)


@dataclass(frozen=True)
class EvolutionState:
    """Eigenbasis coefficients of a state at a fixed time."""

    coeffs: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1:
            raise DimensionMismatchError("coefficients must be a 1-D sequence")
        if not (np.all(np.isfinite(c.real)) and np.all(np.isfinite(c.imag))):
            raise ValueError("coefficients contain NaN/Inf")
        if np.linalg.norm(c) == 0.0:
            raise ValueError("state must be nonzero")
        object.__setattr__(self, "coeffs", c)

    @property
    def dim(self):
        return self.coeffs.shape[0]

    def norm_sq(self):
        """Sum of |c_n|^2; this is <psi, psi>_+ in the declared basis."""
        return float(np.vdot(self.coeffs, self.coeffs).real)


def evolve(state, spectrum, t):
    """Propagate the state to time t: c_n -> exp(-i E_n (t - t0)) c_n.

    Mode magnitudes and the declared norm are preserved exactly up to
    roundoff.  Raises for complex spectra: the evolution would not be
    unitary.
    """
    energies = _energies_of(spectrum)
    if state.dim > len(energies):
        raise DimensionMismatchError(
            f"state has {state.dim} components but only {len(energies)} levels are available"
        )
    phases = np.exp(-1j * energies[: state.dim] * (t - state.time))
    return EvolutionState(coeffs=phases * state.coeffs, time=float(t))


def _real_expectation(value, scale, tol=1e-10):
    if abs(value.imag) > tol * (1.0 + abs(value.real)) * max(scale, 1.0):
        raise PTQMError(
            f"expectation value has imaginary part {value.imag:.3e}; "
            "the observable cannot be Hermitian"
        )
    return float(value.real)


def expectation_pt(observable, state, spectrum, t):
    """Expectation value at time t in the PT picture (eigenbasis arithmetic).

    Evaluates <psi(t), O psi(t)>_+ / <psi(t0), psi(t0)>_+ with the declared
    inner product, which in eigenbasis coefficients is plain coefficient
    arithmetic.  The imaginary part must vanish to tolerance (Hermitian
    observables have real expectation values) and is discarded.
    """
    o = observable.entries if isinstance(observable, ObservableMatrix) else np.asarray(observable)
    c_t = evolve(state, spectrum, t).coeffs
    num = np.vdot(c_t, o[: state.dim, : state.dim] @ c_t)
    den = state.norm_sq()
    return _real_expectation(num / den, scale=np.abs(o).max())


def expectation_conventional(observable, bundle, psi0, t, t0=0.0):
    """Expectation value at time t in the conventional picture.

    ``psi0`` holds the components of Psi(t0) = calU psi(t0) in the reference
    basis of the ambient model; the propagator is the diagonal
    exp(-i h (t - t0)).
    """
    o = observable.entries if isinstance(observable, ObservableMatrix) else np.asarray(observable)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.ndim != 1 or psi0.shape[0] != bundle.dim:
        raise DimensionMismatchError("psi0 inconsistent with the bundle dimension")
    phases = np.exp(-1j * bundle.energies * (t - t0))
    psi_t = phases * psi0
    num = np.vdot(psi_t, o @ psi_t)
    den = np.vdot(psi0, psi0).real
    return _real_expectation(num / den, scale=np.abs(o).max())


def default_time_grid(t_max=10.0, n_times=7):
    """Geometric time grid in (0, t_max], successive ratio 2 by default."""
    return np.geomspace(t_max / 2 ** (n_times - 1), t_max, n_times)


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-triple comparison of the two expectation-value pipelines.

    ``max_norm_drift`` measures conservation of the declared norm under the
    unitary evolution (diagonal propagator, gated at ``norm_tol``);
    ``max_pt_norm_drift`` measures the same along the ambient
    matrix-exponential route, whose numerical error is budgeted with the
    value deviations at ``tol``.
    """

    rows: tuple  # (obs_index, state_index, t, value_pt, value_conv, abs_im)
    tol: float
    norm_tol: float
    max_norm_drift: float
    max_pt_norm_drift: float
    cond: float
    seed: int
    n_observables: int
    n_states: int
    times: np.ndarray

    @property
    def max_deviation(self):
        return max((abs(r[3] - r[4]) for r in self.rows), default=0.0)

    @property
    def max_imag(self):
        return max((r[5] for r in self.rows), default=0.0)

    @property
    def passed(self):
        return (
            self.max_deviation <= self.tol
            and self.max_imag <= self.tol
            and self.max_norm_drift <= self.norm_tol
            and self.max_pt_norm_drift <= self.tol
        )


def verify_equivalence(
    bundle,
    observables=None,
    states=None,
    times=None,
    *,
    tol=None,
    norm_tol=1e-12,
    seed=0,
    n_observables=5,
    n_states=5,
    n_times=7,
    t_max=10.0,
):
    """Compare the two expectation-value formulas over a grid of triples.

    For every (observable, state, time) the PT-picture value is computed
    through the full metric pipeline -- ambient coefficients, propagator
    exponentiated from the ambient Hamiltonian action, metric inner
    products -- and the conventional value through the diagonal-h pipeline.
    On the coefficient pathway the ambient model coincides with the
    eigenbasis and the comparison degenerates to its arithmetic core.

    The report records every pair of values, the worst absolute deviation,
    the worst imaginary part, and the worst drift of the conserved declared
    norm across the time grid.  Default tolerance: 1e-8 scaled by cond(S).
    """
    rng = np.random.default_rng(seed)
    n = bundle.dim
    if observables is None:
        observables = [random_observable(n, rng) for _ in range(n_observables)]
    if states is None:
        states = [EvolutionState(random_state(n, rng)) for _ in range(n_states)]
    times = default_time_grid(t_max, n_times) if times is None else np.asarray(times, float)
    if tol is None:
        tol = 1e-8 * max(bundle.cond, 1.0)

    S = bundle.space_H.basis_change
    eta = bundle.space_H.metric
    u_mat = bundle.calU_map.matrix

    rows = []
    max_pt_drift = 0.0
    max_drift = 0.0
    for i_o, obs in enumerate(observables):
        o_conv = map_observable(obs, bundle, "to_conventional")
        o_amb = S @ np.linalg.solve(S.T, obs.entries.T).T  # ambient action S O S^{-1}
        for i_s, st in enumerate(states):
            psi0_amb = S @ st.coeffs
            den = (psi0_amb.conj() @ eta @ psi0_amb).real
            psi0_conv = u_mat @ psi0_amb
            for t in times:
                prop = scipy.linalg.expm(-1j * (t - st.time) * bundle.ambient_hamiltonian)
                psi_t = prop @ psi0_amb
                val = psi_t.conj() @ eta @ (o_amb @ psi_t) / den
                max_pt_drift = max(
                    max_pt_drift, abs((psi_t.conj() @ eta @ psi_t).real / den - 1.0)
                )
                c_t = evolve(st, bundle.energies, t).coeffs
                max_drift = max(
                    max_drift, abs(np.vdot(c_t, c_t).real / st.norm_sq() - 1.0)
                )
                v_conv = expectation_conventional(o_conv, bundle, psi0_conv, t, t0=st.time)
                rows.append((i_o, i_s, float(t), float(val.real), v_conv, abs(val.imag)))

    return EquivalenceReport(
        rows=tuple(rows),
        tol=float(tol),
        norm_tol=float(norm_tol),
        max_norm_drift=float(max_drift),
        max_pt_norm_drift=float(max_pt_drift),
        cond=float(bundle.cond),
        seed=seed,
        n_observables=len(observables),
        n_states=len(states),
        times=times,
    )
