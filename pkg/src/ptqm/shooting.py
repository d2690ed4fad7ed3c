"""Contour-shooting backend for the complex Sturm-Liouville problem.

For each trial energy the recessive (decaying) solution is integrated from
each ray endpoint toward the junction, seeded with leading-order WKB values,
and the two solutions are compared through a scale-free Wronskian mismatch

    D(E) = (phi_L phi_R' - phi_L' phi_R) / (product of solution scales),

whose zeros are the eigenvalues.  Integration uses an adaptive Dormand-
Prince 5(4) stepper compiled with numba: the inner loop runs millions of
steps per discriminant evaluation at large cutoff radii, which rules out a
generic Python ODE driver.  The integrated pair is renormalized whenever it
grows past 1e100 (recessive solutions grow inward like exp(+integral k));
the scale factors cancel in the normalized discriminant.

Root finding is a bracketing scan of a fixed-phase projection of D followed
by complex secant refinement.  On a PT-symmetric contour D is real for real
E up to numerical contamination, so the projection is a faithful sign
function; for mildly asymmetric contours the projection still changes sign
at each simple zero crossing.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from numba import njit, prange

from .errors import IntegrationError, PTQMError, RootSearchError
from .potentials import Contour, wkb_energy_estimates
from .spectrum import SampledEigenfunction, Spectrum, check_nondegenerate

__all__ = ["shoot", "find_eigenvalues", "eigenvalue_fixed_step", "warmup"]

# Dormand-Prince 5(4) tableau (FSAL)
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

_RENORM_AT = 1e100

# status codes from the kernels
_OK = 0
_STEP_BUDGET = 1
_NONFINITE = 2


@njit(cache=True, fastmath=True)
def _vpot(x, eps, ieps, mu, lam_phase, lam):
    """Potential term V(x) = mu x^2 + lam x^2 (ix)^eps, principal branch.

    For integer eps the phase i^eps is folded into lam_phase and the power
    is evaluated by multiplication (entire, branch-free).  Otherwise the
    principal logarithm of ix puts the cut on the positive imaginary axis,
    which the contour never crosses.
    """
    v = mu * x * x
    if lam != 0.0:
        if ieps >= 0:
            w = x * x
            for _ in range(ieps):
                w *= x
            v += lam_phase * w
        else:
            if x != 0.0:
                v += lam * x * x * cmath.exp(eps * cmath.log(1j * x))
    return v


@njit(cache=True, fastmath=True)
def _rhs(s, y0, y1, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam):
    x = xj + s * ei
    q = _vpot(x, eps, ieps, mu, lam_phase, lam) - E
    return y1, e2i * q * y0


@njit(cache=True, fastmath=True)
def _ray_final(E, theta, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive):
    """Integrate the recessive solution from s = R to s = 0.

    Returns (phi, dphi/ds, logscale, accepted_steps, status).  The returned
    pair is rescaled by exp(logscale).
    """
    ei = cmath.exp(1j * theta)
    e2i = ei * ei
    lam_phase = lam * (1j) ** ieps if ieps >= 0 else 0.0j

    q_end = _vpot(xj + R * ei, eps, ieps, mu, lam_phase, lam) - E
    k = cmath.sqrt(e2i * q_end)
    if k.real < 0.0:
        k = -k
    y0 = 1.0 + 0.0j
    y1 = -k

    s = R
    if adaptive:
        h0 = 0.5 / max(abs(k), 1e-3)
        if h_cap > 0.0 and h0 > h_cap:
            h0 = h_cap
    else:
        h0 = h_cap
    h = -h0
    logscale = 0.0
    naccept = 0

    f0, f1 = _rhs(s, y0, y1, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)
    for _ in range(max_steps):
        if s <= 0.0:
            return y0, y1, logscale, naccept, _OK
        if s + h < 0.0:
            h = -s
        k01, k11 = f0, f1
        k02, k12 = _rhs(
            s + h * _A21, y0 + h * _A21 * k01, y1 + h * _A21 * k11,
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k03, k13 = _rhs(
            s + h * 0.3,
            y0 + h * (_A31 * k01 + _A32 * k02),
            y1 + h * (_A31 * k11 + _A32 * k12),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k04, k14 = _rhs(
            s + h * 0.8,
            y0 + h * (_A41 * k01 + _A42 * k02 + _A43 * k03),
            y1 + h * (_A41 * k11 + _A42 * k12 + _A43 * k13),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k05, k15 = _rhs(
            s + h * (8.0 / 9.0),
            y0 + h * (_A51 * k01 + _A52 * k02 + _A53 * k03 + _A54 * k04),
            y1 + h * (_A51 * k11 + _A52 * k12 + _A53 * k13 + _A54 * k14),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k06, k16 = _rhs(
            s + h,
            y0 + h * (_A61 * k01 + _A62 * k02 + _A63 * k03 + _A64 * k04 + _A65 * k05),
            y1 + h * (_A61 * k11 + _A62 * k12 + _A63 * k13 + _A64 * k14 + _A65 * k15),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        y0n = y0 + h * (_B1 * k01 + _B3 * k03 + _B4 * k04 + _B5 * k05 + _B6 * k06)
        y1n = y1 + h * (_B1 * k11 + _B3 * k13 + _B4 * k14 + _B5 * k15 + _B6 * k16)
        k07, k17 = _rhs(s + h, y0n, y1n, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)

        if adaptive:
            err0 = h * (_E1 * k01 + _E3 * k03 + _E4 * k04 + _E5 * k05 + _E6 * k06 + _E7 * k07)
            err1 = h * (_E1 * k11 + _E3 * k13 + _E4 * k14 + _E5 * k15 + _E6 * k16 + _E7 * k17)
            sc0 = atol + rtol * max(abs(y0), abs(y0n))
            sc1 = atol + rtol * max(abs(y1), abs(y1n))
            errnorm = max(abs(err0) / sc0, abs(err1) / sc1)
        else:
            errnorm = 0.0

        if errnorm <= 1.0:
            s += h
            y0, y1, f0, f1 = y0n, y1n, k07, k17
            m = max(abs(y0), abs(y1))
            if m > _RENORM_AT:
                y0 /= m
                y1 /= m
                f0 /= m
                f1 /= m
                logscale += math.log(m)
            naccept += 1
        if adaptive:
            if errnorm > 0.0:
                fac = 0.9 * errnorm**-0.2
                if fac < 0.2:
                    fac = 0.2
                elif fac > 5.0:
                    fac = 5.0
            else:
                fac = 5.0
            h *= fac
            if h_cap > 0.0 and -h > h_cap:
                h = -h_cap
            if errnorm > 1.0:  # recompute stages from the rejected point
                f0, f1 = _rhs(s, y0, y1, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)
    return y0, y1, logscale, naccept, _STEP_BUDGET


@njit(cache=True)
def _ray_final_checked(E, theta, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive):
    y0, y1, logscale, naccept, status = _ray_final(
        E, theta, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
    )
    if status == _OK and not (
        math.isfinite(y0.real) and math.isfinite(y0.imag)
        and math.isfinite(y1.real) and math.isfinite(y1.imag)
        and math.isfinite(logscale)
    ):
        status = _NONFINITE
    return y0, y1, logscale, naccept, status


@njit(cache=True, fastmath=True)
def _ray_record(
    E, theta, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive,
    s_out, y0_out, y1_out, log_out,
):
    """Like _ray_final but records every accepted state; returns (count, status)."""
    ei = cmath.exp(1j * theta)
    e2i = ei * ei
    lam_phase = lam * (1j) ** ieps if ieps >= 0 else 0.0j
    cap = s_out.shape[0]

    q_end = _vpot(xj + R * ei, eps, ieps, mu, lam_phase, lam) - E
    k = cmath.sqrt(e2i * q_end)
    if k.real < 0.0:
        k = -k
    y0 = 1.0 + 0.0j
    y1 = -k
    s = R
    if adaptive:
        h0 = 0.5 / max(abs(k), 1e-3)
        if h_cap > 0.0 and h0 > h_cap:
            h0 = h_cap
    else:
        h0 = h_cap
    h = -h0
    logscale = 0.0
    n = 0
    s_out[n] = s
    y0_out[n] = y0
    y1_out[n] = y1
    log_out[n] = logscale
    n += 1

    f0, f1 = _rhs(s, y0, y1, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)
    for _ in range(max_steps):
        if s <= 0.0:
            return n, _OK
        if n >= cap:
            return n, _STEP_BUDGET
        if s + h < 0.0:
            h = -s
        k01, k11 = f0, f1
        k02, k12 = _rhs(
            s + h * _A21, y0 + h * _A21 * k01, y1 + h * _A21 * k11,
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k03, k13 = _rhs(
            s + h * 0.3,
            y0 + h * (_A31 * k01 + _A32 * k02),
            y1 + h * (_A31 * k11 + _A32 * k12),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k04, k14 = _rhs(
            s + h * 0.8,
            y0 + h * (_A41 * k01 + _A42 * k02 + _A43 * k03),
            y1 + h * (_A41 * k11 + _A42 * k12 + _A43 * k13),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k05, k15 = _rhs(
            s + h * (8.0 / 9.0),
            y0 + h * (_A51 * k01 + _A52 * k02 + _A53 * k03 + _A54 * k04),
            y1 + h * (_A51 * k11 + _A52 * k12 + _A53 * k13 + _A54 * k14),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        k06, k16 = _rhs(
            s + h,
            y0 + h * (_A61 * k01 + _A62 * k02 + _A63 * k03 + _A64 * k04 + _A65 * k05),
            y1 + h * (_A61 * k11 + _A62 * k12 + _A63 * k13 + _A64 * k14 + _A65 * k15),
            E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam,
        )
        y0n = y0 + h * (_B1 * k01 + _B3 * k03 + _B4 * k04 + _B5 * k05 + _B6 * k06)
        y1n = y1 + h * (_B1 * k11 + _B3 * k13 + _B4 * k14 + _B5 * k15 + _B6 * k16)
        k07, k17 = _rhs(s + h, y0n, y1n, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)

        if adaptive:
            err0 = h * (_E1 * k01 + _E3 * k03 + _E4 * k04 + _E5 * k05 + _E6 * k06 + _E7 * k07)
            err1 = h * (_E1 * k11 + _E3 * k13 + _E4 * k14 + _E5 * k15 + _E6 * k16 + _E7 * k17)
            sc0 = atol + rtol * max(abs(y0), abs(y0n))
            sc1 = atol + rtol * max(abs(y1), abs(y1n))
            errnorm = max(abs(err0) / sc0, abs(err1) / sc1)
        else:
            errnorm = 0.0

        if errnorm <= 1.0:
            s += h
            y0, y1, f0, f1 = y0n, y1n, k07, k17
            m = max(abs(y0), abs(y1))
            if m > _RENORM_AT:
                y0 /= m
                y1 /= m
                f0 /= m
                f1 /= m
                logscale += math.log(m)
            s_out[n] = s
            y0_out[n] = y0
            y1_out[n] = y1
            log_out[n] = logscale
            n += 1
        if adaptive:
            if errnorm > 0.0:
                fac = 0.9 * errnorm**-0.2
                if fac < 0.2:
                    fac = 0.2
                elif fac > 5.0:
                    fac = 5.0
            else:
                fac = 5.0
            h *= fac
            if h_cap > 0.0 and -h > h_cap:
                h = -h_cap
            if errnorm > 1.0:
                f0, f1 = _rhs(s, y0, y1, E, ei, e2i, xj, eps, ieps, mu, lam_phase, lam)
    return n, _STEP_BUDGET


@njit(cache=True)
def _discriminant(
    E, th_r, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
):
    """Normalized Wronskian mismatch at the junction; zero iff E is an eigenvalue."""
    fr0, fr1, _, _, st_r = _ray_final_checked(
        E, th_r, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
    )
    fl0, fl1, _, _, st_l = _ray_final_checked(
        E, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
    )
    status = st_r if st_r != _OK else st_l
    if status != _OK:
        return complex(np.nan, np.nan), status
    dr = cmath.exp(-1j * th_r) * fr1  # d/dx at the junction
    dl = cmath.exp(-1j * th_l) * fl1
    w = math.sqrt(1.0 + abs(E))
    den = (abs(fl0) + abs(dl) / w) * (abs(fr0) + abs(dr) / w) * w
    if den == 0.0:
        return complex(np.nan, np.nan), _NONFINITE
    return (fl0 * dr - dl * fr0) / den, _OK


@njit(cache=True, parallel=True)
def _discriminant_batch(
    energies, th_r, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap
):
    n = energies.shape[0]
    out = np.empty(n, dtype=np.complex128)
    status = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        d, st = _discriminant(
            energies[i], th_r, th_l, xj, R, eps, ieps, mu, lam,
            rtol, atol, max_steps, h_cap, True,
        )
        out[i] = d
        status[i] = st
    return out, status


@njit(cache=True, parallel=True)
def _refine_batch(
    e_lo, e_hi, f_lo, f_hi, use_seed_values, th_r, th_l, xj, R, eps, ieps, mu, lam,
    rtol, atol, max_steps, h_cap, adaptive, tol_e, max_iter,
):
    """Complex secant refinement of one root per bracket.

    When ``use_seed_values`` is nonzero, ``f_lo``/``f_hi`` carry discriminant
    values already evaluated at the bracket endpoints (possibly at a coarser
    tolerance -- the secant geometry only needs their ratio) and the two
    startup evaluations are skipped.  Returns (roots, dvals, statuses);
    status 0 = converged, 4 = iteration cap reached (root still usable if
    its residual passes), 3 = integration failure.
    """
    n = e_lo.shape[0]
    roots = np.empty(n, dtype=np.complex128)
    dvals = np.empty(n, dtype=np.complex128)
    status = np.zeros(n, dtype=np.int64)
    for i in prange(n):
        a = complex(e_lo[i], 0.0)
        b = complex(e_hi[i], 0.0)
        if use_seed_values != 0:
            fa = f_lo[i]
            fb = f_hi[i]
        else:
            fa, st_a = _discriminant(
                a, th_r, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
            )
            fb, st_b = _discriminant(
                b, th_r, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
            )
            if st_a != _OK or st_b != _OK:
                roots[i] = complex(np.nan, np.nan)
                dvals[i] = complex(np.nan, np.nan)
                status[i] = 3
                continue
        ok = False
        for _ in range(max_iter):
            if fb == fa:
                break
            c = b - fb * (b - a) / (fb - fa)
            a, fa = b, fb
            b = c
            fb, st = _discriminant(
                b, th_r, th_l, xj, R, eps, ieps, mu, lam, rtol, atol, max_steps, h_cap, adaptive
            )
            if st != _OK:
                status[i] = 3
                break
            if abs(b - a) <= tol_e * (1.0 + abs(b)):
                ok = True
                break
        roots[i] = b
        dvals[i] = fb
        if status[i] == 0 and not ok:
            status[i] = 4
    return roots, dvals, status


def _kernel_args(potential, contour):
    ieps = potential.integer_epsilon
    return dict(
        th_r=float(contour.theta_right),
        th_l=float(contour.theta_left),
        xj=complex(contour.junction),
        R=float(contour.ray_length),
        eps=float(potential.epsilon),
        ieps=-1 if ieps is None else int(ieps),
        mu=float(potential.mu),
        lam=float(potential.lam),
    )


def _raise_for_status(status):
    if status == _STEP_BUDGET:
        raise IntegrationError(
            "integration step budget exhausted; increase max_steps or loosen rtol"
        )
    if status == _NONFINITE:
        raise IntegrationError(
            "integration produced non-finite values despite renormalization; "
            "check the contour (ray length / angles) and tolerances"
        )


def shoot(
    E,
    potential,
    contour,
    *,
    rtol=1e-10,
    atol=1e-12,
    max_steps=5_000_000,
    fixed_step=None,
):
    """Normalized spectral discriminant D(E) for one trial energy.

    |D| is O(1) away from eigenvalues and vanishes (to discretization error)
    at them.  ``fixed_step`` switches the integrator to constant steps of the
    given arclength (used by convergence-order studies); otherwise adaptive
    stepping at local tolerance ``rtol``/``atol`` is used.
    """
    a = _kernel_args(potential, contour)
    adaptive = fixed_step is None
    h_cap = 0.0 if fixed_step is None else float(fixed_step)
    d, status = _discriminant(
        complex(E), a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"], a["ieps"],
        a["mu"], a["lam"], rtol, atol, max_steps, h_cap, adaptive,
    )
    _raise_for_status(status)
    return complex(d)


def _scan_grid(seeds, window_low, window_high):
    gaps = np.diff(seeds) if len(seeds) > 1 else np.array([seeds[0]])
    step = max(gaps.min() / 4.0, 1e-6)
    n = int(math.ceil((window_high - window_low) / step)) + 1
    return np.linspace(window_low, window_high, max(n, 8))


def _sample_eigenfunction(E, potential, contour, rtol, atol, max_steps, points_per_ray):
    """Integrate both rays once more, recording samples, and stitch them."""
    a = _kernel_args(potential, contour)
    h_cap = a["R"] / points_per_ray
    sides = {}
    for side, th in (("right", a["th_r"]), ("left", a["th_l"])):
        _, _, _, naccept, status = _ray_final_checked(
            complex(E), th, a["xj"], a["R"], a["eps"], a["ieps"], a["mu"], a["lam"],
            rtol, atol, max_steps, h_cap, True,
        )
        _raise_for_status(status)
        cap = naccept + 16
        s_arr = np.empty(cap)
        y0_arr = np.empty(cap, dtype=complex)
        y1_arr = np.empty(cap, dtype=complex)
        log_arr = np.empty(cap)
        n, status = _ray_record(
            complex(E), th, a["xj"], a["R"], a["eps"], a["ieps"], a["mu"], a["lam"],
            rtol, atol, max_steps, h_cap, True, s_arr, y0_arr, y1_arr, log_arr,
        )
        _raise_for_status(status)
        # undo the running renormalization relative to the junction scale;
        # far-tail underflow to zero is the genuine behaviour of the solution
        rel = np.exp(log_arr[:n] - log_arr[n - 1])
        sides[side] = (s_arr[:n][::-1], (y0_arr[:n] * rel)[::-1], (y1_arr[:n] * rel)[::-1])

    s_r, phi_r, dphi_r = sides["right"]
    s_l, phi_l, dphi_l = sides["left"]
    for arr in (phi_r, phi_l):
        if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
            raise IntegrationError("eigenfunction sampling produced non-finite values")
    # match the left solution to the right one at the junction; fall back to
    # derivative matching when the junction value is (near) a node
    jr, jl = phi_r[0], phi_l[0]
    if abs(jl) > 1e-8 * np.abs(phi_l).max() and abs(jr) > 1e-8 * np.abs(phi_r).max():
        gamma = jr / jl
    else:
        dr = cmath.exp(-1j * a["th_r"]) * dphi_r[0]
        dl = cmath.exp(-1j * a["th_l"]) * dphi_l[0]
        gamma = dr / dl
    phi_l = phi_l * gamma

    arclength = np.concatenate([-s_l[::-1], s_r[1:]])
    e_r = cmath.exp(1j * a["th_r"])
    e_l = cmath.exp(1j * a["th_l"])
    positions = np.concatenate([a["xj"] + s_l[::-1] * e_l, a["xj"] + s_r[1:] * e_r])
    values = np.concatenate([phi_l[::-1], phi_r[1:]])

    norm = math.sqrt(np.trapezoid(np.abs(values) ** 2, arclength))
    values = values / norm
    # phase convention: junction value real positive, falling back to the
    # junction derivative for odd-like states with a node there
    j = np.searchsorted(arclength, 0.0)
    anchor = values[j]
    if abs(anchor) < 1e-8 * np.abs(values).max():
        anchor = np.gradient(values, arclength)[j]
    values = values * (abs(anchor) / anchor)
    return SampledEigenfunction(arclength=arclength, positions=positions, values=values)


def find_eigenvalues(
    potential,
    contour=None,
    n_levels=4,
    *,
    rtol=1e-9,
    atol=1e-12,
    scan_rtol=1e-6,
    residual_tol=1e-8,
    reality_tol=1e-8,
    degeneracy_resolution=1e-6,
    endpoint_factor=1e3,
    max_steps=5_000_000,
    secant_tol=1e-12,
    sample_eigenfunctions=True,
    points_per_ray=1500,
):
    """Locate the lowest ``n_levels`` eigenvalues on (a neighborhood of) the
    real axis by bracketing and complex secant refinement.

    The search window is seeded by WKB quantization estimates with a +-40%
    margin; the scan runs at ``scan_rtol`` and refinement at ``rtol``.  Each
    retained root must satisfy |D| <= residual_tol and |Im E| <=
    reality_tol (1 + |Re E|); refined roots that converge to genuinely
    complex values are discarded, and failure to retain ``n_levels`` roots
    raises :class:`RootSearchError` carrying the scanned |D| profile.

    Returns a :class:`Spectrum` with per-level residuals, error estimates
    (difference against a coarse-tolerance re-refinement), and optionally
    eigenfunction samples along the contour.
    """
    if n_levels < 1:
        raise PTQMError("n_levels must be at least 1")
    seeds = wkb_energy_estimates(potential, n_levels)
    # contour sized for the sought eigenvalues; the scan window extends
    # further up only to give the top bracket margin
    e_contour = 1.05 * seeds[-1]
    e_top = 1.4 * seeds[-1]
    if contour is None:
        contour = Contour.default(potential, e_max=e_contour, endpoint_factor=endpoint_factor)
    contour.validate(potential, e_max=e_contour, endpoint_factor=endpoint_factor)
    a = _kernel_args(potential, contour)

    window = (0.55 * seeds[0], e_top)
    roots: list[complex] = []
    dvals: list[complex] = []
    errs: list[float] = []
    energies = rho = None
    no_seeds = np.zeros(0, dtype=complex)
    for attempt in range(2):
        energies = _scan_grid(seeds, *window)
        dscan, stat = _discriminant_batch(
            energies, a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"], a["ieps"],
            a["mu"], a["lam"], scan_rtol, atol, max_steps, 0.0,
        )
        if stat.max() != _OK:
            _raise_for_status(int(stat.max()))
        alpha = np.angle(dscan[np.argmax(np.abs(dscan))])
        rho = (dscan * np.exp(-1j * alpha)).real
        idx = np.nonzero(np.sign(rho[:-1]) * np.sign(rho[1:]) < 0)[0]
        if len(idx):
            # stage 1: secant from the scan brackets at a coarse tolerance,
            # reusing the scanned discriminant values as starting pair
            rtol_coarse = max(rtol, 1e-7)
            rr, dd, st = _refine_batch(
                energies[idx], energies[idx + 1], dscan[idx], dscan[idx + 1], 1,
                a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"], a["ieps"],
                a["mu"], a["lam"], rtol_coarse, atol, max_steps, 0.0, True, secant_tol, 40,
            )
            rough = rr.copy()
            if rtol < rtol_coarse:
                # stage 2: short polish at the target tolerance; the shift
                # between the stages is an honest per-level error estimate
                good = (st == 0) & np.isfinite(rr)
                if np.any(good):
                    width = 1e-6 * (1.0 + np.abs(rr[good].real))
                    rr2, dd2, st2 = _refine_batch(
                        rr[good].real - width, rr[good].real + width,
                        no_seeds, no_seeds, 0,
                        a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"], a["ieps"],
                        a["mu"], a["lam"], rtol, atol, max_steps, 0.0, True, secant_tol, 3,
                    )
                    rr[good], dd[good] = rr2, dd2
                    sg = st[good]
                    sg[st2 == 3] = 3
                    st[good] = sg
            for r, r0_, d, s in zip(rr, rough, dd, st):
                if s not in (0, 4) or not np.isfinite(r):
                    continue
                if abs(d) > residual_tol:
                    continue
                if abs(r.imag) > reality_tol * (1.0 + abs(r.real)):
                    continue
                if any(abs(r - prev) < 1e-7 * (1.0 + abs(prev)) for prev in roots):
                    continue
                roots.append(complex(r))
                dvals.append(complex(d))
                errs.append(float(abs(r - r0_)))
        if len(roots) >= n_levels:
            break
        window = (0.5 * window[0], 1.8 * window[1])  # one widened retry

    if len(roots) < n_levels:
        raise RootSearchError(
            f"located {len(roots)} of {n_levels} requested eigenvalues in "
            f"window [{window[0]:.6g}, {window[1]:.6g}]; if the contour leaves "
            "the decay wedges the spectrum is complex and no real roots exist",
            window=window,
            energies=energies,
            dvals=rho,
        )

    order = np.argsort([r.real for r in roots])
    eigs = np.array([roots[i] for i in order])[:n_levels]
    resid = np.array([abs(dvals[i]) for i in order])[:n_levels]
    err = np.array([errs[i] for i in order])[:n_levels]
    check_nondegenerate(eigs, degeneracy_resolution)

    samples = None
    if sample_eigenfunctions:
        samples = tuple(
            _sample_eigenfunction(e, potential, contour, rtol, atol, max_steps, points_per_ray)
            for e in eigs
        )

    return Spectrum(
        eigenvalues=eigs,
        potential=potential,
        backend="shooting",
        residuals=resid,
        error_estimates=err,
        converged=np.ones(len(eigs), dtype=bool),
        samples=samples,
        contour=contour,
        reality_tol=reality_tol,
    )


def eigenvalue_fixed_step(potential, contour, bracket, step, *, max_steps=20_000_000):
    """Refine one eigenvalue with constant integrator steps of size ``step``.

    Used by grid-convergence studies: the located root inherits the global
    error of the fixed-step integration, so halving ``step`` exposes the
    integrator's convergence order.
    """
    a = _kernel_args(potential, contour)
    lo = np.array([float(bracket[0])])
    hi = np.array([float(bracket[1])])
    none = np.zeros(0, dtype=complex)
    r, d, st = _refine_batch(
        lo, hi, none, none, 0, a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"], a["ieps"],
        a["mu"], a["lam"], 1.0, 1.0, max_steps, float(step), False, 1e-14, 60,
    )
    if st[0] == 3:
        _raise_for_status(_STEP_BUDGET)
    return complex(r[0])


def warmup():
    """Trigger JIT compilation of the kernels on a tiny problem."""
    from .potentials import PotentialSpec

    pot = PotentialSpec(epsilon=0.0)
    contour = Contour(theta_right=0.0, theta_left=-math.pi, ray_length=6.0)
    a = _kernel_args(pot, contour)
    _discriminant_batch(
        np.array([0.9, 1.1]), a["th_r"], a["th_l"], a["xj"], a["R"], a["eps"],
        a["ieps"], a["mu"], a["lam"], 1e-6, 1e-9, 100_000, 0.0,
    )
    none = np.zeros(0, dtype=complex)
    _refine_batch(
        np.array([0.9]), np.array([1.1]), none, none, 0, a["th_r"], a["th_l"], a["xj"],
        a["R"], a["eps"], a["ieps"], a["mu"], a["lam"], 1e-6, 1e-9, 100_000, 0.0, True,
        1e-10, 8,
    )
    shoot(1.0, pot, contour, rtol=1e-6, fixed_step=0.05)
    _sample_eigenfunction(1.0, pot, contour, 1e-6, 1e-9, 100_000, 50)
