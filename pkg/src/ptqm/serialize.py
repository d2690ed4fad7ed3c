"""Structured-text (JSON) artifact format and CSV exports.

Format rules (schema_version 1): complex numbers are two-element arrays
[re, im]; matrices are row-major nested arrays of complex pairs; every
top-level artifact carries ``schema_version`` and a ``kind`` discriminator.
Floating-point text output (summary tables, CSV) is printed with 12
significant digits so cross-run diffs are meaningful; JSON artifacts keep
full precision so reloading reproduces the object exactly.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .equivalence import EquivalenceBundle, ObservableMatrix, build_calU, build_U
from .hilbert import LinearMap, MetricSpace
from .potentials import Contour, PotentialSpec
from .spectrum import Spectrum

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "fmt12",
    "to_payload",
    "from_payload",
    "dumps",
    "save",
    "load",
    "write_eigenfunction_csv",
    "write_equivalence_csv",
    "write_rows_csv",
]


def fmt12(x):
    """Render a float with 12 significant digits."""
    return f"{float(x):.12g}"


def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _uc(pair):
    return complex(pair[0], pair[1])


def _cmat(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim == 1:
        return [_c(z) for z in m]
    return [[_c(z) for z in row] for row in m]


def _ucmat(rows):
    arr = np.asarray(rows, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def _fvec(v):
    return None if v is None else [float(x) for x in np.asarray(v)]


def to_payload(obj):
    """Serializable dict for any supported artifact type."""
    if isinstance(obj, PotentialSpec):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "potential",
            "epsilon": obj.epsilon,
            "mu": obj.mu,
            "lam": obj.lam,
        }
    if isinstance(obj, Contour):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "contour",
            "theta_right": obj.theta_right,
            "theta_left": obj.theta_left,
            "ray_length": obj.ray_length,
            "junction": _c(obj.junction),
        }
    if isinstance(obj, MetricSpace):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "metric_space",
            "dim": obj.dim,
            "label": obj.label,
            "cond": obj.cond,
            "metric": _cmat(obj.metric),
            "basis_change": _cmat(obj.basis_change),
        }
    if isinstance(obj, LinearMap):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "linear_map",
            "matrix": _cmat(obj.matrix),
            "domain": to_payload(obj.domain_space),
            "codomain": to_payload(obj.codomain_space),
        }
    if isinstance(obj, ObservableMatrix):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "observable",
            "picture": obj.picture,
            "entries": _cmat(obj.entries),
        }
    if isinstance(obj, Spectrum):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "spectrum",
            "backend": obj.backend,
            "eigenvalues": _cmat(obj.eigenvalues),
            "potential": to_payload(obj.potential),
            "contour": None if obj.contour is None else to_payload(obj.contour),
            "residuals": _fvec(obj.residuals),
            "error_estimates": _fvec(obj.error_estimates),
            "converged": None if obj.converged is None else [bool(b) for b in obj.converged],
            "coefficients": None if obj.coefficients is None else _cmat(obj.coefficients),
            "n_basis": obj.n_basis,
            "reality_tol": obj.reality_tol,
        }
    if isinstance(obj, EquivalenceBundle):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "equivalence_bundle",
            "pathway": obj.pathway,
            "spectrum": to_payload(obj.spectrum),
            "space_H": to_payload(obj.space_H),
            "h_diagonal": _fvec(obj.energies),
            "ambient_hamiltonian": _cmat(obj.ambient_hamiltonian),
        }
    raise TypeError(f"cannot serialize objects of type {type(obj).__name__}")


def from_payload(payload):
    """Reconstruct an artifact from its payload dict (validates on build)."""
    kind = payload.get("kind")
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {payload.get('schema_version')!r}")
    if kind == "potential":
        return PotentialSpec(epsilon=payload["epsilon"], mu=payload["mu"], lam=payload["lam"])
    if kind == "contour":
        return Contour(
            theta_right=payload["theta_right"],
            theta_left=payload["theta_left"],
            ray_length=payload["ray_length"],
            junction=_uc(payload["junction"]),
        )
    if kind == "metric_space":
        return MetricSpace(
            dim=payload["dim"],
            metric=_ucmat(payload["metric"]),
            basis_change=_ucmat(payload["basis_change"]),
            cond=payload["cond"],
            label=payload.get("label", ""),
        )
    if kind == "linear_map":
        return LinearMap(
            matrix=_ucmat(payload["matrix"]),
            domain_space=from_payload(payload["domain"]),
            codomain_space=from_payload(payload["codomain"]),
        )
    if kind == "observable":
        return ObservableMatrix(entries=_ucmat(payload["entries"]), picture=payload["picture"])
    if kind == "spectrum":
        return Spectrum(
            eigenvalues=_ucmat(payload["eigenvalues"]),
            potential=from_payload(payload["potential"]),
            backend=payload["backend"],
            residuals=np.asarray(payload["residuals"], float),
            error_estimates=(
                None
                if payload["error_estimates"] is None
                else np.asarray(payload["error_estimates"], float)
            ),
            converged=(
                None if payload["converged"] is None else np.asarray(payload["converged"], bool)
            ),
            coefficients=(
                None if payload["coefficients"] is None else _ucmat(payload["coefficients"])
            ),
            contour=None if payload["contour"] is None else from_payload(payload["contour"]),
            n_basis=payload["n_basis"],
            reality_tol=payload["reality_tol"],
        )
    if kind == "equivalence_bundle":
        spectrum = from_payload(payload["spectrum"])
        space_h = from_payload(payload["space_H"])
        return EquivalenceBundle(
            spectrum=spectrum,
            space_H=space_h,
            U_map=build_U(space_h),
            calU_map=build_calU(space_h),
            h_matrix=np.diag(np.asarray(payload["h_diagonal"], float)),
            ambient_hamiltonian=_ucmat(payload["ambient_hamiltonian"]),
            pathway=payload["pathway"],
        )
    raise ValueError(f"unknown artifact kind {kind!r}")


def dumps(obj):
    return json.dumps(to_payload(obj), indent=2, sort_keys=True)


def save(obj, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(obj))
        f.write("\n")


def load(path):
    with open(path, encoding="utf-8") as f:
        return from_payload(json.load(f))


def write_rows_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([x if isinstance(x, str) else fmt12(x) for x in row])


def write_eigenfunction_csv(spectrum, level, path):
    """Sampled-eigenfunction table: (arclength, Re x, Im x, Re phi, Im phi)."""
    if spectrum.samples is None:
        raise ValueError("spectrum carries no eigenfunction samples")
    ef = spectrum.samples[level]
    rows = zip(
        ef.arclength,
        ef.positions.real,
        ef.positions.imag,
        ef.values.real,
        ef.values.imag,
    )
    write_rows_csv(path, ["arclength", "re_x", "im_x", "re_phi", "im_phi"], rows)


def write_equivalence_csv(report, path):
    """Equivalence-grid table: (t, value_pt, value_conv, abs_delta, abs_im)."""
    rows = (
        (t, v_pt, v_conv, abs(v_pt - v_conv), im)
        for (_, _, t, v_pt, v_conv, im) in report.rows
    )
    write_rows_csv(path, ["t", "value_pt", "value_conv", "abs_delta", "abs_im"], rows)
