"""Command-line front end: batch computations with persisted artifacts.

Commands
--------
spectrum   compute eigenvalues (shooting, oscillator-basis, or both)
metric     build the declared-orthonormal metric space at a fixed truncation
bundle     construct and check the equivalence bundle
verify     run the full pipeline and the expectation-value equivalence grid
converge   truncation / integrator-step convergence studies

Every command accepts ``--config`` (JSON file), ``--out`` (output
directory; default from PTQM_OUTDIR or ./ptqm-out), ``--seed`` and
``--strict``.  Precedence: command line > config file > defaults.  Exit
codes: 0 all checks passed, 2 configuration error, 3 solver failure,
4 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import serialize
from .dynamics import verify_equivalence
from .equivalence import build_bundle, verify_bundle
from .errors import (
    ComplexSpectrumError,
    DegenerateSpectrumError,
    IllConditionedError,
    IntegrationError,
    PTQMError,
    RootSearchError,
)
from .hilbert import build_metric
from .oscillator import diagonalize_oscillator_basis, eigenbasis_matrix
from .potentials import Contour, PotentialSpec
from .serialize import fmt12
from .shooting import find_eigenvalues

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INVARIANT = 4

_SOLVER_ERRORS = (
    IntegrationError,
    RootSearchError,
    IllConditionedError,
    ComplexSpectrumError,
    DegenerateSpectrumError,
)


@dataclass
class RunConfig:
    """Resolved configuration for one command invocation."""

    epsilon: float = 1.0
    mu: float = 0.0
    lam: float = 1.0
    levels: int = 4
    n_basis: int = 128
    n_trunc: int = 0  # 0: use every retained level (bundle) / n_basis (metric)
    backend: str = "both"
    theta_right: float | None = None
    theta_left: float | None = None
    ray_length: float | None = None
    junction_im: float = 0.0
    rtol: float = 1e-9
    scan_rtol: float = 1e-6
    residual_tol: float = 1e-8
    reality_tol: float = 1e-8
    conv_tol: float = 1e-6
    endpoint_factor: float = 1e3
    cond_max: float = 1e8
    tol_scale: float = 1e-8
    norm_tol: float = 1e-12
    n_observables: int = 5
    n_states: int = 5
    n_times: int = 7
    t_max: float = 10.0
    sweep: str = "both"
    n_doublings: int = 4
    seed: int = 0
    out: str = ""
    strict: bool = False

    def potential(self):
        return PotentialSpec(epsilon=self.epsilon, mu=self.mu, lam=self.lam)

    def contour(self, potential, e_max):
        default = Contour.default(
            potential,
            e_max=e_max,
            endpoint_factor=self.endpoint_factor,
            junction=1j * self.junction_im,
        )
        return Contour(
            theta_right=default.theta_right if self.theta_right is None else self.theta_right,
            theta_left=default.theta_left if self.theta_left is None else self.theta_left,
            ray_length=default.ray_length if self.ray_length is None else self.ray_length,
            junction=default.junction,
        )


def _resolve_config(args):
    """Merge defaults < config file < command line into a RunConfig."""
    values = {}
    if args.config:
        with open(args.config, encoding="utf-8") as f:
            loaded = json.load(f)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for f in fields(RunConfig):
        cli_val = getattr(args, f.name, None)
        if cli_val is not None:
            values[f.name] = cli_val
    cfg = RunConfig(**values)
    if not cfg.out:
        cfg.out = os.environ.get("PTQM_OUTDIR", "ptqm-out")
    for name in ("rtol", "scan_rtol", "residual_tol", "reality_tol", "conv_tol",
                 "endpoint_factor", "cond_max", "tol_scale", "norm_tol"):
        if getattr(cfg, name) <= 0:
            raise ValueError(f"{name} must be positive")
    if cfg.levels < 1:
        raise ValueError("levels must be at least 1")
    if cfg.n_trunc < 0:
        raise ValueError("n_trunc must be nonnegative")
    if cfg.n_trunc and cfg.n_trunc > cfg.n_basis:
        raise ValueError("n_trunc cannot exceed n_basis")
    if cfg.backend not in ("shooting", "oscillator", "both"):
        raise ValueError(f"unknown backend {cfg.backend!r}")
    if cfg.sweep not in ("basis", "grid", "both"):
        raise ValueError(f"unknown sweep {cfg.sweep!r}")
    return cfg


def _outdir(cfg):
    path = Path(cfg.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_text(path, lines):
    with open(path, "w", encoding="utf-8") as f:
        f.write("\n".join(lines))
        f.write("\n")


def _spectrum_lines(spectrum, agreement=None):
    header = f"{'n':>3}  {'E_n':>18}  {'residual':>12}  {'|Im E_n|':>12}"
    if agreement is not None:
        header += f"  {'agreement':>12}"
    lines = [f"backend: {spectrum.backend}", header]
    for n, e in enumerate(spectrum.eigenvalues):
        row = (
            f"{n:>3}  {fmt12(e.real):>18}  {fmt12(spectrum.residuals[n]):>12}  "
            f"{fmt12(abs(e.imag)):>12}"
        )
        if agreement is not None:
            row += f"  {fmt12(agreement[n]):>12}"
        lines.append(row)
    return lines


def cmd_spectrum(cfg):
    pot = cfg.potential()
    out = _outdir(cfg)
    lines = []
    spectra = {}
    if cfg.backend in ("shooting", "both"):
        contour = None
        if any(v is not None for v in (cfg.theta_right, cfg.theta_left, cfg.ray_length)) or (
            cfg.junction_im != 0.0
        ):
            from .potentials import wkb_energy_estimates

            e_max = 1.4 * wkb_energy_estimates(pot, cfg.levels)[-1]
            contour = cfg.contour(pot, e_max=e_max)
        spectra["shooting"] = find_eigenvalues(
            pot,
            contour=contour,
            n_levels=cfg.levels,
            rtol=cfg.rtol,
            scan_rtol=cfg.scan_rtol,
            residual_tol=cfg.residual_tol,
            reality_tol=cfg.reality_tol,
            endpoint_factor=cfg.endpoint_factor,
        )
    if cfg.backend in ("oscillator", "both"):
        spec = diagonalize_oscillator_basis(
            pot, cfg.n_basis, conv_tol=cfg.conv_tol, reality_tol=cfg.reality_tol
        )
        if spec.n_levels < cfg.levels:
            raise PTQMError(
                f"oscillator backend converged only {spec.n_levels} levels "
                f"at n_basis = {cfg.n_basis}; increase n_basis"
            )
        spectra["oscillator"] = spec

    agreement = None
    if len(spectra) == 2:
        n = min(cfg.levels, spectra["shooting"].n_levels, spectra["oscillator"].n_levels)
        agreement = np.abs(
            spectra["shooting"].eigenvalues[:n] - spectra["oscillator"].eigenvalues[:n]
        )

    failed = False
    for name, spec in spectra.items():
        shown = agreement if agreement is not None else None
        sub = spec if name == "shooting" else _truncate_levels(spec, cfg.levels)
        lines += _spectrum_lines(sub, shown)
        lines.append("")
        serialize.save(spec, out / f"spectrum_{name}.json")
        if not sub.is_real or np.any(sub.residuals > max(cfg.residual_tol, 1e-300)):
            failed = True
    if "shooting" in spectra and spectra["shooting"].samples is not None:
        for n in range(spectra["shooting"].n_levels):
            serialize.write_eigenfunction_csv(
                spectra["shooting"], n, out / f"eigenfunction_{n:03d}.csv"
            )
    if agreement is not None:
        worst = float(agreement.max())
        lines.append(f"max cross-backend disagreement: {fmt12(worst)}")
        if worst > 1e-6:
            failed = True
    _write_text(out / "spectrum_summary.txt", lines)
    print("\n".join(lines))
    return EXIT_INVARIANT if failed else EXIT_OK


def _truncate_levels(spectrum, n):
    from dataclasses import replace

    n = min(n, spectrum.n_levels)
    return replace(
        spectrum,
        eigenvalues=spectrum.eigenvalues[:n],
        residuals=spectrum.residuals[:n],
        error_estimates=None if spectrum.error_estimates is None else spectrum.error_estimates[:n],
        converged=None if spectrum.converged is None else spectrum.converged[:n],
        coefficients=None if spectrum.coefficients is None else spectrum.coefficients[:, :n],
        samples=None if spectrum.samples is None else spectrum.samples[:n],
    )


def cmd_metric(cfg):
    pot = cfg.potential()
    out = _outdir(cfg)
    n_trunc = cfg.n_trunc or cfg.n_basis
    spec = diagonalize_oscillator_basis(
        pot, n_trunc, keep="all", conv_tol=cfg.conv_tol, reality_tol=cfg.reality_tol
    )
    s_mat = eigenbasis_matrix(spec, n_trunc)
    space = build_metric(s_mat, cond_max=cfg.cond_max)
    tol = cfg.tol_scale * space.cond

    eig_min = float(np.linalg.eigvalsh((space.metric + space.metric.conj().T) / 2).min())
    gram = s_mat.conj().T @ space.metric @ s_mat
    gram_err = float(np.abs(gram - np.eye(n_trunc)).max())
    nonortho = float(np.abs(s_mat.conj().T @ s_mat - np.eye(n_trunc)).max())
    checks = [
        ("metric-positive-definite", eig_min > 0, eig_min),
        ("eigenbasis-gram-identity", gram_err <= tol, gram_err),
        ("ambient-nonorthogonality", True, nonortho),
    ]
    serialize.save(space, out / "metric_space.json")
    lines = [
        f"dim: {n_trunc}",
        f"cond(S): {fmt12(space.cond)}",
        f"tolerance (tol_scale * cond): {fmt12(tol)}",
    ]
    lines += [
        f"{'PASS' if ok else 'FAIL'}  {name}: {fmt12(val)}" for name, ok, val in checks
    ]
    _write_text(out / "metric_report.txt", lines)
    print("\n".join(lines))
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_INVARIANT


def _pipeline_bundle(cfg, pot):
    """Spectrum plus bundle along the appropriate pathway for this potential."""
    if pot.integer_epsilon is not None and pot.integer_epsilon < 2:
        spec = diagonalize_oscillator_basis(
            pot, cfg.n_basis, conv_tol=cfg.conv_tol, reality_tol=cfg.reality_tol
        )
    else:
        spec = find_eigenvalues(
            pot,
            n_levels=cfg.levels,
            rtol=cfg.rtol,
            scan_rtol=cfg.scan_rtol,
            residual_tol=cfg.residual_tol,
            reality_tol=cfg.reality_tol,
            endpoint_factor=cfg.endpoint_factor,
            sample_eigenfunctions=False,
        )
    n_trunc = min(cfg.n_trunc or spec.n_levels, spec.n_levels)
    bundle = build_bundle(
        spec, n_trunc, cond_max=cfg.cond_max, tol_scale=cfg.tol_scale, seed=cfg.seed
    )
    return spec, bundle


def _bundle_lines(bundle, checks):
    lines = [
        f"pathway: {bundle.pathway}",
        f"dim: {bundle.dim}",
        f"cond(S): {fmt12(bundle.cond)}",
    ]
    lines += [
        f"{'PASS' if c.passed else 'FAIL'}  {c.name}: violation {fmt12(c.violation)} "
        f"(tol {fmt12(c.tol)})"
        for c in checks
    ]
    return lines


def cmd_bundle(cfg):
    pot = cfg.potential()
    out = _outdir(cfg)
    _, bundle = _pipeline_bundle(cfg, pot)
    checks = verify_bundle(bundle, tol=cfg.tol_scale * max(bundle.cond, 1.0), seed=cfg.seed)
    serialize.save(bundle, out / "bundle.json")
    lines = _bundle_lines(bundle, checks)
    _write_text(out / "bundle_report.txt", lines)
    print("\n".join(lines))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INVARIANT


def cmd_verify(cfg):
    pot = cfg.potential()
    out = _outdir(cfg)
    _, bundle = _pipeline_bundle(cfg, pot)
    checks = verify_bundle(bundle, tol=cfg.tol_scale * max(bundle.cond, 1.0), seed=cfg.seed)
    report = verify_equivalence(
        bundle,
        tol=cfg.tol_scale * max(bundle.cond, 1.0),
        norm_tol=cfg.norm_tol,
        seed=cfg.seed,
        n_observables=cfg.n_observables,
        n_states=cfg.n_states,
        n_times=cfg.n_times,
        t_max=cfg.t_max,
    )
    serialize.write_equivalence_csv(report, out / "equivalence.csv")
    lines = _bundle_lines(bundle, checks)
    lines += [
        "",
        f"equivalence grid: {report.n_observables} observables x {report.n_states} states "
        f"x {len(report.times)} times, seed {report.seed}",
        f"{'PASS' if report.max_deviation <= report.tol else 'FAIL'}  "
        f"max |value_pt - value_conv|: {fmt12(report.max_deviation)} (tol {fmt12(report.tol)})",
        f"{'PASS' if report.max_imag <= report.tol else 'FAIL'}  "
        f"max |Im value|: {fmt12(report.max_imag)} (tol {fmt12(report.tol)})",
        f"{'PASS' if report.max_norm_drift <= report.norm_tol else 'FAIL'}  "
        f"max norm drift: {fmt12(report.max_norm_drift)} (tol {fmt12(report.norm_tol)})",
        f"{'PASS' if report.max_pt_norm_drift <= report.tol else 'FAIL'}  "
        f"max ambient-route norm drift: {fmt12(report.max_pt_norm_drift)} "
        f"(tol {fmt12(report.tol)})",
    ]
    payload = {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "verify_report",
        "passed": bool(report.passed and all(c.passed for c in checks)),
        "max_deviation": report.max_deviation,
        "max_imag": report.max_imag,
        "max_norm_drift": report.max_norm_drift,
        "max_pt_norm_drift": report.max_pt_norm_drift,
        "tol": report.tol,
        "cond": report.cond,
        "seed": report.seed,
        "bundle_checks": [
            {"name": c.name, "passed": bool(c.passed), "violation": c.violation, "tol": c.tol}
            for c in checks
        ],
    }
    with open(out / "verify_report.json", "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_text(out / "verify_report.txt", lines)
    print("\n".join(lines))
    return EXIT_OK if payload["passed"] else EXIT_INVARIANT


def cmd_converge(cfg):
    pot = cfg.potential()
    out = _outdir(cfg)
    rows = []
    lines = []
    monotone = True
    order_ok = True

    if cfg.sweep in ("basis", "both") and pot.integer_epsilon is not None and pot.integer_epsilon < 2:
        sizes = [cfg.n_basis // 2**k for k in range(cfg.n_doublings, -1, -1)]
        sizes = [max(s, 8) for s in sizes]
        e0 = {}
        for n in sizes:
            spec = diagonalize_oscillator_basis(
                pot, n, conv_tol=1.0, reality_tol=cfg.reality_tol
            )
            e0[n] = float(spec.eigenvalues[0].real)
        diffs = [abs(e0[a] - e0[b]) for a, b in zip(sizes, sizes[1:])]
        for (n, d) in zip(sizes, diffs + [math.nan]):
            rows.append(("basis", n, e0[n], d))
        tail = [d for d in diffs if d > 1e-14]
        mono = all(a > b for a, b in zip(tail, tail[1:]))
        monotone &= mono
        lines.append(
            f"{'PASS' if mono else 'FAIL'}  basis sweep |E0(N) - E0(2N)| decreasing "
            f"above roundoff: {[fmt12(d) for d in diffs]}"
        )

    if cfg.sweep in ("grid", "both"):
        from .potentials import wkb_energy_estimates
        from .shooting import shoot

        seeds = wkb_energy_estimates(pot, 1)
        contour = cfg.contour(pot, e_max=1.4 * seeds[-1])
        # integrator order from the global error of the discriminant at a
        # fixed off-eigenvalue probe energy (eigenvalue shifts themselves are
        # protected by the PT symmetry of the contour and do not expose the
        # order); reference value from tight adaptive stepping
        e_probe = 1.3 * seeds[0]
        d_ref = shoot(e_probe, pot, contour, rtol=1e-12, atol=1e-14)
        h0 = contour.ray_length / 2000.0
        hs = [h0 / 2**k for k in range(cfg.n_doublings + 1)]
        errs = [
            abs(shoot(e_probe, pot, contour, fixed_step=h) - d_ref) for h in hs
        ]
        for h, e in zip(hs, errs):
            rows.append(("grid", h, e_probe, e))
        slopes = [
            math.log2(a / b) for a, b in zip(errs, errs[1:]) if b > 1e-14 and a > 1e-14
        ]
        order = min(slopes) if slopes else math.nan
        order_ok &= bool(slopes) and order >= 4.0
        lines.append(
            f"{'PASS' if order_ok else 'FAIL'}  grid sweep observed integrator order "
            f">= 4: slopes {[fmt12(s) for s in slopes]}"
        )

    serialize.write_rows_csv(out / "converge.csv", ["sweep", "parameter", "value", "delta"], rows)
    _write_text(out / "converge_report.txt", lines)
    print("\n".join(lines))
    if cfg.strict and not (monotone and order_ok):
        return EXIT_INVARIANT
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ptqm",
        description="Spectra, metrics and the equivalent Hermitian description "
        "of PT-symmetric Hamiltonians p^2 + x^2 (ix)^epsilon.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory (default: $PTQM_OUTDIR or ./ptqm-out)")
    common.add_argument("--seed", type=int, help="RNG seed stamped into reports")
    common.add_argument("--strict", action="store_true", default=None)
    common.add_argument("--epsilon", type=float, help="potential exponent (>= 0)")
    common.add_argument("--mu", type=float)
    common.add_argument("--lam", type=float)

    p = sub.add_parser("spectrum", parents=[common], help="compute eigenvalues")
    p.add_argument("--levels", type=int)
    p.add_argument("--backend", choices=("shooting", "oscillator", "both"))
    p.add_argument("--n-basis", dest="n_basis", type=int)
    p.add_argument("--theta-right", dest="theta_right", type=float)
    p.add_argument("--theta-left", dest="theta_left", type=float)
    p.add_argument("--ray-length", dest="ray_length", type=float)
    p.add_argument("--junction-im", dest="junction_im", type=float)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("metric", parents=[common], help="build the metric space")
    p.add_argument("--n-trunc", dest="n_trunc", type=int)
    p.add_argument("--n-basis", dest="n_basis", type=int)
    p.set_defaults(func=cmd_metric)

    p = sub.add_parser("bundle", parents=[common], help="build the equivalence bundle")
    p.add_argument("--n-basis", dest="n_basis", type=int)
    p.add_argument("--n-trunc", dest="n_trunc", type=int)
    p.add_argument("--levels", type=int)
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("verify", parents=[common], help="full equivalence verification")
    p.add_argument("--n-basis", dest="n_basis", type=int)
    p.add_argument("--n-trunc", dest="n_trunc", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--n-observables", dest="n_observables", type=int)
    p.add_argument("--n-states", dest="n_states", type=int)
    p.add_argument("--n-times", dest="n_times", type=int)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--tol-scale", dest="tol_scale", type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", parents=[common], help="convergence studies")
    p.add_argument("--sweep", choices=("basis", "grid", "both"))
    p.add_argument("--n-basis", dest="n_basis", type=int)
    p.add_argument("--n-doublings", dest="n_doublings", type=int)
    p.set_defaults(func=cmd_converge)
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        pot_probe = cfg.potential()  # guarded input: epsilon >= 0, finite parameters
        del pot_probe
    except PTQMError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(cfg)
    except _SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PTQMError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
