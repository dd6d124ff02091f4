"""Command-line entry point: figure data, verification suites, matrix decompositions.

Exit codes: 0 success, 1 I/O failure, 2 usage or parse error, 3 domain
violation (non-Hermitian input, or a failed verification check).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import classical_rv as crv
from . import matrix_spectral as ms
from . import oscillator as osc
from . import verify
from .io import format_number, write_csv
from .numerics import GridSpec

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3

FIGURES = ("fig1", "fig2", "fig3", "fig4")
FIG2_GRID = GridSpec(-4.0, 4.0, 161)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_json(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_IO) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}", EXIT_USAGE) from exc
    if not isinstance(doc, dict):
        raise CliError(f"{path}: expected a JSON object", EXIT_USAGE)
    return doc


def load_config(path: str | None) -> dict:
    cfg = {"hbar": 1.0, "mass": 1.0, "omega": 1.0, "grid": None, "mc_n": 1_000_000}
    if path is None:
        return cfg
    doc = _read_json(path)
    unknown = set(doc) - set(cfg)
    if unknown:
        raise CliError(f"{path}: unknown config keys {sorted(unknown)}", EXIT_USAGE)
    cfg.update(doc)
    try:
        cfg["params"] = osc.OscillatorParams.from_config(cfg)
        if cfg["grid"] is not None:
            cfg["grid"] = GridSpec(float(cfg["grid"]["lo"]), float(cfg["grid"]["hi"]), int(cfg["grid"]["n"]))
        cfg["mc_n"] = int(cfg["mc_n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{path}: invalid config: {exc}", EXIT_USAGE) from exc
    return cfg


def _gaussian_params(args) -> crv.BivariateGaussianParams:
    base = verify.FIG_PARAMS
    try:
        return crv.BivariateGaussianParams(
            sigma1=base.sigma1 if args.sigma1 is None else args.sigma1,
            sigma2=base.sigma2 if args.sigma2 is None else args.sigma2,
            rho=base.rho if args.rho is None else args.rho,
        )
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc


def figure_columns(name: str, p: crv.BivariateGaussianParams, grid: GridSpec | None = None):
    """Header and columns of a figure's CSV."""
    if name == "fig1":
        k = np.arange(-400, 401)
        y = k[k != 0] / 100.0
        return ("y", "f"), [y, crv.product_pdf_gaussian(p, y)]
    if name == "fig2":
        g = grid or FIG2_GRID
        q = osc.quasi_density("f", g)
        X, Y = np.meshgrid(q.x, q.y, indexing="ij")
        return ("x", "y", "f"), [X, Y, q.values]
    if name == "fig3":
        d = osc.u_pdf()
        return ("u", "f"), [d.x, d.values]
    if name == "fig4":
        s = GridSpec(-10.0, 10.0, 2001).points
        phi_u, phi_y = verify.fig4_curves(s, p)
        return ("s", "phi_U", "phi_Y"), [s, phi_u, phi_y]
    raise CliError(f"unknown figure {name!r}; choose from {', '.join(FIGURES)}", EXIT_USAGE)


def cmd_figure(args) -> int:
    cfg = load_config(args.config)
    header, cols = figure_columns(args.name, _gaussian_params(args), cfg["grid"])
    try:
        write_csv(args.out, header, cols)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from exc
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    vc = verify.VerifyConfig(
        seed=args.seed,
        mc_n=cfg["mc_n"],
        grid=cfg["grid"] or osc.DEFAULT_QUASI_GRID,
        params=cfg.get("params", osc.OscillatorParams()),
    )
    report = verify.run(args.suite, vc)
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_DOMAIN


def cmd_spectral(args) -> int:
    doc = _read_json(args.input)
    try:
        op = ms.HermitianOperator.from_json(doc)
    except ms.NonHermitianError as exc:
        raise CliError(f"{args.input}: {exc} (defect {format_number(exc.defect)})", EXIT_DOMAIN) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"{args.input}: not a Hermitian operator document: {exc}", EXIT_USAGE) from exc
    d = ms.eigendecompose(op)
    residual = float(np.max(np.abs(d.reconstruct() - op.entries)))
    out = d.to_json()
    out["reconstruction_residual"] = residual
    try:
        Path(args.out).write_text(json.dumps(out, indent=2) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc.strerror}", EXIT_IO) from exc
    print("eigenvalues: " + " ".join(format_number(a) for a in d.eigenvalues))
    print("multiplicities: " + " ".join(str(m) for m in d.multiplicities()))
    print(f"reconstruction_residual: {format_number(residual)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-rv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON with hbar, mass, omega, grid {lo,hi,n}, mc_n")

    fig = sub.add_parser("figure", parents=[common], help="write figure data as CSV")
    fig.add_argument("--name", required=True, help="fig1 | fig2 | fig3 | fig4")
    fig.add_argument("--out", required=True)
    fig.add_argument("--sigma1", type=float)
    fig.add_argument("--sigma2", type=float)
    fig.add_argument("--rho", type=float)
    fig.set_defaults(func=cmd_figure)

    ver = sub.add_parser("verify", parents=[common], help="run the identity checks")
    ver.add_argument("--suite", choices=("all",) + verify.SUITES, default="all")
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    spec = sub.add_parser("spectral", help="decompose a Hermitian matrix given as JSON")
    spec.add_argument("--input", required=True, help='{"dim": n, "re": [[...]], "im": [[...]]}')
    spec.add_argument("--out", required=True)
    spec.set_defaults(func=cmd_spectral)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
