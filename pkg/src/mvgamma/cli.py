"""Command-line front end.

Subcommands: lt, cdf, pdf, oracle-cdf, oracle-lt, gci-check, gci-derivative,
coeffs, averaged-corr, gen-matrix.  Matrices are read from JSON
({"n": ..., "rows": [[...]]}) or headerless CSV files; results are printed
to stdout as JSON (CSV for coefficient tables and gen-matrix on request).
Exit status 0 on success, 2 on any validation/input error.  Output is
byte-identical for identical flags: all randomness flows from --seed through
fixed substream layouts.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import kernels
from .errors import MvGammaError
from .estimators import (
    McEstimate,
    MvGammaParams,
    cdf_mc,
    laplace_transform,
    pdf_mc,
)
from .gamma import SeriesControl, ShapeParameter
from .gci import (
    DEFAULT_TAU_CHECKPOINTS,
    BlockPartition,
    averaged_correlations,
    cdf_tau_derivative_decomposed,
    cdf_tau_fd,
    coefficients_csv,
    gci_gap,
    subset_splits,
    coefficient_c,
)
from .matrices import load_matrix, matrix_to_csv, random_correlation
from .oracle import OracleParams, cdf_oracle, lt_oracle
from .wishart import RngStream


def _parse_vector(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise MvGammaError(f"could not parse --{name} {text!r}: {exc}") from exc


def _assert_finite(obj, path="report"):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _assert_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _assert_finite(v, f"{path}[{i}]")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise MvGammaError(f"non-finite value at {path}")


def _emit(obj) -> None:
    _assert_finite(obj)
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _estimate_payload(command: str, est: McEstimate, **extra) -> dict:
    payload = {"command": command, **extra}
    payload.update(est.to_dict())
    payload["backend"] = kernels.backend_name()
    return payload


def _add_common(parser, matrix=True, alpha=True, sampling=True):
    if matrix:
        parser.add_argument("--matrix", required=True, help="path to a correlation matrix (.json or .csv)")
    if alpha:
        parser.add_argument("--alpha", type=float, required=True, help="gamma shape parameter")
    if sampling:
        parser.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
        parser.add_argument("--seed", type=int, default=42, help="master RNG seed")
        parser.add_argument("--stream-id", type=int, default=0, help="RNG substream index")
        parser.add_argument("--workers", type=int, default=1, help="threads for chunk evaluation")
    parser.add_argument("--series-eps", type=float, default=1e-12, help="series truncation tolerance")
    parser.add_argument("--series-max-terms", type=int, default=10**6, help="series term cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvgamma",
        description="Multivariate gamma distributions and Gaussian-correlation-inequality checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lt", help="exact Laplace transform det(I+RT)^(-alpha)")
    _add_common(p, sampling=False)
    p.add_argument("--t", required=True, help="comma-separated nonnegative t vector")

    p = sub.add_parser("cdf", help="Monte Carlo cdf via the Wishart representation")
    _add_common(p)
    p.add_argument("--x", required=True, help="comma-separated positive x vector")

    p = sub.add_parser("pdf", help="Monte Carlo pdf via the Wishart representation")
    _add_common(p)
    p.add_argument("--x", required=True)

    p = sub.add_parser("oracle-cdf", help="Gaussian-construction cdf estimate (integer 2*alpha)")
    _add_common(p)
    p.add_argument("--x", required=True)

    p = sub.add_parser("oracle-lt", help="Gaussian-construction Laplace-transform estimate")
    _add_common(p)
    p.add_argument("--t", required=True)

    p = sub.add_parser("gci-check", help="estimate both sides of the correlation inequality")
    _add_common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--n1", type=int, required=True, help="size of the first block")
    p.add_argument(
        "--tau",
        nargs="?",
        const=",".join(str(v) for v in DEFAULT_TAU_CHECKPOINTS),
        default=None,
        help="tau checkpoints for derivative checks (bare --tau uses 0.25,0.5,0.75)",
    )

    p = sub.add_parser("gci-derivative", help="decomposed d/dtau F against a finite difference")
    _add_common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--tau", default="0.5", help="comma-separated tau values")

    p = sub.add_parser("coeffs", help="subset coefficients c_J(tau)")
    _add_common(p, sampling=False)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--tau", default=",".join(str(v) for v in DEFAULT_TAU_CHECKPOINTS))
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("averaged-corr", help="block-averaged correlations and admissibility flag")
    _add_common(p, alpha=False, sampling=False)
    p.add_argument("--n1", type=int, required=True)

    p = sub.add_parser("gen-matrix", help="deterministic random correlation matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--min-eig-floor", type=float, default=0.05)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    return parser


def _run(args) -> int:
    ctl = SeriesControl(epsilon=args.series_eps, max_terms=args.series_max_terms) if hasattr(args, "series_eps") else SeriesControl()

    if args.command == "lt":
        r = load_matrix(args.matrix)
        t = _parse_vector(args.t, "t")
        value = laplace_transform(MvGammaParams(ShapeParameter(args.alpha), r), t)
        _emit({"command": "lt", "alpha": args.alpha, "t": t, "value": value})
        return 0

    if args.command in ("cdf", "pdf"):
        r = load_matrix(args.matrix)
        x = _parse_vector(args.x, "x")
        params = MvGammaParams(ShapeParameter(args.alpha), r)
        rng = RngStream(args.seed, args.stream_id)
        fn = cdf_mc if args.command == "cdf" else pdf_mc
        est = fn(params, x, args.samples, rng, ctl, workers=args.workers)
        _emit(_estimate_payload(args.command, est, alpha=args.alpha, x=x))
        return 0

    if args.command in ("oracle-cdf", "oracle-lt"):
        r = load_matrix(args.matrix)
        shape = ShapeParameter(args.alpha)
        if not shape.two_alpha_integer:
            raise MvGammaError(
                f"the oracle needs integer degrees of freedom: 2α = {2 * args.alpha} is not an integer"
            )
        params = OracleParams(int(round(2 * args.alpha)), r)
        rng = RngStream(args.seed, args.stream_id)
        if args.command == "oracle-cdf":
            x = _parse_vector(args.x, "x")
            est = cdf_oracle(params, x, args.samples, rng)
            _emit(_estimate_payload("oracle-cdf", est, alpha=args.alpha, x=x))
        else:
            t = _parse_vector(args.t, "t")
            est = lt_oracle(params, t, args.samples, rng)
            _emit(_estimate_payload("oracle-lt", est, alpha=args.alpha, t=t))
        return 0

    if args.command == "gci-check":
        r = load_matrix(args.matrix)
        x = _parse_vector(args.x, "x")
        part = BlockPartition.of(r.n, args.n1)
        taus = _parse_vector(args.tau, "tau") if args.tau else None
        report = gci_gap(
            r,
            part,
            ShapeParameter(args.alpha),
            x,
            args.samples,
            RngStream(args.seed, args.stream_id),
            tau_checks=taus,
            ctl=ctl,
            workers=args.workers,
        )
        payload = {"command": "gci-check", "backend": kernels.backend_name()}
        payload.update(report.to_dict())
        _emit(payload)
        return 0

    if args.command == "gci-derivative":
        r = load_matrix(args.matrix)
        x = _parse_vector(args.x, "x")
        part = BlockPartition.of(r.n, args.n1)
        shape = ShapeParameter(args.alpha)
        rng = RngStream(args.seed, args.stream_id)
        results = []
        for k, tau in enumerate(_parse_vector(args.tau, "tau")):
            total, terms = cdf_tau_derivative_decomposed(
                r, part, tau, shape, x, args.samples, rng.substream(2 * k), ctl, workers=args.workers
            )
            fd = cdf_tau_fd(
                r, part, tau, shape, x, args.samples, rng.substream(2 * k + 1), ctl=ctl, workers=args.workers
            )
            combined = math.hypot(total.std_err, fd.std_err)
            results.append(
                {
                    "tau": tau,
                    "total": total.to_dict(),
                    "finite_difference": fd.to_dict(),
                    "discrepancy_se": abs(total.value - fd.value) / combined if combined > 0 else 0.0,
                    "terms": [
                        {"j1": list(s.j1), "j2": list(s.j2), "c": c, "estimate": est.to_dict()}
                        for (s, c, est) in terms
                    ],
                }
            )
        _emit(
            {
                "command": "gci-derivative",
                "alpha": args.alpha,
                "x": x,
                "seed": args.seed,
                "samples": args.samples,
                "backend": kernels.backend_name(),
                "checks": results,
            }
        )
        return 0

    if args.command == "coeffs":
        r = load_matrix(args.matrix)
        part = BlockPartition.of(r.n, args.n1)
        taus = _parse_vector(args.tau, "tau")
        shape = ShapeParameter(args.alpha)
        if args.format == "csv":
            sys.stdout.write(coefficients_csv(r, part, taus, shape))
            return 0
        table = []
        for s in subset_splits(r.n, part):
            table.append(
                {
                    "j1": list(s.j1),
                    "j2": list(s.j2),
                    "c": {f"{tau:g}": coefficient_c(r, part, tau, s, shape) for tau in taus},
                }
            )
        _emit({"command": "coeffs", "alpha": args.alpha, "tau": taus, "splits": table})
        return 0

    if args.command == "averaged-corr":
        r = load_matrix(args.matrix)
        part = BlockPartition.of(r.n, args.n1)
        result = averaged_correlations(r, part).to_dict()
        _emit({"command": "averaged-corr", "n1": args.n1, **result})
        return 0

    if args.command == "gen-matrix":
        r = random_correlation(args.n, args.seed, args.min_eig_floor)
        if args.format == "csv":
            sys.stdout.write(matrix_to_csv(r))
        else:
            _emit({"n": r.n, "rows": [[float(v) for v in row] for row in r.entries]})
        return 0

    raise MvGammaError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except (MvGammaError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
