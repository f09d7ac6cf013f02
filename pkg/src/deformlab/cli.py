"""Command-line front end.

Every invocation writes exactly one JSON document to stdout::

    {"command": ..., "inputs": {...}, "result": {...},
     "provenance": {...}, "schema_version": "1"}

Floats are rounded to 15 significant digits, so reading the document back
reproduces the printed values exactly.  Diagnostics go to stderr.

Exit status: 0 success, 2 usage/parse error, 3 domain error (e.g. zero
matrix), 4 verification campaign found violations.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import core2d, core3d, estimate, sampling, verify
from .errors import DeformlabError

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VIOLATION = 0, 2, 3, 4
SEED_ENV = "DEFORMLAB_SEED"
DEFAULT_SEED = 1

MEAN3_MEASURE = (
    "i.i.d. standard normal entries (GaussianIID(3)); no measure is fixed for the 3D mean, "
    "this one is chosen because k is scale invariant and the law is rotation invariant"
)
K3_CONVENTION = "k3 = sqrt(x1/x3), the ratio of extreme semi-axes; --squared also reports x1/x3"
ENSEMBLES = {
    "bidisk": (sampling.UniformBidisk, "bidisk"),
    "gaussian": (sampling.GaussianIID, "rotation_invariant"),
    "ball": (sampling.UniformBall4, "rotation_invariant"),
}


class UsageError(Exception):
    pass


def _num(x: Any) -> Any:
    """Round floats to 15 significant digits, recursively."""
    if isinstance(x, (bool, type(None), str)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            return None
        return float(f"{x:.15g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    if isinstance(x, np.ndarray):
        return _num(x.tolist())
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _record(command: str, inputs: dict, result: Any, provenance: dict) -> str:
    doc = {
        "command": command,
        "inputs": _num(inputs),
        "result": _num(result),
        "provenance": _num(provenance),
        "schema_version": SCHEMA_VERSION,
    }
    return json.dumps(doc, indent=2, allow_nan=False)


# --------------------------------------------------------------------------
# argument types


def _seed(text: str) -> int:
    try:
        return sampling.parse_seed(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r} (decimal or 0x-hex, 64-bit)")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _parse_entries(text: str, size: int) -> list[float]:
    tokens = [t.strip() for t in text.split(",")]
    if len(tokens) != size:
        raise UsageError(f"expected {size} comma-separated entries, got {len(tokens)}: {text!r}")
    vals = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise UsageError(f"not a number: {tok!r}")
        if not math.isfinite(v):
            raise UsageError(f"non-finite entry: {tok!r}")
        vals.append(v)
    return vals


def _matrices(args, dim: int) -> list[list[float]]:
    size = dim * dim
    if (args.matrix is None) == (args.file is None):
        raise UsageError("give exactly one of --matrix or --file")
    if args.matrix is not None:
        return [_parse_entries(args.matrix, size)]
    out = []
    with open(args.file, newline="") as fh:
        for row in csv.reader(fh):
            if not row or not "".join(row).strip():
                continue
            out.append(_parse_entries(",".join(row), size))
    if not out:
        raise UsageError(f"no matrices in {args.file}")
    return out


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None:
        return DEFAULT_SEED
    try:
        return sampling.parse_seed(env)
    except ValueError:
        raise UsageError(f"invalid {SEED_ENV}: {env!r}")


def _estimate_dict(est: estimate.Estimate) -> dict:
    d = est.as_dict()
    d.pop("elapsed")  # wall-clock would break byte-identical output
    return d


# --------------------------------------------------------------------------
# subcommands


def cmd_k2(args):
    items = []
    for entries in _matrices(args, 2):
        m = np.array(entries).reshape(2, 2)
        p, q = core2d.singular_pair(m)
        item = {"matrix": entries, "k": core2d.k2(m), "singular_pair": {"p": p, "q": q}}
        try:
            item["column_bound"] = core2d.column_bound2(m)
        except DeformlabError:
            item["column_bound"] = None
        if args.polar:
            item["polar"] = core2d.to_polar(m)._asdict()
        items.append(item)
    result = items[0] if args.matrix is not None else {"items": items}
    return result, {"polar": args.polar, "file": args.file}, {"method": "closed_form"}, EXIT_OK


def cmd_k3(args):
    items = []
    for entries in _matrices(args, 3):
        m = np.array(entries).reshape(3, 3)
        item = {
            "matrix": entries,
            "k": core3d.k3(m),
            "eigen": core3d.eig3_matrix(m)._asdict(),
            "gram": core3d.gram_invariants(m)._asdict(),
        }
        if args.squared:
            item["k_squared"] = core3d.k3(m, squared=True)
        try:
            item["column_bound"] = core3d.column_bound3(m)
        except DeformlabError:
            item["column_bound"] = None
        items.append(item)
    result = items[0] if args.matrix is not None else {"items": items}
    prov = {"method": "closed_form", "convention": K3_CONVENTION}
    return result, {"squared": args.squared, "file": args.file}, prov, EXIT_OK


def cmd_mean2(args):
    inputs = {"method": args.method}
    if args.method == "exact":
        measure = ENSEMBLES[args.ensemble][1]
        est = estimate.mean_k2_exact(measure)
        inputs["ensemble"] = args.ensemble
        prov = {"method": "exact", "measure": measure}
    elif args.method == "quadrature":
        est = estimate.mean_k2_quadrature(args.tol)
        inputs["tol"] = args.tol
        prov = {"method": "quadrature", "tol": args.tol, "measure": "bidisk"}
    else:
        seed = args.seed if args.seed is not None else _default_seed()
        cls, measure = ENSEMBLES[args.ensemble]
        stream = sampling.SampleStream(seed, cls())
        est = estimate.mean_monte_carlo(stream, "k2", args.n, threads=args.threads)
        inputs.update({"n": args.n, "seed": seed, "ensemble": args.ensemble})
        prov = {"method": "monte_carlo", "seed": seed, "n": args.n, "measure": measure}
    result = _estimate_dict(est)
    result["reference"] = estimate.MEASURES[prov["measure"]]
    return result, inputs, prov, EXIT_OK


def cmd_mean3(args):
    seed = args.seed if args.seed is not None else _default_seed()
    stream = sampling.SampleStream(seed, sampling.GaussianIID(3))
    est = estimate.mean_monte_carlo(stream, "k3", args.n, threads=args.threads)
    result = _estimate_dict(est)
    result["upper_bound"] = 1.0 / 3.0
    print(f"measure assumption: {MEAN3_MEASURE}", file=sys.stderr)
    prov = {
        "method": "monte_carlo",
        "seed": seed,
        "n": args.n,
        "measure": MEAN3_MEASURE,
        "convention": K3_CONVENTION,
    }
    return result, {"n": args.n, "seed": seed}, prov, EXIT_OK


def cmd_bounds(args):
    est = estimate.bound_mean_quadrature(args.dim)
    result = {"quadrature": _estimate_dict(est)}
    inputs = {"dim": args.dim, "mc": args.mc}
    prov = {"method": "quadrature", "measure": "ordered_simplex_columns"}
    if args.mc:
        seed = args.seed if args.seed is not None else _default_seed()
        stream = sampling.SampleStream(seed, sampling.OrderedSimplexColumns(args.dim))
        mc = estimate.mean_monte_carlo(stream, "column_ratio", args.n, threads=args.threads)
        result["monte_carlo"] = _estimate_dict(mc)
        inputs.update({"n": args.n, "seed": seed})
        prov.update({"seed": seed, "n": args.n})
    return result, inputs, prov, EXIT_OK


def cmd_verify(args):
    seed = args.seed if args.seed is not None else _default_seed()
    if args.target == "prop51":
        rep = verify.interlacing_campaign(seed, args.n, args.tol, threads=args.threads)
        inputs = {"target": "prop51", "n": args.n, "seed": seed, "tol": args.tol}
    else:
        rep = verify.equivalence_campaign(seed, args.n, args.dim, threads=args.threads)
        inputs = {"target": "oracle", "dim": args.dim, "n": args.n, "seed": seed}
    status = EXIT_OK if rep.passed else EXIT_VIOLATION
    if not rep.passed:
        print(f"{rep.violations} violation(s), worst margin {rep.worst_margin:.3e}", file=sys.stderr)
    prov = {"method": "campaign", "seed": seed, "n": args.n, "tol": rep.tol}
    return rep.as_dict(), inputs, prov, status


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deformlab",
        description="Deformation coefficients (sigma_min / sigma_max) of 2D and 3D operators.",
        epilog=f"Seeds are decimal or 0x-hex 64-bit integers; {SEED_ENV} sets the default seed.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p, n_default):
        p.add_argument("--n", type=_positive_int, default=n_default, help="number of samples")
        p.add_argument(
            "--seed", type=_seed, default=None,
            help=f"64-bit seed, decimal or 0x-hex (default: ${SEED_ENV} or {DEFAULT_SEED})",
        )
        p.add_argument("--threads", type=_positive_int, default=1,
                       help="worker threads; output does not depend on this value")

    p = sub.add_parser("k2", help="deformation coefficient of a 2x2 matrix")
    p.add_argument("--matrix", help="a,b,c,d (row-major)")
    p.add_argument("--file", help="CSV file, one matrix (4 entries) per line")
    p.add_argument("--polar", action="store_true", help="also report (r, rho, alpha, beta)")
    p.set_defaults(func=cmd_k2)

    p = sub.add_parser("k3", help="deformation coefficient of a 3x3 matrix",
                       description=K3_CONVENTION + ".")
    p.add_argument("--matrix", help="9 comma-separated entries (row-major)")
    p.add_argument("--file", help="CSV file, one matrix (9 entries) per line")
    p.add_argument("--squared", action="store_true", help="also report x1/x3")
    p.set_defaults(func=cmd_k3)

    p = sub.add_parser(
        "mean2", help="mean of k over 2x2 matrices",
        description="Measures: 'bidisk' ((x,z) and (y,t) uniform in disks; mean 3 - 4 ln 2) and "
        "the rotation-invariant 'gaussian' / 'ball' ensembles (mean 1 - ln 2). "
        "--method quadrature always uses the bidisk measure.",
    )
    p.add_argument("--method", choices=("exact", "quadrature", "mc"), default="exact")
    p.add_argument("--ensemble", choices=tuple(ENSEMBLES), default="bidisk")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature tolerance")
    seeded(p, 10**6)
    p.set_defaults(func=cmd_mean2)

    p = sub.add_parser("mean3", help="Monte Carlo mean of k over 3x3 matrices",
                       description=f"Measure: {MEAN3_MEASURE}. {K3_CONVENTION}.")
    seeded(p, 10**6)
    p.set_defaults(func=cmd_mean3)

    p = sub.add_parser("bounds", help="column-norm bound integrals (1/2 in 2D, 1/3 in 3D)",
                       description="Mean of smallest/largest column norm with norms uniform "
                       "on the ordered unit simplex.")
    p.add_argument("--dim", type=int, choices=(2, 3), required=True)
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo cross-check")
    seeded(p, 10**6)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", help="verification campaigns")
    vsub = p.add_subparsers(dest="target", required=True)
    q = vsub.add_parser("prop51", help="interlacing x1 <= u^2 <= w^2 <= x3 on Gaussian 3x3 samples",
                        description=f"{K3_CONVENTION}.")
    q.add_argument("--tol", type=float, default=core3d.DEFAULT_REL_TOL,
                   help="tolerance relative to u^2 + v^2 + w^2")
    seeded(q, 10**6)
    q.set_defaults(func=cmd_verify)
    q = vsub.add_parser("oracle", help="closed forms vs Jacobi oracles")
    q.add_argument("--dim", type=int, choices=(2, 3), required=True)
    seeded(q, 10**5)
    q.set_defaults(func=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "mean2" and args.method == "mc" and args.n < 2:
            raise UsageError("Monte Carlo needs --n >= 2")
        result, inputs, prov, status = args.func(args)
    except UsageError as exc:
        print(f"deformlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"deformlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DeformlabError, ValueError) as exc:
        print(f"deformlab {args.command}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    command = args.command if args.command != "verify" else f"verify {args.target}"
    sys.stdout.write(_record(command, inputs, result, prov) + "\n")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
