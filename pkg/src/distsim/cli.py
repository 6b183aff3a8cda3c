"""Command line interface.

Subcommands:

* ``distance A.json B.json`` -- divergence between two serialized
  distributions of the same type.
* ``compare`` -- group CSVs through the reduction/fit/compare pipeline,
  emitting per-iteration distance matrices (CSV) and a summary (JSON).
* ``jl min-dim | project | distortion`` -- random-projection utilities.
* ``approx moment-match | nln-density`` -- discrete approximations and
  mixture-density grid dumps.
* ``verify stein | bridge | pricing`` -- run the covariance-identity test
  batteries and emit machine-readable reports.

Exit codes: 0 success, 1 input error, 2 numerical failure. All randomized
subcommands take ``--seed`` (mandatory under ``--strict``) and reruns with
identical arguments produce byte-identical outputs. KL divergence, where
printed, is in nats. The ``DISTSIM_THREADS`` environment variable sets the
pipeline's pairwise-comparison thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .approx import NLNComponent, moment_match, nln_sum_density
from .core import (
    DiscreteDist,
    GaussianMulti,
    GaussianUni,
    SampleMatrix,
    TruncGaussianMulti,
    TruncGaussianUni,
    from_json,
)
from .divergence import bc_coefficient_discrete
from .errors import (
    BoundaryConditionViolated,
    DensityUnderflow,
    DistsimError,
    DomainError,
    GridTooCoarse,
    NonConvergence,
)
from .gaussian import bc_mvn, bc_normal_uni, bc_truncated_mvn, bc_truncated_uni
from .pipeline import RunConfig, compare_groups, load_group
from .quadrature import QuadConfig
from .reduce import jl_distortion_report, jl_min_dimension, jl_project
from .stein import (
    JointDensitySpec,
    price_asset,
    verify_distance_covariance,
    verify_stein,
)

_NUMERICAL_ERRORS = (NonConvergence, GridTooCoarse, DensityUnderflow,
                     BoundaryConditionViolated)


def _emit(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _require_seed(args) -> None:
    if getattr(args, "strict", False) and args.seed is None:
        raise DomainError("--seed is mandatory in --strict mode for randomized commands")


def _seed_of(args) -> int:
    return 0 if args.seed is None else int(args.seed)


# ----------------------------------------------------------------- distance

def _cmd_distance(args) -> int:
    a = from_json(Path(args.first).read_text())
    b = from_json(Path(args.second).read_text())
    if type(a) is not type(b):
        raise DomainError(
            f"cannot compare {type(a).__name__} with {type(b).__name__}"
        )
    if isinstance(a, DiscreteDist):
        value = bc_coefficient_discrete(a, b)
    elif isinstance(a, TruncGaussianUni):
        value = bc_truncated_uni(a, b)
    elif isinstance(a, GaussianUni):
        value = bc_normal_uni(a, b)
    elif isinstance(a, TruncGaussianMulti):
        _require_seed(args)
        cfg = QuadConfig(seed=_seed_of(args), mc_samples=args.mc_samples)
        value = bc_truncated_mvn(a, b, cfg)
    elif isinstance(a, GaussianMulti):
        value = bc_mvn(a, b)
    else:
        raise DomainError(f"unsupported distribution type {type(a).__name__}")
    _emit({
        "coefficient": value.coefficient,
        "distance": value.distance if math.isfinite(value.distance) else "inf",
    }, args.output)
    return 0


# ------------------------------------------------------------------ compare

def _cmd_compare(args) -> int:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    overrides = {
        "method": args.method,
        "sig_digits": args.sig_digits,
        "epsilon": args.epsilon,
        "k": args.k,
        "fit": args.fit,
        "n_nodes": args.nodes,
        "iterations": args.iterations,
        "seed": args.seed,
        "shrinkage": args.shrinkage,
        "log_returns": args.log_returns or None,
        "mc_samples": args.mc_samples,
    }
    merged = dict(base)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    if args.bounds is not None:
        merged["bounds"] = (args.bounds if args.bounds == "observed_range"
                            else [float(x) for x in args.bounds.split(",")])
    merged.setdefault("log_returns", False)
    if getattr(args, "strict", False) and merged.get("seed") is None:
        raise DomainError("--seed is mandatory in --strict mode for randomized commands")
    merged.setdefault("seed", 0)
    cfg = RunConfig.from_dict(merged)

    names = args.names.split(",") if args.names else None
    if names and len(names) != len(args.csv):
        raise DomainError("--names count must match the number of CSV files")
    groups = [
        load_group(path, names[i] if names else Path(path).stem)
        for i, path in enumerate(args.csv)
    ]
    result = compare_groups(groups, cfg)

    out_dir = args.out or cfg.out_dir
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, mat in enumerate(result.matrices):
            mat.to_csv(out / f"matrix_iter{i}.csv")
        (out / "summary.json").write_text(json.dumps(result.to_dict(), indent=2) + "\n")
        print(f"wrote {len(result.matrices)} matrices and summary.json to {out}")
    else:
        print(json.dumps(result.to_dict(), indent=2))
    return 0


# ----------------------------------------------------------------------- jl

def _cmd_jl(args) -> int:
    if args.jl_cmd == "min-dim":
        print(jl_min_dimension(args.n, args.eps))
        return 0
    if args.jl_cmd == "project":
        _require_seed(args)
        data = SampleMatrix.from_csv(args.input)
        projected = jl_project(data, args.k, _seed_of(args))
        projected.to_csv(args.output)
        print(f"projected {data.n_obs}x{data.n_vars} -> {projected.n_obs}x{projected.n_vars}")
        return 0
    original = SampleMatrix.from_csv(args.original)
    projected = SampleMatrix.from_csv(args.projected)
    rep = jl_distortion_report(original, projected, args.eps)
    _emit({
        "pairs": rep.pair_count,
        "min_ratio": rep.min_ratio,
        "max_ratio": rep.max_ratio,
        "mean_ratio": rep.mean_ratio,
        "fraction_within": rep.fraction_within,
    }, args.output)
    return 0


# ------------------------------------------------------------------- approx

def _cmd_approx(args) -> int:
    if args.approx_cmd == "moment-match":
        if args.moments:
            moms = np.array([float(x) for x in args.moments.split(",")])
        else:
            data = SampleMatrix.from_csv(args.input)
            idx = data.labels.index(args.column) if args.column else 0
            col = data.values[:, idx]
            moms = np.array([float(np.mean(col ** p)) for p in range(2 * args.nodes)])
        approx = moment_match(moms, args.nodes)
        _emit({"nodes": list(approx.nodes), "weights": list(approx.weights)},
              args.output)
        return 0
    ks = [int(x) for x in args.k.split(",")]
    mus = [float(x) for x in args.mu_y.split(",")]
    sigmas = [float(x) for x in args.sigma_y.split(",")]
    if not len(ks) == len(mus) == len(sigmas):
        raise DomainError("--k, --mu-y and --sigma-y need the same number of entries")
    comps = [NLNComponent(k, m, s) for k, m, s in zip(ks, mus, sigmas)]
    grid = nln_sum_density(comps, n_points=args.points, span_sigmas=args.span)
    grid.to_csv(args.output)
    print(f"wrote {grid.x.size}-point density grid to {args.output}")
    return 0


# ------------------------------------------------------------------- verify

def _stein_battery(seed: int) -> list[dict]:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    cases = []
    polys = [
        ("t", lambda t: t, lambda t: np.ones_like(np.asarray(t, dtype=float))),
        ("t^2", lambda t: t * t, lambda t: 2.0 * t),
        ("t^3-t", lambda t: t ** 3 - t, lambda t: 3.0 * t * t - 1.0),
    ]
    for _ in range(8):
        corr = float(rng.uniform(-0.9, 0.9))
        spec = JointDensitySpec.bivariate_normal(corr=corr)
        name, c, cp = polys[int(rng.integers(len(polys)))]
        rep = verify_stein(spec, c, cp, lambda u: u)
        cases.append({"corr": corr, "c": name, **rep.to_dict(),
                      "pass": rep.residual <= max(1e-3, 3 * rep.combined_error)})
    return cases


def _bridge_battery(seed: int) -> list[dict]:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    cases = []
    for _ in range(6):
        corr = float(rng.uniform(-0.8, 0.8))
        shift = float(rng.uniform(-1.0, 1.0))
        spec = JointDensitySpec.bivariate_normal(mu_y=shift, corr=corr)
        for tag, rep in zip(("cov_form", "kernel_form"),
                            verify_distance_covariance(spec)):
            cases.append({"corr": corr, "mu_y": shift, "equation": tag,
                          **rep.to_dict(),
                          "pass": rep.residual <= max(1e-3, 3 * rep.combined_error)})
    return cases


def _pricing_battery(seed: int) -> list[dict]:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    cases = []
    for _ in range(6):
        corr = float(rng.uniform(-0.9, 0.9))
        coefs = rng.uniform(-1.0, 1.0, size=3)
        spec = JointDensitySpec.bivariate_normal(corr=corr)

        def c(t, a=coefs):
            t = np.asarray(t, dtype=float)
            return a[0] + a[1] * t + a[2] * t * t

        def cp(t, a=coefs):
            t = np.asarray(t, dtype=float)
            return a[1] + 2.0 * a[2] * t

        rep = price_asset(spec, c, cp)
        cases.append({"corr": corr, "coeffs": list(coefs), **rep.to_dict(),
                      "pass": rep.max_residual <= max(1e-3, 3 * rep.combined_error)})
    return cases


def _cmd_verify(args) -> int:
    _require_seed(args)
    seed = _seed_of(args)
    battery = {"stein": _stein_battery, "bridge": _bridge_battery,
               "pricing": _pricing_battery}[args.battery]
    cases = battery(seed)
    ok = all(c["pass"] for c in cases)
    _emit({"battery": args.battery, "seed": seed, "cases": cases,
           "all_pass": ok}, args.output)
    if not ok:
        raise NonConvergence(f"{args.battery} battery has failing cases")
    return 0


# ------------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distsim",
        description="Distribution similarity with dimension reduction.",
        epilog="Distances and KL divergences are in nats (natural logarithm); "
               "a zero overlap coefficient is reported as distance 'inf'. "
               "DISTSIM_THREADS sets the pipeline's comparison thread count.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--strict", action="store_true",
                        help="require --seed on every randomized subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", help="divergence between two distribution JSONs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mc-samples", type=int, default=200_000)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("compare", help="pairwise distance matrix for group CSVs")
    p.add_argument("csv", nargs="+", help="one CSV per group (header = columns)")
    p.add_argument("--names", default=None, help="comma-separated group names")
    p.add_argument("--config", default=None, help="JSON file mirroring the run config")
    p.add_argument("--method", choices=("pca", "jl"), default=None)
    p.add_argument("--sig-digits", dest="sig_digits", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--fit", choices=("mvn", "truncated", "discrete"), default=None)
    p.add_argument("--bounds", default=None,
                   help="'observed_range' or 'lower,upper' for the truncated fit")
    p.add_argument("--nodes", type=int, default=None, help="discrete-fit node count")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--shrinkage", type=float, default=None)
    p.add_argument("--log-returns", action="store_true")
    p.add_argument("--mc-samples", dest="mc_samples", type=int, default=None)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("jl", help="random-projection utilities")
    jl_sub = p.add_subparsers(dest="jl_cmd", required=True)
    q = jl_sub.add_parser("min-dim", help="minimum admissible dimension")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--eps", type=float, required=True)
    q = jl_sub.add_parser("project", help="project a CSV of row-points")
    q.add_argument("--input", required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument("--output", required=True)
    q = jl_sub.add_parser("distortion", help="pairwise distortion report")
    q.add_argument("--original", required=True)
    q.add_argument("--projected", required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_jl)

    p = sub.add_parser("approx", help="discrete approximation / mixture density")
    ap_sub = p.add_subparsers(dest="approx_cmd", required=True)
    q = ap_sub.add_parser("moment-match", help="N-point moment-matched distribution")
    q.add_argument("--moments", default=None, help="comma-separated m_0..m_{2N-1}")
    q.add_argument("--input", default=None, help="CSV whose column supplies moments")
    q.add_argument("--column", default=None)
    q.add_argument("--nodes", type=int, required=True)
    q.add_argument("--output", default=None)
    q = ap_sub.add_parser("nln-density", help="mixture sum density grid dump")
    q.add_argument("--k", required=True, help="comma-separated reduced dimensions")
    q.add_argument("--mu-y", dest="mu_y", required=True)
    q.add_argument("--sigma-y", dest="sigma_y", required=True)
    q.add_argument("--points", type=int, default=4096)
    q.add_argument("--span", type=float, default=12.0)
    q.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_approx)

    p = sub.add_parser("verify", help="run an identity-verification battery")
    p.add_argument("battery", choices=("stein", "bridge", "pricing"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 2
    except (DistsimError, OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
