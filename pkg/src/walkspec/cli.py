"""Command-line surface: rho, speed, dp, simulate, sweep, verify.

Every file the CLI writes embeds the tool version, the exact command line,
the model, the seed and the RNG identifier, and floats are emitted in
shortest round-trip form, so re-running the embedded command reproduces the
file byte for byte.  Wall-clock timings are therefore kept out of file
output unless explicitly requested.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from . import __version__, closed_form, tails, verify
from .dp import compute_series, rho_from_series, write_series_csv
from .errors import WalkspecError
from .kernel import build_quotient
from .models import FreeProductComplete, parse_model
from .simulate import RNG_ID, SimConfig, estimate_speed, occupation_fractions

SCHEMA_LINE = "schema=1"


def _default_seed() -> int:
    return int(os.environ.get("WALKSPEC_SEED", "0"))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _metadata_lines(args, command: str) -> list[str]:
    return [
        f"# tool=walkspec {__version__}",
        f"# command={command}",
        f"# model={getattr(args, 'model', '')}",
        f"# seed={getattr(args, 'seed', '')}",
        f"# rng={RNG_ID}",
    ]


def _write_csv(path, args, command, header: list[str], rows: list[list]) -> None:
    with open(path, "w") as fh:
        fh.write(SCHEMA_LINE + "\n")
        for line in _metadata_lines(args, command):
            fh.write(line + "\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _json_payload(args, command, body: dict) -> dict:
    return {
        "schema": 1,
        "tool": f"walkspec {__version__}",
        "command": command,
        "model": getattr(args, "model", ""),
        "seed": getattr(args, "seed", None),
        "rng_id": RNG_ID,
        **body,
    }


def _emit_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_rho(args, command: str) -> int:
    model = parse_model(args.model)
    lam = args.lam
    rec = tails.rho_routes(model, lam, n_max=args.nmax if args.method in ("dp", "all") else None)
    values = {}
    if args.method in ("closed", "all") and rec.rho_closed is not None:
        values["closed"] = rec.rho_closed
    if args.method in ("solver", "all") and rec.rho_solver is not None:
        values["solver"] = rec.rho_solver
    if args.method in ("dp", "all") and rec.rho_dp is not None:
        values["dp"] = rec.rho_dp
    if args.method != "all" and args.method not in values:
        raise WalkspecError(
            f"method {args.method!r} produced no value for {args.model} at lam={lam}"
        )
    gaps = {
        "closed_solver": rec.gap_closed_solver,
        "closed_dp": rec.gap_closed_dp,
        "solver_dp": rec.gap_solver_dp,
    }
    if args.json or args.out:
        payload = _json_payload(args, command, {"lambda": lam, "rho": values, "gaps": gaps})
        _emit_json(payload, args.out)
    else:
        for name, val in values.items():
            print(f"rho[{name}] = {val!r}")
        for name, val in gaps.items():
            if val is not None:
                print(f"gap[{name}] = {val:.3e}")
    return 0


def cmd_speed(args, command: str) -> int:
    model = parse_model(args.model)
    if not isinstance(model, FreeProductComplete) or model.r != 2:
        raise WalkspecError("speed is defined for two-factor free products only")
    lam = args.lam
    closed = closed_form.two_complete_speed(*model.ms, lam)
    cfg = SimConfig(model, lam, args.steps, args.replicas, seed=args.seed)
    est = estimate_speed(cfg)
    z = abs(est.mean - closed) / est.se if est.se > 0 else float("inf")
    body = {
        "lambda": lam,
        "speed_closed": closed,
        "speed_mc": est.mean,
        "speed_se": est.se,
        "z_score": z,
        "steps": args.steps,
        "replicas": args.replicas,
    }
    if args.json or args.out:
        _emit_json(_json_payload(args, command, body), args.out)
    else:
        print(f"speed closed-form = {closed!r}")
        print(f"speed monte-carlo = {est.mean!r} +- {est.se!r}")
        print(f"z-score = {z:.2f}")
    return 0


def cmd_dp(args, command: str) -> int:
    model = parse_model(args.model)
    table = compute_series(build_quotient(model, args.lam), args.nmax)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(SCHEMA_LINE + "\n")
            for line in _metadata_lines(args, command):
                fh.write(line + "\n")
            write_series_csv(table, fh)
        print(f"wrote {args.out}")
    else:
        est = rho_from_series(table) if args.nmax >= 200 else None
        print(f"p^(n)(o,o) and f^(n)(o,o) computed to n = {args.nmax}")
        tail = {n: table.p(n) for n in range(max(0, args.nmax - 4), args.nmax + 1)}
        for n, p in tail.items():
            print(f"p[{n}] = {p!r}")
        if est is not None:
            print(f"rho estimate from tail = {est.rho_hat!r} (+- {est.error:.1e})")
    return 0


def cmd_simulate(args, command: str) -> int:
    model = parse_model(args.model)
    cfg = SimConfig(model, args.lam, args.steps, args.replicas, seed=args.seed)
    est = estimate_speed(cfg)
    occ = occupation_fractions(cfg)
    body = {
        "lambda": args.lam,
        "steps": args.steps,
        "replicas": args.replicas,
        "estimates": {
            "speed": est.mean,
            "occupation_type1": occ.fractions[1],
            "occupation_type2": occ.fractions[2],
            "origin_fraction": occ.origin_fraction,
        },
        "se": {
            "speed": est.se,
            "occupation_type1": occ.se[1],
            "occupation_type2": occ.se[2],
        },
    }
    _emit_json(_json_payload(args, command, body), args.out)
    return 0


_SWEEP_COLUMNS = [
    "model",
    "lambda",
    "rho_closed",
    "rho_solver",
    "rho_dp",
    "gap_closed_solver",
    "gap_closed_dp",
    "gap_solver_dp",
    "speed_closed",
    "speed_mc",
    "speed_se",
    "n_max",
    "steps",
    "replicas",
    "seed",
    "rng_id",
]


def _sweep_point(payload):
    model_text, lam, nmax = payload
    model = parse_model(model_text)
    return tails.rho_routes(model, lam, n_max=nmax)


def cmd_sweep(args, command: str) -> int:
    model = parse_model(args.model)
    if args.points < 2:
        raise WalkspecError("sweep needs at least 2 points")
    grid = np.linspace(args.lo, args.hi, args.points)
    payloads = [(args.model, float(lam), args.nmax) for lam in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_sweep_point, payloads))
    else:
        records = [_sweep_point(p) for p in payloads]
    records.sort(key=lambda rec: rec.lam)
    for rec in records:
        rec.seed = args.seed

    if args.steps and args.replicas and isinstance(model, FreeProductComplete):
        lam_c = closed_form.two_complete_critical_bias(*model.ms)
        for rec in records:
            if 0 <= rec.lam < lam_c:
                cfg = SimConfig(model, rec.lam, args.steps, args.replicas, seed=args.seed)
                est = estimate_speed(cfg)
                rec.speed_mc, rec.speed_se = est.mean, est.se
                rec.steps, rec.replicas = args.steps, args.replicas

    rows = []
    for rec in records:
        d = asdict(rec)
        d["lambda"] = d.pop("lam")
        if not args.timings:
            d["wall_time_ms"] = None
        rows.append([d[c] for c in _SWEEP_COLUMNS] + ([d["wall_time_ms"]] if args.timings else []))
    header = _SWEEP_COLUMNS + (["wall_time_ms"] if args.timings else [])

    out_csv = args.out if args.out else None
    if out_csv:
        _write_csv(out_csv, args, command, header, rows)
        print(f"wrote {out_csv}")
        if args.json:
            payload = _json_payload(
                args, command, {"records": [dict(zip(header, row)) for row in rows]}
            )
            json_path = os.path.splitext(out_csv)[0] + ".json"
            _emit_json(payload, json_path)
            print(f"wrote {json_path}")
        if args.gnuplot_script:
            gp_path = os.path.splitext(out_csv)[0] + ".gp"
            with open(gp_path, "w") as fh:
                fh.write(
                    "set datafile separator ','\n"
                    f"set title 'rho and speed vs bias ({args.model})'\n"
                    "set key left\n"
                    f"plot '{out_csv}' skip 7 using 2:3 with lines title 'rho closed', \\\n"
                    f"     '{out_csv}' skip 7 using 2:4 with points title 'rho solver'\n"
                )
            print(f"wrote {gp_path}")
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(_fmt(v) for v in row))
    return 0


def cmd_verify(args, command: str) -> int:
    results = verify.run_suite(args.suite, fast=args.fast)
    for res in results:
        print(res.line())
    n_fail = sum(1 for r in results if not r.passed)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    if args.out:
        payload = _json_payload(
            args,
            command,
            {
                "suite": args.suite,
                "fast": args.fast,
                "results": [
                    {
                        "id": r.check_id,
                        "description": r.description,
                        "passed": r.passed,
                        "detail": r.detail,
                    }
                    for r in results
                ],
            },
        )
        _emit_json(payload, args.out)
    return 0 if n_fail == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walkspec",
        description="biased random walks on regular trees and free products: "
        "spectral radius, speed, return probabilities",
    )
    parser.add_argument("--version", action="version", version=f"walkspec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, lam=True):
        p.add_argument("--model", required=True, help="tree:d=4 or free:2,1")
        if lam:
            p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--json", action="store_true")
        p.add_argument("--seed", type=int, default=_default_seed())
        p.add_argument("--jobs", type=int, default=1)

    p_rho = sub.add_parser("rho", help="spectral radius by any route")
    common(p_rho)
    p_rho.add_argument("--method", choices=["closed", "solver", "dp", "all"], default="all")
    p_rho.add_argument("--nmax", type=int, default=2000)
    p_rho.set_defaults(func=cmd_rho)

    p_speed = sub.add_parser("speed", help="closed-form and Monte-Carlo speed")
    common(p_speed)
    p_speed.add_argument("--steps", type=int, default=100_000)
    p_speed.add_argument("--replicas", type=int, default=200)
    p_speed.set_defaults(func=cmd_speed)

    p_dp = sub.add_parser("dp", help="exact return/first-return tables")
    common(p_dp)
    p_dp.add_argument("--nmax", type=int, default=1000)
    p_dp.set_defaults(func=cmd_dp)

    p_sim = sub.add_parser("simulate", help="Monte-Carlo estimates as JSON")
    common(p_sim)
    p_sim.add_argument("--steps", type=int, default=100_000)
    p_sim.add_argument("--replicas", type=int, default=200)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="bias-grid sweep to CSV/JSON")
    common(p_sweep, lam=False)
    p_sweep.add_argument("--lo", type=float, required=True)
    p_sweep.add_argument("--hi", type=float, required=True)
    p_sweep.add_argument("--points", type=int, default=60)
    p_sweep.add_argument("--nmax", type=int, default=None)
    p_sweep.add_argument("--steps", type=int, default=None)
    p_sweep.add_argument("--replicas", type=int, default=None)
    p_sweep.add_argument("--timings", action="store_true", help="include wall_time_ms")
    p_sweep.add_argument("--gnuplot-script", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the pinned verification checks")
    p_verify.add_argument(
        "--suite",
        choices=sorted(verify.SUITES),
        default="all",
    )
    p_verify.add_argument("--fast", action="store_true")
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--jobs", type=int, default=1)
    p_verify.set_defaults(func=cmd_verify, model="", seed=_default_seed())

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    command = "walkspec " + " ".join(shlex.quote(a) for a in argv)
    try:
        return args.func(args, command)
    except WalkspecError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
