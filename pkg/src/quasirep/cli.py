"""Command-line front end.

Subcommands: group, irreps, sweep, hom, twirl, verify. Groups and irrep
tables are cached on disk (--cache-dir, then QUASIREP_CACHE, then
./.quasirep) because decomposition dominates runtime. Exit codes: 0 on
success, 1 when a check or bound fails, 2 on input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .approx import (
    defect_direct,
    minor_construction,
    polar_construction,
    thm4_defect,
    thm5_bound,
)
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import FileFormatError, QuasirepError
from .groups import FiniteGroup, group_hash, load_group, named, save_group
from .homs import (
    balanced_random_map,
    evaluate,
    genuine_hom,
    make_group_map,
    random_map,
)
from .irreps import IrrepTable, decompose, frobenius_schur, load_irreps, save_irreps
from .twirl import CLASS_NAMES, twirl_exact, twirl_monte_carlo
from .verify import run_battery

__all__ = ["main"]

_SWEEP_COLUMNS = (
    "group", "construction", "irrep", "d_rho", "d_psi", "ratio", "seed",
    "defect", "normalized_defect", "triple_trace_re", "agreement_prob",
    "mean_opnorm", "thm1_bound", "cor1_bound", "admissibility_residual",
    "thm4_value", "thm5_bound",
)

_HOM_COLUMNS = (
    "seed", "agreement_prob", "collision_prob", "epsilon", "thm2_bound",
    "thm2_sigma_dim", "thm3_bound", "r_h",
)


def _cache_dir(args) -> str:
    if args.cache_dir:
        return args.cache_dir
    return os.environ.get("QUASIREP_CACHE") or ".quasirep"


def _tolerances(args) -> Tolerances:
    if args.tolerance is None:
        return DEFAULT_TOLERANCES
    # the single knob overrides the entrywise agreement threshold
    return dataclasses.replace(DEFAULT_TOLERANCES, entry=args.tolerance)


def _write_out(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    tmp = f"{out}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, out)


def _slug(tokens) -> str:
    return "-".join(str(t) for t in tokens)


def _group_from_spec(tokens: list[str], cache: str) -> FiniteGroup:
    """Build or load a group. `file <path>` bypasses the cache entirely."""
    if not tokens:
        raise ValueError("empty group spec")
    if tokens[0] == "file":
        if len(tokens) != 2:
            raise ValueError("group spec 'file' takes exactly one path")
        return load_group(tokens[1])
    family = tokens[0]
    params = []
    for t in tokens[1:]:
        try:
            params.append(int(t))
        except ValueError:
            raise ValueError(f"group parameter {t!r} is not an integer") from None
    path = os.path.join(cache, _slug(tokens) + ".grp")
    if os.path.exists(path):
        try:
            return load_group(path)
        except (FileFormatError, QuasirepError) as exc:
            print(f"note: rebuilding stale cache {path}: {exc}", file=sys.stderr)
    g = named(family, *params)
    os.makedirs(cache, exist_ok=True)
    save_group(g, path)
    return g


def _table_for(g: FiniteGroup, tokens: list[str], cache: str,
               seed: int) -> IrrepTable:
    """Decompose with a per-(spec, seed) disk cache; reload is revalidated."""
    path = os.path.join(cache, _slug(tokens) + f".s{seed}.irr")
    if os.path.exists(path):
        try:
            return load_irreps(g, path)
        except (FileFormatError, QuasirepError) as exc:
            print(f"note: rebuilding stale cache {path}: {exc}", file=sys.stderr)
    table = decompose(g, seed=seed)
    os.makedirs(cache, exist_ok=True)
    save_irreps(table, path)
    return table


def _parse_range(text: str) -> list[int]:
    """'2:5' -> [2, 3, 4, 5]; '3' -> [3]; '5:4' -> [] (empty sweep)."""
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        lo, hi = int(lo_s), int(hi_s)
        return list(range(lo, hi + 1))
    return [int(text)]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _csv(columns, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(_fmt(row[c]) for c in columns) for row in rows)
    return "\n".join(lines) + "\n"


def cmd_group(args) -> int:
    cache = _cache_dir(args)
    g = _group_from_spec(args.spec, cache)
    info = {
        "name": g.name,
        "order": g.order,
        "classes": len(g.classes),
        "class_sizes": list(g.class_sizes),
        "hash": group_hash(g),
    }
    if args.format == "json":
        _write_out(json.dumps(info, indent=2) + "\n", args.out)
    else:
        sizes = ",".join(str(s) for s in g.class_sizes)
        _write_out(
            f"name={g.name} order={g.order} classes={len(g.classes)} "
            f"class_sizes={sizes}\nhash={info['hash']}\n", args.out)
    return 0


def cmd_irreps(args) -> int:
    cache = _cache_dir(args)
    g = _group_from_spec(args.spec, cache)
    table = _table_for(g, args.spec, cache, args.seed)
    indicators = [frobenius_schur(r) for r in table]
    info = {
        "group": g.name,
        "order": g.order,
        "dims": list(table.dims),
        "d_min": table.d_min,
        "frobenius_schur": indicators,
        "sum_d2": sum(d * d for d in table.dims),
        "hash": group_hash(g),
    }
    if args.format == "json":
        _write_out(json.dumps(info, indent=2) + "\n", args.out)
    else:
        dims = ",".join(str(d) for d in table.dims)
        fs = ",".join(f"{i:+d}" for i in indicators)
        _write_out(f"group={g.name} dims={dims} d_min={table.d_min} "
                   f"fs={fs} sum_d2={info['sum_d2']}\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    cache = _cache_dir(args)
    tol = _tolerances(args)
    g = _group_from_spec(args.group, cache)
    table = _table_for(g, args.group, cache, args.seed)
    d_psis = _parse_range(args.dpsi)
    rows = []
    for ri, rho in enumerate(table):
        if rho.is_trivial():
            continue
        if args.rho_dim is not None and rho.dim != args.rho_dim:
            continue
        for d_psi in d_psis:
            if not 1 <= d_psi <= rho.dim:
                continue
            for s in range(args.seeds):
                seed = args.seed + s
                if args.construction == "minor":
                    psi = minor_construction(rho, d_psi, subspace="haar",
                                             seed=[seed, ri, d_psi],
                                             tolerances=tol)
                else:
                    psi = polar_construction(rho, d_psi, seed=[seed, ri, d_psi],
                                             tolerances=tol)
                rep = defect_direct(psi, table, tolerances=tol)
                ratio = d_psi / rho.dim
                rows.append({
                    "group": g.name,
                    "construction": args.construction,
                    "irrep": ri,
                    "d_rho": rho.dim,
                    "d_psi": d_psi,
                    "ratio": ratio,
                    "seed": seed,
                    "defect": rep.defect,
                    "normalized_defect": rep.normalized_defect,
                    "triple_trace_re": rep.triple_trace.real,
                    "agreement_prob": rep.agreement_prob,
                    "mean_opnorm": rep.mean_opnorm,
                    "thm1_bound": rep.thm1_bound,
                    "cor1_bound": rep.cor1_bound,
                    "admissibility_residual": rep.admissibility_residual,
                    "thm4_value": thm4_defect(d_psi, rho.dim),
                    "thm5_bound": thm5_bound(d_psi, ratio),
                })
    if args.format == "json":
        _write_out(json.dumps({"rows": rows}, indent=2) + "\n", args.out)
    else:
        _write_out(_csv(_SWEEP_COLUMNS, rows), args.out)
    beating = sum(1 for r in rows if r["normalized_defect"] < 1.0)
    print(f"{beating} of {len(rows)} rows beat the random baseline "
          "(normalized defect < 1)", file=sys.stderr)
    return 0


def _hom_map(kind: str, source: FiniteGroup, target: FiniteGroup, seed):
    if kind == "balanced":
        return balanced_random_map(source, target, seed)
    if kind == "random":
        return random_map(source, target, seed)
    if kind == "identity":
        if group_hash(source) != group_hash(target):
            raise ValueError("identity maps need identical source and target")
        return make_group_map(source, target, np.arange(source.order))
    if kind == "genuine":
        if not (source.name.startswith("cyclic") and target.name.startswith("cyclic")):
            raise ValueError("genuine homs are built for cyclic -> cyclic only")
        if source.order % target.order:
            raise ValueError("genuine reduction needs |target| dividing |source|")
        image = 1 % target.order
        generator = 1 if source.order > 1 else 0
        return genuine_hom(source, target, {generator: image})
    raise ValueError(f"unknown map kind {kind!r}")


def cmd_hom(args) -> int:
    cache = _cache_dir(args)
    src = _group_from_spec(args.source, cache)
    tgt = _group_from_spec(args.target, cache)
    ts = _table_for(src, args.source, cache, args.seed)
    tt = _table_for(tgt, args.target, cache, args.seed)
    seeds = 1 if args.kind in ("identity", "genuine") else args.seeds
    rows = []
    for s in range(seeds):
        f = _hom_map(args.kind, src, tgt, args.seed + s)
        rep = evaluate(f, ts, tt)
        rows.append({
            "seed": args.seed + s,
            "agreement_prob": rep.agreement_prob,
            "collision_prob": rep.collision_prob,
            "epsilon": rep.epsilon,
            "thm2_bound": rep.thm2_bound,
            "thm2_sigma_dim": rep.thm2_sigma_dim,
            "thm3_bound": rep.thm3_bound,
            "r_h": rep.r_h,
        })
    max_agree = max(r["agreement_prob"] for r in rows)
    min_bound = min(min(r["thm2_bound"], r["thm3_bound"]) for r in rows)
    violated = any(
        r["agreement_prob"] > min(r["thm2_bound"], r["thm3_bound"]) + 1e-12
        for r in rows)
    summary = {
        "source": src.name,
        "target": tgt.name,
        "kind": args.kind,
        "max_agreement": max_agree,
        "min_bound": min_bound,
        "violated": violated,
    }
    if args.format == "json":
        _write_out(json.dumps({"rows": rows, "summary": summary}, indent=2) + "\n",
                   args.out)
    elif args.format == "csv":
        _write_out(_csv(_HOM_COLUMNS, rows), args.out)
    else:
        lines = [
            (f"seed={r['seed']} agreement={r['agreement_prob']:.6f} "
             f"epsilon={r['epsilon']:.6f} thm2={r['thm2_bound']:.6f} "
             f"thm3={r['thm3_bound']:.6f}")
            for r in rows
        ]
        verdict = "VIOLATED" if violated else "ok"
        lines.append(f"max agreement {max_agree:.6f} vs min bound "
                     f"{min_bound:.6f} [{verdict}]")
        _write_out("\n".join(lines) + "\n", args.out)
    return 1 if violated else 0


def cmd_twirl(args) -> int:
    exact = twirl_exact(args.d_rho, args.d_psi)
    payload = {"exact": exact.to_json_dict()}
    mc = None
    if args.samples:
        mc = twirl_monte_carlo(args.d_rho, args.d_psi, args.samples, args.seed)
        payload["monte_carlo"] = mc.to_json_dict()
        payload["max_abs_difference"] = max(
            abs(exact.coefficients[n] - mc.coefficients[n]) for n in CLASS_NAMES)
    if args.format == "json":
        _write_out(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    else:
        lines = [f"d_rho={args.d_rho} d_psi={args.d_psi}"]
        for name in CLASS_NAMES:
            line = f"  {name:10s} exact={exact.coefficients[name]:+.12e}"
            if mc is not None:
                line += (f" mc={mc.coefficients[name]:+.12e}"
                         f" stderr={mc.stderr[name]:.2e}")
            lines.append(line)
        _write_out("\n".join(lines) + "\n", args.out)
    return 0


def cmd_verify(args) -> int:
    stream = sys.stderr if args.format == "json" else sys.stdout
    manifest = run_battery(
        args.scope, seed=args.seed,
        progress=lambda r: print(r.summary_line(), file=stream, flush=True))
    if args.out is not None:
        _write_out(manifest.to_json(), args.out)
    elif args.format == "json":
        sys.stdout.write(manifest.to_json())
    if manifest.passed:
        return 0
    first = manifest.first_failure()
    print(f"first failing check: {first.check_id} ({first.description})",
          file=sys.stderr)
    for cmp_ in first.failures():
        print(f"  {cmp_.label}: measured {cmp_.measured:.12g} "
              f"{cmp_.relation} {cmp_.bound:.12g} failed", file=sys.stderr)
    if first.error:
        print(f"  error: {first.error}", file=sys.stderr)
    return 1


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="base seed; every randomized output derives from it")
    common.add_argument("--samples", type=int, default=None,
                        help="Monte Carlo sample count where applicable")
    common.add_argument("--tolerance", type=float, default=None,
                        help="override the entrywise agreement threshold")
    common.add_argument("--cache-dir", default=None,
                        help="cache directory (default $QUASIREP_CACHE or ./.quasirep)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="structured output format (default: plain text)")
    common.add_argument("--out", default=None,
                        help="write output to this path (atomic) instead of stdout")

    parser = argparse.ArgumentParser(
        prog="quasirep",
        description="Approximate representations of finite groups: build "
                    "groups and irrep tables, measure defects and agreement "
                    "bounds, extract twirl coefficients, run the check battery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("group", parents=[common],
                       help="build or load a group and print its summary")
    p.add_argument("spec", nargs="+",
                   help="family and parameters (e.g. 'alternating 5') or 'file <path>'")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("irreps", parents=[common],
                       help="decompose a group and print its irrep summary")
    p.add_argument("spec", nargs="+")
    p.set_defaults(func=cmd_irreps)

    p = sub.add_parser("sweep", parents=[common],
                       help="sweep a construction across compression dimensions")
    p.add_argument("--group", nargs="+", required=True)
    p.add_argument("--construction", choices=("minor", "polar"), default="minor")
    p.add_argument("--dpsi", required=True,
                   help="compression dimension or inclusive range a:b")
    p.add_argument("--rho-dim", type=int, default=None,
                   help="restrict to irreps of this dimension")
    p.add_argument("--seeds", type=int, default=1,
                   help="replicates per (irrep, d_psi) cell")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("hom", parents=[common],
                       help="evaluate maps between two groups against their ceilings")
    p.add_argument("--source", nargs="+", required=True)
    p.add_argument("--target", nargs="+", required=True)
    p.add_argument("--kind", choices=("balanced", "random", "identity", "genuine"),
                   default="balanced")
    p.add_argument("--seeds", type=int, default=10)
    p.set_defaults(func=cmd_hom)

    p = sub.add_parser("twirl", parents=[common],
                       help="fourth-moment twirl coefficients, exact and sampled")
    p.add_argument("--d-rho", type=int, required=True)
    p.add_argument("--d-psi", type=int, required=True)
    p.set_defaults(func=cmd_twirl)

    p = sub.add_parser("verify", parents=[common],
                       help="run the check battery and report a manifest")
    p.add_argument("scope", choices=("fast", "full"))
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QuasirepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
