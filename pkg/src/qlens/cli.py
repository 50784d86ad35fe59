"""Command line entry point.

Weight vectors are given as `r m1 m2 ...`; commands comparing two vectors
take the second after a `--` separator, e.g. `qlens decide 5 1 3 -- 2 3`.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .explore import (compare_conditions, decide_d3, decide_d5_prime, extract_pattern,
                      pattern_in_language, reports_to_csv, search_pairs, SearchTruncated)
from .graphs import (WeightVector, build_poset0, build_skew_product, build_truncated_translation,
                     export_dot, ideal_invariant)
from .paths import multiset_wbar
from .residue import PreconditionError, is_prime
from .solver import exhaustive_dq_search, order_diagnostic, solve_condition_vii, check_dq1_witness

CONFIG_KEYS = {"budget": int, "workers": int, "extended_budget": int}
ENV_PREFIX = "QLENS_"


def load_settings(config_path: str | None, env=None) -> dict:
    """Defaults from a key=value file, then QLENS_* environment variables."""
    env = os.environ if env is None else env
    out = {"budget": None, "workers": 1, "extended_budget": None}
    path = config_path or env.get(ENV_PREFIX + "CONFIG")
    if path:
        p = Path(path)
        if not p.is_file():
            raise PreconditionError(f"config file not found: {path}")
        for lineno, line in enumerate(p.read_text().splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            if not sep or key not in CONFIG_KEYS:
                raise PreconditionError(f"{path}:{lineno}: expected one of {sorted(CONFIG_KEYS)} as key=value")
            out[key] = CONFIG_KEYS[key](val.strip())
    for key, typ in CONFIG_KEYS.items():
        if ENV_PREFIX + key.upper() in env:
            out[key] = typ(env[ENV_PREFIX + key.upper()])
    return out


def _split_second_vector(argv: list[str]) -> list[str]:
    # `... m1 m2 -- n1 n2 --flag` -> `... m1 m2 --vs n1 n2 --flag`
    if "--" not in argv:
        return argv
    i = argv.index("--")
    j = i + 1
    while j < len(argv) and argv[j].lstrip("-").isdigit() and not argv[j].startswith("--"):
        j += 1
    return argv[:i] + ["--vs"] + argv[i + 1:j] + argv[j:]


def _weights(args) -> WeightVector:
    return WeightVector(args.r, tuple(args.m))


def _pair(args) -> tuple[WeightVector, WeightVector]:
    if not args.vs:
        raise PreconditionError("second weight vector missing (give it after --)")
    return WeightVector(args.r, tuple(args.m)), WeightVector(args.r, tuple(args.vs))


def cmd_invariants(args, settings):
    w = _weights(args)
    wbar = multiset_wbar(w)
    if args.json:
        print(json.dumps({"weights": w.to_json(), "gcd_chain": list(ideal_invariant(w)),
                          "wbar": wbar.to_json()["pairs"]}))
        return
    print(f"weights  {w}")
    print(f"gcd chain {' '.join(map(str, ideal_invariant(w)))}")
    print("W-bar counts by residue " + " ".join(f"{i:>3}" for i in range(w.r)))
    for (s, t), c in sorted(wbar.counts.items()):
        print(f"  pair ({s},{t})            " + " ".join(f"{v:>3}" for v in c))


def cmd_decide(args, settings):
    m, n = _pair(args)
    if m.k == 1:
        v = decide_d3(m, n)
        out = {"scope": "d=3", "equivalent": v.equivalent, "gcds": list(v.gcds),
               "certificate": v.certificate}
    elif m.k == 2 and is_prime(m.r):
        out = {"scope": "d=5, r prime", "equivalent": decide_d5_prime(m, n)}
    else:
        rep = compare_conditions(m, n, extended_budget=settings["extended_budget"])
        out = {"scope": "conditions only", "report": json.loads(rep.to_json())}
    print(json.dumps(out))


def cmd_solve_h(args, settings):
    m, n = _pair(args)
    if args.extended:
        sr = exhaustive_dq_search(m, n, budget=settings["budget"], dq1=args.dq1,
                                  workers=settings["workers"])
        out = sr.result.to_json()
        out.update({"mode": "extended-" + ("II" if args.dq1 else "IV"),
                    "examined": sr.examined, "truncated": sr.truncated, "log": sr.log})
        H = sr.result.H
    else:
        res = solve_condition_vii(m, n)
        out = res.to_json()
        out["mode"] = "VII"
        H = res.H
    if H is not None:
        out["dq1_witness"] = check_dq1_witness(H)
        if args.diagnostic:
            out["order_diagnostic"] = order_diagnostic(H, m, n)
    print(json.dumps(out))


def cmd_search(args, settings):
    conds = tuple(c.strip().lower() for c in args.conditions.split(",") if c.strip())
    bad = set(conds) - {"v", "vi", "vii"}
    if bad:
        raise PreconditionError(f"unknown conditions {sorted(bad)}")
    reports, trunc = [], None
    for item in search_pairs(args.r, args.k, conds, budget=settings["budget"],
                             workers=settings["workers"], extended_budget=settings["extended_budget"]):
        if isinstance(item, SearchTruncated):
            trunc = item
        else:
            reports.append(item)
    lines = [rep.to_json() for rep in reports] + ([trunc.to_json()] if trunc else [])
    if args.jsonl:
        Path(args.jsonl).write_text("".join(x + "\n" for x in lines))
    else:
        for x in lines:
            print(x)
    if args.csv:
        Path(args.csv).write_text(reports_to_csv(reports))
    logging.getLogger(__name__).info("%d reports", len(reports))


def cmd_pattern(args, settings):
    m, n = _pair(args)
    p = extract_pattern(m.normalized(), n.normalized())
    print(json.dumps({"pattern": p, "in_language": pattern_in_language(p, m.r)}))


def cmd_export_dot(args, settings):
    w = _weights(args)
    if args.graph == "skew":
        obj = build_skew_product(w)
    elif args.graph == "f":
        obj = build_truncated_translation(w, args.depth)
    else:
        obj = build_poset0(w)
    sys.stdout.write(export_dot(obj))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qlens", description=__doc__.splitlines()[0])
    ap.add_argument("--config", help="key=value file with budget, workers, extended_budget")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def weights(p, pair=False):
        p.add_argument("r", type=int)
        p.add_argument("m", type=int, nargs="+")
        if pair:
            p.add_argument("--vs", type=int, nargs="+", help=argparse.SUPPRESS)

    p = sub.add_parser("invariants", help="gcd chain and W-bar tables")
    weights(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("decide", help="theorem-backed verdict, else a condition report")
    weights(p, True)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("solve-h", help="look for an intertwiner H")
    weights(p, True)
    p.add_argument("--extended", action="store_true", help="search all shift tuples")
    p.add_argument("--dq1", action="store_true", help="impose the unit-class constraint")
    p.add_argument("--budget", type=int, help="max shift tuples to examine")
    p.add_argument("--workers", type=int)
    p.add_argument("--diagnostic", action="store_true", help="cone check of H and its inverse")
    p.set_defaults(func=cmd_solve_h)

    p = sub.add_parser("search", help="all normalized pairs for given r and k")
    p.add_argument("r", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--conditions", default="v,vi,vii")
    p.add_argument("--jsonl")
    p.add_argument("--csv")
    p.add_argument("--budget", type=int, help="max pairs to evaluate")
    p.add_argument("--workers", type=int)
    p.add_argument("--extended-budget", type=int, dest="extended_budget")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("pattern", help="window pattern of a (VII) pair")
    weights(p, True)
    p.set_defaults(func=cmd_pattern)

    p = sub.add_parser("export-dot", help="DOT text of a graph or poset")
    weights(p)
    p.add_argument("--graph", choices=["skew", "f", "hasse"], default="skew")
    p.add_argument("--depth", type=int)
    p.set_defaults(func=cmd_export_dot)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(_split_second_vector(argv))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args.config)
        for key in CONFIG_KEYS:
            if getattr(args, key, None) is not None:
                settings[key] = getattr(args, key)
        args.func(args, settings)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
