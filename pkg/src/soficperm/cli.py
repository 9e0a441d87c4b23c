"""Command line runner.

Every subcommand builds an envelope ``{schema, kind, version, config, result}``
and writes it atomically (or prints it).  Census and rate tables can also be
written as CSV.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from multiprocessing.pool import ThreadPool
from pathlib import Path

import numpy as np

from . import __version__, limits
from .census import (Satisfied, count_cycle_commuting, count_hamming_ball, count_K, count_L,
                     count_near_commuting, count_s_ball, count_T)
from .convexity import convex_combine, cut, verify_decomposition
from .deamplify import deamplify
from .enumeration import DegreeOverLimit
from .expansion import (ExpansionCertificate, SamplingExhausted, boundary_sum, check_expander_exact,
                        refute_expander_sampled)
from .perm import GenTuple, Perm, coxeter, cycle, power
from .rates import expander_rate, freeness_rate
from .serialize import SCHEMA, atomic_write, dumps, load_perm, load_tuple, parse_rational
from .strange import TriesExhausted, build_strange_candidate, pick_far_expanders
from .words import BudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3

CENSUS_PROPS = ("5.12", "5.13", "3.5", "S", "L", "K", "T", "P5.11-rate", "T5.20-rate")
CSV_FIELDS = ("n", "parameter", "count", "bound", "verdict", "seconds")
RATE_FIELDS = ("table", "n", "parameter", "samples", "hits", "fraction", "mode", "seed", "seconds")


class ConfigError(ValueError):
    pass


def envelope(kind: str, config: dict, result) -> dict:
    return {"schema": SCHEMA, "kind": kind, "version": __version__, "config": config, "result": result}


def parse_degrees(text: str) -> list[int]:
    """``"4..8"``, ``"4,6,8"`` or a mix of both."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or any(n < 1 for n in out):
        raise ConfigError(f"bad degree list {text!r}")
    return out


def parse_rationals(text: str) -> list[Fraction]:
    try:
        return [parse_rational(p) for p in str(text).split(",") if p.strip()]
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def perm_spec(text: str, n: int, rng: np.random.Generator) -> Perm:
    """``a`` / ``cycle``, ``a^k``, ``reversal``, ``id``, ``random`` or an explicit JSON list."""
    text = text.strip()
    if text.startswith("["):
        return Perm(json.loads(text))
    base, _, exp = text.partition("^")
    if base in ("a", "cycle"):
        return power(cycle(n), int(exp or 1))
    if exp:
        raise ConfigError(f"exponent only allowed on the cycle: {text!r}")
    if base == "reversal":
        return Perm.reversal(n)
    if base in ("id", "identity"):
        return Perm.identity(n)
    if base == "random":
        return Perm(rng.permutation(n), check=False)
    raise ConfigError(f"unknown permutation {text!r}")


def _emit(args, text: str) -> None:
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _csv(rows, fields) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _config(args, *names) -> dict:
    return {k: getattr(args, k) for k in names}


# -- census -------------------------------------------------------------------

def census_reports(prop: str, degrees, params, b: str = "a", samples: int = 100, seed: int = 0,
                   radius: int = 3):
    rng = np.random.default_rng(seed)
    for n in degrees:
        for x in params:
            if prop == "5.12":
                yield count_hamming_ball(Perm.identity(n), x)
            elif prop == "5.13":
                yield count_cycle_commuting(n, x)
            elif prop == "3.5":
                yield count_near_commuting(perm_spec(b, n, rng), x)
            elif prop == "S":
                yield count_s_ball(perm_spec(b, n, rng), x)
            elif prop == "L":
                yield count_L(n, x)
            elif prop == "K":
                yield count_K(n, x)
            elif prop == "T":
                yield count_T(n, x)
            elif prop == "P5.11-rate":
                yield expander_rate(n, x, samples=samples, seed=seed)
            elif prop == "T5.20-rate":
                yield freeness_rate(n, radius=radius, target=x, samples=samples, seed=seed)
            else:
                raise ConfigError(f"unknown proposition {prop!r}")


def cmd_census(args) -> int:
    degrees = parse_degrees(args.n)
    params = parse_rationals(args.param)
    if not params:
        raise ConfigError("census needs --eps/--delta/--lambda")
    reports = list(census_reports(args.prop, degrees, params, args.b, args.samples, args.seed, args.radius))
    rate = args.prop.endswith("-rate")
    if args.format == "csv":
        _emit(args, _csv([r.csv_row() for r in reports], RATE_FIELDS if rate else CSV_FIELDS))
    else:
        config = _config(args, "prop", "n", "param", "b", "samples", "seed", "radius")
        _emit(args, dumps(envelope("rate" if rate else "census", config, [r.to_json() for r in reports])))
    if args.strict and any(getattr(r, "satisfied", None) is Satisfied.VIOLATED for r in reports):
        return EXIT_FAIL
    return EXIT_OK


# -- expander -----------------------------------------------------------------

def expander_tuple(args) -> GenTuple:
    if args.tuple:
        return load_tuple(args.tuple)
    if args.n is None:
        raise ConfigError("expander needs --n or --tuple")
    rng = np.random.default_rng(args.seed)
    return GenTuple([perm_spec(g, args.n, rng) for g in args.gens.split(",")])


def cmd_expander(args) -> int:
    t = expander_tuple(args)
    lam = parse_rational(args.lam)
    mode = args.mode
    if mode == "auto":
        mode = "exact" if t.n <= args.limit else "sampled"
    if mode == "exact":
        cert = check_expander_exact(t, lam, limit=args.limit)
    else:
        cert = refute_expander_sampled(t, lam, args.trials, args.seed)
    result = {"tuple": t, "certificate": cert,
              "witness_boundary": boundary_sum(t, cert.witness) if cert.witness else None}
    config = _config(args, "n", "gens", "tuple", "lam", "seed", "trials", "limit", "mode")
    _emit(args, dumps(envelope("expander", config, result)))
    if args.witness_out and cert.witness is not None:
        atomic_write(args.witness_out, dumps(cert.witness))
    return EXIT_OK


# -- deamplify ----------------------------------------------------------------

def _load_cert(path) -> ExpansionCertificate:
    obj = json.loads(Path(path).read_text())
    if obj.get("kind") == "expander":
        obj = obj["result"]["certificate"]
    return ExpansionCertificate.from_json(obj)


def cmd_deamplify(args) -> int:
    x, y, u = load_tuple(args.x), load_tuple(args.y), load_perm(args.u)
    cert = _load_cert(args.cert) if args.cert else None
    res = deamplify(x, y, u, parse_rational(args.lam), cert)
    result = {"x": x, "y": y, "u": u, "y_certificate": cert, "deamplify": res.to_json(args.verbose)}
    config = _config(args, "x", "y", "u", "lam", "cert", "verbose")
    _emit(args, dumps(envelope("deamplify", config, result)))
    return EXIT_OK


# -- convexity ----------------------------------------------------------------

def convexity_experiment(spec: dict) -> dict:
    tuples = [GenTuple.from_json(t) for t in spec["tuples"]]
    weights = [parse_rational(w) for w in spec["weights"]]
    scale = int(spec.get("scale", 1))
    comb = convex_combine(tuples, weights, scale)
    recovered = []
    for t, blk, copies in zip(tuples, comb.blocks, comb.copies):
        ok = verify_decomposition(comb.tuple, blk)
        first = cut(comb.tuple, copies[0]).restricted
        recovered.append({"block": blk, "trace": blk.trace(), "decomposes": ok,
                          "recovered_exactly": first == t, "copies": len(copies)})
    return {"combination": comb.tuple, "weights": weights, "multiplicity": comb.multiplicity,
            "scale": scale, "blocks": recovered}


def cmd_convexity(args) -> int:
    spec = json.loads(Path(args.experiment).read_text())
    for key in ("tuples", "weights"):
        if key not in spec:
            raise ConfigError(f"experiment file lacks {key!r}")
    result = convexity_experiment(spec)
    _emit(args, dumps(envelope("convexity", {"experiment": spec}, result)))
    return EXIT_OK


# -- strange / family ---------------------------------------------------------

def cmd_strange(args) -> int:
    delta = parse_rational(args.delta)
    cand = build_strange_candidate(args.n, delta, args.seed, args.t_tries, args.k_trials)
    config = _config(args, "n", "delta", "seed", "t_tries", "k_trials")
    _emit(args, dumps(envelope("strange", config, cand.to_json())))
    return EXIT_OK


def cmd_family(args) -> int:
    lam = parse_rational(args.lam)
    sep = parse_rational(args.separation) if args.separation else None
    fam = pick_far_expanders(args.n, args.k, lam, args.radius, args.seed, args.budget, sep)
    config = _config(args, "n", "k", "lam", "separation", "radius", "seed", "budget")
    _emit(args, dumps(envelope("family", config, fam.to_json())))
    return EXIT_OK if fam.complete else EXIT_BUDGET


# -- verify -------------------------------------------------------------------

def cmd_verify(args) -> int:
    from .verify import verify_file

    status = EXIT_OK
    for path in args.paths:
        report = verify_file(path)
        print(f"{'OK  ' if report.ok else 'FAIL'} {path} ({report.kind})")
        for name, ok, detail in report.checks:
            if not ok or args.verbose:
                print(f"    {'ok' if ok else 'FAILED'}: {name} {detail}")
        if not report.ok:
            status = EXIT_FAIL
    return status


# -- bench --------------------------------------------------------------------

def _timed(fn):
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def cmd_bench(args) -> int:
    jobs = {
        "coxeter cycle+reversal n=2..10^4": lambda: [
            (coxeter(cycle(n)), coxeter(Perm.reversal(n))) for n in range(2, 10_001)],
        "hamming ball n=8": lambda: count_hamming_ball(Perm.identity(8), Fraction(6, 10)),
        "cycle commuting n=9": lambda: count_cycle_commuting(9, Fraction(3, 10)),
        "exact expander n=20": lambda: check_expander_exact(GenTuple([cycle(20)]), Fraction(1, 10)),
        "K set n=6 delta=1/44": lambda: count_K(6, Fraction(1, 44)),
        "strange n=60 delta=1/3": lambda: build_strange_candidate(60, Fraction(1, 3)),
    }
    rows = []
    for name, fn in jobs.items():
        best = min(_timed(fn) for _ in range(args.repeat))
        rows.append({"job": name, "seconds": f"{best:.4f}", "repeat": args.repeat})
    _emit(args, _csv(rows, ("job", "seconds", "repeat")))
    return EXIT_OK


# -- run ----------------------------------------------------------------------

def _argv(item: dict) -> list[str]:
    if "command" not in item:
        raise ConfigError("experiment item lacks 'command'")
    argv = [str(item["command"])]
    for key, value in item.get("args", {}).items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif value is False or value is None:
            continue
        else:
            argv += [flag, str(value)]
    if item.get("out"):
        argv += ["--out", str(item["out"])]
    return argv


def cmd_run(args) -> int:
    spec = json.loads(Path(args.config).read_text())
    items = spec.get("experiments", []) if isinstance(spec, dict) else spec
    if not isinstance(items, list):
        raise ConfigError("'experiments' must be a list")
    argvs = [_argv(it) for it in items]
    if any(a[0] in ("run",) for a in argvs):
        raise ConfigError("nested run is not allowed")
    if not argvs:
        return EXIT_OK
    with ThreadPool(max(1, min(limits.threads(), len(argvs)))) as pool:
        codes = pool.map(main, argvs)
    return max(codes)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soficperm", description="Finite permutation experiments.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def out(p):
        p.add_argument("--out", help="write here (atomically) instead of stdout")

    p = sub.add_parser("census", help="exhaustive counts against the stated bounds")
    p.add_argument("--prop", required=True, choices=CENSUS_PROPS)
    p.add_argument("--n", required=True, help="degrees, e.g. 4..8 or 4,6")
    p.add_argument("--eps", "--delta", "--lambda", "--target", dest="param", default="",
                   help="comma separated p/q values")
    p.add_argument("--b", default="a", help="fixed permutation for 3.5 and S (a, a^k, id, random, [..])")
    p.add_argument("--samples", type=int, default=100, help="rate tables only")
    p.add_argument("--radius", type=int, default=3, help="T5.20-rate word radius")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--strict", action="store_true", help="exit 1 on any VIOLATED verdict")
    out(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("expander", help="exact check or sampled refutation of expansion")
    p.add_argument("--n", type=int)
    p.add_argument("--gens", default="cycle", help="comma separated: cycle, cycle^k, reversal, id, random")
    p.add_argument("--tuple", help="tuple JSON file instead of --n/--gens")
    p.add_argument("--lambda", dest="lam", default="1/10")
    p.add_argument("--mode", choices=("auto", "exact", "sampled"), default="auto")
    p.add_argument("--limit", type=int, default=limits.EXPANDER_EXACT)
    p.add_argument("--trials", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness-out")
    out(p)
    p.set_defaults(func=cmd_expander)

    p = sub.add_parser("deamplify", help="round an amplified intertwiner down")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--u", required=True)
    p.add_argument("--lambda", dest="lam", default="1/10")
    p.add_argument("--cert", help="expander artifact or certificate for y")
    p.add_argument("--verbose", action="store_true", help="include block-defect matrices")
    out(p)
    p.set_defaults(func=cmd_deamplify)

    p = sub.add_parser("convexity", help="convex combination and cut round trip")
    p.add_argument("--experiment", required=True)
    out(p)
    p.set_defaults(func=cmd_convexity)

    p = sub.add_parser("strange", help="block-diagonal K/T candidate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-tries", type=int, default=100)
    p.add_argument("--k-trials", type=int, default=10_000)
    out(p)
    p.set_defaults(func=cmd_strange)

    p = sub.add_parser("family", help="pairwise far expander pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", default="1/10")
    p.add_argument("--separation", help="d_S threshold (defaults to lambda)")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=200)
    out(p)
    p.set_defaults(func=cmd_family)

    p = sub.add_parser("verify", help="re-validate emitted artifacts")
    p.add_argument("paths", nargs="+")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time the main kernels")
    p.add_argument("--repeat", type=int, default=1)
    out(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("run", help="run a JSON list of experiments")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (BudgetExceeded, DegreeOverLimit, TriesExhausted, SamplingExhausted) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError, TypeError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
