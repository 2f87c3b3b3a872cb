"""Command-line front end.

Every command writes JSON lines to stdout (or ``--out``).  Rationals are
``"p/q"`` strings, each paired with a decimal rendering.  Exit codes:
0 success, 1 inequality violation, 2 usage error, 3 resource-cap refusal.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import boxes, measure, percolation, scenarios, verify
from .space import Alphabet, CapacityError, Event, ProductSpace, mask_members, parse_rational

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

SCENARIO_KEYS = {"name", "space", "events", "thresholds", "generator", "params"}


class UsageError(Exception):
    pass


def rational(x: Fraction) -> dict:
    return {"value": str(x), "decimal": f"{float(x):.12g}"}


def load_scenario_file(path: str) -> scenarios.Scenario:
    """Read a scenario from JSON.

    Either ``{"generator": name, "params": {...}}`` or an explicit
    ``{"space": {"alphabets": [{"weights": [...], "labels": [...]}]},
    "events": {"A": [[...], ...], "B": [...]}}``; ``thresholds`` may add
    ``s``, ``t`` and ``r`` defaults.  Unknown keys are rejected.
    """
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise UsageError("scenario file must hold a JSON object")
    unknown = set(data) - SCENARIO_KEYS
    if unknown:
        raise UsageError(f"unknown scenario fields: {sorted(unknown)}")
    if "generator" in data:
        if "space" in data or "events" in data:
            raise UsageError("give either a generator or an explicit space, not both")
        sc = scenarios.generator(data["generator"], **data.get("params", {}))
    else:
        try:
            alphabets = []
            for a in data["space"]["alphabets"]:
                extra = set(a) - {"weights", "labels"}
                if extra:
                    raise UsageError(f"unknown alphabet fields: {sorted(extra)}")
                alphabets.append(Alphabet(tuple(parse_rational(w) for w in a["weights"]),
                                          a.get("labels")))
            if set(data["space"]) - {"alphabets"}:
                raise UsageError("unknown space fields")
            space = ProductSpace(alphabets)
            events = {k: space.event(tuple(o) if isinstance(o, list) else o for o in v)
                      for k, v in data["events"].items()}
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed scenario: {exc}") from exc
        sc = scenarios.Scenario(data.get("name", path), space, events)
    for k, v in data.get("thresholds", {}).items():
        if k not in ("s", "t", "r"):
            raise UsageError(f"unknown threshold {k!r}")
        sc.thresholds[k] = parse_rational(v)
    return sc


def _scenario(args) -> scenarios.Scenario:
    if args.scenario_file:
        return load_scenario_file(args.scenario_file)
    if not args.scenario:
        raise UsageError("give --scenario NAME or --scenario-file PATH")
    params = {"m": args.m} if args.scenario == "coin" else {}
    return scenarios.generator(args.scenario, **params)


def _parse_outcome(space: ProductSpace, text: str):
    if "," in text or text.isdigit() and all(a.labels is None for a in space.alphabets):
        return tuple(int(v) for v in text.split(","))
    if len(text) != space.n:
        raise UsageError(f"outcome {text!r} must have {space.n} symbols")
    try:
        return tuple(a.labels.index(ch) for a, ch in zip(space.alphabets, text))
    except (AttributeError, ValueError):
        raise UsageError(f"cannot parse outcome {text!r}") from None


def _event_record(space: ProductSpace, E: Event, limit: int, probes) -> dict:
    idx = E.indices()
    rec = {
        "count": int(idx.size),
        "prob": rational(E.prob()),
        "members": [space.label(space.decode(int(i))) for i in idx[:limit]],
        "members_truncated": bool(idx.size > limit),
    }
    if probes:
        rec["probes"] = {p: _parse_outcome(space, p) in E for p in probes}
    return rec


def _ineq_record(r: verify.InequalityReport) -> dict:
    rec = {"name": r.name, "lhs": rational(r.lhs), "rhs": rational(r.rhs), "holds": r.holds,
           "excess_multiple": None if r.excess_multiple is None else rational(r.excess_multiple),
           "instance_digest": r.instance_digest}
    if r.notes:
        rec["notes"] = list(r.notes)
    return rec


def _base(args, sc: scenarios.Scenario, operation: dict) -> dict:
    return {
        "operation": operation,
        "scenario": sc.name,
        "scenario_notes": sc.notes,
        "space": {"sizes": list(sc.space.sizes), "outcome_count": sc.space.outcome_count,
                  "weights": [[str(w) for w in a.weights] for a in sc.space.alphabets]},
        "events": {k: {"count": len(e), "prob": rational(e.prob())} for k, e in sc.events.items()},
    }


def _threshold(args, sc, name: str) -> Fraction:
    value = getattr(args, name)
    if value is None:
        if name not in sc.thresholds:
            raise UsageError(f"--{name} is required for scenario {sc.name}")
        return sc.thresholds[name]
    return parse_rational(value)


def cmd_box(args, sc):
    A, B = sc.A, sc.B
    box = boxes.classical_box(A, B)
    rep = _base(args, sc, {"command": "box"})
    rep["result"] = _event_record(sc.space, box, args.members, args.contains)
    idx = box.indices()
    if idx.size:
        w = boxes.find_witness(A, B, int(idx[0]))
        rep["witness"] = {"outcome": sc.space.label(sc.space.decode(w.outcome)),
                          "K": list(mask_members(w.K)), "L": list(mask_members(w.L))}
    rep["inequalities"] = [_ineq_record(verify.check_bkr(A, B))]
    return rep, []


def cmd_eleven(args, sc):
    A, B = sc.A, sc.B
    res = measure.eleven_box(A, B, complementary=args.complementary)
    rep = _base(args, sc, {"command": "eleven", "complementary": args.complementary})
    rep["result"] = _event_record(sc.space, res, args.members, args.contains)
    rep["result"]["inside_intersection"] = res <= (A & B)
    rep["inequalities"] = [_ineq_record(verify.check_eleven(A, B))]
    return rep, []


def cmd_stbox(args, sc):
    s, t = _threshold(args, sc, "s"), _threshold(args, sc, "t")
    A, B = sc.A, sc.B
    op = measure.st_box_complementary if args.complementary else measure.st_box
    res = op(A, B, (s, t))
    rep = _base(args, sc, {"command": "stbox", "s": str(s), "t": str(t),
                           "complementary": args.complementary})
    rep["result"] = _event_record(sc.space, res, args.members, args.contains)
    reports = [r for r in verify.check_st_bounds(A, B, (s, t)) if r is not None]
    rep["inequalities"] = [_ineq_record(r) for r in reports]
    rep["inflated"] = {"A": rational(measure.inflate(A, s).prob()),
                       "B": rational(measure.inflate(B, t).prob())}
    return rep, reports


def cmd_core(args, sc):
    A = sc.A
    c = boxes.core(A)
    oracle = verify.oracle_core(A)
    rep = _base(args, sc, {"command": "core"})
    rep["result"] = _event_record(sc.space, c, args.members, args.contains)
    gap = A.prob() - c.prob()
    rep["gap"] = rational(gap)
    rep["removed_count"] = len(A) - len(c)
    rep["oracle_agrees"] = c == oracle
    if "crossing" in sc.events:
        rep["core_equals_crossing"] = c == sc.events["crossing"]
    claim = sc.notes.get("claimed_gap")
    if claim is not None:
        rep["claimed_gap"] = rational(Fraction(claim))
        rep["gap_matches_claim"] = gap == Fraction(claim)
    return rep, []


def cmd_inflate(args, sc):
    r = _threshold(args, sc, "r")
    rep = _base(args, sc, {"command": "inflate", "r": str(r)})
    rep["result"] = {}
    for name in ("A", "B"):
        if name in sc.events:
            rep["result"][name] = _event_record(sc.space, measure.inflate(sc.events[name], r),
                                                args.members, args.contains)
    return rep, []


def cmd_verify(args, out):
    seeds = range(args.seed_start, args.seed_start + args.seeds)
    try:
        results = verify.run_suite(args.suite, seeds)
    except verify.InequalityViolation as exc:
        _emit(out, {"suite": args.suite, "violation": _ineq_record(exc.report),
                    "instance": exc.instance})
        return EXIT_VIOLATION
    checks = 0
    for res in results:
        checks += len(res.reports)
        _emit(out, {"suite": res.suite, "seed": res.seed, "digest": res.digest,
                    "reports": [_ineq_record(r) for r in res.reports]})
    _emit(out, {"suite": args.suite, "instances": len(results), "checks": checks,
                "violations": 0})
    return EXIT_OK


def cmd_perc(args, out):
    summary = percolation.mc_experiment(args.n, args.r, args.q, args.replicates, args.seed,
                                        norm=args.norm)
    rec = summary.as_dict()
    rec["bkr_consistent"] = (summary.witness.value
                             <= summary.p_A.value * summary.p_B.value + 3 * summary.bkr_sigma)
    if args.q > 0:
        try:
            cfg = percolation.GeometricConfig(
                percolation.substream(args.seed).random((args.n, 2)), args.r, args.q, args.norm)
            rec["threshold"] = float(percolation.annihilation_threshold(cfg))
        except ValueError as exc:
            rec["threshold_refused"] = str(exc)
    _emit(out, rec)
    return EXIT_OK


SCENARIO_COMMANDS = {"box": cmd_box, "eleven": cmd_eleven, "stbox": cmd_stbox,
                     "core": cmd_core, "inflate": cmd_inflate}


def _emit(out, record: dict):
    out.write(json.dumps(record, sort_keys=True, separators=(",", ":"), default=str) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boxkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", choices=sorted(scenarios.GENERATORS))
    common.add_argument("--scenario-file", metavar="PATH")
    common.add_argument("--m", type=int, default=1, help="coin scenario size")
    common.add_argument("--members", type=int, default=256, help="max members listed")
    common.add_argument("--contains", action="append", default=[], metavar="OUTCOME",
                        help="report membership of an outcome (labels or comma list)")
    common.add_argument("--timing", action="store_true", help="add wall-clock timing")
    common.add_argument("--out", metavar="PATH")

    sub.add_parser("box", parents=[common], help="classical box A box B")
    p = sub.add_parser("eleven", parents=[common], help="measure-aware 11-box")
    p.add_argument("--complementary", action="store_true")
    p = sub.add_parser("stbox", parents=[common], help="lenient st-box")
    p.add_argument("--s")
    p.add_argument("--t")
    p.add_argument("--complementary", action="store_true")
    sub.add_parser("core", parents=[common], help="cylindrical core of A")
    p = sub.add_parser("inflate", parents=[common], help="r-inflated sets")
    p.add_argument("--r")

    p = sub.add_parser("verify", help="seeded inequality suites")
    p.add_argument("--suite", choices=verify.SUITES, required=True)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--seed-start", type=int, default=0)
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("perc", help="continuum percolation Monte Carlo")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--norm", choices=sorted(percolation.NORMS), default="linf")
    p.add_argument("--replicates", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    out = open(args.out, "w") if getattr(args, "out", None) else stdout
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        if args.command == "perc":
            return cmd_perc(args, out)
        started = time.perf_counter()
        sc = _scenario(args)
        rep, reports = SCENARIO_COMMANDS[args.command](args, sc)
        if args.timing:
            rep["timing_seconds"] = round(time.perf_counter() - started, 6)
        _emit(out, rep)
        if any(not r.holds for r in reports) or any(
                not i["holds"] for i in rep.get("inequalities", [])):
            return EXIT_VIOLATION
        return EXIT_OK
    except CapacityError as exc:
        print(f"boxkit: refused: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, ValueError, OSError) as exc:
        print(f"boxkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AssertionError as exc:
        print(f"boxkit: engine defect: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    finally:
        if out is not stdout:
            out.close()


def main():
    sys.exit(run())
