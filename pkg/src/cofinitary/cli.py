"""Command line front end.

Every command is a pure function of its configuration: reruns write
byte-identical reports.  stdout carries nothing but the report path; human
diagnostics go to stderr.  Exit codes: 0 all contracts hold, 1 contract
violation, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .builder import BuildError, build, build_variant_family, verify_cofinitary, verify_variant
from .evaluation import EMPTY_GROUND, zshift
from .extension import CertificateError, ContractViolation, hit_search, hit_threshold, NOT_FOUND
from .poset import PosetMode
from .sampling import sample_condition
from .suslin import ffp_axiom_suite, n_suslin_trial
from .templates import (
    SurrogateParams,
    TemplateOrder,
    build_surrogate_template,
    check_axioms,
    interval_of,
    rank,
    template_from_parts,
)

REPORT_DIR_ENV = "COFINITARY_REPORT_DIR"

OK, VIOLATION, USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


def _report_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    base = Path(os.environ.get(REPORT_DIR_ENV, "."))
    return base / default_name


def _write_report(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    blob = json.dumps(payload, sort_keys=True, indent=1).encode() + b"\n"
    path.write_bytes(blob)
    print(path)


def _positive(value: str) -> int:
    n = int(value)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return n


def _mode(value: str) -> PosetMode:
    try:
        return PosetMode(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown mode {value!r}")


def cmd_build_group(args) -> int:
    mode = args.mode
    gens = list(range(args.generators))
    try:
        if mode is PosetMode.COFINITARY:
            report = build(
                mode,
                gens,
                EMPTY_GROUND,
                point_budget=args.points,
                word_budget=args.max_word_len,
                seed=args.seed,
                value_ceiling=args.ceiling,
            )
            violations = verify_cofinitary(report, EMPTY_GROUND)
        else:
            report = build_variant_family(
                mode, gens, args.points, seed=args.seed, value_ceiling=args.ceiling
            )
            violations = verify_variant(report)
    except BuildError as err:
        print(f"build aborted: {err}", file=sys.stderr)
        return VIOLATION
    payload = report.to_json()
    payload["violations"] = violations
    path = _report_path(args, f"build-{mode.value}-{args.seed}.json")
    _write_report(path, payload)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return VIOLATION
    return OK


def _load_template_file(path: str) -> TemplateOrder:
    obj = json.loads(Path(path).read_text())
    elements = list(range(len(obj["elements"])))
    names = {name: i for i, name in enumerate(obj["elements"])}
    less = [(names[a], names[b]) for a, b in obj["less"]]
    ideals = [[names[x] for x in a] for a in obj["I"]]
    part0 = [names[x] for x in obj["L0"]]
    part1 = [names[x] for x in obj["L1"]]
    t = template_from_parts(elements, less, ideals, part0, part1)
    return TemplateOrder(
        t.elements, t.order_key, t.ideals, t.part0, t.part1,
        {i: name for name, i in names.items()},
    )


def cmd_template(args) -> int:
    if args.template_file:
        try:
            t = _load_template_file(args.template_file)
        except (KeyError, ValueError, json.JSONDecodeError) as err:
            raise ConfigError(f"bad template file: {err}")
        violations = check_axioms(t)
        payload = {
            "schema": "1",
            "source": "file",
            "elements": len(t.elements),
            "axioms": [
                {"clause": v.clause, "detail": v.detail} for v in violations
            ],
        }
        if not violations:
            payload["rank"] = rank(t)
        path = _report_path(args, "template-file.json")
        _write_report(path, payload)
        if violations:
            for v in violations:
                print(f"clause {v.clause}: {v.detail}", file=sys.stderr)
            return VIOLATION
        return OK
    sizes = tuple(int(x) for x in args.lambdas.split(","))
    params = SurrogateParams(
        sizes, args.omega1, element_cap=args.cap, last_negative_full=not args.bounded_last
    )
    surrogate = build_surrogate_template(params)
    t = surrogate.order
    violations = check_axioms(t)
    nesting = _check_interval_nesting(surrogate)
    payload = {
        "schema": "1",
        "source": "surrogate",
        "lambdas": list(sizes),
        "omega1": args.omega1,
        "seed": args.seed,
        "elements": len(t.elements),
        "family_size": len(t.ideals),
        "family_atoms": sorted(surrogate.atom_provenance),
        "relevant": len(surrogate.relevant_ids),
        "axioms": [{"clause": v.clause, "detail": v.detail} for v in violations],
        "interval_nesting_failures": nesting,
    }
    if not violations:
        payload["rank"] = rank(t)
    path = _report_path(args, f"template-{args.lambdas}-{args.omega1}.json")
    _write_report(path, payload)
    if violations or nesting:
        for v in violations:
            print(f"clause {v.clause}: {v.detail}", file=sys.stderr)
        if nesting:
            print(f"{nesting} interval nesting failures", file=sys.stderr)
        return VIOLATION
    return OK


def _check_interval_nesting(surrogate) -> int:
    ids = sorted(surrogate.relevant_ids)
    intervals = {i: interval_of(surrogate.positions[i], surrogate.positions) for i in ids}
    bad = 0
    for i in ids:
        for j in ids:
            if i == j:
                continue
            a, b = intervals[i], intervals[j]
            if i < j and a & b and not (a <= b or b <= a):
                bad += 1
            if a < b:
                pi, pj = surrogate.positions[i], surrogate.positions[j]
                if len(pj.seq) > len(pi.seq):
                    bad += 1
                elif pi.seq[: len(pj.seq) - 1] != pj.seq[: len(pj.seq) - 1]:
                    bad += 1
    return bad


def cmd_suslin(args) -> int:
    report = n_suslin_trial(args.poset, args.n, args.samples, args.seed)
    path = _report_path(args, f"suslin-{args.poset}-{args.n}-{args.seed}.json")
    _write_report(path, report.to_json())
    expected_zero = (args.poset, args.n) in (("hechler", 1), ("loc", 2)) or args.n > 2
    if expected_zero and report.failures:
        print(f"{report.failures} failures out of {args.samples}", file=sys.stderr)
        return VIOLATION
    return OK


def cmd_ffp_suite(args) -> int:
    results = ffp_axiom_suite(args.mode, args.samples, args.seed)
    payload = {
        "schema": "1",
        "mode": args.mode.value,
        "samples": args.samples,
        "seed": args.seed,
        "clauses": [r.to_json() for r in results],
    }
    path = _report_path(args, f"ffp-{args.mode.value}-{args.seed}.json")
    _write_report(path, payload)
    failed = [r for r in results if not r.passed]
    for r in failed:
        print(f"{r.name}: {r.witness}", file=sys.stderr)
    return VIOLATION if failed else OK


def cmd_hit_density(args) -> int:
    import random

    sigma = zshift()
    rng = random.Random(args.seed)
    misses = []
    records = []
    for k in range(args.samples):
        cond = sample_condition(
            rng,
            PosetMode.COFINITARY,
            list(range(args.generators)),
            max_words=args.words,
            word_len=min(3, args.words),
        )
        gen = rng.randrange(args.generators)
        threshold = hit_threshold(cond, gen, sigma)
        for start in range(args.max_n + 1):
            hit = hit_search(cond, gen, sigma, start, args.window)
            if hit is NOT_FOUND:
                misses.append({"sample": k, "start": start})
        records.append(
            {
                "sample": k,
                "generator": f"g{gen}",
                "pairs": sum(len(pm) for pm in cond.s.table.values()),
                "words": len(cond.words),
                "threshold": threshold,
            }
        )
    payload = {
        "schema": "1",
        "samples": args.samples,
        "max_n": args.max_n,
        "window": args.window,
        "seed": args.seed,
        "misses": misses,
        "conditions": records,
    }
    path = _report_path(args, f"hit-density-{args.seed}.json")
    _write_report(path, payload)
    if misses:
        print(f"{len(misses)} searches found no hit", file=sys.stderr)
        return VIOLATION
    return OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cofinitary")
    sub = parser.add_subparsers(dest="command", required=True)

    bg = sub.add_parser("build-group", help="run a greedy family build and verify it")
    bg.add_argument("--mode", type=_mode, default=PosetMode.COFINITARY)
    bg.add_argument("--generators", type=_positive, required=True)
    bg.add_argument("--points", type=_positive, required=True)
    bg.add_argument("--max-word-len", type=_positive, default=3)
    bg.add_argument("--seed", type=int, required=True)
    bg.add_argument("--ceiling", type=int, default=None)
    bg.add_argument("--out", default=None)
    bg.add_argument("--csv", default=None)
    bg.set_defaults(func=cmd_build_group)

    tp = sub.add_parser("template", help="build a surrogate template and check the axioms")
    tp.add_argument("--lambdas", default="2,3")
    tp.add_argument("--omega1", type=_positive, default=2)
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--cap", type=_positive, default=5000)
    tp.add_argument("--bounded-last", action="store_true")
    tp.add_argument("--template-file", default=None)
    tp.add_argument("--out", default=None)
    tp.set_defaults(func=cmd_template)

    su = sub.add_parser("suslin", help="run n-compatibility trials")
    su.add_argument("--poset", choices=["hechler", "loc"], required=True)
    su.add_argument("--n", type=_positive, required=True)
    su.add_argument("--samples", type=_positive, required=True)
    su.add_argument("--seed", type=int, required=True)
    su.add_argument("--out", default=None)
    su.set_defaults(func=cmd_suslin)

    ff = sub.add_parser("ffp-suite", help="run the finite function poset axiom suite")
    ff.add_argument("--mode", type=_mode, required=True)
    ff.add_argument("--samples", type=_positive, required=True)
    ff.add_argument("--seed", type=int, required=True)
    ff.add_argument("--out", default=None)
    ff.set_defaults(func=cmd_ffp_suite)

    hd = sub.add_parser("hit-density", help="check hitting-extension density")
    hd.add_argument("--generators", type=_positive, required=True)
    hd.add_argument("--words", type=_positive, default=4)
    hd.add_argument("--maxN", dest="max_n", type=int, required=True)
    hd.add_argument("--window", type=_positive, required=True)
    hd.add_argument("--samples", type=_positive, default=100)
    hd.add_argument("--seed", type=int, required=True)
    hd.add_argument("--out", default=None)
    hd.set_defaults(func=cmd_hit_density)

    for p in (bg, tp, su, ff, hd):
        p.add_argument("--config", default=None, help="JSON file of defaults; flags win")
    return parser


def _apply_config(argv: Sequence[str], parser: argparse.ArgumentParser):
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            defaults = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"bad config file: {err}")
        given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
        for key, value in defaults.items():
            attr = key.replace("-", "_")
            if not hasattr(args, attr):
                raise ConfigError(f"unknown config key {key!r}")
            if attr not in given:
                if attr == "mode":
                    value = PosetMode(value)
                setattr(args, attr, value)
    return args


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = _apply_config(list(argv) if argv is not None else sys.argv[1:], parser)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return USAGE
    except SystemExit as err:  # argparse reports usage errors with code 2
        return USAGE if err.code else OK
    try:
        return args.func(args)
    except ConfigError as err:
        print(err, file=sys.stderr)
        return USAGE
    except (CertificateError, ContractViolation) as err:
        print(err, file=sys.stderr)
        return VIOLATION
    except (ValueError, OSError) as err:
        print(err, file=sys.stderr)
        return USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
