"""Batch front door: validate data, build trees, run suites, extend maps.

Commands: validate | tree | suite | extend | codist.
Exit codes: 0 pass, 1 probe failure, 2 invalid input, 3 truncation limit.
All randomness flows from the single --seed; fixed config gives
byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import datum as D
from . import extension as E
from . import serialize as S
from . import suites as SU
from . import tree as T
from . import twincodist as TC
from .errors import NagaoError, TruncationExceeded

EXIT_PASS = 0
EXIT_PROBE_FAILURE = 1
EXIT_INVALID_INPUT = 2
EXIT_TRUNCATION = 3


@dataclass
class RunConfig:
    datum: str = "D0"
    radius: int = 4
    level: int = 1
    suites: tuple = SU.SUITE_NAMES
    samples: int = 0
    seed: int = 0
    out: str = ""
    format: str = "json"
    phi: str = ""

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")


def load_datum(source: str) -> D.NagaoDatum:
    if source in D.BUILTIN_NAMES:
        return D.builtin(source)
    with open(source) as fh:
        obj = json.load(fh)
    return D.datum_from_json(obj, name=Path(source).stem)


def _emit(cfg: RunConfig, payload: dict) -> None:
    text = S.dumps_canonical(payload)
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(cfg: RunConfig) -> int:
    try:
        d = load_datum(cfg.datum)
    except (NagaoError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(cfg, {"command": "validate", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    _emit(cfg, {
        "command": "validate",
        "ok": True,
        "datum": d.name or cfg.datum,
        "k": d.k,
        "q": [d.q(i) for i in range(0, 8)],
        "biregular": d.profile.biregular,
    })
    return EXIT_PASS


def cmd_tree(cfg: RunConfig) -> int:
    try:
        d = load_datum(cfg.datum)
    except (NagaoError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(cfg, {"command": "tree", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    t = T.ball(d, T.base_vertex(), cfg.radius)
    if cfg.format == "dot":
        text = S.tree_to_dot(t) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(cfg, {"command": "tree", "ok": True, "tree": t.to_json()})
    return EXIT_PASS


def cmd_suite(cfg: RunConfig) -> int:
    try:
        d = load_datum(cfg.datum)
    except (NagaoError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(cfg, {"command": "suite", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    reports = SU.run_suites(d, cfg.radius, names=cfg.suites,
                            samples=cfg.samples, seed=cfg.seed,
                            level=cfg.level)
    ok = all(r.passed for r in reports)
    _emit(cfg, {
        "command": "suite",
        "ok": ok,
        "datum": d.name or cfg.datum,
        "radius": cfg.radius,
        "seed": cfg.seed,
        "reports": [r.to_json() for r in reports],
    })
    return EXIT_PASS if ok else EXIT_PROBE_FAILURE


def cmd_extend(cfg: RunConfig) -> int:
    try:
        d = load_datum(cfg.datum)
        with open(cfg.phi) as fh:
            obj = json.load(fh)
        pairs = {}
        for a, b in obj["pairs"]:
            va = S.vertex_from_json(d, a)
            vb = S.vertex_from_json(d, b)
            T.validate_address(d, va)
            T.validate_address(d, vb)
            pairs[va] = vb
        phi = E.TreeMap.from_pairs(d, pairs)
    except (NagaoError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(cfg, {"command": "extend", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    try:
        ext, report = E.density_pipeline(d, phi, cfg.radius,
                                         n_samples=max(cfg.samples, 4),
                                         seed=cfg.seed,
                                         record_instances=True)
    except TruncationExceeded as exc:
        _emit(cfg, {"command": "extend", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_TRUNCATION
    except NagaoError as exc:
        _emit(cfg, {"command": "extend", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    _emit(cfg, {
        "command": "extend",
        "ok": report.passed,
        "datum": d.name or cfg.datum,
        "radius": cfg.radius,
        "seed": cfg.seed,
        "report": report.to_json(),
        "extension": ext.to_json(),
    })
    return EXIT_PASS if report.passed else EXIT_PROBE_FAILURE


def cmd_codist(cfg: RunConfig) -> int:
    try:
        d = load_datum(cfg.datum)
    except (NagaoError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        _emit(cfg, {"command": "codist", "ok": False,
                    "error": type(exc).__name__, "detail": str(exc)})
        return EXIT_INVALID_INPUT
    t = T.ball(d, T.base_vertex(), cfg.radius)
    table = TC.synthesize_codistance(t)
    rep = TC.verify_codist(table, t)
    _emit(cfg, {
        "command": "codist",
        "ok": rep.passed,
        "datum": d.name or cfg.datum,
        "radius": cfg.radius,
        "verification": rep.to_json(),
        "table": table.to_json(),
    })
    return EXIT_PASS if rep.passed else EXIT_PROBE_FAILURE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nagaotree",
        description="truncated trees of directly split Nagao data")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--datum", default="D0",
                        help="builtin name (D0..D3) or datum file path")
        sp.add_argument("--radius", type=int, default=4)
        sp.add_argument("--level", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=0)
        sp.add_argument("--out", default="")
        sp.add_argument("--format", choices=("json", "dot"), default="json")

    common(sub.add_parser("validate", help="validate a datum"))
    common(sub.add_parser("tree", help="build and export a ball"))
    sp = sub.add_parser("suite", help="run invariant suites")
    common(sp)
    sp.add_argument("--suites", default=",".join(SU.SUITE_NAMES),
                    help="comma-separated subset of "
                         + ",".join(SU.SUITE_NAMES))
    sp = sub.add_parser("extend", help="run the density pipeline on a map file")
    common(sp)
    sp.add_argument("--phi", required=True, help="JSON file of vertex pairs")
    common(sub.add_parser("codist", help="synthesize and verify codistance"))
    return p


def config_from_args(args) -> RunConfig:
    suites = tuple(s for s in getattr(args, "suites",
                                      ",".join(SU.SUITE_NAMES)).split(",") if s)
    return RunConfig(datum=args.datum, radius=args.radius, level=args.level,
                     suites=suites, samples=args.samples, seed=args.seed,
                     out=args.out, format=args.format,
                     phi=getattr(args, "phi", ""))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ValueError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return EXIT_INVALID_INPUT
    handler = {
        "validate": cmd_validate,
        "tree": cmd_tree,
        "suite": cmd_suite,
        "extend": cmd_extend,
        "codist": cmd_codist,
    }[args.command]
    return handler(cfg)


if __name__ == "__main__":
    sys.exit(main())
