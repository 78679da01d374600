"""Command-line frontend.

Commands and exit codes::

    mc             model-check a formula in a pointed model   0 true / 1 false
    sat            decide satisfiability                       0 SAT / 1 UNSAT
    valid          decide validity                             0 valid / 1 invalid
    translate      rewrite into the static language            0
    gen-qbf        write a QBF model-checking bundle           0
    gen-tiling     write a tiling satisfiability bundle        0
    oracle-qbf     brute-force QBF verdict                     0 true / 1 false
    oracle-tiling  brute-force tiling search                   0 tiled / 1 none

Usage or input errors exit 2; exhausted budgets exit 3.  Reports are plain
text by default and a stable JSON object with ``--json``; wall-clock timing
is only included behind ``--stats`` so that identical inputs produce
byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .core import Not, formula_size
from .kripke import evaluate
from .mcheck import DepthLimitExceeded, ModelChecker
from .modelio import (
    ModelFormatError,
    epistemic_model_to_json,
    load_epistemic_model,
    load_event_models,
    save_json,
    write_bundle,
)
from .qbf import OracleBudgetExceeded, parse_qbf, qbf_brute, qbf_reduce
from .reduction import translation_report
from .syntax import FormulaSyntaxError, parse_formula, print_formula
from .tableau import BudgetExceeded, is_satisfiable
from .tiling import tiles_from_json, tiling_brute, tiling_reduce

__all__ = ["RunConfig", "run", "main"]

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


@dataclass
class RunConfig:
    command: str
    model_path: Optional[str] = None
    event_paths: tuple[str, ...] = ()
    formula: Optional[str] = None
    formula_path: Optional[str] = None
    engine: str = "pspace"
    max_steps: int = 1_000_000
    max_seconds: float = 60.0
    depth_limit: int = 100_000
    debug: bool = False
    trace: bool = False
    json_output: bool = False
    show_stats: bool = False
    dump_tableau: Optional[str] = None
    save_model: Optional[str] = None
    qbf: Optional[str] = None
    qbf_path: Optional[str] = None
    tiles_path: Optional[str] = None
    grid_n: int = 1
    out_dir: Optional[str] = None


def _formula_text(config: RunConfig) -> str:
    if config.formula is not None:
        return config.formula
    if config.formula_path is not None:
        return Path(config.formula_path).read_text(encoding="utf-8")
    raise ModelFormatError("no formula given (use -f or --formula-file)")


def _report(config: RunConfig, verdict: str, engine: str, stats: dict, extra: dict | None = None) -> None:
    if config.json_output:
        payload = {"verdict": verdict, "engine": engine, "stats": stats}
        if extra:
            payload.update(extra)
        print(json.dumps(payload, sort_keys=True))
    else:
        print(verdict)
        if extra:
            for key, value in extra.items():
                print(f"{key}: {value}")
        if config.show_stats and stats:
            line = " ".join(f"{k}={v}" for k, v in sorted(stats.items()))
            print(f"stats: {line}")


def _cmd_mc(config: RunConfig) -> int:
    pointed = load_epistemic_model(config.model_path)
    env = load_event_models(list(config.event_paths))
    phi = parse_formula(_formula_text(config), env, agents=sorted(pointed.model.agents))
    started = time.monotonic()
    if config.engine == "naive":
        verdict = evaluate(pointed.model, pointed.world, phi)
        stats: dict = {}
    else:
        trace = None
        if config.trace:
            trace = lambda depth, measure, tag: print(f"depth={depth} measure={measure} case={tag}")
        checker = ModelChecker(
            pointed.model, debug=config.debug, trace=trace, depth_limit=config.depth_limit
        )
        verdict = checker.check(pointed.world, (), phi)
        stats = {"calls": checker.stats.calls, "peak_depth": checker.stats.peak_depth}
    if config.show_stats:
        stats["ms"] = round(1000 * (time.monotonic() - started), 3)
    _report(config, "true" if verdict else "false", config.engine, stats)
    return EXIT_TRUE if verdict else EXIT_FALSE


def _decide(config: RunConfig, negate: bool) -> tuple[bool, dict]:
    env = load_event_models(list(config.event_paths))
    phi = parse_formula(_formula_text(config), env)
    if negate:
        phi = Not(phi)
    dump = None
    handle = None
    if config.dump_tableau:
        handle = open(config.dump_tableau, "w", encoding="utf-8")
        dump = lambda line: handle.write(line + "\n")
    try:
        result = is_satisfiable(
            phi,
            max_steps=config.max_steps,
            max_seconds=config.max_seconds,
            debug=config.debug,
            dump=dump,
        )
    finally:
        if handle is not None:
            handle.close()
    stats = {
        "rule_apps": result.stats.rule_applications,
        "peak_depth": result.stats.peak_depth,
    }
    if result.satisfiable and config.save_model and result.model is not None:
        save_json(config.save_model, epistemic_model_to_json(result.model))
    return result.satisfiable, stats


def _cmd_sat(config: RunConfig) -> int:
    started = time.monotonic()
    satisfiable, stats = _decide(config, negate=False)
    if config.show_stats:
        stats["ms"] = round(1000 * (time.monotonic() - started), 3)
    _report(config, "SAT" if satisfiable else "UNSAT", "tableau", stats)
    return EXIT_TRUE if satisfiable else EXIT_FALSE


def _cmd_valid(config: RunConfig) -> int:
    started = time.monotonic()
    satisfiable, stats = _decide(config, negate=True)
    valid = not satisfiable
    if config.show_stats:
        stats["ms"] = round(1000 * (time.monotonic() - started), 3)
    _report(config, "valid" if valid else "invalid", "tableau", stats)
    return EXIT_TRUE if valid else EXIT_FALSE


def _cmd_translate(config: RunConfig) -> int:
    env = load_event_models(list(config.event_paths))
    phi = parse_formula(_formula_text(config), env)
    report = translation_report(phi)
    out_text = print_formula(report.output)
    stats = {"input_size": report.input_size, "output_size": report.output_size}
    _report(config, "translated", "reduction-axioms", stats, extra={"formula": out_text})
    return EXIT_TRUE


def _qbf_text(config: RunConfig) -> str:
    if config.qbf is not None:
        return config.qbf
    if config.qbf_path is not None:
        return Path(config.qbf_path).read_text(encoding="utf-8")
    raise ModelFormatError("no QBF instance given (use --qbf or --qbf-file)")


def _cmd_gen_qbf(config: RunConfig) -> int:
    instance = parse_qbf(_qbf_text(config))
    reduction = qbf_reduce(instance)
    write_bundle(
        config.out_dir,
        kind="qbf",
        parameters={"k": instance.k, "matrix": print_formula(instance.matrix)},
        formula=reduction.goal,
        event_models=list(reduction.event_models) + [reduction.loop_model],
        model=reduction.model,
    )
    print(config.out_dir)
    return EXIT_TRUE


def _cmd_gen_tiling(config: RunConfig) -> int:
    raw = Path(config.tiles_path).read_text(encoding="utf-8")
    instance = tiles_from_json(raw, config.grid_n)
    reduction = tiling_reduce(instance)
    write_bundle(
        config.out_dir,
        kind="tiling",
        parameters={
            "n": instance.n,
            "k": instance.k,
            "origin": instance.origin.name,
            "tiles": [t.name for t in instance.tiles],
        },
        formula=reduction.formula,
        event_models=list(reduction.event_models),
        model=None,
    )
    print(config.out_dir)
    return EXIT_TRUE


def _cmd_oracle_qbf(config: RunConfig) -> int:
    verdict = qbf_brute(parse_qbf(_qbf_text(config)))
    print("true" if verdict else "false")
    return EXIT_TRUE if verdict else EXIT_FALSE


def _cmd_oracle_tiling(config: RunConfig) -> int:
    raw = Path(config.tiles_path).read_text(encoding="utf-8")
    instance = tiles_from_json(raw, config.grid_n)
    grid = tiling_brute(instance)
    if grid is None:
        print("none")
        return EXIT_FALSE
    cells = {f"{x},{y}": tile.name for (x, y), tile in grid.items()}
    print(json.dumps(cells, sort_keys=True))
    return EXIT_TRUE


_COMMANDS = {
    "mc": _cmd_mc,
    "sat": _cmd_sat,
    "valid": _cmd_valid,
    "translate": _cmd_translate,
    "gen-qbf": _cmd_gen_qbf,
    "gen-tiling": _cmd_gen_tiling,
    "oracle-qbf": _cmd_oracle_qbf,
    "oracle-tiling": _cmd_oracle_tiling,
}


def run(config: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    handler = _COMMANDS.get(config.command)
    if handler is None:
        print(f"unknown command {config.command!r}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return handler(config)
    except (FormulaSyntaxError, ModelFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BudgetExceeded, OracleBudgetExceeded, DepthLimitExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delkit",
        description="Model checking, satisfiability, translation, and instance "
        "generation for dynamic epistemic logic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_formula_args(p: argparse.ArgumentParser, with_events: bool = True) -> None:
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("-f", "--formula", help="formula text")
        group.add_argument("--formula-file", help="file containing the formula")
        if with_events:
            p.add_argument(
                "-e",
                "--events",
                nargs="*",
                default=[],
                metavar="FILE",
                help="event model JSON files, in definition order",
            )

    def add_output_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="machine-readable report")
        p.add_argument("--stats", action="store_true", help="include wall-clock stats")

    p_mc = sub.add_parser("mc", help="model checking")
    p_mc.add_argument("-m", "--model", required=True, help="pointed epistemic model JSON")
    add_formula_args(p_mc)
    p_mc.add_argument("--engine", choices=("pspace", "naive"), default="pspace")
    p_mc.add_argument("--trace", action="store_true", help="one line per checker call")
    p_mc.add_argument("--debug", action="store_true", help="measure-descent assertions")
    p_mc.add_argument("--depth-limit", type=int, default=100_000)
    add_output_args(p_mc)

    for name, help_text in (("sat", "satisfiability"), ("valid", "validity")):
        p = sub.add_parser(name, help=help_text)
        add_formula_args(p)
        p.add_argument("--steps", type=int, default=1_000_000, help="rule application budget")
        p.add_argument("--seconds", type=float, default=60.0, help="wall clock budget")
        p.add_argument("--debug", action="store_true", help="term-measure assertions")
        p.add_argument("--dump-tableau", metavar="FILE", help="write the rule trace")
        p.add_argument("--save-model", metavar="FILE", help="write the extracted model (sat only)")
        add_output_args(p)

    p_tr = sub.add_parser("translate", help="eliminate dynamic modalities")
    add_formula_args(p_tr)
    add_output_args(p_tr)

    p_gq = sub.add_parser("gen-qbf", help="QBF to model-checking bundle")
    gq = p_gq.add_mutually_exclusive_group(required=True)
    gq.add_argument("--qbf", help='instance text, e.g. "A p1 E p2 : (p1 <-> p2)"')
    gq.add_argument("--qbf-file", help="file containing the instance text")
    p_gq.add_argument("--out", required=True, help="bundle directory")

    p_gt = sub.add_parser("gen-tiling", help="tiling to satisfiability bundle")
    p_gt.add_argument("--tiles", required=True, help="tile set JSON file")
    p_gt.add_argument("--n", type=int, required=True, help="grid exponent: side is 2**n + 1")
    p_gt.add_argument("--out", required=True, help="bundle directory")

    p_oq = sub.add_parser("oracle-qbf", help="brute-force QBF verdict")
    oq = p_oq.add_mutually_exclusive_group(required=True)
    oq.add_argument("--qbf")
    oq.add_argument("--qbf-file")

    p_ot = sub.add_parser("oracle-tiling", help="brute-force tiling search")
    p_ot.add_argument("--tiles", required=True)
    p_ot.add_argument("--n", type=int, required=True)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        model_path=getattr(args, "model", None),
        event_paths=tuple(getattr(args, "events", ()) or ()),
        formula=getattr(args, "formula", None),
        formula_path=getattr(args, "formula_file", None),
        engine=getattr(args, "engine", "pspace"),
        max_steps=getattr(args, "steps", 1_000_000),
        max_seconds=getattr(args, "seconds", 60.0),
        depth_limit=getattr(args, "depth_limit", 100_000),
        debug=getattr(args, "debug", False),
        trace=getattr(args, "trace", False),
        json_output=getattr(args, "json", False),
        show_stats=getattr(args, "stats", False),
        dump_tableau=getattr(args, "dump_tableau", None),
        save_model=getattr(args, "save_model", None),
        qbf=getattr(args, "qbf", None),
        qbf_path=getattr(args, "qbf_file", None),
        tiles_path=getattr(args, "tiles", None),
        grid_n=getattr(args, "n", 1),
        out_dir=getattr(args, "out", None),
    )


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    return run(_config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
