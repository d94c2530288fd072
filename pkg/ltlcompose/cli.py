"""Command line front end.

    python -m ltlcompose.cli plan --map maps/shelf.json --ltl "F square"

Every subcommand writes its artifacts into ``--out`` and prints a short
summary. Exit codes: 0 success, 2 invalid input, 3 infeasible formula,
4 unreachable policy target (`check` on a trace whose segment policy cannot reach its
target).
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

import pandas as pd

from ltlcompose import dot, tsys
from ltlcompose.documents import read_json, write_json, write_lines
from ltlcompose.errors import PlanError, PlannerError
from ltlcompose.gridworld import TASK_MODES, Cell, load_map
from ltlcompose.ltl import parse_ltl
from ltlcompose.mvpolicy import check_trace, execute_plan, trace_from_document
from ltlcompose.pipeline import Pipeline, compile_formula
from ltlcompose.product import plan_word

logger = logging.getLogger(__name__)

# ---- 1. Configuration ----

script_dir = os.path.dirname(os.path.abspath(__file__))
defaults_file = os.path.join(script_dir, "run-defaults.json")

try:
    with open(defaults_file, "r") as f:
        DEFAULTS = json.load(f)
except FileNotFoundError:
    raise FileNotFoundError(f"Could not find {defaults_file}")


@dataclass(frozen=True)
class RunConfig:
    map_path: Optional[str]
    formula: Optional[str]
    out: str
    start: Optional[Cell] = None
    task_mode: Optional[str] = None
    emit_stages: bool = False
    drop_unreachable: bool = False
    cycles: int = 1
    render: Optional[str] = None
    trace: Optional[str] = None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        formula = args.ltl
        if formula is not None and os.path.isfile(formula):
            with open(formula, "r", encoding="utf-8") as f:
                formula = f.read().strip()
        start = None
        if args.start is not None:
            try:
                x, y = (int(v) for v in args.start.split(","))
            except ValueError:
                raise PlanError(f"--start expects X,Y, got {args.start!r}") from None
            start = (x, y)
        trace = getattr(args, "trace", None)
        for path in (args.map, trace):
            if path is not None and not os.path.isfile(path):
                raise PlanError(f"no such file: {path}")
        return cls(args.map, formula, args.out, start, args.task_mode, args.emit_stages,
                   args.drop_unreachable, args.cycles, getattr(args, "render", None), trace)

    def pipeline(self) -> Optional[Pipeline]:
        if self.map_path is None:
            return None
        return Pipeline(load_map(self.map_path), self.start, self.task_mode, self.drop_unreachable)

    def require_formula(self) -> str:
        if not self.formula:
            raise PlanError("--ltl is required for this command")
        return self.formula


# ---- 2. Subcommands ----

def _write_ts(ts, out, name):
    write_json(tsys.to_document(ts), out, f"{name}.json")
    write_lines(dot.ts_dot(ts), out, f"{name}.dot")


def _emit_stages(p: Pipeline, out):
    for i, stage in enumerate(p.stages(), start=1):
        _write_ts(stage, out, f"stage{i}")


def cmd_abstract(cfg: RunConfig, p: Pipeline) -> int:
    ts = p.unpruned
    _write_ts(ts, cfg.out, "ts_unpruned")
    print(f"✅ abstracted: {len(ts.states)} states, {len(ts.transitions)} transitions")
    return 0


def cmd_prune(cfg: RunConfig, p: Pipeline) -> int:
    _write_ts(p.unpruned, cfg.out, "ts_unpruned")
    ts, report = p.pruned
    _write_ts(ts, cfg.out, "ts_pruned")
    write_json(report.to_document(), cfg.out, "prune_report.json")
    if cfg.emit_stages:
        _emit_stages(p, cfg.out)
    ok, violations = tsys.is_deterministic(ts)
    print(f"✅ pruned: {len(ts.states)} states, {len(ts.transitions)} transitions, "
          f"deterministic={ok}")
    for v in violations:
        print(f"⚠️ {v.state} --{v.symbol}--> {', '.join(v.targets)}")
    return 0


def cmd_compile(cfg: RunConfig, p: Optional[Pipeline]) -> int:
    if p is not None:
        _, aut = p.compile(cfg.require_formula())
    else:
        _, aut = compile_formula(cfg.require_formula())
    write_json(aut.to_document(), cfg.out, "buchi.json")
    write_lines(dot.buchi_dot(aut), cfg.out, "buchi.dot")
    print(f"✅ automaton: {len(aut.states)} states, {len(aut.accepting)} accepting")
    return 0


def cmd_product(cfg: RunConfig, p: Pipeline) -> int:
    pa = p.product(cfg.require_formula())
    write_json(pa.to_document(), cfg.out, "product.json")
    write_lines(dot.product_dot(pa), cfg.out, "product.dot")
    print(f"✅ product: {len(pa.states)} states, {len(pa.accepting)} accepting")
    return 0


def _plan(cfg: RunConfig, p: Pipeline):
    pa, plan = p.plan(cfg.require_formula())
    doc = plan.to_document()
    doc["word"] = plan_word(pa, plan)
    write_json(doc, cfg.out, "plan.json")
    if cfg.emit_stages:
        _write_ts(p.unpruned, cfg.out, "ts_unpruned")
        _emit_stages(p, cfg.out)
        ts, report = p.pruned
        _write_ts(ts, cfg.out, "ts_pruned")
        write_json(report.to_document(), cfg.out, "prune_report.json")
        write_json(pa.aut.to_document(), cfg.out, "buchi.json")
        write_lines(dot.buchi_dot(pa.aut), cfg.out, "buchi.dot")
        write_json(pa.to_document(), cfg.out, "product.json")
        write_lines(dot.product_dot(pa), cfg.out, "product.dot")
    return plan


def cmd_plan(cfg: RunConfig, p: Pipeline) -> int:
    plan = _plan(cfg, p)
    print(f"✅ plan: prefix {list(plan.prefix)} cycle {list(plan.cycle)}")
    return 0


def report_row(formula, plan, trace, satisfied) -> pd.DataFrame:
    return pd.DataFrame([{
        "formula": formula,
        "plan": " > ".join(list(plan.prefix) + [f"({c})" for c in plan.cycle]),
        "satisfied": satisfied,
        "unsafe": trace.unsafe_count,
        "forced": trace.forced,
        "unforced": trace.unforced,
    }])


def cmd_run(cfg: RunConfig, p: Pipeline) -> int:
    if cfg.cycles < 1:
        raise PlanError(f"--cycles must be >= 1, got {cfg.cycles}")
    plan = _plan(cfg, p)
    with p.stage("execute"):
        trace = execute_plan(p.grid, p.start_cell, plan, cfg.cycles)
    satisfied = check_trace(trace, parse_ltl(cfg.formula))
    write_json(trace.to_document(), cfg.out, "trace.json")
    row = report_row(cfg.formula, plan, trace, satisfied)
    row.to_csv(os.path.join(cfg.out, "run.csv"), index=False)
    if cfg.render:
        # matplotlib is only imported when a figure is asked for
        from ltlcompose.render import render_trace
        render_trace(p.grid, trace, cfg.render)
    print(row.to_string(index=False))
    return 0


def cmd_check(cfg: RunConfig, p: Pipeline) -> int:
    if cfg.trace is None:
        raise PlanError("--trace is required for check")
    formula = parse_ltl(cfg.require_formula(), p.grid.alphabet)
    trace = trace_from_document(p.grid, read_json(cfg.trace))
    satisfied = check_trace(trace, formula)
    print(f"satisfied: {satisfied}")
    print(f"unsafe: {trace.unsafe_count} (forced {trace.forced}, unforced {trace.unforced})")
    return 0


COMMANDS = {
    "abstract": cmd_abstract,
    "prune": cmd_prune,
    "compile": cmd_compile,
    "product": cmd_product,
    "plan": cmd_plan,
    "run": cmd_run,
    "check": cmd_check,
}


# ---- 3. Argument parsing ----

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--map", help="map document (JSON) or ASCII grid")
    common.add_argument("--ltl", help="formula text or a file containing it")
    common.add_argument("--out", default=DEFAULTS["out"], help="output directory")
    common.add_argument("--start", help="start cell as X,Y")
    common.add_argument("--task-mode", choices=TASK_MODES, default=DEFAULTS["task_mode"])
    common.add_argument("--emit-stages", action="store_true", default=DEFAULTS["emit_stages"])
    common.add_argument("--drop-unreachable", action="store_true", default=DEFAULTS["drop_unreachable"])
    common.add_argument("--cycles", type=int, default=DEFAULTS["cycles"])
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ltlcompose", description="Zero-shot LTL task planning")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[common])
        if name == "run":
            cmd.add_argument("--render", default=DEFAULTS["render"], help="PNG or SVG figure path")
        if name == "check":
            cmd.add_argument("--trace", help="trace document written by run")
    return parser


def exit_code(error: BaseException) -> int:
    return getattr(error, "exit_code", 1)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    p = None
    try:
        cfg = RunConfig.from_args(args)
        p = cfg.pipeline()
        if p is None and args.command != "compile":
            raise PlanError(f"--map is required for {args.command}")
        status = COMMANDS[args.command](cfg, p)
    except PlannerError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return exit_code(e)
    except OSError as e:
        print(f"❌ {e}", file=sys.stderr)
        return 2
    finally:
        if p is not None:
            for name, ms in p.timings.items():
                print(f"⏱️ {name}: {ms:.2f} ms", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
