"""Stage orchestration: map -> TS -> pruned TS -> automaton -> product -> plan -> trace."""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from ltlcompose.buchi import BuchiAutomaton, to_buchi
from ltlcompose.errors import InfeasibleSpecError, PlanError
from ltlcompose.gridworld import Cell, GridMap, Region, extract_regions, region_lookup
from ltlcompose.grounding import (PolicyOracle, executes_as_planned, find_executable_plan,
                                  realize_transitions)
from ltlcompose.ltl import Ltl, parse_ltl, to_text
from ltlcompose.mvpolicy import Trace, execute_plan
from ltlcompose.product import Plan, ProductAutomaton, build_product, find_plan
from ltlcompose.pruner import PruneReport, prune, prune_stages
from ltlcompose.tsys import TransitionSystem, build_initial_ts, drop_unreachable, generate_ts_labels

logger = logging.getLogger(__name__)


def compile_formula(text: str, atoms=None) -> Tuple[Ltl, BuchiAutomaton]:
    formula = parse_ltl(text, atoms)
    return formula, to_buchi(formula)


@dataclass
class Pipeline:
    grid: GridMap
    start: Optional[Cell] = None
    task_mode: Optional[str] = None
    drop_unreachable: bool = False
    timings: Dict[str, float] = field(default_factory=dict)

    @contextmanager
    def stage(self, name: str):
        began = time.perf_counter()
        yield
        self.timings[name] = (time.perf_counter() - began) * 1000.0
        logger.info("stage %s took %.2f ms", name, self.timings[name])

    @property
    def start_cell(self) -> Optional[Cell]:
        return self.start if self.start is not None else self.grid.start_cell

    @property
    def composite(self) -> bool:
        if self.task_mode is not None:
            return self.task_mode == "composite"
        return self.grid.composite

    @cached_property
    def regions(self) -> Tuple[List[Region], Dict[str, Tuple[str, ...]]]:
        return extract_regions(self.grid)

    @cached_property
    def unpruned(self) -> TransitionSystem:
        with self.stage("abstract"):
            regions, adjacency = self.regions
            initial = None
            start = self.start_cell
            if start is not None:
                if not self.grid.is_free(start):
                    raise PlanError(f"start cell {start} is not a free cell")
                initial = region_lookup(regions)[start]
            ts = build_initial_ts(regions, adjacency, initial, self.grid.alphabet, self.composite)
            return generate_ts_labels(ts)

    @cached_property
    def pruned(self) -> Tuple[TransitionSystem, PruneReport]:
        ts = self.unpruned
        with self.stage("prune"):
            pruned, report = prune(ts)
        with self.stage("realize"):
            regions, _ = self.regions
            pruned = realize_transitions(pruned, self.grid, regions, report.representative, report,
                                         self.oracle)
        if self.drop_unreachable:
            pruned = drop_unreachable(pruned)
        return pruned, report

    @cached_property
    def oracle(self) -> PolicyOracle:
        return PolicyOracle(self.grid)

    def state_of(self) -> Dict[Cell, str]:
        _, report = self.pruned
        regions, _ = self.regions
        return {cell: report.representative.get(rid, rid) for cell, rid in region_lookup(regions).items()}

    def stages(self) -> List[TransitionSystem]:
        return prune_stages(self.unpruned)

    def compile(self, text: str) -> Tuple[Ltl, BuchiAutomaton]:
        with self.stage("compile"):
            return compile_formula(text, self.grid.alphabet)

    def product(self, text: str) -> ProductAutomaton:
        ts, _ = self.pruned
        _, aut = self.compile(text)
        with self.stage("product"):
            return build_product(ts, aut)

    def plan(self, text: str) -> Tuple[ProductAutomaton, Plan]:
        """Plan on the product, then make sure the plan does what it promises when
        executed; otherwise search the executed policies themselves."""
        pa = self.product(text)
        formula = parse_ltl(text, self.grid.alphabet)
        with self.stage("plan"):
            plan = find_plan(pa)
        if self.start_cell is not None:
            with self.stage("ground"):
                if plan is None or not executes_as_planned(self.grid, self.start_cell, pa, plan,
                                                           formula):
                    logger.info("no product plan executes as planned, searching executed policies")
                    plan = find_executable_plan(self.grid, self.start_cell, pa.aut,
                                                self.unpruned.task_symbols(), self.state_of(),
                                                self.oracle)
        if plan is None:
            raise InfeasibleSpecError(f"no plan satisfies {to_text(formula)} on this map")
        return pa, plan

    def run(self, text: str, cycles: int = 1) -> Tuple[Plan, Trace]:
        _, plan = self.plan(text)
        with self.stage("execute"):
            trace = execute_plan(self.grid, self.start_cell, plan, cycles)
        return plan, trace
