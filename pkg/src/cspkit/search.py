"""Backtracking search that maintains arc consistency after every decision.

``mac_solve`` optionally runs one of the fixed-point enforcers as a
preprocessing step on a private copy, then explores the network with two-way
branching: assign the chosen value, and on failure remove it and keep going.
Variable choice is dom/ddeg or the conflict-driven dom/wdeg, whose constraint
weights grow each time propagation wipes out a domain.
"""

from dataclasses import dataclass
from time import perf_counter
from typing import Optional

from .enforcers import (
    EnforceReport,
    enforce_sac1,
    enforce_scdc,
    enforce_scpc,
    enforce_sdc,
)
from .network import ConstraintNetwork, NetworkError
from .propagation import Trail, enforce_gac

HEURISTICS = ("dom_ddeg", "dom_wdeg")
MODES = ("first_solution", "count_all")
PREPROCESSORS = {
    "none": None,
    "sac1": enforce_sac1,
    "scpc": enforce_scpc,
    "scdc1": enforce_scdc,
    "sdc1": enforce_sdc,
}


@dataclass
class SearchConfig:
    heuristic: str = "dom_wdeg"
    preprocessing: str = "none"
    mode: str = "first_solution"
    node_limit: Optional[int] = None
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {self.heuristic!r}")
        if self.preprocessing not in PREPROCESSORS:
            raise ValueError(f"unknown preprocessing {self.preprocessing!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.node_limit is not None and self.node_limit <= 0:
            raise ValueError("node_limit must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass
class SearchResult:
    outcome: str  # "sat" | "unsat" | "limit"
    nodes: int
    preprocessing_report: EnforceReport
    solution_count: int = 0
    solution: Optional[tuple[int, ...]] = None


class _LimitReached(Exception):
    pass


class _SolutionFound(Exception):
    pass


def select_variable(net: ConstraintNetwork, heuristic: str, assigned,
                    weights) -> int:
    """Unassigned variable minimising dom/ddeg or dom/wdeg.

    The denominator counts (or weighs) constraints that involve the variable
    together with at least one other unassigned variable; when it is zero the
    variable ranks last.  Ties go to the smallest variable id.
    """
    best = -1
    best_key = None
    for x in range(net.n):
        if x in assigned:
            continue
        denom = 0
        for cid in net.constraints_of[x]:
            c = net.constraints[cid]
            if any(v != x and v not in assigned for v in c.scope):
                denom += weights.get(cid, 1) if heuristic == "dom_wdeg" else 1
        size = net.domains[x].mask.bit_count()
        key = size / denom if denom else float("inf")
        if best < 0 or key < best_key:
            best, best_key = x, key
    if best < 0:
        raise NetworkError("no unassigned variable to select")
    return best


def mac_solve(net: ConstraintNetwork, cfg: Optional[SearchConfig] = None
              ) -> SearchResult:
    """Solve (or count) on a private copy of ``net``.

    Nodes count variable assignments only; refutations reuse the same
    propagation machinery but open no node.
    """
    cfg = cfg or SearchConfig()
    work = net.copy()
    preprocess = PREPROCESSORS[cfg.preprocessing]
    if preprocess is None:
        report = EnforceReport(consistent=not work.failed)
    else:
        report = preprocess(work)
    if not report.consistent or work.failed:
        return SearchResult("unsat", 0, report)
    if not enforce_gac(work).ok:
        return SearchResult("unsat", 0, report)

    deadline = None if cfg.time_limit is None else perf_counter() + cfg.time_limit
    weights: dict[int, int] = {}
    trail = Trail()
    assigned: set[int] = set()
    state = {"nodes": 0, "count": 0, "solution": None}

    def bump(culprit):
        if culprit is not None:
            weights[culprit] = weights.get(culprit, 1) + 1

    def descend():
        if len(assigned) == work.n:
            state["count"] += 1
            if state["solution"] is None:
                state["solution"] = tuple(
                    work.domains[i].values()[0] for i in range(work.n))
            if cfg.mode == "first_solution":
                raise _SolutionFound
            return
        x = select_variable(work, cfg.heuristic, assigned, weights)
        trail.push(work)  # holds this node's refutation removals
        try:
            while True:
                a = work.domains[x].values()[0]
                state["nodes"] += 1
                if cfg.node_limit is not None and state["nodes"] > cfg.node_limit:
                    raise _LimitReached
                if deadline is not None and perf_counter() > deadline:
                    raise _LimitReached
                trail.push(work)
                try:
                    work.assign(x, a, trail)
                    out = enforce_gac(work, trail, touched=(x,))
                    if out.ok:
                        assigned.add(x)
                        try:
                            descend()
                        finally:
                            assigned.discard(x)
                    else:
                        bump(out.culprit)
                finally:
                    trail.pop(work)
                work.remove_value(x, a, trail)
                if work.failed:
                    break
                out = enforce_gac(work, trail, touched=(x,))
                if not out.ok:
                    bump(out.culprit)
                    break
        finally:
            trail.pop(work)

    try:
        descend()
    except _SolutionFound:
        return SearchResult("sat", state["nodes"], report,
                            solution_count=state["count"],
                            solution=state["solution"])
    except _LimitReached:
        return SearchResult("limit", state["nodes"], report,
                            solution_count=state["count"],
                            solution=state["solution"])
    if state["count"]:
        return SearchResult("sat", state["nodes"], report,
                            solution_count=state["count"],
                            solution=state["solution"])
    return SearchResult("unsat", state["nodes"], report)
