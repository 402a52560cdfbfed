"""Strength relations between consistencies, and witnesses separating them.

The consistencies form two partial orders under "strictly stronger":
one restricted to binary networks (where PC, DC and 3C collapse, as do
their strong variants, sC3C with sCPC, and sCDC with SAC+CDC) and one for
networks of arbitrary arity.  Both orders are stored here as explicit edge
tables, together with the known incomparable pairs.

``verify_lattice_edge`` samples networks and checks closure monotonicity
along an edge; ``find_witness`` searches small random networks for a
separating witness (a network where one consistency holds and the other
fails); the shipped witness corpus is read back with ``load_witness``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Optional

from .generator import ModelBParams, generate_model_b
from .instance_io import loads_network, network_to_data
from .network import (CONFLICTS, ConstraintNetwork, ResourceCapError,
                      build_network, compare, refines)
from .oracle import (Consistency, check_network, closurable, consistency_id,
                     enumerate_solutions, oracle_closure)

C = Consistency


@dataclass(frozen=True)
class Panel:
    """One strength diagram: drawn strict edges, equivalences, incomparables."""
    name: str
    edges: tuple           # (stronger, weaker) pairs, transitively reduced
    equivalences: tuple    # tuples of mutually equivalent consistencies
    incomparable: tuple    # pairs with witnesses in both directions


BINARY_PANEL = Panel(
    name="binary",
    edges=(
        # pair-consistency layer
        (C.TWO_SAC, C.PC), (C.TWO_SAC, C.C2SAC),
        (C.PC, C.CDC),
        (C.C2SAC, C.CDC), (C.C2SAC, C.C3C),
        (C.CDC, C.PPC), (C.PPC, C.C3C), (C.C3C, C.CPC),
        # strong (value+pair) layer
        (C.S2SAC, C.SPC), (C.S2SAC, C.SC2SAC),
        (C.SPC, C.SCDC),
        (C.SC2SAC, C.SCDC), (C.SC2SAC, C.SC3C),
        (C.SCDC, C.SPPC), (C.SPPC, C.SC3C),
        # singleton family
        (C.SPC, C.BISAC), (C.BISAC, C.SAC), (C.SAC, C.GAC),
        (C.SCDC, C.SAC),
        # strong variant above its base consistency
        (C.SPC, C.PC), (C.S2SAC, C.TWO_SAC), (C.SC2SAC, C.C2SAC),
        (C.SCDC, C.CDC), (C.SPPC, C.PPC), (C.SC3C, C.C3C),
    ),
    equivalences=(
        (C.PC, C.DC, C.THREE_C),
        (C.SPC, C.SDC, C.S3C),
        (C.SC3C, C.SCPC),
        (C.SCDC, C.SAC_CDC),
    ),
    incomparable=(
        (C.PC, C.C2SAC),
        (C.SPC, C.SC2SAC),
        (C.SCDC, C.BISAC),
    ),
)

ANY_ARITY_PANEL = Panel(
    name="any-arity",
    edges=(
        # pair-consistency layer
        (C.TWO_SAC, C.DC), (C.TWO_SAC, C.THREE_C), (C.TWO_SAC, C.C2SAC),
        (C.DC, C.PC), (C.THREE_C, C.PC),
        (C.DC, C.CDC), (C.THREE_C, C.C3C),
        (C.PC, C.PPC),
        (C.C2SAC, C.CDC), (C.C2SAC, C.C3C),
        (C.CDC, C.PPC), (C.C3C, C.CPC), (C.PPC, C.CPC),
        # strong layer (s3C, sC3C and sC2SAC left out, as in the summary)
        (C.S2SAC, C.SDC), (C.SDC, C.SPC),
        (C.SDC, C.SCDC),
        (C.SPC, C.SPPC), (C.SCDC, C.SPPC), (C.SPPC, C.SCPC),
        # singleton family
        (C.SDC, C.SAC_CDC), (C.SAC_CDC, C.SCDC), (C.SAC_CDC, C.SAC),
        (C.SPC, C.BISAC), (C.BISAC, C.SAC), (C.SAC, C.GAC),
        # strong variant above its base consistency
        (C.SDC, C.DC), (C.SPC, C.PC), (C.S2SAC, C.TWO_SAC),
        (C.SCDC, C.CDC), (C.SPPC, C.PPC), (C.SCPC, C.CPC),
    ),
    equivalences=(),
    incomparable=(
        (C.THREE_C, C.DC),
        (C.PC, C.C2SAC), (C.DC, C.C2SAC), (C.THREE_C, C.C2SAC),
        (C.CDC, C.C3C),
        (C.PPC, C.C3C),
        (C.PC, C.CDC),
        (C.SPC, C.SCDC),
    ),
)

PANELS = (BINARY_PANEL, ANY_ARITY_PANEL)


# -- sampled edge verification ------------------------------------------


@dataclass
class EdgeReport:
    stronger: Consistency
    weaker: Consistency
    mode: str                     # "closure", "check" or "equivalence"
    checked: int = 0
    vacuous: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        state = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return (f"{self.stronger.value} -> {self.weaker.value} "
                f"[{self.mode}] checked={self.checked} "
                f"vacuous={self.vacuous}: {state}")


def _violation(report: EdgeReport, index: int, detail: str,
               net: ConstraintNetwork):
    report.violations.append({
        "sample": index,
        "detail": detail,
        "instance": network_to_data(net),
    })


def verify_lattice_edge(stronger, weaker,
                        samples: Iterable[ConstraintNetwork]) -> EdgeReport:
    """Check one strength edge over sampled networks.

    When both consistencies have closures, the stronger closure of each
    sample P must refine the weaker closure (carry every one of its
    prunings, up to subsumption of learned rows by value deletions).
    When either end has no closure (BiSAC), the check falls back to the
    implication form: every network consistent for the stronger id must be
    consistent for the weaker one; samples are promoted with the stronger
    closure when available, and non-qualifying samples count as vacuous.
    """
    stronger = consistency_id(stronger)
    weaker = consistency_id(weaker)
    if closurable(stronger) and closurable(weaker):
        report = EdgeReport(stronger, weaker, "closure")
        for i, net in enumerate(samples):
            report.checked += 1
            if not refines(oracle_closure(stronger, net),
                           oracle_closure(weaker, net)):
                _violation(report, i, "stronger closure does not refine "
                                      "the weaker closure", net)
        return report

    report = EdgeReport(stronger, weaker, "check")
    for i, net in enumerate(samples):
        if closurable(stronger):
            q = oracle_closure(stronger, net)
            if q.failed:
                report.vacuous += 1
                continue
        else:
            q = net
            if not check_network(stronger, q):
                report.vacuous += 1
                continue
        report.checked += 1
        if not check_network(weaker, q):
            _violation(report, i, f"{stronger.value}-consistent network "
                                  f"fails {weaker.value}", net)
    return report


def verify_equivalence(left, right,
                       samples: Iterable[ConstraintNetwork]) -> EdgeReport:
    """Check that two closures coincide on every sampled network."""
    left = consistency_id(left)
    right = consistency_id(right)
    report = EdgeReport(left, right, "equivalence")
    for i, net in enumerate(samples):
        verdict = compare(oracle_closure(left, net),
                          oracle_closure(right, net))
        report.checked += 1
        if verdict != "equal":
            _violation(report, i, f"compare says {verdict!r}", net)
    return report


# -- witness search ------------------------------------------------------


def binary_sampler(rng: random.Random) -> ConstraintNetwork:
    """A small random binary network (n <= 5, d <= 3)."""
    params = ModelBParams(
        n=rng.choice((3, 4, 4, 5, 5)),
        d=rng.randint(2, 3),
        density=rng.choice([0.4, 0.5, 0.6, 0.8, 1.0]),
        tightness=rng.choice([0.2, 0.3, 0.35, 0.5]),
        seed=rng.getrandbits(32),
    )
    return generate_model_b(params)


def mixed_sampler(rng: random.Random) -> ConstraintNetwork:
    """A small random network mixing binary with ternary (and rarely
    quaternary) conflict tables."""
    n = rng.randint(4, 5)
    d = rng.randint(2, 3)
    specs = []
    pairs = list(itertools.combinations(range(n), 2))
    for scope in rng.sample(pairs, rng.randint(1, 3)):
        q = rng.randint(1, d * d - 1)
        cells = rng.sample(range(d * d), q)
        specs.append((scope, CONFLICTS, {divmod(cell, d) for cell in cells}))
    triples = list(itertools.combinations(range(n), 3))
    for scope in rng.sample(triples, rng.randint(1, 2)):
        q = rng.randint(1, d ** 3 - 1)
        cells = rng.sample(range(d ** 3), q)
        table = set()
        for cell in cells:
            cell, v2 = divmod(cell, d)
            v0, v1 = divmod(cell, d)
            table.add((v0, v1, v2))
        specs.append((scope, CONFLICTS, table))
    if rng.random() < 0.25:
        scope = tuple(rng.sample(range(n), 4))
        q = rng.randint(1, d ** 4 - 1)
        table = set()
        for cell in rng.sample(range(d ** 4), q):
            row = []
            for _ in range(4):
                cell, v = divmod(cell, d)
                row.append(v)
            table.add(tuple(row))
        specs.append((scope, CONFLICTS, table))
    return build_network([d] * n, specs)


def _uncovered_values(net: ConstraintNetwork) -> int:
    """Number of values appearing in no solution (0 = inverse-consistent)."""
    remaining = {(x, a) for x in range(net.n)
                 for a in net.domains[x].values()}
    for sol in enumerate_solutions(net):
        remaining -= set(enumerate(sol))
        if not remaining:
            break
    return len(remaining)


def _solution_cover(net: ConstraintNetwork) -> ConstraintNetwork:
    """Drop every value in no solution; the result (if not failed) is
    inverse-consistent, hence BiSAC-consistent."""
    covered = set()
    for sol in enumerate_solutions(net):
        covered |= set(enumerate(sol))
    out = net.copy()
    for x in range(out.n):
        for a in out.domains[x].values():
            if (x, a) not in covered:
                out.remove_value(x, a)
    return out


def _flip_one_tuple(net: ConstraintNetwork,
                    rng: random.Random) -> Optional[ConstraintNetwork]:
    """Copy the network with one binary tuple toggled allowed<->forbidden."""
    binary = [c.cid for c in net.constraints if c.is_binary]
    if not binary:
        return None
    out = net.copy()
    c = out.constraints[rng.choice(binary)]
    row = (rng.randrange(len(c.init_doms[0])),
           rng.randrange(len(c.init_doms[1])))
    row = (c.init_doms[0][row[0]], c.init_doms[1][row[1]])
    if c.allows(row):
        c.remove_row(row)
        if c.allowed_count == 0:
            return None
    else:
        c.restore_row(row)
    return out


def find_witness(hold, fail, budget: int = 2000, *, seed: int = 0,
                 sampler: Optional[Callable] = None,
                 ) -> Optional[ConstraintNetwork]:
    """Search small random networks for one where ``hold`` passes and
    ``fail`` fails.

    Candidates are drawn from ``sampler`` (default: small binary networks);
    each sample is tried as-is, then promoted with the hold-closure when one
    exists; consistencies without a closure (BiSAC) fall back to
    flip-one-tuple hill-climbing toward full solution coverage, which
    implies BiSAC-consistency.  Returns None when the budget is exhausted
    (inconclusive, not a refutation).
    """
    hold = consistency_id(hold)
    fail = consistency_id(fail)
    sampler = sampler or binary_sampler
    rng = random.Random(seed)
    spent = 0

    def qualifies(candidate: ConstraintNetwork) -> bool:
        nonlocal spent
        spent += 1
        if candidate.failed:
            return False
        try:
            return (check_network(hold, candidate)
                    and not check_network(fail, candidate))
        except ResourceCapError:
            return False

    while spent < budget:
        net = sampler(rng)
        if qualifies(net):
            return net
        if closurable(hold):
            try:
                closed = oracle_closure(hold, net)
            except ResourceCapError:
                continue
            spent += 1
            if not closed.failed and not check_network(fail, closed):
                return closed
        else:
            reduced = _solution_cover(net)
            if qualifies(reduced):
                return reduced
            current = net
            score = _uncovered_values(current)
            for _ in range(40):
                if spent >= budget:
                    break
                if score == 0 and qualifies(current):
                    return current
                moved = _flip_one_tuple(current, rng)
                spent += 1
                if moved is None:
                    break
                moved_score = _uncovered_values(moved)
                if moved_score < score or (moved_score == score
                                           and rng.random() < 0.3):
                    current, score = moved, moved_score
    return None


# -- witness corpus ------------------------------------------------------


def witness_name(hold, fail) -> str:
    return f"{consistency_id(hold).value}_not_{consistency_id(fail).value}.json"


def required_witnesses() -> list:
    """(hold, fail, panel_name) triples the corpus must certify.

    Strict edges need a witness where the weaker consistency holds and the
    stronger fails; incomparable pairs need witnesses in both directions.
    A pair required by the binary panel must be certified by a purely
    binary network (which then serves the any-arity panel as well), so
    duplicates keep the binary tag.
    """
    seen: dict = {}
    for panel in PANELS:
        for stronger, weaker in panel.edges:
            seen.setdefault((weaker, stronger), panel.name)
        for a, b in panel.incomparable:
            seen.setdefault((a, b), panel.name)
            seen.setdefault((b, a), panel.name)
    return [(hold, fail, name) for (hold, fail), name in seen.items()]


def load_witness(hold, fail) -> Optional[ConstraintNetwork]:
    """Read one witness network from the shipped corpus, or None."""
    name = witness_name(hold, fail)
    path = resources.files("cspkit") / "corpus" / name
    if not path.is_file():
        return None
    return loads_network(path.read_text(encoding="utf-8"))


def certify_witness(hold, fail, net: ConstraintNetwork) -> bool:
    """True iff the network really separates the two consistencies."""
    return check_network(hold, net) and not check_network(fail, net)
