"""Fixed-point enforcers for the singleton and pair consistencies.

The central routine is a circular marker loop: variables are revised in
round-robin order, and the loop stops once a full circle passes without an
effective revision.  Revising a variable singleton-checks each of its
values; a wipeout deletes the value, and otherwise the values deleted
during the check are turned into pair nogoods against the checked value
(``learn_part`` edits existing binary relations only; ``learn_full`` also
creates a conflicts constraint when the pair of variables had none).

The module also provides a triangle-based enforcer for the closed
2-length-path consistency and a restart-on-deletion singleton baseline.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .network import (
    CONFLICTS,
    ConstraintNetwork,
    ResourceCapError,
    bit_values,
    canonicalize,
)
from .propagation import Trail, enforce_gac, singleton_check


@dataclass
class EnforceReport:
    """Outcome and effort counters of one enforcement run."""

    consistent: bool
    passes: int = 0
    deleted_values: int = 0
    deleted_tuples: int = 0
    added_constraints: int = 0
    elapsed: float = 0.0


@dataclass
class _Counters:
    deleted_values: int = 0
    deleted_tuples: int = 0
    added_constraints: int = 0
    touched: set = field(default_factory=set)


def _variable_order(net: ConstraintNetwork,
                    order: Optional[Sequence[int]]) -> list[int]:
    if order is None:
        return list(range(net.n))
    order = list(order)
    if sorted(order) != list(range(net.n)):
        raise ValueError("order must be a permutation of the variable ids")
    return order


def _learn_part(net: ConstraintNetwork, x: int, a: int, y: int,
                deleted: set, counters: _Counters) -> bool:
    """Remove every pair (a, b) with b deleted from the binary relation."""
    c = net.binary_between(x, y)
    if c is None:
        return False
    removed = False
    for b in sorted(deleted):
        row = (a, b) if c.scope == (x, y) else (b, a)
        if c.allows(row):
            c.remove_row(row)
            counters.deleted_tuples += 1
            removed = True
    if removed:
        counters.touched.update((x, y))
        if c.allowed_count == 0:
            net.failed = True
            net.fail_culprit = c.cid
    return removed


def _learn_full(net: ConstraintNetwork, x: int, a: int, y: int,
                deleted: set, counters: _Counters) -> bool:
    """As _learn_part, but create the missing binary constraint."""
    if net.binary_between(x, y) is not None:
        return _learn_part(net, x, a, y, deleted, counters)
    if x < y:
        rows = {(a, b) for b in deleted}
        net.add_constraint((x, y), CONFLICTS, rows)
    else:
        rows = {(b, a) for b in deleted}
        net.add_constraint((y, x), CONFLICTS, rows)
    counters.added_constraints += 1
    counters.deleted_tuples += len(rows)
    counters.touched.update((x, y))
    return True


def _revise_variable(net: ConstraintNetwork, x: int, learn: Callable,
                     trail: Trail, counters: _Counters) -> bool:
    """Singleton-check every value of x, harvesting pair nogoods."""
    effective = False
    for a in net.domains[x].values():
        if net.failed:
            return True
        with singleton_check(net, x, a, trail) as out:
            deleted = None if not out.ok else trail.top_value_deletions()
        if deleted is None:
            net.remove_value(x, a)
            counters.deleted_values += 1
            counters.touched.add(x)
            effective = True
        else:
            for y in sorted(deleted):
                if y != x and learn(net, x, a, y, deleted[y], counters):
                    effective = True
    return effective


def _marker_loop(net: ConstraintNetwork, learn: Callable,
                 order: Optional[Sequence[int]]) -> EnforceReport:
    start = time.perf_counter()
    counters = _Counters()
    report = EnforceReport(consistent=False)
    baseline = net.copy()
    out = enforce_gac(net)
    counters.deleted_values += out.deleted_values
    if out.ok:
        variables = _variable_order(net, order)
        trail = Trail()
        idx = marker = 0
        revise_calls = 0
        while True:
            revise_calls += 1
            if _revise_variable(net, variables[idx], learn, trail, counters):
                out = enforce_gac(net, touched=counters.touched)
                counters.touched.clear()
                counters.deleted_values += out.deleted_values
                if not out.ok:
                    break
                marker = idx
            idx = (idx + 1) % len(variables)
            if idx == marker:
                report.consistent = True
                break
        report.passes = math.ceil(revise_calls / len(variables))
    canonicalize(net, baseline)
    report.deleted_values = counters.deleted_values
    report.deleted_tuples = counters.deleted_tuples
    report.added_constraints = counters.added_constraints
    report.elapsed = time.perf_counter() - start
    return report


def enforce_scdc(net: ConstraintNetwork,
                 order: Optional[Sequence[int]] = None) -> EnforceReport:
    """Enforce the strong conservative pair consistency in place.

    Pair nogoods are recorded only on existing binary constraints, so no
    constraint is ever added (on non-binary networks the fixpoint is the
    singleton-plus-conservative-pairs closure).
    """
    return _marker_loop(net, _learn_part, order)


def enforce_sdc(net: ConstraintNetwork,
                order: Optional[Sequence[int]] = None,
                max_new_entries: int = 10 ** 8) -> EnforceReport:
    """Enforce the strong (unrestricted) pair consistency in place.

    Pairs of variables without a binary constraint get a fresh conflicts
    table, which costs up to n^2 d^2 / 2 entries; inputs whose worst case
    exceeds ``max_new_entries`` are refused.
    """
    d = max((len(dom.initial) for dom in net.domains), default=0)
    potential = net.n * (net.n - 1) // 2 * d * d
    if potential > max_new_entries:
        raise ResourceCapError(
            f"enforcing unrestricted pair consistency may need {potential} "
            f"new conflict entries (cap {max_new_entries})")
    return _marker_loop(net, _learn_full, order)


def enforce_sac1(net: ConstraintNetwork,
                 order: Optional[Sequence[int]] = None) -> EnforceReport:
    """Delete singleton-inconsistent values, restarting after any deletion."""
    start = time.perf_counter()
    report = EnforceReport(consistent=False)
    out = enforce_gac(net)
    report.deleted_values += out.deleted_values
    if out.ok:
        variables = _variable_order(net, order)
        trail = Trail()
        restart = True
        while restart and not net.failed:
            restart = False
            report.passes += 1
            for x in variables:
                for a in net.domains[x].values():
                    with singleton_check(net, x, a, trail) as check:
                        wiped = not check.ok
                    if wiped:
                        net.remove_value(x, a)
                        report.deleted_values += 1
                        if not net.failed:
                            out = enforce_gac(net, touched=(x,))
                            report.deleted_values += out.deleted_values
                        restart = True
                        break
                if restart:
                    break
        report.consistent = not net.failed
    report.elapsed = time.perf_counter() - start
    return report


def _triangles(net: ConstraintNetwork) -> list[tuple[int, int, int, int]]:
    """(main constraint, third variable, side x-z, side y-z) quadruples."""
    found = []
    for c in net.constraints:
        if not c.is_binary:
            continue
        x, y = c.scope
        for z in range(net.n):
            if z == x or z == y:
                continue
            cxz = net.binary_between(x, z)
            cyz = net.binary_between(y, z)
            if cxz is not None and cyz is not None:
                found.append((c.cid, z, cxz.cid, cyz.cid))
    return found


def _side_mask(c, var: int, value: int) -> int:
    """Bitmask of z-values compatible with (var, value) on side constraint c."""
    return c.m0[value] if c.scope[0] == var else c.m1[value]


def enforce_scpc(net: ConstraintNetwork,
                 order: Optional[Sequence[int]] = None) -> EnforceReport:
    """Enforce closed-2-length-path consistency plus arc consistency.

    Every allowed pair on a triangle edge needs a compatible value of the
    third variable; pairs without one are removed, interleaved with arc
    propagation, until a full round changes nothing.
    """
    start = time.perf_counter()
    report = EnforceReport(consistent=False)
    counters = _Counters()
    baseline = net.copy()
    out = enforce_gac(net)
    counters.deleted_values += out.deleted_values
    if out.ok:
        variables = _variable_order(net, order)
        rank = {x: i for i, x in enumerate(variables)}
        triangles = sorted(
            _triangles(net),
            key=lambda t: (rank[net.constraints[t[0]].scope[0]],
                           rank[net.constraints[t[0]].scope[1]], rank[t[1]]))
        changed = True
        while changed and not net.failed:
            changed = False
            report.passes += 1
            for main, z, s1, s2 in triangles:
                c = net.constraints[main]
                x, y = c.scope
                dz = net.domains[z].mask
                dy = net.domains[y].mask
                removed_here = False
                for a in net.domains[x].values():
                    for b in bit_values(c.m0[a] & dy):
                        witnesses = (_side_mask(net.constraints[s1], x, a)
                                     & _side_mask(net.constraints[s2], y, b)
                                     & dz)
                        if witnesses == 0:
                            c.remove_row((a, b))
                            counters.deleted_tuples += 1
                            removed_here = True
                if c.allowed_count == 0:
                    net.failed = True
                    net.fail_culprit = main
                    break
                if removed_here:
                    changed = True
                    counters.touched.update((x, y))
            if not net.failed and counters.touched:
                out = enforce_gac(net, touched=counters.touched)
                counters.touched.clear()
                counters.deleted_values += out.deleted_values
                if out.deleted_values:
                    changed = True
                if not out.ok:
                    break
        report.consistent = not net.failed
    canonicalize(net, baseline)
    report.deleted_values = counters.deleted_values
    report.deleted_tuples = counters.deleted_tuples
    report.elapsed = time.perf_counter() - start
    return report
