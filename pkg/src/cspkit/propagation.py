"""GAC fixpoint enforcement with trail-based restoration.

The engine uses a coarse-grained queue of (constraint, scope-position) pairs.
Binary constraints are revised through per-value partner bitmasks (O(1) per
support test); larger arities fall back to residual last-support caching with
lexicographic enumeration for conflicts-polarity tables.
"""

from __future__ import annotations

import itertools
from collections import deque
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Optional, Iterable

from .network import CONFLICTS, ConstraintNetwork, bit_values

OK = "ok"
WIPEOUT = "wipeout"


class Trail:
    """Stack of restoration frames recording value and row deletions."""

    def __init__(self):
        self._frames: list[tuple[list, list, bool, Optional[int]]] = []

    def push(self, net: ConstraintNetwork):
        self._frames.append(([], [], net.failed, net.fail_culprit))

    def pop(self, net: ConstraintNetwork):
        values, rows, failed, culprit = self._frames.pop()
        domains = net.domains
        for x, a in values:
            domains[x].mask |= 1 << a
        constraints = net.constraints
        for cid, row in rows:
            constraints[cid].restore_row(row)
        net.failed = failed
        net.fail_culprit = culprit

    @property
    def depth(self) -> int:
        return len(self._frames)

    def record_value(self, x: int, a: int):
        if self._frames:
            self._frames[-1][0].append((x, a))

    def record_row(self, cid: int, row: tuple[int, ...]):
        if self._frames:
            self._frames[-1][1].append((cid, row))

    def top_value_deletions(self) -> dict[int, set[int]]:
        """Value deletions of the top frame, grouped by variable."""
        grouped: dict[int, set[int]] = {}
        for x, a in self._frames[-1][0]:
            grouped.setdefault(x, set()).add(a)
        return grouped


@dataclass
class PropagationOutcome:
    status: str
    culprit: Optional[int] = None
    deleted_values: int = 0
    deleted_tuples: int = 0

    @property
    def ok(self) -> bool:
        return self.status == OK


def _seek_support(net: ConstraintNetwork, c, pos: int, a: int) -> bool:
    """Generic support search for arity >= 3 constraints."""
    res = c.residues.get((pos, a))
    if res is not None:
        if c.allows(res):
            domains = net.domains
            scope = c.scope
            if all(domains[scope[i]].has(res[i]) for i in range(len(scope))):
                return True
    domains = net.domains
    scope = c.scope
    if c.polarity == CONFLICTS:
        pools = [domains[v].values() for v in scope]
        pools[pos] = [a]
        table = c.table
        for row in itertools.product(*pools):
            if row not in table:
                c.residues[(pos, a)] = row
                return True
        return False
    for row in c.table:
        if row[pos] != a:
            continue
        if all(domains[scope[i]].has(row[i]) for i in range(len(scope))):
            c.residues[(pos, a)] = row
            return True
    return False


def enforce_gac(net: ConstraintNetwork, trail: Optional[Trail] = None,
                touched: Optional[Iterable[int]] = None) -> PropagationOutcome:
    """Enforce (generalized) arc consistency to fixpoint.

    ``touched`` names variables whose domains changed since the last fixpoint;
    when omitted, every (constraint, variable) pair is revised at least once.
    Deletions are recorded on the trail's top frame (if a trail is given).
    """
    if net.failed:
        return PropagationOutcome(WIPEOUT, net.fail_culprit)

    constraints = net.constraints
    domains = net.domains
    queue = deque()
    queued = set()

    def enqueue_neighbors(v: int):
        for cid in net.constraints_of[v]:
            scope = constraints[cid].scope
            for pos, w in enumerate(scope):
                if w != v and (cid, pos) not in queued:
                    queued.add((cid, pos))
                    queue.append((cid, pos))

    if touched is None:
        for c in constraints:
            for pos in range(len(c.scope)):
                queued.add((c.cid, pos))
                queue.append((c.cid, pos))
    else:
        for v in touched:
            enqueue_neighbors(v)

    deleted = 0
    while queue:
        cid, pos = queue.popleft()
        queued.discard((cid, pos))
        c = constraints[cid]
        x = c.scope[pos]
        dx = domains[x]
        removed_any = False
        if c.m0 is not None:
            partner = c.scope[1 - pos]
            masks = c.m0 if pos == 0 else c.m1
            dym = domains[partner].mask
            m = dx.mask
            while m:
                low = m & -m
                m ^= low
                if masks[low.bit_length() - 1] & dym == 0:
                    dx.mask ^= low
                    deleted += 1
                    removed_any = True
                    if trail is not None:
                        trail.record_value(x, low.bit_length() - 1)
        else:
            for a in dx.values():
                if not _seek_support(net, c, pos, a):
                    dx.mask &= ~(1 << a)
                    deleted += 1
                    removed_any = True
                    if trail is not None:
                        trail.record_value(x, a)
        if removed_any:
            if dx.mask == 0:
                net.failed = True
                net.fail_culprit = cid
                return PropagationOutcome(WIPEOUT, cid, deleted_values=deleted)
            enqueue_neighbors(x)
    return PropagationOutcome(OK, deleted_values=deleted)


@contextmanager
def singleton_check(net: ConstraintNetwork, x: int, a: int, trail: Trail):
    """Push a frame, assign x=a, enforce GAC, and restore on exit.

    Yields the propagation outcome; inside the block the network is the
    reduced network GAC(P|x=a), and the frame's deletions are readable via
    ``trail.top_value_deletions()``.
    """
    trail.push(net)
    net.assign(x, a, trail)
    out = enforce_gac(net, trail, touched=(x,))
    try:
        yield out
    finally:
        trail.pop(net)
