"""Core constraint-network model.

Networks hold per-variable domains (an immutable initial set plus a current
bitmask) and extensional constraints stored as either a positive (``supports``)
or negative (``conflicts``) tuple table.  The current domain and the denoted
relation of every constraint only ever shrink; restoration happens exclusively
through the propagation trail.

Networks are normalized at build time: same-scope constraints are merged by
intersecting their relations, unary constraints are folded into domains, and
universal constraints are dropped.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Iterator, Optional, Sequence

SUPPORTS = "supports"
CONFLICTS = "conflicts"


class NetworkError(ValueError):
    """Invalid network construction or use."""


class ResourceCapError(RuntimeError):
    """A configured resource cap or budget was exceeded."""


def bit_values(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_of(values: Iterable[int]) -> int:
    m = 0
    for v in values:
        m |= 1 << v
    return m


class Domain:
    """A variable's initial value set plus the current subset as a bitmask."""

    __slots__ = ("initial", "initial_mask", "mask")

    def __init__(self, values: Iterable[int]):
        vals = sorted(set(values))
        if vals and vals[0] < 0:
            raise NetworkError("domain values must be non-negative integers")
        self.initial = tuple(vals)
        self.initial_mask = _mask_of(vals)
        self.mask = self.initial_mask

    def has(self, v: int) -> bool:
        return (self.mask >> v) & 1 == 1

    def size(self) -> int:
        return self.mask.bit_count()

    def values(self) -> list[int]:
        return list(bit_values(self.mask))

    def clone(self) -> "Domain":
        d = Domain.__new__(Domain)
        d.initial = self.initial
        d.initial_mask = self.initial_mask
        d.mask = self.mask
        return d


class Constraint:
    """An extensional constraint over an ordered scope of distinct variables.

    ``table`` stores either the allowed rows (polarity ``supports``) or the
    forbidden rows (polarity ``conflicts``); the denoted relation is always
    read through :meth:`allows`.  Binary constraints additionally maintain
    per-value partner bitmasks so that propagation can test for a support in
    O(1).
    """

    __slots__ = (
        "cid", "scope", "polarity", "table", "weight",
        "init_doms", "init_count", "allowed_count", "m0", "m1", "residues",
    )

    def __init__(self, cid: int, scope: Sequence[int], polarity: str,
                 table: Iterable[tuple[int, ...]],
                 init_doms: Sequence[tuple[int, ...]]):
        self.cid = cid
        self.scope = tuple(scope)
        self.polarity = polarity
        self.table = set(table)
        self.weight = 1
        self.init_doms = tuple(tuple(d) for d in init_doms)
        self.init_count = 1
        for d in self.init_doms:
            self.init_count *= len(d)
        if polarity == SUPPORTS:
            self.allowed_count = len(self.table)
        else:
            self.allowed_count = self.init_count - len(self.table)
        self.m0 = self.m1 = None
        self.residues: dict = {}  # (pos, value) -> last support row (engine cache)
        if len(self.scope) == 2:
            self._build_masks()

    # -- representation-independent views -------------------------------

    @property
    def arity(self) -> int:
        return len(self.scope)

    @property
    def is_binary(self) -> bool:
        return len(self.scope) == 2

    @property
    def is_universal(self) -> bool:
        return self.allowed_count == self.init_count

    def allows(self, row: tuple[int, ...]) -> bool:
        if self.polarity == SUPPORTS:
            return row in self.table
        return row not in self.table

    def allowed_rows(self) -> Iterator[tuple[int, ...]]:
        """All currently allowed rows, in lexicographic order."""
        if self.polarity == SUPPORTS:
            return iter(sorted(self.table))
        return (row for row in itertools.product(*self.init_doms)
                if row not in self.table)

    def stored_rows(self) -> list[tuple[int, ...]]:
        return sorted(self.table)

    # -- mutation (tightening only; restoration via the trail) ----------

    def _build_masks(self):
        d0, d1 = self.init_doms
        size0 = (max(d0) + 1) if d0 else 0
        size1 = (max(d1) + 1) if d1 else 0
        full0 = _mask_of(d1)
        full1 = _mask_of(d0)
        if self.polarity == SUPPORTS:
            m0 = [0] * size0
            m1 = [0] * size1
            for a, b in self.table:
                m0[a] |= 1 << b
                m1[b] |= 1 << a
        else:
            m0 = [full0] * size0
            m1 = [full1] * size1
            for a, b in self.table:
                m0[a] &= ~(1 << b)
                m1[b] &= ~(1 << a)
        self.m0 = m0
        self.m1 = m1

    def remove_row(self, row: tuple[int, ...]):
        """Delete an allowed row from the relation (caller checks allows)."""
        if self.polarity == SUPPORTS:
            self.table.remove(row)
        else:
            self.table.add(row)
        self.allowed_count -= 1
        if self.m0 is not None:
            a, b = row
            self.m0[a] &= ~(1 << b)
            self.m1[b] &= ~(1 << a)

    def restore_row(self, row: tuple[int, ...]):
        """Inverse of remove_row; used only by trail restoration."""
        if self.polarity == SUPPORTS:
            self.table.add(row)
        else:
            self.table.remove(row)
        self.allowed_count += 1
        if self.m0 is not None:
            a, b = row
            self.m0[a] |= 1 << b
            self.m1[b] |= 1 << a

    def clone(self, cid: Optional[int] = None) -> "Constraint":
        c = Constraint.__new__(Constraint)
        c.cid = self.cid if cid is None else cid
        c.scope = self.scope
        c.polarity = self.polarity
        c.table = set(self.table)
        c.weight = self.weight
        c.init_doms = self.init_doms
        c.init_count = self.init_count
        c.allowed_count = self.allowed_count
        c.m0 = None if self.m0 is None else list(self.m0)
        c.m1 = None if self.m1 is None else list(self.m1)
        c.residues = {}
        return c


class ConstraintNetwork:
    """Mutable constraint network; the central object of the toolkit.

    ``scope_index`` maps each unordered variable pair to the binary
    constraint on it (if any); ``failed`` flags the wiped-out state reached
    when a domain or a relation empties.
    """

    def __init__(self, domains: Sequence[Domain]):
        self.domains: list[Domain] = list(domains)
        self.constraints: list[Constraint] = []
        self.scope_index: dict[tuple[int, int], int] = {}
        self.constraints_of: list[list[int]] = [[] for _ in self.domains]
        self._scope_sets: set[frozenset[int]] = set()
        self.failed = any(d.mask == 0 for d in self.domains)
        self.fail_culprit: Optional[int] = None

    # -- basic views -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.domains)

    def dom(self, x: int) -> Domain:
        return self.domains[x]

    def binary_between(self, x: int, y: int) -> Optional[Constraint]:
        cid = self.scope_index.get((x, y) if x < y else (y, x))
        return None if cid is None else self.constraints[cid]

    def copy(self) -> "ConstraintNetwork":
        net = ConstraintNetwork.__new__(ConstraintNetwork)
        net.domains = [d.clone() for d in self.domains]
        net.constraints = [c.clone() for c in self.constraints]
        net.scope_index = dict(self.scope_index)
        net.constraints_of = [list(cids) for cids in self.constraints_of]
        net._scope_sets = set(self._scope_sets)
        net.failed = self.failed
        net.fail_culprit = self.fail_culprit
        return net

    # -- structure mutation ----------------------------------------------

    def add_constraint(self, scope: Sequence[int], polarity: str,
                       table: Iterable[tuple[int, ...]]) -> Constraint:
        scope = tuple(scope)
        key = frozenset(scope)
        if len(key) != len(scope):
            raise NetworkError(f"scope {scope} repeats a variable")
        if key in self._scope_sets:
            raise NetworkError(f"duplicate constraint scope {sorted(key)}")
        init_doms = [self.domains[x].initial for x in scope]
        c = Constraint(len(self.constraints), scope, polarity, table, init_doms)
        self.constraints.append(c)
        self._scope_sets.add(key)
        for x in scope:
            self.constraints_of[x].append(c.cid)
        if len(scope) == 2:
            x, y = scope
            self.scope_index[(x, y) if x < y else (y, x)] = c.cid
        if c.allowed_count == 0:
            self.failed = True
            self.fail_culprit = c.cid
        return c

    def remove_value(self, x: int, a: int, trail=None):
        """Delete value ``a`` from dom(x), recording on the trail if given."""
        d = self.domains[x]
        d.mask &= ~(1 << a)
        if trail is not None:
            trail.record_value(x, a)
        if d.mask == 0:
            self.failed = True

    def assign(self, x: int, a: int, trail=None):
        """Reduce dom(x) to {a}; error if ``a`` is not currently present."""
        d = self.domains[x]
        if not d.has(a):
            raise NetworkError(f"value {a} not in current domain of variable {x}")
        for v in bit_values(d.mask & ~(1 << a)):
            d.mask &= ~(1 << v)
            if trail is not None:
                trail.record_value(x, v)

    # -- instantiations and nogoods ---------------------------------------

    def _as_assignment(self, pairs: Iterable[tuple[int, int]]) -> dict[int, int]:
        inst: dict[int, int] = {}
        for x, a in pairs:
            if not 0 <= x < len(self.domains):
                raise NetworkError(f"unknown variable id {x}")
            if x in inst and inst[x] != a:
                raise NetworkError(f"instantiation holds two values for variable {x}")
            inst[x] = a
        return inst

    def is_locally_consistent(self, pairs: Iterable[tuple[int, int]]) -> bool:
        """True iff the instantiation is valid and satisfies every covered constraint."""
        inst = self._as_assignment(pairs)
        for x, a in inst.items():
            if not self.domains[x].has(a):
                return False
        if len(inst) < 2:
            return True
        seen = set()
        for x in inst:
            for cid in self.constraints_of[x]:
                if cid in seen:
                    continue
                seen.add(cid)
                c = self.constraints[cid]
                if all(v in inst for v in c.scope):
                    if not c.allows(tuple(inst[v] for v in c.scope)):
                        return False
        return True

    def discard_nogood(self, pairs: Iterable[tuple[int, int]], trail=None):
        """Retract a first- or second-order nogood from the network.

        Size-1 nogoods remove a value; size-2 nogoods remove a tuple from the
        binary constraint on the pair, creating a fresh conflicts-constraint
        when none exists.  Retracting an already-absent nogood is a no-op.
        """
        inst = self._as_assignment(pairs)
        if len(inst) == 1:
            (x, a), = inst.items()
            if self.domains[x].has(a):
                self.remove_value(x, a, trail)
            return
        if len(inst) != 2:
            raise NetworkError(f"discard_nogood supports sizes 1 and 2, got {len(inst)}")
        (x, a), (y, b) = sorted(inst.items())
        c = self.binary_between(x, y)
        if c is None:
            self.add_constraint((x, y), CONFLICTS, {(a, b)})
            return
        row = (a, b) if c.scope == (x, y) else (b, a)
        if c.allows(row):
            c.remove_row(row)
            if trail is not None:
                trail.record_row(c.cid, row)
            if c.allowed_count == 0:
                self.failed = True
                self.fail_culprit = c.cid

    def drop_constraints(self, cids: set) -> None:
        """Remove the given constraints and renumber the survivors."""
        if not cids:
            return
        remap = {}
        keep = []
        for c in self.constraints:
            if c.cid in cids:
                continue
            remap[c.cid] = len(keep)
            keep.append(c)
        self.constraints = keep
        self.scope_index = {}
        self._scope_sets = set()
        self.constraints_of = [[] for _ in self.domains]
        for new_cid, c in enumerate(keep):
            c.cid = new_cid
            self._scope_sets.add(frozenset(c.scope))
            for x in c.scope:
                self.constraints_of[x].append(new_cid)
            if c.is_binary:
                x, y = c.scope
                self.scope_index[(x, y) if x < y else (y, x)] = new_cid
        if self.fail_culprit is not None:
            self.fail_culprit = remap.get(self.fail_culprit)

    def nogood_representation(self) -> frozenset[frozenset[tuple[int, int]]]:
        """Removed-value singletons plus forbidden rows w.r.t. initial domains."""
        out = set()
        for x, d in enumerate(self.domains):
            for v in bit_values(d.initial_mask & ~d.mask):
                out.add(frozenset(((x, v),)))
        for c in self.constraints:
            if c.polarity == CONFLICTS:
                forbidden = c.table
            else:
                forbidden = (row for row in itertools.product(*c.init_doms)
                             if row not in c.table)
            for row in forbidden:
                out.add(frozenset(zip(c.scope, row)))
        return frozenset(out)


def build_network(variables: Sequence, constraints: Iterable = ()) -> ConstraintNetwork:
    """Build a normalized network.

    ``variables`` lists initial domains (an iterable of values, or an int ``k``
    meaning ``range(k)``); ``constraints`` lists ``(scope, polarity, table)``
    triples.  Same-scope constraints are merged by intersecting relations,
    unary constraints are folded into domains, universal constraints dropped.
    """
    domains = [Domain(range(v)) if isinstance(v, int) else Domain(v)
               for v in variables]
    n = len(domains)

    merged: dict[frozenset[int], tuple[tuple[int, ...], str, set]] = {}
    order: list[frozenset[int]] = []
    for spec in constraints:
        scope, polarity, table = spec
        scope = tuple(scope)
        if polarity not in (SUPPORTS, CONFLICTS):
            raise NetworkError(f"unknown polarity {polarity!r}")
        if len(set(scope)) != len(scope):
            raise NetworkError(f"scope {scope} repeats a variable")
        if not scope:
            raise NetworkError("empty constraint scope")
        for x in scope:
            if not 0 <= x < n:
                raise NetworkError(f"unknown variable id {x} in scope")
        rows = set()
        for row in table:
            row = tuple(row)
            if len(row) != len(scope):
                raise NetworkError(
                    f"row {row} has arity {len(row)}, scope {scope} expects {len(scope)}")
            for x, v in zip(scope, row):
                if v < 0 or (domains[x].initial_mask >> v) & 1 == 0:
                    raise NetworkError(
                        f"value {v} outside initial domain of variable {x}")
            rows.add(row)

        if len(scope) == 1:
            # Unary constraints are folded straight into the domain.
            x = scope[0]
            listed = {r[0] for r in rows}
            keep = listed if polarity == SUPPORTS else set(domains[x].initial) - listed
            domains[x].mask &= _mask_of(keep)
            continue

        key = frozenset(scope)
        if key not in merged:
            merged[key] = (scope, polarity, rows)
            order.append(key)
        else:
            # Merge by intersecting denoted relations, keeping the first
            # declaration's scope order and polarity.
            scope0, pol0, rows0 = merged[key]
            perm = [scope.index(x) for x in scope0]
            remap = {tuple(row[i] for i in perm) for row in rows}
            cross = set(itertools.product(*(domains[x].initial for x in scope0)))
            allowed_new = remap if polarity == SUPPORTS else cross - remap
            allowed_old = rows0 if pol0 == SUPPORTS else cross - rows0
            allowed = allowed_old & allowed_new
            table0 = allowed if pol0 == SUPPORTS else cross - allowed
            merged[key] = (scope0, pol0, table0)

    net = ConstraintNetwork(domains)
    for key in order:
        scope, polarity, rows = merged[key]
        init_count = 1
        for x in scope:
            init_count *= len(domains[x].initial)
        allowed = len(rows) if polarity == SUPPORTS else init_count - len(rows)
        if allowed == init_count:
            continue  # universal: forbids nothing
        net.add_constraint(scope, polarity, rows)
    return net


def compare(p1: ConstraintNetwork, p2: ConstraintNetwork) -> str:
    """Compare two networks under the nogood-representation partial order.

    Returns ``"equal"``, ``"smaller"`` (p1 strictly below p2, i.e. p1 carries
    strictly more nogoods), ``"greater"``, or ``"incomparable"``.  The failed
    network is the unique smallest element.
    """
    if p1.n != p2.n or any(d1.initial != d2.initial
                           for d1, d2 in zip(p1.domains, p2.domains)):
        raise NetworkError("compare requires identical variables and initial domains")
    if p1.failed or p2.failed:
        if p1.failed and p2.failed:
            return "equal"
        return "smaller" if p1.failed else "greater"
    n1 = p1.nogood_representation()
    n2 = p2.nogood_representation()
    if n1 == n2:
        return "equal"
    if n1 >= n2:
        return "smaller"
    if n1 <= n2:
        return "greater"
    return "incomparable"


def refines(p1: ConstraintNetwork, p2: ConstraintNetwork) -> bool:
    """True when ``p1`` carries every pruning of ``p2``, up to subsumption.

    Unlike :func:`compare`, which orders the literal nogood representations,
    this accepts a value nogood in ``p1`` standing in for any of ``p2``'s
    learned rows that mention the deleted value (and, generally, any nogood
    standing in for a superset).  Closures that record the same information
    as domain prunings versus relation prunings compare as refining each
    other even though their representations diverge.
    """
    if p1.n != p2.n or any(d1.initial != d2.initial
                           for d1, d2 in zip(p1.domains, p2.domains)):
        raise NetworkError("refines requires identical variables and initial domains")
    if p2.failed:
        return p1.failed
    if p1.failed:
        return True
    n1 = p1.nogood_representation()
    singletons = {next(iter(g)) for g in n1 if len(g) == 1}
    larger = [g for g in n1 if len(g) > 1]
    for nogood in p2.nogood_representation():
        if nogood in n1:
            continue
        if any(lit in singletons for lit in nogood):
            continue
        if any(g <= nogood for g in larger):
            continue
        return False
    return True


def canonicalize(net: ConstraintNetwork, baseline: ConstraintNetwork) -> int:
    """Erase learned pair records that mention a deleted value.

    A tuple forbidden during propagation becomes redundant once one of its
    values is deleted: the value nogood subsumes it.  Which of these records
    a propagator happens to write down depends on its sweep order, so mixed
    value-and-pair propagators erase them on completion, giving every
    propagation scheme the same normal form.  Rows that ``baseline`` (the
    network the propagation started from) already forbade are kept, so the
    result still carries every nogood of the input.  Binary constraints left
    universal are dropped.  Returns the number of rows erased.
    """
    if net.failed:
        return 0
    restored = 0
    emptied = set()
    for c in net.constraints:
        if not c.is_binary:
            continue
        x, y = c.scope
        base = baseline.binary_between(x, y)
        flip = base is not None and base.scope != c.scope
        for row in itertools.product(*c.init_doms):
            a, b = row
            if net.domains[x].has(a) and net.domains[y].has(b):
                continue
            if c.allows(row):
                continue
            if base is not None and not base.allows((b, a) if flip else row):
                continue
            c.restore_row(row)
            restored += 1
        if c.is_universal:
            emptied.add(c.cid)
    net.drop_constraints(emptied)
    return restored
