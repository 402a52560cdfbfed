"""Brute-force definitional consistency checkers and closures.

Everything here is written for clarity and literal correspondence with the
definitions, not for speed: domains and relations are swept exhaustively, and
singleton subproblems are solved by a naive fixpoint on a private copy.  The
module exists to certify the fast enforcers, so it refuses inputs beyond small
scale caps instead of attempting them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .network import (ConstraintNetwork, NetworkError, ResourceCapError,
                      canonicalize)

ORACLE_MAX_N = 8
ORACLE_MAX_D = 5
ORACLE_MAX_ARITY = 4


class Consistency(str, Enum):
    """Identifiers for every consistency this module can check."""

    GAC = "gac"
    SAC = "sac"
    BISAC = "bisac"
    PC = "pc"
    THREE_C = "3c"
    DC = "dc"
    TWO_SAC = "2sac"
    PPC = "ppc"
    CPC = "cpc"
    CDC = "cdc"
    C3C = "c3c"
    C2SAC = "c2sac"
    SPC = "spc"
    S3C = "s3c"
    SDC = "sdc"
    S2SAC = "s2sac"
    SPPC = "sppc"
    SCPC = "scpc"
    SCDC = "scdc"
    SC3C = "sc3c"
    SC2SAC = "sc2sac"
    SAC_CDC = "sac+cdc"
    INVERSE = "inverse"


_ALIASES = {"ac": Consistency.GAC, "gac": Consistency.GAC}

# strong variant -> underlying consistency
STRONG_BASE = {
    Consistency.SPC: Consistency.PC,
    Consistency.S3C: Consistency.THREE_C,
    Consistency.SDC: Consistency.DC,
    Consistency.S2SAC: Consistency.TWO_SAC,
    Consistency.SPPC: Consistency.PPC,
    Consistency.SCPC: Consistency.CPC,
    Consistency.SCDC: Consistency.CDC,
    Consistency.SC3C: Consistency.C3C,
    Consistency.SC2SAC: Consistency.C2SAC,
}

PAIR_CONSISTENCIES = {
    Consistency.PC, Consistency.THREE_C, Consistency.DC, Consistency.TWO_SAC,
    Consistency.CPC, Consistency.CDC, Consistency.C3C, Consistency.C2SAC,
}

# conservative variant -> unrestricted base check
_CONSERVATIVE_BASE = {
    Consistency.CDC: Consistency.DC,
    Consistency.C3C: Consistency.THREE_C,
    Consistency.C2SAC: Consistency.TWO_SAC,
}


def consistency_id(name) -> Consistency:
    if isinstance(name, Consistency):
        return name
    key = str(name).lower()
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return Consistency(key)
    except ValueError:
        raise NetworkError(f"unknown consistency id {name!r}") from None


def check_caps(net: ConstraintNetwork):
    """Refuse networks beyond the oracle's intended scale."""
    if net.n > ORACLE_MAX_N:
        raise ResourceCapError(
            f"oracle cap exceeded: {net.n} variables > {ORACLE_MAX_N}")
    for d in net.domains:
        if len(d.initial) > ORACLE_MAX_D:
            raise ResourceCapError(
                f"oracle cap exceeded: domain size {len(d.initial)} > {ORACLE_MAX_D}")
    for c in net.constraints:
        if c.arity > ORACLE_MAX_ARITY:
            raise ResourceCapError(
                f"oracle cap exceeded: arity {c.arity} > {ORACLE_MAX_ARITY}")


# ---------------------------------------------------------------------------
# Naive fixpoints and singleton subproblems


def naive_gac(net: ConstraintNetwork) -> ConstraintNetwork:
    """In-place, queue-free GAC fixpoint by repeated full sweeps."""
    changed = True
    while changed and not net.failed:
        changed = False
        for c in net.constraints:
            domains = net.domains
            scope = c.scope
            valid = [row for row in c.allowed_rows()
                     if all(domains[v].has(row[i]) for i, v in enumerate(scope))]
            for pos, x in enumerate(scope):
                supported = {row[pos] for row in valid}
                for a in domains[x].values():
                    if a not in supported:
                        net.remove_value(x, a)
                        changed = True
                if net.failed:
                    return net
    return net


def gac_subproblem(net: ConstraintNetwork,
                   assignments: Iterable[tuple[int, int]]) -> ConstraintNetwork:
    """GAC(P | assignments) on a private copy of the network."""
    sub = net.copy()
    for x, a in assignments:
        if not sub.domains[x].has(a):
            sub.failed = True
            return sub
        sub.assign(x, a)
    return naive_gac(sub)


def gac_consistent(net: ConstraintNetwork) -> bool:
    """True iff every current value has a valid support on every constraint."""
    if net.failed:
        return False
    for c in net.constraints:
        domains = net.domains
        scope = c.scope
        valid = [row for row in c.allowed_rows()
                 if all(domains[v].has(row[i]) for i, v in enumerate(scope))]
        for pos, x in enumerate(scope):
            supported = {row[pos] for row in valid}
            for a in domains[x].values():
                if a not in supported:
                    return False
    return True


# ---------------------------------------------------------------------------
# Value checkers


def check_value(phi, net: ConstraintNetwork, x: int, a: int) -> bool:
    """SAC / BiSAC / inverse-consistency check of a single value."""
    phi = consistency_id(phi)
    if not net.domains[x].has(a):
        raise NetworkError(f"value {a} not in current domain of variable {x}")
    if phi == Consistency.SAC:
        return not gac_subproblem(net, [(x, a)]).failed
    if phi == Consistency.BISAC:
        reduced = net.copy()
        for y in range(net.n):
            if y == x:
                continue
            for b in net.domains[y].values():
                sub = gac_subproblem(net, [(y, b)])
                if sub.failed or not sub.domains[x].has(a):
                    reduced.remove_value(y, b)
        if reduced.failed:
            return False
        return not gac_subproblem(reduced, [(x, a)]).failed
    if phi == Consistency.INVERSE:
        pinned = net.copy()
        pinned.assign(x, a)
        return bool(enumerate_solutions(pinned, limit=1))
    raise NetworkError(f"{phi.value} is not a value consistency")


# ---------------------------------------------------------------------------
# Pair checkers


def check_pair(phi, net: ConstraintNetwork, x: int, a: int, y: int, b: int) -> bool:
    """Definitional check of one locally consistent pair against ``phi``."""
    phi = consistency_id(phi)
    phi = STRONG_BASE.get(phi, phi)
    if not net.is_locally_consistent([(x, a), (y, b)]):
        raise NetworkError(
            f"pair ({x},{a}),({y},{b}) is not locally consistent; caller must filter")

    if phi in _CONSERVATIVE_BASE:
        if net.binary_between(x, y) is None:
            return True
        phi = _CONSERVATIVE_BASE[phi]

    if phi == Consistency.PC:
        for z in range(net.n):
            if z == x or z == y:
                continue
            if not any(net.is_locally_consistent([(x, a), (z, c)])
                       and net.is_locally_consistent([(y, b), (z, c)])
                       for c in net.domains[z].values()):
                return False
        return True

    if phi == Consistency.THREE_C:
        for z in range(net.n):
            if z == x or z == y:
                continue
            if not any(net.is_locally_consistent([(x, a), (y, b), (z, c)])
                       for c in net.domains[z].values()):
                return False
        return True

    if phi == Consistency.DC:
        sub = gac_subproblem(net, [(x, a)])
        if sub.failed or not sub.domains[y].has(b):
            return False
        sub = gac_subproblem(net, [(y, b)])
        return not sub.failed and sub.domains[x].has(a)

    if phi == Consistency.TWO_SAC:
        return not gac_subproblem(net, [(x, a), (y, b)]).failed

    if phi == Consistency.CPC:
        if net.binary_between(x, y) is None:
            return True
        for z in range(net.n):
            if z == x or z == y:
                continue
            if net.binary_between(x, z) is None or net.binary_between(y, z) is None:
                continue
            if not any(net.is_locally_consistent([(x, a), (z, c)])
                       and net.is_locally_consistent([(y, b), (z, c)])
                       for c in net.domains[z].values()):
                return False
        return True

    raise NetworkError(f"{phi.value} is not a pair consistency")


# ---------------------------------------------------------------------------
# Paths and path-based checks


@dataclass(frozen=True)
class Path:
    """A sequence of variables, length >= 2, endpoints distinct, repeats allowed."""

    variables: tuple[int, ...]

    def __post_init__(self):
        if len(self.variables) < 2:
            raise NetworkError("a path needs at least two variables")
        if self.variables[0] == self.variables[-1]:
            raise NetworkError("path endpoints must be distinct variables")

    def is_graph_path(self, net: ConstraintNetwork) -> bool:
        return all(u != v and net.binary_between(u, v) is not None
                   for u, v in zip(self.variables, self.variables[1:]))

    def is_closed(self, net: ConstraintNetwork) -> bool:
        return net.binary_between(self.variables[0], self.variables[-1]) is not None


def _pair_compatible(net: ConstraintNetwork, u: int, uv: int, v: int, vv: int) -> bool:
    """Local consistency of {(u,uv),(v,vv)} assuming both values are in-domain."""
    if u == v:
        return uv == vv
    c = net.binary_between(u, v)
    if c is None:
        return True
    if c.scope[0] == u:
        return c.allows((uv, vv))
    return c.allows((vv, uv))


def check_path_support(net: ConstraintNetwork, path: Path, a1: int, ak: int
                       ) -> Optional[tuple[int, ...]]:
    """A support for {(x1,a1),(xk,ak)} along the path, or None.

    Layered reachability: forward pass collects, per position, the values
    reachable from a1 through consecutive locally consistent pairs (repeated
    variables may take fresh values except at consecutive positions);
    a backward pass extracts one witness tuple ending at ak.
    """
    seq = path.variables
    if not net.domains[seq[0]].has(a1):
        raise NetworkError("a1 not in the current domain of the path's first variable")
    if not net.domains[seq[-1]].has(ak):
        raise NetworkError("ak not in the current domain of the path's last variable")

    layers: list[dict[int, Optional[int]]] = [{a1: None}]
    for i in range(1, len(seq)):
        prev_var, cur_var = seq[i - 1], seq[i]
        layer: dict[int, Optional[int]] = {}
        candidates = [ak] if i == len(seq) - 1 else net.domains[cur_var].values()
        for v in candidates:
            if not net.domains[cur_var].has(v):
                continue
            for u in layers[i - 1]:
                if _pair_compatible(net, prev_var, u, cur_var, v):
                    layer[v] = u
                    break
        if not layer:
            return None
        layers.append(layer)

    if ak not in layers[-1]:
        return None
    out = [ak]
    for i in range(len(seq) - 1, 0, -1):
        out.append(layers[i][out[-1]])
    out.reverse()
    return tuple(out)


# ---------------------------------------------------------------------------
# Walk-relation machinery (PPC and the all-graph-paths variant)


def _edge_relation(net: ConstraintNetwork, u: int, v: int) -> frozenset:
    """rel(c_uv) restricted to current domains, oriented u -> v."""
    c = net.binary_between(u, v)
    rows = set()
    du, dv = net.domains[u], net.domains[v]
    for a in du.values():
        for b in dv.values():
            ordered = (a, b) if c.scope[0] == u else (b, a)
            if c.allows(ordered):
                rows.add((a, b))
    return frozenset(rows)


def _compose(r1: frozenset, r2: frozenset) -> frozenset:
    by_mid: dict[int, list[int]] = {}
    for b, c in r2:
        by_mid.setdefault(b, []).append(c)
    out = set()
    for a, b in r1:
        for c in by_mid.get(b, ()):
            out.add((a, c))
    return frozenset(out)


def walk_relations(net: ConstraintNetwork, *, max_relations: int = 50000
                   ) -> dict[tuple[int, int], set[frozenset]]:
    """All composed relations along graph walks, per ordered variable pair.

    Kleene-style saturation: seed with every oriented edge relation, then
    keep composing with edge relations until no new matrix appears.  The set
    of d x d boolean matrices is finite, so this terminates (or trips the cap).
    """
    check_caps(net)
    edges: dict[int, list[int]] = {}
    base: dict[tuple[int, int], frozenset] = {}
    for (u, v) in net.scope_index:
        base[(u, v)] = _edge_relation(net, u, v)
        base[(v, u)] = frozenset((b, a) for a, b in base[(u, v)])
        edges.setdefault(u, []).append(v)
        edges.setdefault(v, []).append(u)

    found: dict[tuple[int, int], set[frozenset]] = {}
    queue = []
    total = 0
    for key, rel in base.items():
        found.setdefault(key, set()).add(rel)
        queue.append((key[0], key[1], rel))
        total += 1
    while queue:
        x, y, rel = queue.pop()
        for z in edges.get(y, ()):
            composed = _compose(rel, base[(y, z)])
            bucket = found.setdefault((x, z), set())
            if composed not in bucket:
                bucket.add(composed)
                total += 1
                if total > max_relations:
                    raise ResourceCapError(
                        f"walk-relation cap exceeded ({max_relations})")
                queue.append((x, z, composed))
    return found


def check_ppc(net: ConstraintNetwork, *, max_relations: int = 50000
              ) -> tuple[bool, Optional[tuple[int, int, int, int]]]:
    """Closed graph-path consistency of the whole network.

    Returns (True, None) or (False, (x, a, y, b)) for the first locally
    consistent pair of some binary constraint not supported along some closed
    graph-path between its variables.
    """
    if net.failed:
        return False, None
    relations = walk_relations(net, max_relations=max_relations)
    for key in sorted(net.scope_index):
        u, v = key
        direct = _edge_relation(net, u, v)
        for walk_rel in relations.get((u, v), ()):
            missing = direct - walk_rel
            if missing:
                a, b = min(missing)
                return False, (u, a, v, b)
    return True, None


def check_all_graph_paths(net: ConstraintNetwork, *, max_relations: int = 50000) -> bool:
    """Consistency of every graph-path of the network, closed or not."""
    if net.failed:
        return False
    relations = walk_relations(net, max_relations=max_relations)
    for (x, y), rels in relations.items():
        if x == y:
            continue
        candidate = set()
        c = net.binary_between(x, y)
        for a in net.domains[x].values():
            for b in net.domains[y].values():
                if c is None or c.allows((a, b) if c.scope[0] == x else (b, a)):
                    candidate.add((a, b))
        for walk_rel in rels:
            if not candidate <= walk_rel:
                return False
    return True


# ---------------------------------------------------------------------------
# Solutions


def enumerate_solutions(net: ConstraintNetwork, limit: Optional[int] = None
                        ) -> list[tuple[int, ...]]:
    """All solutions in lexicographic order (optionally stop after ``limit``).

    Backtracking over variables 0..n-1 with values ascending; a constraint is
    checked as soon as its scope is fully assigned.
    """
    check_caps(net)
    if net.failed or limit == 0:
        return []
    closing: list[list] = [[] for _ in range(net.n)]
    for c in net.constraints:
        closing[max(c.scope)].append(c)
    out: list[tuple[int, ...]] = []
    assigned = [0] * net.n

    def extend(i: int) -> bool:
        if i == net.n:
            out.append(tuple(assigned))
            return limit is not None and len(out) >= limit
        for a in net.domains[i].values():
            assigned[i] = a
            if all(c.allows(tuple(assigned[v] for v in c.scope)) for c in closing[i]):
                if extend(i + 1):
                    return True
        return False

    extend(0)
    return out


# ---------------------------------------------------------------------------
# Whole-network checks


def check_network(phi, net: ConstraintNetwork) -> bool:
    """Definitional check of the whole network against ``phi``."""
    phi = consistency_id(phi)
    check_caps(net)
    if net.failed:
        return False
    if phi == Consistency.GAC:
        return gac_consistent(net)
    if phi in STRONG_BASE:
        return gac_consistent(net) and check_network(STRONG_BASE[phi], net)
    if phi == Consistency.SAC_CDC:
        return (check_network(Consistency.SAC, net)
                and check_network(Consistency.CDC, net))
    if phi in (Consistency.SAC, Consistency.BISAC, Consistency.INVERSE):
        return all(check_value(phi, net, x, a)
                   for x in range(net.n) for a in net.domains[x].values())
    if phi == Consistency.PPC:
        return check_ppc(net)[0]
    if phi in PAIR_CONSISTENCIES:
        for x in range(net.n):
            for y in range(x + 1, net.n):
                for a in net.domains[x].values():
                    for b in net.domains[y].values():
                        if not net.is_locally_consistent([(x, a), (y, b)]):
                            continue
                        if not check_pair(phi, net, x, a, y, b):
                            return False
        return True
    raise NetworkError(f"no network check for {phi.value}")


# ---------------------------------------------------------------------------
# Closures


_NO_CLOSURE = {Consistency.BISAC, Consistency.INVERSE}


def closurable(phi) -> bool:
    """Whether oracle_closure accepts this consistency."""
    return consistency_id(phi) not in _NO_CLOSURE


def oracle_closure(phi, net: ConstraintNetwork, *,
                   max_checks: int = 2_000_000) -> ConstraintNetwork:
    """The largest sub-network of ``net`` consistent per ``phi``, by sweeping.

    Repeatedly discards values (for value-based components) and locally
    consistent pairs (for pair-based components) that fail their definitional
    check, until a full sweep discards nothing.  Works on a copy; the wiped
    network is returned as-is when a discard empties a domain or a relation.
    """
    phi = consistency_id(phi)
    check_caps(net)
    if phi in _NO_CLOSURE:
        raise NetworkError(f"{phi.value} has no closure operator here")

    value_rule: Optional[Consistency] = None
    pair_rule: Optional[Consistency] = None
    ppc_rule = False
    if phi == Consistency.GAC:
        value_rule = Consistency.GAC
    elif phi == Consistency.SAC:
        value_rule = Consistency.SAC
    elif phi == Consistency.SAC_CDC:
        value_rule = Consistency.SAC
        pair_rule = Consistency.CDC
    elif phi in STRONG_BASE:
        value_rule = Consistency.GAC
        base = STRONG_BASE[phi]
        if base == Consistency.PPC:
            ppc_rule = True
        else:
            pair_rule = base
    elif phi == Consistency.PPC:
        ppc_rule = True
    elif phi in PAIR_CONSISTENCIES:
        pair_rule = phi
    else:
        raise NetworkError(f"no closure rule for {phi.value}")

    work = net.copy()
    budget = max_checks

    def spend(cost: int = 1):
        nonlocal budget
        budget -= cost
        if budget < 0:
            raise ResourceCapError(f"oracle closure budget exceeded ({max_checks})")

    changed = True
    while changed and not work.failed:
        changed = False
        if value_rule == Consistency.GAC:
            before = [work.domains[x].mask for x in range(work.n)]
            spend(work.n)
            naive_gac(work)
            if work.failed:
                break
            if any(work.domains[x].mask != before[x] for x in range(work.n)):
                changed = True
        elif value_rule == Consistency.SAC:
            for x in range(work.n):
                for a in work.domains[x].values():
                    spend()
                    if not check_value(Consistency.SAC, work, x, a):
                        work.remove_value(x, a)
                        changed = True
                        if work.failed:
                            break
                if work.failed:
                    break
            if work.failed:
                break
        if pair_rule is not None:
            for x in range(work.n):
                for y in range(x + 1, work.n):
                    for a in work.domains[x].values():
                        if work.failed:
                            break
                        for b in work.domains[y].values():
                            if not work.is_locally_consistent([(x, a), (y, b)]):
                                continue
                            spend()
                            if not check_pair(pair_rule, work, x, a, y, b):
                                work.discard_nogood([(x, a), (y, b)])
                                changed = True
                                if work.failed:
                                    break
                    if work.failed:
                        break
                if work.failed:
                    break
        if ppc_rule and not work.failed:
            spend(work.n * work.n)
            ok, violation = check_ppc(work)
            if not ok:
                if violation is None:
                    break
                x, a, y, b = violation
                work.discard_nogood([(x, a), (y, b)])
                changed = True
    if value_rule is not None and (pair_rule is not None or ppc_rule):
        canonicalize(work, net)
    return work


def check_two_length_graph_paths(net: ConstraintNetwork) -> bool:
    """Consistency of every 2-length graph-path (closed or not)."""
    if net.failed:
        return False
    neighbors: dict[int, set[int]] = {}
    for (u, v) in net.scope_index:
        neighbors.setdefault(u, set()).add(v)
        neighbors.setdefault(v, set()).add(u)
    for x in range(net.n):
        for y in range(net.n):
            if x == y:
                continue
            mids = neighbors.get(x, set()) & neighbors.get(y, set())
            if not mids:
                continue
            c = net.binary_between(x, y)
            for a in net.domains[x].values():
                for b in net.domains[y].values():
                    if c is not None and not c.allows(
                            (a, b) if c.scope[0] == x else (b, a)):
                        continue
                    for z in mids:
                        if not any(_pair_compatible(net, x, a, z, cc)
                                   and _pair_compatible(net, z, cc, y, b)
                                   for cc in net.domains[z].values()):
                            return False
    return True
