"""Small named networks used by tests, the verify suites, and examples."""

from __future__ import annotations

import itertools

from .network import CONFLICTS, SUPPORTS, ConstraintNetwork, build_network

# Variable order of overlapping_ternary_network: w, x, y, z.
W, X, Y, Z = 0, 1, 2, 3


def overlapping_ternary_network() -> ConstraintNetwork:
    """Four boolean variables bound by two overlapping ternary constraints.

    rel(c_wxy) = {(0,0,0), (1,1,1)} and rel(c_wxz) = {(0,1,0), (1,0,1)}:
    the first forces w=x wherever y is involved, the second forces w!=x,
    so every singleton check on y (or z) wipes out even though the network
    is GAC-consistent.  There are no binary constraints, hence no solutions
    and no conservative pair is ever inspected.
    """
    return build_network(
        [2, 2, 2, 2],
        [
            ((W, X, Y), SUPPORTS, {(0, 0, 0), (1, 1, 1)}),
            ((W, X, Z), SUPPORTS, {(0, 1, 0), (1, 0, 1)}),
        ],
    )


def notequal_clique(k: int, d: int) -> ConstraintNetwork:
    """A k-clique of binary difference constraints over domains of size d.

    Unsatisfiable exactly when k > d (graph coloring).  ``notequal_clique(3, 2)``
    is the classic triangle that arc consistency accepts but every singleton
    check refutes.
    """
    diagonal = {(v, v) for v in range(d)}
    specs = [((x, y), CONFLICTS, set(diagonal))
             for x, y in itertools.combinations(range(k), 2)]
    return build_network([d] * k, specs)


def triangle() -> ConstraintNetwork:
    """notequal_clique(3, 2): three mutually different boolean variables."""
    return notequal_clique(3, 2)
