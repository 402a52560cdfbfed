"""Shared sampling helpers for the test suite.

All samples are derived from explicit integer seeds so every test run sees
the same networks.
"""

import itertools
import random

from cspkit.generator import ModelBParams, child_seed, generate_model_b
from cspkit.network import CONFLICTS, build_network


def model_b(seed, n=5, d=3, density=0.6, tightness=0.4):
    params = ModelBParams(n=n, d=d, density=density, tightness=tightness, seed=seed)
    return generate_model_b(params)


def binary_batch(count, seed=0, **kwargs):
    return [model_b(child_seed(seed, f"net-{i}"), **kwargs) for i in range(count)]


def mixed_arity_network(seed, n=5, d=3, binary=3, ternary=2, quaternary=0,
                        tightness=0.4):
    """A random network with conflicts-tables of the given arities."""
    rng = random.Random(child_seed(seed, "mixed"))
    specs = []
    for arity, count in ((2, binary), (3, ternary), (4, quaternary)):
        if arity > n or count == 0:
            continue
        scopes = list(itertools.combinations(range(n), arity))
        for scope in rng.sample(scopes, min(count, len(scopes))):
            q = max(1, round(tightness * d ** arity))
            q = min(q, d ** arity - 1)
            cells = rng.sample(range(d ** arity), q)
            rows = set()
            for cell in cells:
                row = []
                for _ in range(arity):
                    cell, v = divmod(cell, d)
                    row.append(v)
                rows.add(tuple(row))
            specs.append((scope, CONFLICTS, rows))
    return build_network([d] * n, specs)


def rebuild_from_nogoods(net):
    """A fresh network over the same initial domains denoting the same nogoods."""
    by_scope = {}
    removed = []
    for nogood in net.nogood_representation():
        pairs = sorted(nogood)
        if len(pairs) == 1:
            removed.append(pairs[0])
        else:
            scope = tuple(v for v, _ in pairs)
            by_scope.setdefault(scope, set()).add(tuple(a for _, a in pairs))
    specs = [(scope, CONFLICTS, rows) for scope, rows in sorted(by_scope.items())]
    rebuilt = build_network([d.initial for d in net.domains], specs)
    for x, a in removed:
        rebuilt.remove_value(x, a)
    return rebuilt
