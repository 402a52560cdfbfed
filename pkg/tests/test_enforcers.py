"""Marker-loop enforcers against the definitional closures.

The laws mirror the correctness arguments for the enforcement algorithms:

1. fixture behaviour: triangle and the overlapping-ternary network wipe out
2. closure equality: enforcer fixpoints match the oracle closures exactly
3. idempotence: a second run deletes nothing and finishes in one pass
4. order independence: shuffled variable orders give compare-equal results
5. strength chain: wipeouts propagate up the consistency ordering
6. resource guard: the constraint-creating enforcer refuses huge inputs
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from cspkit.benchmarks import notequal_clique, overlapping_ternary_network, triangle
from cspkit.enforcers import (
    EnforceReport,
    enforce_sac1,
    enforce_scdc,
    enforce_scpc,
    enforce_sdc,
)
from cspkit.network import (
    CONFLICTS,
    ResourceCapError,
    build_network,
    compare,
)
from cspkit.oracle import oracle_closure
from cspkit.propagation import enforce_gac
from helpers import binary_batch, mixed_arity_network, model_b


def square_cycle():
    """Four variables in a cycle of binary != constraints over {0, 1}."""
    diff = {(0, 0), (1, 1)}
    return build_network([2] * 4, [
        ((0, 1), CONFLICTS, diff),
        ((1, 2), CONFLICTS, diff),
        ((2, 3), CONFLICTS, diff),
        ((0, 3), CONFLICTS, diff),
    ])


def test_triangle_wipes_under_every_enforcer():
    for enforce in (enforce_sac1, enforce_scdc, enforce_sdc, enforce_scpc):
        report = enforce(triangle())
        assert isinstance(report, EnforceReport)
        assert not report.consistent


def test_overlapping_ternary_wipes():
    assert not enforce_scdc(overlapping_ternary_network()).consistent
    assert not enforce_sac1(overlapping_ternary_network()).consistent


def test_consistent_input_single_clean_pass():
    net = notequal_clique(3, 4)
    first = enforce_scdc(net)
    assert first.consistent
    second = enforce_scdc(net)
    assert second.consistent
    assert second.passes == 1
    assert second.deleted_values == 0
    assert second.deleted_tuples == 0
    assert second.added_constraints == 0


def test_scdc_never_adds_constraints():
    for net in binary_batch(10, seed=21, n=5, d=3, tightness=0.45):
        before = len(net.constraints)
        report = enforce_scdc(net)
        assert report.added_constraints == 0
        assert len(net.constraints) <= before  # canonical form may drop


def test_sdc_learns_the_square_cycle_equality():
    net = square_cycle()
    report = enforce_sdc(net)
    assert report.consistent
    assert report.added_constraints == 2
    learned = {c.scope: c.table for c in net.constraints
               if c.scope in ((0, 2), (1, 3))}
    assert learned[(0, 2)] == {(0, 1), (1, 0)}
    assert learned[(1, 3)] == {(0, 1), (1, 0)}
    assert compare(net, oracle_closure("spc", square_cycle())) == "equal"


def test_sdc_matches_strong_pc_closure_on_binary():
    for net in binary_batch(12, seed=22, n=5, d=3, tightness=0.4):
        enforced = net.copy()
        enforce_sdc(enforced)
        assert compare(enforced, oracle_closure("spc", net)) == "equal"
        assert compare(enforced, oracle_closure("sdc", net)) == "equal"


def test_scdc_matches_strong_cdc_closure_on_binary():
    for net in binary_batch(12, seed=23, n=5, d=3, tightness=0.45):
        enforced = net.copy()
        enforce_scdc(enforced)
        assert compare(enforced, oracle_closure("scdc", net)) == "equal"


def test_scdc_matches_sac_plus_cdc_on_mixed_arity():
    for i in range(8):
        net = mixed_arity_network(900 + i, n=5, d=3, binary=3, ternary=2)
        enforced = net.copy()
        enforce_scdc(enforced)
        assert compare(enforced, oracle_closure("sac+cdc", net)) == "equal"


def test_scpc_matches_strong_cpc_closure_on_binary():
    for net in binary_batch(12, seed=24, n=5, d=3, density=0.8, tightness=0.4):
        enforced = net.copy()
        enforce_scpc(enforced)
        assert compare(enforced, oracle_closure("scpc", net)) == "equal"


def test_scpc_without_triangles_only_propagates():
    net = build_network([2] * 4, [
        ((0, 1), CONFLICTS, {(0, 0)}),
        ((1, 2), CONFLICTS, {(1, 1)}),
        ((2, 3), CONFLICTS, {(0, 1)}),
    ])
    report = enforce_scpc(net)
    assert report.consistent
    assert report.deleted_tuples == 0


def test_sac1_matches_sac_closure():
    for net in binary_batch(10, seed=25, n=5, d=3, tightness=0.5):
        enforced = net.copy()
        enforce_sac1(enforced)
        assert compare(enforced, oracle_closure("sac", net)) == "equal"


def test_sac1_leaves_isolated_variable_alone():
    net = build_network([3, 3, 3], [((0, 1), CONFLICTS, {(0, 0), (1, 1)})])
    report = enforce_sac1(net)
    assert report.consistent
    assert net.domains[2].values() == [0, 1, 2]


def test_gac_after_sdc_deletes_nothing():
    for net in binary_batch(8, seed=26, n=5, d=3, tightness=0.45):
        enforce_sdc(net)
        if net.failed:
            continue
        assert enforce_gac(net).deleted_values == 0


def test_order_independence():
    rng = random.Random(7)
    for net in binary_batch(6, seed=27, n=5, d=3, tightness=0.45):
        reference = net.copy()
        enforce_scdc(reference)
        for _ in range(3):
            order = list(range(net.n))
            rng.shuffle(order)
            shuffled = net.copy()
            enforce_scdc(shuffled, order=order)
            assert compare(shuffled, reference) == "equal"


def test_order_must_be_a_permutation():
    with pytest.raises(ValueError):
        enforce_scdc(triangle(), order=[0, 0, 1])


def test_wipeout_strength_chain_on_binary():
    for net in binary_batch(20, seed=28, n=5, d=3, tightness=0.55):
        gac_ok = enforce_gac(net.copy()).ok
        sac_ok = enforce_sac1(net.copy()).consistent
        scdc_ok = enforce_scdc(net.copy()).consistent
        sdc_ok = enforce_sdc(net.copy()).consistent
        if not gac_ok:
            assert not sac_ok
        if not sac_ok:
            assert not scdc_ok
        if not scdc_ok:
            assert not sdc_ok


def test_sdc_memory_guard():
    net = notequal_clique(4, 3)
    with pytest.raises(ResourceCapError):
        enforce_sdc(net, max_new_entries=10)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=20, deadline=None)
def test_enforcers_idempotent(seed):
    net = model_b(seed, n=4, d=3, density=0.7, tightness=0.4)
    for enforce in (enforce_sac1, enforce_scdc, enforce_sdc, enforce_scpc):
        run = net.copy()
        enforce(run)
        again = enforce(run)
        assert again.deleted_values == 0
        assert again.deleted_tuples == 0
        assert again.added_constraints == 0
        assert again.passes <= 1
