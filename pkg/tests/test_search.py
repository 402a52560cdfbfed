"""MAC search: soundness, completeness, heuristics, and preprocessing.

1. sat outcomes carry instantiations the network accepts
2. count_all agrees with the brute-force enumerator for every configuration
3. solution counts are invariant under preprocessing choice
4. variable selection follows the dom/ddeg and dom/wdeg contracts
5. limits yield outcome="limit" instead of wrong answers
6. preprocessing that proves unsatisfiability leaves nodes at zero
"""

import pytest
from hypothesis import given, settings, strategies as st

from cspkit.benchmarks import notequal_clique, triangle
from cspkit.network import CONFLICTS, SUPPORTS, NetworkError, build_network
from cspkit.oracle import enumerate_solutions
from cspkit.search import SearchConfig, SearchResult, mac_solve, select_variable
from helpers import binary_batch, model_b

HEURISTICS = ("dom_ddeg", "dom_wdeg")
PREPROCESSING = ("none", "sac1", "scpc", "scdc1", "sdc1")


def test_single_support_pair_counts_one():
    net = build_network([2, 2], [((0, 1), SUPPORTS, {(0, 1)})])
    result = mac_solve(net, SearchConfig(mode="count_all"))
    assert result.outcome == "sat"
    assert result.solution_count == 1
    assert result.solution == (0, 1)


def test_triangle_without_preprocessing_branches():
    result = mac_solve(triangle(), SearchConfig(preprocessing="none"))
    assert result.outcome == "unsat"
    assert result.nodes >= 1


def test_triangle_with_sdc_preprocessing_needs_no_nodes():
    result = mac_solve(triangle(), SearchConfig(preprocessing="sdc1"))
    assert result.outcome == "unsat"
    assert result.nodes == 0
    assert not result.preprocessing_report.consistent


def test_sat_solution_is_locally_consistent():
    for net in binary_batch(10, seed=31, n=5, d=3, tightness=0.35):
        result = mac_solve(net, SearchConfig(mode="first_solution"))
        if result.outcome == "sat":
            assert net.is_locally_consistent(list(enumerate(result.solution)))
            assert result.solution_count == 1


def test_count_all_matches_enumeration_every_configuration():
    nets = binary_batch(6, seed=32, n=5, d=3, tightness=0.4)
    for net in nets:
        expected = len(enumerate_solutions(net))
        for heuristic in HEURISTICS:
            for preprocessing in PREPROCESSING:
                cfg = SearchConfig(heuristic=heuristic,
                                   preprocessing=preprocessing,
                                   mode="count_all")
                result = mac_solve(net, cfg)
                assert result.solution_count == expected
                assert result.outcome == ("sat" if expected else "unsat")


def test_outcome_agrees_across_heuristics():
    for net in binary_batch(10, seed=33, n=5, d=3, tightness=0.5):
        outcomes = {mac_solve(net, SearchConfig(heuristic=h)).outcome
                    for h in HEURISTICS}
        assert len(outcomes) == 1


def test_node_count_deterministic():
    net = model_b(5, n=6, d=3, density=0.7, tightness=0.4)
    cfg = SearchConfig(heuristic="dom_wdeg", mode="count_all")
    first = mac_solve(net, cfg)
    second = mac_solve(net, cfg)
    assert first.nodes == second.nodes
    assert first.solution_count == second.solution_count


def test_select_prefers_smaller_ratio():
    rows = {(0, 0)}
    net = build_network([2, 4, 5, 5, 5, 5], [
        ((0, 2), CONFLICTS, rows),
        ((1, 2), CONFLICTS, rows),
        ((1, 3), CONFLICTS, rows),
        ((1, 4), CONFLICTS, rows),
        ((1, 5), CONFLICTS, rows),
    ])
    # dom/ddeg: 2/1 = 2.0 for variable 0 against 4/4 = 1.0 for variable 1
    assert select_variable(net, "dom_ddeg", set(), {}) == 1


def test_select_breaks_ties_by_smallest_id():
    rows = {(0, 0)}
    net = build_network([2, 2, 4, 4], [
        ((0, 2), CONFLICTS, rows),
        ((1, 3), CONFLICTS, rows),
    ])
    # variables 0 and 1 tie at ratio 2/1; the smaller id wins
    assert select_variable(net, "dom_ddeg", set(), {}) == 0


def test_select_ranks_unconstrained_last():
    net = build_network([2, 3], [((0, 1), CONFLICTS, {(0, 0)})])
    assert select_variable(net, "dom_ddeg", {1}, {}) == 0
    # with variable 0 assigned, only the isolated variable remains
    assert select_variable(net, "dom_ddeg", {0}, {}) == 1
    with pytest.raises(NetworkError):
        select_variable(net, "dom_ddeg", {0, 1}, {})


def test_weights_steer_dom_wdeg():
    rows = {(0, 0)}
    net = build_network([2, 2, 3, 3], [
        ((0, 2), CONFLICTS, rows),
        ((1, 3), CONFLICTS, rows),
    ])
    assert select_variable(net, "dom_wdeg", set(), {}) == 0
    assert select_variable(net, "dom_ddeg", set(), {1: 3}) == 0
    assert select_variable(net, "dom_wdeg", set(), {1: 3}) == 1


def test_fresh_weights_make_wdeg_coincide_with_ddeg():
    for net in binary_batch(8, seed=34, n=6, d=3, tightness=0.4):
        assert (select_variable(net, "dom_wdeg", set(), {})
                == select_variable(net, "dom_ddeg", set(), {}))


def test_node_limit_reports_limit_outcome():
    net = notequal_clique(4, 3)
    result = mac_solve(net, SearchConfig(mode="count_all", node_limit=1))
    assert result.outcome == "limit"
    assert result.nodes == 2  # the second assignment tripped the limit


def test_time_limit_reports_limit_outcome():
    net = notequal_clique(6, 5)
    result = mac_solve(net, SearchConfig(mode="count_all", time_limit=1e-9))
    assert result.outcome == "limit"


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(heuristic="dom")
    with pytest.raises(ValueError):
        SearchConfig(preprocessing="sac9")
    with pytest.raises(ValueError):
        SearchConfig(mode="all")
    with pytest.raises(ValueError):
        SearchConfig(node_limit=0)
    with pytest.raises(ValueError):
        SearchConfig(time_limit=0.0)


def test_two_colour_clique_family():
    for k in range(3, 7):
        plain = mac_solve(notequal_clique(k, 2), SearchConfig())
        assert plain.outcome == "unsat" and plain.nodes >= 1
        for preprocessing in ("sdc1", "scdc1"):
            helped = mac_solve(notequal_clique(k, 2),
                               SearchConfig(preprocessing=preprocessing))
            assert helped.outcome == "unsat"
            assert helped.nodes == 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=15, deadline=None)
def test_counts_invariant_under_preprocessing(seed):
    net = model_b(seed, n=5, d=3, density=0.6, tightness=0.45)
    counts = {mac_solve(net, SearchConfig(preprocessing=p, mode="count_all")
                        ).solution_count for p in PREPROCESSING}
    assert len(counts) == 1
    assert counts.pop() == len(enumerate_solutions(net))
