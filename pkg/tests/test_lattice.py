"""Strength-lattice panels, edge verification, and the witness corpus.

The laws mirror the published relationships between the consistencies:

1. panel tables only mention known consistency ids and stay acyclic
2. verify_lattice_edge finds no violation along known-true edges
3. reflexive edges compare equal on every sample
4. closure equivalences (PC/DC on binary) verify on sampled networks
5. find_witness recovers easy separations and gives up on contradictions
6. every bundled corpus witness certifies its recorded separation
"""

import random

from cspkit.lattice import (
    ANY_ARITY_PANEL,
    BINARY_PANEL,
    binary_sampler,
    certify_witness,
    find_witness,
    load_witness,
    mixed_sampler,
    required_witnesses,
    verify_equivalence,
    verify_lattice_edge,
    witness_name,
)
from cspkit.oracle import Consistency, consistency_id


def sampled(sampler, count, seed):
    rng = random.Random(seed)
    return [sampler(rng) for _ in range(count)]


def panel_nodes(panel):
    nodes = set()
    for a, b in panel.edges:
        nodes.update((a, b))
    for group in panel.equivalences:
        nodes.update(group)
    for a, b in panel.incomparable:
        nodes.update((a, b))
    return nodes


def test_panel_tables_use_known_ids():
    for panel in (BINARY_PANEL, ANY_ARITY_PANEL):
        for node in panel_nodes(panel):
            assert isinstance(consistency_id(node), Consistency)
        for a, b in panel.edges:
            assert a != b
            assert (a, b) not in panel.incomparable
            assert (b, a) not in panel.incomparable


def test_panel_edges_are_acyclic():
    for panel in (BINARY_PANEL, ANY_ARITY_PANEL):
        out = {}
        for a, b in panel.edges:
            out.setdefault(a, []).append(b)
        state = {}

        def visit(node):
            if state.get(node) == "open":
                return False
            if state.get(node) == "done":
                return True
            state[node] = "open"
            result = all(visit(nxt) for nxt in out.get(node, ()))
            state[node] = "done"
            return result

        assert all(visit(node) for node in list(out))


def test_edge_2sac_dc_holds_on_mixed_samples():
    report = verify_lattice_edge("2sac", "dc", sampled(mixed_sampler, 25, 71))
    assert report.ok
    assert report.mode == "closure"
    assert report.checked == 25


def test_edge_cdc_ppc_holds_on_binary_samples():
    report = verify_lattice_edge("cdc", "ppc", sampled(binary_sampler, 25, 72))
    assert report.ok
    assert report.checked == 25


def test_reflexive_edge_compares_equal():
    for phi in ("gac", "pc", "scdc"):
        report = verify_lattice_edge(phi, phi, sampled(binary_sampler, 8, 73))
        assert report.ok


def test_check_mode_promotes_with_stronger_closure():
    report = verify_lattice_edge("spc", "bisac", sampled(binary_sampler, 20, 74))
    assert report.ok
    assert report.mode == "check"
    assert report.checked + report.vacuous == 20


def test_pc_dc_equivalent_on_binary():
    report = verify_equivalence("pc", "dc", sampled(binary_sampler, 20, 75))
    assert report.ok
    assert report.mode == "equivalence"


def test_summary_mentions_both_ids():
    report = verify_lattice_edge("gac", "gac", sampled(binary_sampler, 2, 76))
    text = report.summary()
    assert "gac -> gac" in text
    assert "ok" in text


def test_find_witness_ppc_not_cdc():
    net = find_witness("ppc", "cdc", budget=3000, seed=4)
    assert net is not None
    assert certify_witness("ppc", "cdc", net)


def test_find_witness_cpc_not_c3c():
    net = find_witness("cpc", "c3c", budget=3000, seed=1)
    assert net is not None
    assert certify_witness("cpc", "c3c", net)


def test_find_witness_contradiction_exhausts_budget():
    assert find_witness("dc", "dc", budget=60, seed=13) is None


def test_witness_name_format():
    assert witness_name("scdc", "bisac") == "scdc_not_bisac.json"
    assert witness_name(Consistency.SPC, "cdc") == "spc_not_cdc.json"


def test_required_witnesses_cover_both_directions_of_incomparables():
    required = {(hold, fail) for hold, fail, _ in required_witnesses()}
    for a, b in (("scdc", "bisac"), ("pc", "c2sac"), ("dc", "3c")):
        assert (a, b) in required
        assert (b, a) in required


def test_required_witnesses_reverse_strict_edges():
    required = {(hold, fail) for hold, fail, _ in required_witnesses()}
    assert ("ppc", "cdc") in required  # weaker may hold while stronger fails
    assert ("gac", "sac") in required
    assert ("cpc", "c3c") in required


def test_corpus_witnesses_certify():
    found = 0
    for hold, fail, panel in required_witnesses():
        net = load_witness(hold, fail)
        if net is None:
            continue
        found += 1
        assert certify_witness(hold, fail, net), witness_name(hold, fail)
        if panel == "binary":
            assert all(len(c.scope) == 2 for c in net.constraints)
    assert found >= 59
