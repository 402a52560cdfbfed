"""Model B generation: counts, rounding, determinism, distinctness."""

import pytest
from hypothesis import given, settings, strategies as st

from cspkit.generator import PRNG_ID, ModelBParams, child_seed, generate_model_b
from cspkit.network import CONFLICTS, NetworkError, compare


def test_constraint_count_rounds_half_up():
    # 0.5 * C(50,2) = 612.5 -> 613 (plain round() would give 612 here)
    p = ModelBParams(n=50, d=10, density=0.5, tightness=0.25, seed=1)
    assert p.constraint_count() == 613
    assert ModelBParams(n=4, d=2, density=0.25, tightness=0.25, seed=1
                        ).constraint_count() == 2  # 1.5 -> 2


def test_forbidden_count_rounds_half_up():
    # 0.5 * 9 = 4.5 -> 5
    p = ModelBParams(n=4, d=3, density=0.5, tightness=0.5, seed=1)
    assert p.forbidden_per_constraint() == 5


def test_same_seed_is_deterministic():
    p = ModelBParams(n=8, d=4, density=0.6, tightness=0.4, seed=99)
    a, b = generate_model_b(p), generate_model_b(p)
    assert compare(a, b) == "equal"
    assert [c.scope for c in a.constraints] == [c.scope for c in b.constraints]
    assert [c.stored_rows() for c in a.constraints] == [
        c.stored_rows() for c in b.constraints]


def test_different_seeds_differ():
    p = ModelBParams(n=8, d=4, density=0.6, tightness=0.4, seed=0)
    nets = [generate_model_b(ModelBParams(n=8, d=4, density=0.6, tightness=0.4,
                                          seed=s)) for s in (0, 1, 2)]
    reprs = {n.nogood_representation() for n in nets}
    assert len(reprs) > 1


def test_exact_counts_and_distinctness():
    p = ModelBParams(n=7, d=4, density=0.7, tightness=0.3, seed=5)
    net = generate_model_b(p)
    assert len(net.constraints) == p.constraint_count()
    scopes = [c.scope for c in net.constraints]
    assert len(set(scopes)) == len(scopes)
    for c in net.constraints:
        assert c.polarity == CONFLICTS
        assert c.scope[0] < c.scope[1]
        rows = c.stored_rows()
        assert len(rows) == p.forbidden_per_constraint()
        assert len(set(rows)) == len(rows)
        assert all(0 <= a < p.d and 0 <= b < p.d for a, b in rows)


def test_zero_tightness_yields_no_constraints():
    net = generate_model_b(ModelBParams(n=6, d=3, density=0.8, tightness=0.0, seed=3))
    assert net.constraints == []


def test_full_tightness_is_rejected():
    with pytest.raises(NetworkError):
        ModelBParams(n=4, d=2, density=0.5, tightness=1.0, seed=0).validate()


def test_parameter_bounds_are_checked():
    with pytest.raises(NetworkError):
        ModelBParams(n=1, d=2, density=0.5, tightness=0.2, seed=0).validate()
    with pytest.raises(NetworkError):
        ModelBParams(n=4, d=2, density=1.5, tightness=0.2, seed=0).validate()
    with pytest.raises(NetworkError):
        ModelBParams(n=4, d=2, density=0.5, tightness=-0.1, seed=0).validate()


def test_metadata_names_the_prng_stream():
    p = ModelBParams(n=4, d=2, density=0.5, tightness=0.2, seed=42)
    meta = p.metadata()
    assert meta["prng"] == PRNG_ID
    assert meta["seed"] == 42
    assert meta["n"] == 4 and meta["d"] == 2


def test_child_seed_is_stable_and_label_sensitive():
    assert child_seed(7, "x") == child_seed(7, "x")
    assert child_seed(7, "x") != child_seed(7, "y")
    assert child_seed(7, "x") != child_seed(8, "x")
    assert 0 <= child_seed(7, "x") < 2**64


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 8), d=st.integers(2, 5),
       density=st.sampled_from([0.3, 0.5, 0.8, 1.0]),
       tightness=st.sampled_from([0.1, 0.4, 0.7]),
       seed=st.integers(0, 2**32 - 1))
def test_generated_networks_survive_normalization(n, d, density, tightness, seed):
    p = ModelBParams(n=n, d=d, density=density, tightness=tightness, seed=seed)
    net = generate_model_b(p)
    expected = p.constraint_count() if p.forbidden_per_constraint() else 0
    assert len(net.constraints) == expected
    assert all(net.domains[x].values() == list(range(d)) for x in range(n))


# ---------------------------------------------------------------------------
# Phase-transition scans


def small_scan(t_grid=(0.0, 0.3, 0.8), samples=5, checks=("ac", "sac", "scdc", "sdc")):
    from cspkit.generator import phase_scan
    base = ModelBParams(n=6, d=3, density=0.6, tightness=0.0, seed=404)
    return phase_scan(base, list(t_grid), samples, checks=checks)


def test_phase_scan_row_shape():
    records = small_scan()
    assert len(records) == 12  # 3 grid points x 4 checks
    for r in records:
        assert 0.0 <= r.frac_unsat <= 1.0
        assert r.samples == 5
        assert len(r.detected) == 5
        assert r.mean_ms >= 0.0


def test_phase_scan_zero_tightness_detects_nothing():
    for r in small_scan(t_grid=(0.0,)):
        assert r.frac_unsat == 0.0


def test_phase_scan_detection_is_monotone_per_instance():
    records = small_scan(t_grid=(0.4, 0.5, 0.6), samples=8)
    by_key = {(r.t, r.check): r.detected for r in records}
    for t in (0.4, 0.5, 0.6):
        chain = [by_key[(t, c)] for c in ("ac", "sac", "scdc", "sdc")]
        for weaker, stronger in zip(chain, chain[1:]):
            for w_hit, s_hit in zip(weaker, stronger):
                assert s_hit or not w_hit


def test_phase_scan_is_deterministic():
    first = small_scan(t_grid=(0.5,), samples=4)
    second = small_scan(t_grid=(0.5,), samples=4)
    assert [(r.check, r.frac_unsat, r.detected) for r in first] == [
        (r.check, r.frac_unsat, r.detected) for r in second]


def test_phase_scan_shares_instances_across_grids():
    wide = small_scan(t_grid=(0.3, 0.8), samples=5)
    narrow = small_scan(t_grid=(0.8,), samples=5)
    wide_row = next(r for r in wide if r.t == 0.8 and r.check == "sdc")
    narrow_row = next(r for r in narrow if r.check == "sdc")
    assert wide_row.detected == narrow_row.detected


def test_phase_scan_rejects_unknown_check():
    with pytest.raises(NetworkError):
        small_scan(checks=("ac", "pc"))


def test_crossing_interpolation_and_flag():
    from cspkit.generator import crossing_tightness, PhaseRecord

    records = [
        PhaseRecord(t=0.2, check="ac", samples=4, frac_unsat=0.0, mean_ms=1.0),
        PhaseRecord(t=0.4, check="ac", samples=4, frac_unsat=0.25, mean_ms=1.0),
        PhaseRecord(t=0.6, check="ac", samples=4, frac_unsat=0.75, mean_ms=1.0),
    ]
    assert crossing_tightness(records, "ac") == pytest.approx(0.5)
    assert crossing_tightness(records, "sdc") is None
    scanned = small_scan(t_grid=(0.1, 0.9), samples=4)
    for check in ("ac", "sac", "scdc", "sdc"):
        rows = [r for r in scanned if r.check == check]
        flagged = [r for r in rows if r.crossing_flag]
        crossed = [r for r in rows if r.frac_unsat >= 0.5]
        if crossed:
            assert flagged == [crossed[0]]
        else:
            assert not flagged


def test_scan_to_csv_header_and_rows():
    import io

    from cspkit.generator import scan_to_csv

    records = small_scan(t_grid=(0.2,), samples=3, checks=("ac",))
    buffer = io.StringIO()
    scan_to_csv(records, buffer)
    lines = buffer.getvalue().strip().splitlines()
    assert lines[0] == "t,check,samples,frac_unsat,mean_ms,crossing_flag"
    assert len(lines) == 2
    assert lines[1].startswith("0.2,ac,3,")
