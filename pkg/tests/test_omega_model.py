import pytest

from forcingbench import programs
from forcingbench.approx import SetPresentation
from forcingbench.machine import OracleWindow
from forcingbench.omega_model import (
    BEYOND,
    COMPLEMENT_SIDE,
    DERIVED_BASE,
    IN,
    INTERSECT_SIDE,
    OUT,
    PreconditionViolation,
    build_model,
    class_index,
    class_member_index,
    decode_row,
    derived_index,
    join_index,
    model_audit,
    model_member,
    nested_model,
    pi1_truth,
    pi2_select,
    row_window_length,
    select_infinite_part,
)
from forcingbench.pairing import cantor

EVENS = SetPresentation.from_set(range(0, 64, 2), 64)


@pytest.fixture(scope="module")
def evens_model():
    return build_model(EVENS, depth=200)


def test_row_index_conventions_disjoint():
    seen = {0}
    for i in range(6):
        for j in range(6):
            for idx in (join_index(i, j), class_index(i, j)):
                assert idx not in seen
                seen.add(idx)
            assert decode_row(join_index(i, j)) == ("join", i, j)
            assert decode_row(class_index(i, j)) == ("class", i, j)


def test_base_row_is_a(evens_model):
    m = evens_model
    for k in range(row_window_length(0, m.depth)):
        assert m.node[cantor(0, k)] == (1 if k % 2 == 0 else 0)


def test_model_member_verdicts(evens_model):
    assert model_member(evens_model, 0, 4) == IN
    assert model_member(evens_model, 0, 5) == OUT
    assert model_member(evens_model, 0, 10 ** 6) == BEYOND


def test_join_law(evens_model):
    m = evens_model
    for i in range(3):
        for j in range(3):
            r = join_index(i, j)
            for n in range(4):
                for parity, src in ((0, i), (1, j)):
                    x = 2 * n + parity
                    if cantor(r, x) < m.depth and cantor(src, n) < m.depth:
                        assert model_member(m, r, x) == model_member(m, src, n)


def test_audit_clean(evens_model):
    assert model_audit(evens_model) == []


def test_audit_flags_corruption(evens_model):
    m = evens_model
    bad = list(m.node)
    bad[cantor(0, 2)] ^= 1
    from dataclasses import replace

    corrupt = replace(m, node=tuple(bad))
    assert any("base" in f for f in model_audit(corrupt))


def test_nested_build_passes_audit(evens_model):
    inner = nested_model(evens_model)
    assert model_audit(inner) == []
    assert inner.row_window(0).bits == evens_model.row_window(0).bits


def test_derived_join_is_structural(evens_model):
    assert derived_index(evens_model, ("join", 0, 0)) == join_index(0, 0)


def test_derived_search_finds_matching_row(evens_model):
    # intersecting a row with itself is the row; bounded search must find it
    assert derived_index(evens_model, ("intersect", 0, 0)) == 0


def test_drop_least_window(evens_model):
    m = evens_model
    idx = derived_index(m, ("drop_least", 0, 3))
    assert idx >= DERIVED_BASE
    length = m.row_length(idx)
    members = m.row_window(idx).members()
    assert members == tuple(x for x in range(6, length) if x % 2 == 0)
    assert derived_index(m, ("drop_least", 0, 3)) == idx  # dedup is stable


def test_complement_window(evens_model):
    m = evens_model
    idx = derived_index(m, ("complement", 0))
    assert all(x % 2 == 1 for x in m.row_window(idx).members())


def test_class_member_full_class_is_member(evens_model):
    m = evens_model
    e = programs.LOOP.index
    g = class_member_index(m, e, 0)
    assert g == class_index(e, 0)


def test_class_member_empty_class_rejected(evens_model):
    with pytest.raises(PreconditionViolation):
        class_member_index(evens_model, programs.HALT_ZERO.index, 0)


def test_pi1_truth_verdicts(evens_model):
    # never halts: no counterexample surfaces at any probe
    v = pi1_truth(evens_model, programs.LOOP.index, probe=8)
    assert v.truth and v.provisional
    # total parity decider: position 1 is a 0-output counterexample
    v2 = pi1_truth(evens_model, programs.EVENS_DECIDER.index, probe=8)
    assert not v2.truth and v2.witness == 1 and not v2.provisional


def test_pi2_select_same_row(evens_model):
    out = pi2_select(evens_model, 0, 0, fuel=32)
    assert out.side == INTERSECT_SIDE and out.by == "search"


def test_pi2_select_disjoint(evens_model):
    m = evens_model
    odds = derived_index(m, ("complement", 0))
    out = pi2_select(m, 0, odds, fuel=32)
    assert out.side == COMPLEMENT_SIDE and out.by == "search"
    assert out.count_intersect == 0


def test_pi2_select_returns_dense_side(evens_model):
    m = evens_model
    evens64 = derived_index(m, ("explicit", tuple(1 - x % 2 for x in range(64))))
    mult4 = derived_index(m, ("explicit", tuple(1 if x % 4 == 0 else 0 for x in range(64))))
    out = pi2_select(m, evens64, mult4, fuel=64)
    counts = {INTERSECT_SIDE: out.count_intersect, COMPLEMENT_SIDE: out.count_complement}
    assert counts[out.side] >= 1


def test_pi2_select_empty_row_rejected(evens_model):
    m = evens_model
    empty = derived_index(m, ("explicit", (0,) * 16))
    with pytest.raises(PreconditionViolation):
        pi2_select(m, empty, 0, fuel=8)


def test_select_infinite_part(evens_model):
    m = evens_model
    bound = 64
    parts = [
        derived_index(m, ("explicit", tuple(1 if x % 3 == r else 0 for x in range(bound))))
        for r in range(3)
    ]
    full = derived_index(m, ("explicit", (1,) * bound))
    pos, idx, outcomes = select_infinite_part(m, full, parts, fuel=64)
    assert 0 <= pos < 3
    chosen = m.row_window(idx).members()
    assert len(chosen) >= bound // 3 - 1
    assert all(x % 3 == pos for x in chosen)
