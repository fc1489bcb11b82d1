"""Part-subset construction over limit-computed partitions."""

import pytest

from forcingbench.forcing import (
    D2Config,
    Delta2Partition,
    run_d2,
    select_color,
    verify_transcript,
)
from forcingbench.forcing.base import CASE1, CASE2, StageRecord, Transcript
from forcingbench.forcing.d2 import InconclusiveSelection
from forcingbench.harness import brute_oracle, gen_d2_partition
from forcingbench.harness.transcripts import transcript_hash


def _parity_partition(bound=32):
    table = tuple((n % 2,) for n in range(bound))
    return Delta2Partition(k=2, table=table, bound=bound, promised_bound=0)


def test_run_d2_parity():
    t, (color, b) = run_d2(_parity_partition(), 200)
    assert len(b) >= 6
    for x in b:
        assert x % 2 == color


def test_d2_generated_instances():
    for seed in range(3):
        d = gen_d2_partition(seed)
        t, (color, b) = run_d2(d, 300)
        part = set(brute_oracle("d2_subset", d, color=color).witness)
        assert set(b) <= part, f"seed {seed}"
        assert len(b) >= 2, f"seed {seed}"
        report = verify_transcript(t, audit_fuel=2, instance=d)
        assert report.counts["refuted"] == 0, f"seed {seed}"


def test_d2_counter_budget():
    d = gen_d2_partition(4)
    t, _ = run_d2(d, 150)
    for rec in t.stages:
        counters = rec.certificates.get("counters")
        if counters is not None:
            assert sum(counters) <= rec.stage + 1


def test_d2_no_negative_size_requirements():
    t, _ = run_d2(gen_d2_partition(2), 150)
    for rec in t.stages:
        if rec.requirement.startswith("E"):
            assert rec.branch != CASE2


def _stage(n, req, branch):
    return StageRecord(n, req, branch, {}, {})


def test_select_color_prefers_decided_and_positive():
    t = Transcript(kind="d2", instance_hash="x", config={"k": 2})
    t.stages = [
        _stage(0, "E_0^0", CASE1),
        _stage(1, "E_0^1", CASE1),
        _stage(2, "R_0^1", CASE2),
    ]
    assert select_color(t, 3) == 1  # most decided requirements
    # a negatively decided size requirement disqualifies the leader
    t.stages.append(_stage(3, "E_1^1", CASE2))
    assert select_color(t, 4) == 0


def test_select_color_inconclusive():
    t = Transcript(kind="d2", instance_hash="x", config={"k": 2})
    with pytest.raises(InconclusiveSelection):
        select_color(t, 0)


def test_d2_limit_part():
    d = Delta2Partition(k=3, table=((0, 1, 2), (2, 2, 2)), bound=2,
                        promised_bound=2)
    assert d.limit_part(0) == 2
    assert d.limit_part(1) == 2
    assert d.value(0, 9) == 2  # rows clamp at their last column


def test_d2_deterministic():
    d = gen_d2_partition(9)
    t1, _ = run_d2(d, 150)
    t2, _ = run_d2(d, 150)
    assert transcript_hash(t1) == transcript_hash(t2)
