"""Subset selection inside one part of a limit-computed k-partition.

Conditions are tuples (F^0, ..., F^{k-1}, I).  Requirements carry a color:
code 2e addresses E_e (grow F^i to size e), code 2e+1 addresses R_e
(self-halting of program e relative to F^i), ordered lexicographically by
(code, color).  Each stage decides exactly one requirement, so the
per-color decision counters sum to at most the stage number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from ..approx import MalformedInstanceError
from ..omega_model import CodedModelApprox, derived_index, select_infinite_part
from .base import (
    ABORT,
    CASE1,
    CASE2,
    D2Condition,
    StageRecord,
    Transcript,
    condition_dict,
    find_halt_witness,
)
from .coh import _digest, _register, default_inner_model
from .em import PartitionCapExceeded, _find_bad_partition, query_free_status


@dataclass(frozen=True)
class Delta2Partition:
    """k-valued limit approximation d(n, s); part of n is the s-limit."""

    k: int
    table: Tuple[Tuple[int, ...], ...]  # table[n][s], values < k
    bound: int
    promised_bound: Optional[int] = None
    declared_limits: Optional[Tuple[int, ...]] = None

    def value(self, n: int, s: int) -> int:
        row = self.table[n]
        v = row[s] if s < len(row) else row[-1]
        if not 0 <= v < self.k:
            raise MalformedInstanceError(f"part value {v} at (n={n}, s={s})")
        return v

    def limit_part(self, n: int) -> Optional[int]:
        """Exact when a stabilization bound is declared (audited at load);
        otherwise the last value of the row, flagged by callers."""
        if self.promised_bound is not None:
            return self.value(n, self.promised_bound)
        return self.value(n, len(self.table[n]) - 1)


def partition_digest(d: Delta2Partition) -> str:
    return _digest({
        "k": d.k, "table": [list(r) for r in d.table], "bound": d.bound,
        "promised_bound": d.promised_bound,
    })


@dataclass(frozen=True)
class D2Config:
    window: int = 64
    subset_width: int = 8
    partition_cap: int = 3 ** 9
    select_fuel: int = 1 << 20


@dataclass
class D2State:
    condition: D2Condition
    decided: Dict[str, Dict] = field(default_factory=dict)
    blocked: Tuple[str, ...] = ()
    counters: Tuple[int, ...] = ()


def requirement_order(code: int, k: int) -> List[str]:
    e = code // 2
    kind = "E" if code % 2 == 0 else "R"
    return [f"{kind}_{e}^{i}" for i in range(k)]


def _next_d2_requirement(state: D2State, k: int) -> Optional[str]:
    horizon = len(state.decided) + len(state.blocked) + 4
    for code in range(2 * horizon):
        for label in requirement_order(code, k):
            if label not in state.decided and label not in state.blocked:
                return label
    return None


def _parse_label(label: str):
    kind, rest = label[0], label[2:]
    e, i = rest.split("^")
    return kind, int(e), int(i)


def initial_d2_condition(d: Delta2Partition, inner: CodedModelApprox,
                         config: D2Config) -> D2Condition:
    window = min(config.window, d.bound)
    idx, members = _register(inner, range(window), window)
    return D2Condition(F_parts=((),) * d.k, I=idx, reservoir=members,
                       window_bound=window)


def d2_step(state: D2State, d: Delta2Partition, inner: CodedModelApprox,
            config: D2Config, stage: int) -> Tuple[D2State, StageRecord]:
    cond = state.condition
    label = _next_d2_requirement(state, d.k)
    if label is None:
        return state, StageRecord(stage, "-", "skip", condition_dict(cond), {})
    kind, e, color = _parse_label(label)
    window = cond.window_bound
    part_of = {z: d.limit_part(z) for z in range(window)}
    f_color = cond.F_parts[color]

    def bump(counters):
        cs = list(counters) if counters else [0] * d.k
        cs[color] += 1
        return tuple(cs)

    def commit(extra, cert):
        new_parts = list(cond.F_parts)
        new_parts[color] = tuple(sorted(set(f_color) | set(extra)))
        top = max((x for p in new_parts for x in p), default=-1)
        survivors = tuple(z for z in cond.reservoir if z > top)
        idx, members = _register(inner, survivors, window)
        new_cond = D2Condition(tuple(new_parts), idx, members, window)
        decided = dict(state.decided)
        decided[label] = {"stage": stage, **cert}
        counters = bump(state.counters)
        cert = dict(cert)
        cert["counters"] = list(counters)
        rec = StageRecord(stage, label, CASE1, condition_dict(new_cond), cert)
        return D2State(new_cond, decided, state.blocked, counters), rec

    if kind == "E":
        need = e - len(f_color)
        if need <= 0:
            return commit((), {"E": [], "answer": "yes"})

        def compat(piece: frozenset) -> bool:
            return sum(1 for z in piece if part_of.get(z) == color) >= need
    else:
        status = query_free_status(e, window + 1)

        @lru_cache(maxsize=None)
        def compat(piece: frozenset) -> bool:
            if status[0] == "diverges":
                return False
            if status[0] == "halts":
                sigma = status[1]
                if sigma <= (max(f_color) + 1 if f_color else 1):
                    return True
                return any(z >= sigma - 1 and part_of.get(z) == color
                           for z in piece)
            pool = tuple(sorted(z for z in piece if part_of.get(z) == color))
            w, _ = find_halt_witness(e, f_color, pool,
                                     subset_width=config.subset_width)
            return w is not None

    try:
        bad = _find_bad_partition(cond.reservoir, d.k, compat,
                                  config.partition_cap)
    except PartitionCapExceeded:
        cert = {"reason": "partition cap exceeded", "cap": config.partition_cap}
        blocked = state.blocked + (label,)
        rec = StageRecord(stage, label, ABORT, condition_dict(cond), cert)
        return D2State(cond, state.decided, blocked, state.counters), rec

    if bad is None:
        pool = tuple(z for z in cond.reservoir if part_of.get(z) == color)
        if kind == "E":
            extra = pool[:need]
            if len(extra) == need:
                return commit(extra, {"E": list(extra), "answer": "yes"})
        else:
            w, search = find_halt_witness(e, f_color, pool,
                                          subset_width=config.subset_width)
            if w is not None:
                cert = {"E": list(w.added), "steps": w.steps, "use": w.use,
                        "value": w.value, "oracle": list(w.members),
                        "answer": "yes", "search": search}
                return commit(w.added, cert)
        cert = {"reason": "question answered yes but no class witness found"}
        blocked = state.blocked + (label,)
        rec = StageRecord(stage, label, ABORT, condition_dict(cond), cert)
        return D2State(cond, state.decided, blocked, state.counters), rec

    if kind == "E":
        # a size requirement cannot be forced negatively, only starved by
        # the finite window; stall it without touching the reservoir
        cert = {"reason": "no piece holds enough of the part; stalled",
                "partition": [list(p) for p in bad]}
        blocked = state.blocked + (label,)
        rec = StageRecord(stage, label, ABORT, condition_dict(cond), cert)
        return D2State(cond, state.decided, blocked, state.counters), rec

    if not cond.reservoir:
        # nothing to select from: the negative holds over the empty reservoir
        counters = bump(state.counters)
        cert = {"answer": "no", "partition": [list(p) for p in bad],
                "F_at_decision": list(f_color), "reservoir_at_decision": [],
                "pool_at_decision": [],
                "search": {"subset_width": config.subset_width},
                "counters": list(counters)}
        decided = dict(state.decided)
        decided[label] = {"stage": stage, **cert}
        rec = StageRecord(stage, f"N_{e}^{color}", CASE2,
                          condition_dict(cond), cert)
        return D2State(cond, decided, state.blocked, counters), rec

    # Case 2: restrict to an infinite piece; the requirement is settled
    # negatively on this reservoir
    part_idx = [
        derived_index(inner, ("explicit", tuple(
            1 if z in set(p) else 0 for z in range(window))))
        for p in bad
    ]
    pos, sel_idx, outcomes = select_infinite_part(
        inner, cond.I, part_idx, config.select_fuel)
    # the selected row may carry a longer structural window; only its
    # overlap with the current reservoir is part of the condition
    kept = set(inner.row_window(sel_idx).members()) & set(cond.reservoir)
    sel_idx, members = _register(inner, sorted(kept), window)
    new_cond = D2Condition(cond.F_parts, sel_idx, members, window)
    counters = bump(state.counters)
    cert = {
        "partition": [list(p) for p in bad],
        "selected_part": pos,
        "selection": [
            {"side": o.side, "by": o.by,
             "count_intersect": o.count_intersect,
             "count_complement": o.count_complement}
            for o in outcomes
        ],
        "F_at_decision": list(f_color),
        "reservoir_at_decision": list(cond.reservoir),
        "pool_at_decision": [z for z in cond.reservoir
                             if part_of.get(z) == color],
        "counters": list(counters),
    }
    decided = dict(state.decided)
    cert["answer"] = "no"
    cert["search"] = {"subset_width": config.subset_width}
    decided[label] = {"stage": stage, **cert}
    requirement = f"N_{e}^{color}"
    rec = StageRecord(stage, requirement, CASE2, condition_dict(new_cond), cert)
    return D2State(new_cond, decided, state.blocked, counters), rec


class InconclusiveSelection(RuntimeError):
    pass


def select_color(t: Transcript, horizon: int) -> int:
    """Color with the most decided requirements at the horizon, least
    index first; its E decisions must all be positive."""
    k = t.config["k"]
    counts = [0] * k
    positive_e = [True] * k
    for rec in t.stages[:horizon]:
        if rec.branch not in (CASE1, CASE2):
            continue
        name = rec.requirement
        if "^" not in name:
            continue
        i = int(name.split("^")[1])
        counts[i] += 1
        if name.startswith("E") and rec.branch == CASE2:
            positive_e[i] = False
    if not any(counts):
        raise InconclusiveSelection("no decided requirement at this horizon")
    for i in sorted(range(k), key=lambda i: (-counts[i], i)):
        if counts[i] and positive_e[i]:
            return i
    raise InconclusiveSelection(
        "every candidate color has a negatively decided size requirement")


def run_d2(d: Delta2Partition, stages: int, models=None,
           config: Optional[D2Config] = None):
    """Run the construction; returns (Transcript, (color, B prefix))."""
    config = config or D2Config()
    inner = models[1] if models else default_inner_model()
    state = D2State(initial_d2_condition(d, inner, config),
                    counters=(0,) * d.k)
    t = Transcript(
        kind="d2",
        instance_hash=partition_digest(d),
        config={
            "stages": stages, "window": state.condition.window_bound,
            "subset_width": config.subset_width,
            "partition_cap": config.partition_cap,
            "k": d.k,
        },
    )
    for s in range(stages):
        state, rec = d2_step(state, d, inner, config, s)
        t.stages.append(rec)
        if not state.condition.valid():
            raise AssertionError("condition invariant broken")
        if sum(state.counters) > s + 1:
            raise AssertionError("counter budget exceeded")
    color = select_color(t, stages)
    b = state.condition.F_parts[color]
    t.extraction = {
        "color": color,
        "B": list(b),
        "F_parts": [list(p) for p in state.condition.F_parts],
        "counters": list(state.counters),
        "decided": state.decided,
        "blocked": list(state.blocked),
    }
    return t, (color, b)
