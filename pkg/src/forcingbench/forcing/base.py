"""Shared substrate for the three set-construction engines.

A condition is a pair (finite committed set, reservoir window).  Reservoirs
live inside a coded model as derived-index rows; conditions additionally
cache the member list so transcripts and audits can work without the model.

"Infinite" always means: the window density witness meets a configured
count beyond the committed maximum.  Every acceptance of that surrogate is
recorded so an audit can demand more.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from ..machine import HALTED, OracleWindow, decode_program, run_program, OP_QRY
from ..approx import Coloring, ColorLimit, stable_color_limit

DENSITY_MIN = 8  # reservoir elements required beyond max F

CASE1 = "Case1"
CASE2 = "Case2"
E_EXTENSION = "E-extension"
D_RESTRICTION = "D-restriction"
ABORT = "abort"
SKIP = "skip"


@dataclass(frozen=True)
class CohCondition:
    F: Tuple[int, ...]
    I: int  # model index of the reservoir row
    reservoir: Tuple[int, ...]  # cached member list of that row's window
    window_bound: int

    def valid(self) -> bool:
        if self.F and self.reservoir:
            return max(self.F) < min(self.reservoir)
        return True


@dataclass(frozen=True)
class EmCondition:
    F: Tuple[int, ...]
    I: int
    reservoir: Tuple[int, ...]
    window_bound: int
    precondition_flags: Tuple[str, ...] = ()  # verified clause tags

    def valid(self) -> bool:
        if self.F and self.reservoir:
            return max(self.F) < min(self.reservoir)
        return True


@dataclass(frozen=True)
class D2Condition:
    F_parts: Tuple[Tuple[int, ...], ...]
    I: int
    reservoir: Tuple[int, ...]
    window_bound: int

    def valid(self) -> bool:
        for part in self.F_parts:
            if part and self.reservoir and max(part) >= min(self.reservoir):
                return False
        return True


def _committed(cond) -> Tuple[int, ...]:
    if isinstance(cond, D2Condition):
        return tuple(sorted(x for part in cond.F_parts for x in part))
    return cond.F


def extends(p, q, report: Optional[List[str]] = None) -> bool:
    """Extension order: committed set grew only inside q's reservoir and the
    reservoir shrank.  Incomparable windows are reported and treated false."""
    if type(p) is not type(q):
        raise TypeError("conditions of different kinds are incomparable")
    if p.window_bound != q.window_bound:
        if report is not None:
            report.append(
                f"incomparable windows ({p.window_bound} vs {q.window_bound})"
            )
        return False
    fp, fq = set(_committed(p)), set(_committed(q))
    if not fp >= fq:
        return False
    rq = set(q.reservoir)
    if not (fp - fq) <= rq:
        return False
    if not set(p.reservoir) <= rq:
        return False
    if isinstance(p, D2Condition):
        # per-part growth must respect part identity
        for a, b in zip(p.F_parts, q.F_parts):
            if not set(a) >= set(b):
                return False
    return True


@dataclass(frozen=True)
class FallowReport:
    ok: bool
    violation: Optional[Tuple[int, int, int]] = None


def _pair_value(c: Coloring):
    # direct table access; c.value dominates the triple scans otherwise
    if c.table is not None:
        table = c.table

        def get(x, y):
            return table[x][y - x - 1]

        return get
    return c.value


def fallow_check(c: Coloring, s) -> FallowReport:
    """Least violating triple x < y < z with c(x,z) outside {c(x,y), c(y,z)},
    if any."""
    elems = sorted(s)
    val = _pair_value(c)
    for a in range(len(elems)):
        for b in range(a + 1, len(elems)):
            for d in range(b + 1, len(elems)):
                x, y, z = elems[a], elems[b], elems[d]
                if val(x, z) not in (val(x, y), val(y, z)):
                    return FallowReport(False, (x, y, z))
    return FallowReport(True)


def finite_oracle(members) -> OracleWindow:
    """Characteristic window of a finite set, bounded just past its max."""
    ms = sorted(members)
    bound = (ms[-1] + 1) if ms else 1
    return OracleWindow.from_set(ms, bound)


def bounded_halt(e: int, members, fuel_scale: int = 1):
    """Self-halting of program e with a finite-set oracle, fuel tied to the
    set's maximum: the use and step count both stay below the bound, so the
    outcome is preserved by any end-extension of the set."""
    window = finite_oracle(members)
    return run_program(e, e, window, fuel_scale * window.bound)


def queries_oracle(e: int) -> bool:
    """Whether the program text contains the oracle-query opcode at all;
    query-free programs halt independently of the committed set (only the
    fuel bound matters)."""
    return any(ins.op == OP_QRY for ins in decode_program(e).code)


@dataclass(frozen=True)
class HaltWitness:
    members: Tuple[int, ...]  # the full oracle set F ∪ D
    added: Tuple[int, ...]  # D, the reservoir part
    steps: int
    use: int
    value: int


def find_halt_witness(e, F, reservoir, subset_width: int = 8,
                      extra_filter=None, fuel_scale: int = 1):
    """Bounded search for finite D inside the reservoir making program e
    self-halt over F ∪ D.

    Enumerates D over all subsets of the first `subset_width` reservoir
    members plus every singleton, in a fixed order (empty set first, then
    increasing bitmask / increasing singleton).  `extra_filter(F ∪ D)` can
    veto candidates (fallowness constraints).  Query-free programs shortcut
    to a single fuel question.  Returns (HaltWitness | None, search record).
    """
    record = {
        "subset_width": min(subset_width, len(reservoir)),
        "singletons": len(reservoir),
        "fuel_scale": fuel_scale,
    }
    base = tuple(sorted(F))

    def attempt(added):
        s = tuple(sorted(set(base) | set(added)))
        if extra_filter is not None and not extra_filter(s):
            return None
        out = bounded_halt(e, s, fuel_scale)
        if out.tag == HALTED:
            return HaltWitness(s, tuple(sorted(added)), out.steps, out.use, out.value)
        return None

    if not queries_oracle(e):
        record["query_free"] = True
        # outcome depends only on the fuel bound; try the largest available
        top = attempt((reservoir[-1],) if reservoir else ())
        if top is None:
            return None, record
        # shrink to the least sufficient singleton (or the empty set)
        w = attempt(())
        if w is not None:
            return w, record
        for z in reservoir:
            w = attempt((z,))
            if w is not None:
                return w, record
        return top, record

    width = record["subset_width"]
    head = reservoir[:width]
    for mask in range(1 << width):
        added = tuple(head[t] for t in range(width) if mask >> t & 1)
        w = attempt(added)
        if w is not None:
            return w, record
    for z in reservoir[width:]:
        w = attempt((z,))
        if w is not None:
            return w, record
    return None, record


def limit_color(c: Coloring, x: int, budget: int) -> Optional[ColorLimit]:
    """Limit color of column x, exact when the instance declares a
    stabilization bound (the bound is audited at load time)."""
    if c.declared_bound is not None:
        y = max(c.declared_bound, x + 1)
        if c.table is not None and y >= c.bound:
            return None  # no pair above x inside the window
        return ColorLimit(c.value(x, y), c.declared_bound)
    return stable_color_limit(c, x, budget)


def stabilization_point(c: Coloring, xs, window_bound: int) -> int:
    """Least m with c(x, y) constant for every listed x and all y in
    [m, window_bound); exact on the window."""
    m = 0
    for x in xs:
        top = window_bound - 1
        final = c.value(x, top)
        mx = top
        for y in range(top - 1, x, -1):
            if c.value(x, y) != final:
                break
            mx = y
        m = max(m, mx)
    return m


@dataclass(frozen=True)
class StageRecord:
    stage: int
    requirement: str
    branch: str
    condition: Dict
    certificates: Dict

    def to_dict(self) -> Dict:
        return {
            "stage": self.stage,
            "requirement": self.requirement,
            "branch": self.branch,
            "condition": self.condition,
            "certificates": self.certificates,
        }


@dataclass
class Transcript:
    kind: str
    instance_hash: str
    config: Dict
    stages: List[StageRecord] = field(default_factory=list)
    extraction: Dict = field(default_factory=dict)
    audits: List[Dict] = field(default_factory=list)
    version: int = 1

    def to_dict(self) -> Dict:
        return {
            "version": self.version,
            "kind": self.kind,
            "instance_hash": self.instance_hash,
            "config": self.config,
            "stages": [s.to_dict() for s in self.stages],
            "extraction": self.extraction,
            "audits": self.audits,
        }

    @staticmethod
    def from_dict(d: Dict) -> "Transcript":
        return Transcript(
            kind=d["kind"],
            instance_hash=d["instance_hash"],
            config=d["config"],
            stages=[
                StageRecord(
                    s["stage"], s["requirement"], s["branch"],
                    s["condition"], s["certificates"],
                )
                for s in d["stages"]
            ],
            extraction=d["extraction"],
            audits=d["audits"],
            version=d["version"],
        )


def condition_dict(cond) -> Dict:
    d = {"I": cond.I, "reservoir": list(cond.reservoir),
         "window_bound": cond.window_bound}
    if isinstance(cond, D2Condition):
        d["F_parts"] = [list(p) for p in cond.F_parts]
    else:
        d["F"] = list(cond.F)
    return d
