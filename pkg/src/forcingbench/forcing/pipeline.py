"""Homogeneous-set extraction for pair colorings: confinement first, then
part selection.

The coloring's columns R_x = {y > x : c(x, y) = 1} feed the cohesive
construction under the committed-columns schedule, so every element
committed after column x is decided lands on x's chosen side.  The
decided sides then form an already-stable partition of the committed
prefix, handed to the limit-partition construction; the selected part maps
back to a monochromatic set, which is verified exhaustively before return.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from ..approx import Coloring, SetPresentation
from ..machine import OracleWindow
from .base import Transcript
from .coh import CohConfig, run_coh
from .d2 import D2Config, Delta2Partition, run_d2
from .em import coloring_digest


class PipelineInconclusive(RuntimeError):
    def __init__(self, msg: str, column: Optional[int] = None):
        super().__init__(msg)
        self.column = column


@dataclass(frozen=True)
class PipelineConfig:
    coh_stages: Optional[int] = None  # default: all of `stages`
    d2_stages: int = 40
    density_min: int = 2
    subset_width: int = 6


def column_family(c: Coloring):
    fam = []
    for x in range(c.bound):
        bits = tuple(
            1 if y > x and c.value(x, y) == 1 else 0 for y in range(c.bound)
        )
        fam.append(SetPresentation(OracleWindow(bits)))
    return fam


def rt2_pipeline(c: Coloring, stages: int, models=None,
                 config: Optional[PipelineConfig] = None):
    """Returns (H, Transcript): H monochromatic for c, checked pair by pair."""
    if c.k != 2:
        raise ValueError("the pair pipeline handles 2 colors")
    config = config or PipelineConfig()
    coh_cfg = CohConfig(
        window=c.bound, density_min=config.density_min,
        subset_width=config.subset_width, schedule="committed-columns",
    )
    t_coh, committed = run_coh(
        column_family(c), config.coh_stages or stages, models, coh_cfg)
    decided = t_coh.extraction["decided"]
    sides = {}
    for x in committed:
        info = decided.get(f"D_{x}")
        if info is not None and "side" in info:
            sides[x] = info["side"]
    # a column is stable when every later committed element sits on its side
    stable_cols = []
    unstable = None
    for x in sorted(sides):
        later = [y for y in committed if y > x]
        if all(c.value(x, y) == sides[x] for y in later):
            stable_cols.append(x)
        else:
            unstable = x
    if not stable_cols:
        raise PipelineInconclusive(
            "no committed column reached stability on the window",
            column=unstable,
        )
    part_of = tuple(sides[x] for x in stable_cols)
    induced = Delta2Partition(
        k=2,
        table=tuple((p,) for p in part_of),
        bound=len(stable_cols),
        promised_bound=0,
        declared_limits=part_of,
    )
    d2_cfg = D2Config(window=len(stable_cols))
    t_d2, (color, b) = run_d2(induced, config.d2_stages, models, d2_cfg)
    h = sorted(stable_cols[j] for j in b)
    # greedy closure over the window, re-checking every pair; the committed
    # prefix goes first so the construction's own elements are preferred
    candidates = sorted(set(committed) - set(h)) + \
        sorted(set(range(c.bound)) - set(committed) - set(h))
    for y in candidates:
        if all(c.value(min(x, y), max(x, y)) == color for x in h):
            h.append(y)
            h.sort()
    for a in range(len(h)):
        for bb in range(a + 1, len(h)):
            if c.value(h[a], h[bb]) != color:
                raise PipelineInconclusive(
                    f"extracted set not monochromatic at ({h[a]}, {h[bb]})")
    t = Transcript(
        kind="rt2",
        instance_hash=coloring_digest(c),
        config={
            "stages": stages, "d2_stages": config.d2_stages,
            "window": c.bound, "density_min": config.density_min,
            "subset_width": config.subset_width,
        },
    )
    t.extraction = {
        "C": list(committed),
        "sides": {str(x): sides[x] for x in sorted(sides)},
        "stable_columns": list(stable_cols),
        "color": color,
        "H": list(h),
        "coh": t_coh.to_dict(),
        "d2": t_d2.to_dict(),
    }
    return tuple(h), t
