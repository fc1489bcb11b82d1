"""Seeded instance generators.

Every generator derives all randomness from its seed argument and emits
its own ground truth (limit tables, stabilization bounds), so exactness
checks against generated instances need no search.  Declared bounds are
honored by construction and re-audited by the instance loader.
"""

from __future__ import annotations

import random
from typing import List, Tuple

from ..approx import Coloring, Delta2Presentation
from ..forcing.d2 import Delta2Partition
from ..trees import TableTree


def gen_delta2(seed: int, n_range: int = 64, bound_max: int = 32,
               columns: int = 96) -> Tuple[Delta2Presentation, Tuple[int, ...]]:
    """A 0/1 limit approximation plus its ground-truth limit row."""
    rng = random.Random(("delta2", seed).__repr__())
    bound = rng.randrange(2, bound_max + 1)
    limits = tuple(rng.randrange(2) for _ in range(n_range))
    table = []
    for n in range(n_range):
        noise = [rng.randrange(2) for _ in range(bound)]
        table.append(tuple(noise) + (limits[n],) * (columns - bound))
    return Delta2Presentation(table=tuple(table), promised_bound=bound), limits


def gen_stable_coloring(seed: int, k: int = 3, bound: int = 40,
                        stab_max: int = 32) -> Coloring:
    """Pair coloring whose columns settle below a declared bound; the limit
    colors ride along as ground truth."""
    rng = random.Random(("stable-coloring", seed, k, bound).__repr__())
    stab = rng.randrange(2, stab_max + 1)
    limits = tuple(rng.randrange(k) for _ in range(bound))
    table = []
    for x in range(bound):
        row = []
        for y in range(x + 1, bound):
            if y < stab:
                row.append(rng.randrange(k))
            else:
                row.append(limits[x])
        table.append(tuple(row))
    return Coloring(k=k, table=tuple(table), bound=bound,
                    declared_bound=stab, declared_limits=limits)


def gen_d2_partition(seed: int, k: int = 2, bound: int = 64,
                     stab_max: int = 32) -> Delta2Partition:
    rng = random.Random(("d2-partition", seed, k, bound).__repr__())
    stab = rng.randrange(2, stab_max + 1)
    limits = tuple(rng.randrange(k) for _ in range(bound))
    table = []
    for n in range(bound):
        row = [rng.randrange(k) for _ in range(stab)] + [limits[n]]
        table.append(tuple(row))
    return Delta2Partition(k=k, table=tuple(table), bound=bound,
                           promised_bound=stab, declared_limits=limits)


def gen_coloring(seed: int, k: int = 2, bound: int = 48) -> Coloring:
    rng = random.Random(("coloring", seed, k, bound).__repr__())
    table = tuple(
        tuple(rng.randrange(k) for _ in range(x + 1, bound))
        for x in range(bound)
    )
    return Coloring(k=k, table=table, bound=bound)


def gen_program_pairs(seed: int, count: int,
                      index_bound: int = 1 << 16,
                      input_bound: int = 64) -> List[Tuple[int, int]]:
    rng = random.Random(("programs", seed).__repr__())
    return [(rng.randrange(index_bound), rng.randrange(input_bound))
            for _ in range(count)]


def gen_table_tree(seed: int, depth: int = 12,
                   keep: float = 0.8) -> TableTree:
    """Random downward-closed table tree guaranteed to survive to depth."""
    rng = random.Random(("table-tree", seed, depth).__repr__())
    levels = [{()}]
    for _ in range(depth):
        nxt = set()
        for node in sorted(levels[-1]):
            for b in (0, 1):
                if rng.random() < keep:
                    nxt.add(node + (b,))
        if not nxt:
            node = rng.choice(sorted(levels[-1]))
            nxt = {node + (rng.randrange(2),)}
        levels.append(nxt)
    return TableTree.from_level_sets(levels)
