"""Independent brute-force twins used only as test ground truth.

Deliberately written without reusing the library's search code: plain
enumeration over explicit node sets.
"""

from itertools import product

from forcingbench.machine import HALTED, OracleWindow, run_program


def enumerate_level(tree, depth):
    """All accepted strings of the given length with accepted prefixes."""
    out = []
    for bits in product((0, 1), repeat=depth):
        if all(tree.accepts(bits[:d]) for d in range(depth + 1)):
            out.append(bits)
    return sorted(out)


def self_halts(e, node):
    return run_program(e, e, OracleWindow(node), max(len(node), 1)).tag == HALTED


def greedy_forcing(tree, e_bound, depth):
    """Exhaustive re-implementation of the divergence-forcing policy."""
    nodes = enumerate_level(tree, depth)
    log = []
    for e in range(e_bound + 1):
        diverging = [n for n in nodes if not self_halts(e, n)]
        if diverging:
            nodes = diverging
            log.append((e, "diverges"))
        else:
            nodes = [nodes[0]]
            out = run_program(e, e, OracleWindow(nodes[0]), max(depth, 1))
            log.append((e, "halts", out.steps, out.use, out.value))
    return nodes[0], log


def max_homogeneous(coloring, bound):
    """Largest monochromatic subset of [0, bound) by subset growth."""
    best = ()
    # branch and bound per color
    for color in range(coloring.k):
        stack = [((), 0)]
        local = ()
        while stack:
            chosen, start = stack.pop()
            if len(chosen) > len(local):
                local = chosen
            if len(chosen) + (bound - start) <= len(local):
                continue
            for x in range(start, bound):
                if all(coloring.value(y, x) == color for y in chosen):
                    stack.append((chosen + (x,), x + 1))
        if len(local) > len(best):
            best = local
    return best


def is_fallow(coloring, subset):
    s = sorted(subset)
    for i in range(len(s)):
        for j in range(i + 1, len(s)):
            for l in range(j + 1, len(s)):
                x, y, z = s[i], s[j], s[l]
                if coloring.value(x, z) not in (coloring.value(x, y), coloring.value(y, z)):
                    return False
    return True


def max_fallow(coloring, bound):
    best = ()
    stack = [((), 0)]
    while stack:
        chosen, start = stack.pop()
        if len(chosen) > len(best):
            best = chosen
        if len(chosen) + (bound - start) <= len(best):
            continue
        for x in range(start, bound):
            cand = chosen + (x,)
            if is_fallow(coloring, cand):
                stack.append((cand, x + 1))
    return best
