import random

import pytest

from forcingbench import machine, programs
from forcingbench.machine import (
    CONFLICT,
    EMPTY_WINDOW,
    HALTED,
    IN,
    ORACLE_INSUFFICIENT,
    OUT,
    OUT_OF_FUEL,
    OracleWindow,
    assemble,
    decode_program,
    disassemble,
    run_program,
    turing_reduce_eval,
)
from forcingbench.pairing import cantor, decode_list, encode_list, uncantor


def test_pairing_roundtrip():
    for z in range(2000):
        x, y = uncantor(z)
        assert cantor(x, y) == z
    assert cantor(0, 0) == 0


def test_list_coding_roundtrip():
    for n in range(500):
        assert encode_list(decode_list(n)) == n
    assert decode_list(0) == []


def test_index_roundtrip():
    for n in range(10_000):
        assert decode_program(n).index == n


def test_halt_zero():
    out = run_program(programs.HALT_ZERO.index, 7, EMPTY_WINDOW, 10)
    assert out.tag == HALTED and out.value == 0 and out.use == 0


def test_oracle_bit():
    w = OracleWindow.from_set({5}, 6)
    out = run_program(programs.output_oracle_bit(5).index, 0, w, 10)
    assert out.tag == HALTED and out.value == 1 and out.use == 6


def test_loop_out_of_fuel():
    out = run_program(programs.LOOP.index, 3, EMPTY_WINDOW, 10_000)
    assert out.tag == OUT_OF_FUEL and out.steps == 10_000


def test_oracle_insufficient_carries_index():
    out = run_program(programs.output_oracle_bit(9).index, 0, OracleWindow.from_set({}, 4), 10)
    assert out.tag == ORACLE_INSUFFICIENT and out.missing == 9


def test_parity_programs():
    for n in range(12):
        even = run_program(programs.HALT_IFF_EVEN, n, EMPTY_WINDOW, 100).halted
        odd = run_program(programs.HALT_IFF_ODD, n, EMPTY_WINDOW, 100).halted
        assert even == (n % 2 == 0)
        assert odd == (n % 2 == 1)


def test_reduce_eval_parity():
    e1 = programs.HALT_IFF_EVEN.index
    e2 = programs.HALT_IFF_ODD.index
    assert turing_reduce_eval(e1, e2, 4, EMPTY_WINDOW, 50) == IN
    assert turing_reduce_eval(e1, e2, 3, EMPTY_WINDOW, 50) == OUT
    e = programs.HALT_ZERO.index
    assert turing_reduce_eval(e, e, 0, EMPTY_WINDOW, 50) == CONFLICT


def test_halt_at_step_exact():
    for k in (1, 5, 17):
        out = run_program(programs.halt_at_step(k), 0, EMPTY_WINDOW, 100)
        assert out.tag == HALTED and out.steps == k
        assert run_program(programs.halt_at_step(k), 0, EMPTY_WINDOW, k - 1 or 1).tag != HALTED or k == 1


def test_fuel_monotonicity_random_sweep():
    rng = random.Random(0)
    w = OracleWindow(tuple(rng.randrange(2) for _ in range(32)))
    for _ in range(300):
        e = rng.randrange(10**9)
        x = rng.randrange(16)
        seen = None
        for out in machine.fuel_sweep(e, x, w, 64):
            if seen is not None:
                assert out == seen, "halted outcome changed under fuel increase"
            elif out.tag == HALTED:
                seen = out
        # spot-check the resumable sweep against fresh runs
        if seen is not None:
            fresh = run_program(e, x, w, 64)
            assert fresh == seen


def test_use_principle():
    rng = random.Random(1)
    base = OracleWindow(tuple(rng.randrange(2) for _ in range(24)))
    for _ in range(200):
        e = rng.randrange(10**8)
        x = rng.randrange(8)
        out = run_program(e, x, base, 128)
        if out.tag != HALTED:
            continue
        flipped = list(base.bits)
        for i in range(out.use, len(flipped)):
            flipped[i] ^= 1
        perturbed = run_program(e, x, OracleWindow(tuple(flipped)), 128)
        assert perturbed == out


def test_assembler_roundtrip():
    prog = assemble("set r1 3\nadd r0 r1\njz r0 4\nqry r2\nhalt r0")
    assert assemble(disassemble(prog)) == prog


def test_assembler_rejects_garbage():
    with pytest.raises(machine.AssemblerError):
        assemble("frobnicate r0")
    with pytest.raises(machine.AssemblerError):
        assemble("jmp nowhere")


def test_mod_decider():
    for k in (2, 3, 5):
        prog = programs.mod_decider(k)
        for n in range(20):
            out = run_program(prog, n, EMPTY_WINDOW, 500)
            assert out.tag == HALTED and out.value == n % k
