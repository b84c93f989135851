import json
import random

import numpy as np
import pytest

from sabotage.arena import REACH, SAFE, build_arena
from sabotage.atm import (BOT, TOP, AtmSpec, atm_accepts, compile_atm, configurations,
                          load_machine, machine_m, parse_word, random_machine, word_str)
from sabotage.errors import ParseError, SpaceBoundExceeded, ValidationError
from sabotage.model import ADJACENT, from_mask
from sabotage.solver import solve_local


def solved(m, w):
    return solve_local(build_arena(compile_atm(m, w).game, settle_spent=True))


def trivial(accepting=True):
    target = "qa" if accepting else "qr"
    delta = {("q0", x): ((target, x, 1),) for x in (TOP, BOT)}
    return AtmSpec(("q0", "qa", "qr"), frozenset({"q0", "qa", "qr"}), delta, "q0", "qa", "qr")


def test_parse_word():
    assert parse_word("⊤·⊥·⊥") == (TOP, BOT, BOT)
    assert parse_word("TBB") == (TOP, BOT, BOT)
    assert word_str((TOP, BOT)) == "⊤⊥"
    with pytest.raises(ParseError):
        parse_word("TX")


def test_machine_m_oracle():
    m = machine_m()
    assert not atm_accepts(m, "TBB")
    assert atm_accepts(m, "B")


def test_machine_m_games():
    m = machine_m()
    assert solved(m, "TBB").winner == SAFE
    assert solved(m, "B").winner == REACH


@pytest.mark.parametrize("accepting", [True, False])
def test_trivial_machines(accepting):
    m = trivial(accepting)
    assert atm_accepts(m, "T") == accepting
    assert (solved(m, "T").winner == REACH) == accepting


def test_universal_branching():
    # q0 universal: one branch accepts, the other rejects
    delta = {("q0", x): (("qa", x, 1), ("qr", x, 1)) for x in (TOP, BOT)}
    m = AtmSpec(("q0", "qa", "qr"), frozenset({"qa", "qr"}), delta, "q0", "qa", "qr")
    assert not atm_accepts(m, "T")
    assert solved(m, "T").winner == SAFE
    ex = AtmSpec(m.states, frozenset(m.states), delta, "q0", "qa", "qr")
    assert atm_accepts(ex, "T")
    assert solved(ex, "T").winner == REACH


def test_cycle_rejects():
    delta = {("q0", x): (("q0", x, -1),) for x in (TOP, BOT)}
    m = AtmSpec(("q0", "qa", "qr"), frozenset({"q0", "qa", "qr"}), delta, "q0", "qa", "qr")
    assert not atm_accepts(m, "T")
    assert solved(m, "T").winner == SAFE


def test_random_equivalence():
    rng = random.Random(2024)
    done = 0
    while done < 20:
        m = random_machine(rng, n_states=rng.randint(3, 4))
        w = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
        try:
            truth = atm_accepts(m, w)
        except SpaceBoundExceeded:
            continue
        assert (solved(m, w).winner == REACH) == truth, (m.to_dict(), w)
        done += 1


def test_space_bound():
    delta = {("q0", x): (("q0", x, 1),) for x in (TOP, BOT)}
    m = AtmSpec(("q0", "qa", "qr"), frozenset({"q0", "qa", "qr"}), delta, "q0", "qa", "qr",
                space_bound=(0, 1))
    with pytest.raises(SpaceBoundExceeded):
        atm_accepts(m, "T")
    with pytest.raises(SpaceBoundExceeded):
        compile_atm(m, "T")


def test_missing_transition():
    with pytest.raises(ValidationError):
        AtmSpec(("q0", "qa", "qr"), frozenset({"q0", "qa", "qr"}),
                {("q0", TOP): (("qa", TOP, 1),)}, "q0", "qa", "qr")


def test_machine_json_round_trip(tmp_path):
    m = machine_m()
    p = tmp_path / "m.json"
    p.write_text(json.dumps(m.to_dict()))
    assert load_machine(p) == m
    with pytest.raises(ParseError):
        AtmSpec.from_dict({"states": ["a"]})


def test_blank_cells():
    start, _ = configurations(trivial(), "T")
    # P(1) = 2 cells; the second starts blank
    assert start == ("q0", 1, (TOP, BOT))


def test_compiled_shape():
    gg = compile_atm(machine_m(), "TBB")
    g = gg.game
    assert g.k == 1 and g.saboteurs[0].budget == 1
    assert g.observation == ADJACENT
    assert len(gg.tape) == 2 * gg.cells
    assert ("I",) in gg.gadgets
    for q, p in gg.pairs:
        if q not in ("qaccept", "qreject"):
            assert ("E", q, p) in gg.gadgets


def test_eraser_reveals_one_cell():
    gg = compile_atm(machine_m(), "TBB")
    g = gg.game
    tape_mask = 0
    for v in gg.tape.values():
        tape_mask |= 1 << v
    for q, p in gg.pairs:
        if ("E", q, p) not in gg.gadgets:
            continue
        for c in ("⊥", "⊤"):
            look = gg.vertex(f"E({q},{p}).look{c}")
            seen = g.label_set(from_mask(g.obs_mask[look] & tape_mask))
            assert sorted(seen) == sorted([f"{p},⊤", f"{p},⊥"])


def test_input_gadget_leaves_tape_as_suspects():
    """Walking the input schedule without marks leaves exactly the initial
    tape in the traveler's suspicion."""
    gg = compile_atm(machine_m(), "TBB")
    g = gg.game
    arena = build_arena(g)
    code = arena.initial
    rounds = 2 * gg.cells
    tape0 = gg.word + (BOT,) * (gg.cells - len(gg.word))
    sched = []
    for p in range(1, gg.cells + 1):
        sched += [gg.tape[(p, tape0[p - 1])], gg.vertex(f"I.s{p}")]
    for r in range(rounds):
        t_next = gg.vertex(f"I.t{r + 1}")
        code = next(c for c in arena.successors(code) if arena.decode(c).u == t_next)
        code = next(c for c in arena.successors(code)
                    if arena.decode(c).v[0] == sched[r] and arena.decode(c).T[0] == 0)
    x = arena.decode(code)
    tape_mask = 0
    for v in gg.tape.values():
        tape_mask |= 1 << v
    expect = {gg.tape[(p, tape0[p - 1])] for p in range(1, gg.cells + 1)}
    assert from_mask(x.S[0] & tape_mask) == expect


def test_size_polynomial():
    rng = random.Random(5)
    ratios = []
    while len(ratios) < 15:
        m = random_machine(rng, n_states=4, space_bound=(1, 1))
        w = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 4)))
        try:
            gg = compile_atm(m, w)
        except SpaceBoundExceeded:
            continue
        ratios.append(gg.game.n / (len(m.states) * gg.cells) ** 2)
    assert np.max(ratios) < 10
