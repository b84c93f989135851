"""End-to-end acceptance checks.

Each test records one PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and when the module is run directly.
"""
import random
import time

import numpy as np
import pytest

from sabotage.arena import REACH, SAFE, build_arena
from sabotage.atm import atm_accepts, compile_atm, machine_m, random_machine
from sabotage.cli import bench_trial
from sabotage.errors import SpaceBoundExceeded
from sabotage.generators import complete_game, random_game
from sabotage.model import ADJACENT, FULL, INF, NONE, Saboteur, bundled, load_scenario
from sabotage.qbf import (bounded_winner, classic_game, classic_winner, connected_graphs,
                          encode_classic, encode_qbf, evaluate_instance)
from sabotage.solver import explore, oracle_minimax, replay, solve, solve_local, solve_reachability
from sabotage.subsetgame import build_saboteur_arena, extracted_marks, solve_saboteur

RESULTS = {}
TIMES = {}


def record(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[k] = line
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def suite():
    """Random small games, 70 per observation mode, with solutions and oracle verdicts."""
    rng = random.Random(20240)
    t0 = time.perf_counter()
    out = []
    for mode in (NONE, ADJACENT, FULL):
        for _ in range(70):
            g = random_game(rng, n_max=6, budgets=(0, 1, 2), modes=(mode,))
            out.append((g, solve_reachability(build_arena(g)), oracle_minimax(g)))
    TIMES["suite"] = time.perf_counter() - t0
    return out


def test_criterion_1_oracle_equivalence(suite):
    agree = sum(sol.winner == o for _, sol, o in suite)
    modes = {g.observation for g, _, _ in suite}
    record(1, agree == len(suite) and len(modes) == 3,
           f"{agree}/{len(suite)} games agree with the minimax oracle "
           f"({TIMES['suite']:.1f}s for solver and oracle)")


def test_criterion_2_saboteur_route(suite):
    full = [(g, sol) for g, sol, _ in suite if g.observation == FULL]
    agree = sum(solve_saboteur(g).winner == sol.winner for g, sol in full)
    ns = np.array([10, 20, 30, 40])
    counts = np.array([explore(build_saboteur_arena(complete_game(int(n), 2, seed=int(n),
                                                                  observation=FULL))).n
                       for n in ns])
    ratio = counts / ns.astype(float) ** 4
    # local exponents between consecutive sizes; lower-order terms push them
    # above m + 2 at small n, so they must fall towards it
    local = np.diff(np.log(counts)) / np.diff(np.log(ns))
    c = float(ratio.max())
    ok = (agree == len(full) and c <= 1.0 and bool(np.all(np.diff(local) < 0))
          and local[-1] < 4.25)
    record(2, ok, f"{agree}/{len(full)} full-observation games agree; states <= "
                  f"{c:.3f} n^4 for n=10..40, local exponents "
                  f"{', '.join(f'{x:.2f}' for x in local)}")


def test_criterion_3_benchmark_asymmetry():
    sab = bench_trial("saboteur", 80, 2, 80_000, 600, 8_000_000)
    t10 = bench_trial("traveler", 10, 2, 10_000, 600, 8_000_000)
    t15 = bench_trial("traveler", 15, 2, 15_000, 600, 8_000_000)
    t20 = bench_trial("traveler", 20, 2, 20_000, 600, 8_000_000)
    ratio = t15["millis"] / max(t10["millis"], 1e-3)
    ok = (not sab["timeout"] and sab["millis"] < 60_000
          and not t15["timeout"] and ratio >= 50
          and t20["timeout"] in ("timeout", "guard"))
    record(3, ok, f"saboteur n=80 {sab['millis'] / 1000:.2f}s; traveler n=10 "
                  f"{t10['millis'] / 1000:.2f}s, n=15 {t15['millis'] / 1000:.1f}s "
                  f"(x{ratio:.0f}); n=20 {t20['timeout'] or 'solved'}")


def test_criterion_4_atm_equivalence():
    def winner(m, w):
        return solve_local(build_arena(compile_atm(m, w).game, settle_spent=True)).winner

    m = machine_m()
    example_ok = winner(m, "TBB") == SAFE and winner(m, "B") == REACH
    rng = random.Random(77)
    agree = total = accepted = 0
    while total < 30:
        mach = random_machine(rng, n_states=rng.randint(3, 4))
        w = tuple(rng.randint(0, 1) for _ in range(rng.randint(1, 3)))
        try:
            truth = atm_accepts(mach, w)
        except SpaceBoundExceeded:
            continue
        total += 1
        accepted += truth
        agree += (winner(mach, w) == REACH) == truth
    record(4, example_ok and agree == total,
           f"example machine rejects TBB and accepts B: {example_ok}; "
           f"{agree}/{total} random machines agree ({accepted} accepting)")


def test_criterion_5_qbf_truncated():
    rng = random.Random(55)
    agree = 0
    games = []
    for _ in range(40):
        g = random_game(rng, n_max=4, budgets=(INF,))
        gamma = rng.randint(1, 8)
        agree += evaluate_instance(encode_qbf(g, gamma)) == bounded_winner(g, gamma)
        games.append(g)
    # clause counts for every horizon 1..8; c is fitted on the per-round growth
    sizes = np.array([[len(encode_qbf(g, y).clauses) for y in range(1, 9)] for g in games])
    n2 = np.array([g.n ** 2 for g in games], dtype=float)
    steps = np.diff(sizes, axis=1)
    linear = bool(np.all(steps[:, 2:] == steps[:, 2:3]))
    c = float(np.max(steps / n2[:, None]))
    bounded = bool(np.all(sizes <= c * np.arange(1, 9) * n2[:, None]))
    record(5, agree == len(games) and linear and bounded,
           f"{agree}/{len(games)} formulas agree; clauses <= {c:.2f} gamma n^2 "
           f"for gamma 1..8 (constant growth per round: {linear})")


def test_criterion_6_classic_encoding():
    agree = total = 0
    for n in range(1, 5):
        for es in connected_graphs(n):
            for s in range(n):
                for f in range(n):
                    c = classic_game(n, es, s, f)
                    total += 1
                    agree += (solve(build_arena(encode_classic(c))).winner == REACH) \
                        == classic_winner(c)
    record(6, agree == total, f"{agree}/{total} connected graphs with start/final pairs agree")


def test_criterion_7_round_bound(suite):
    wins = [(g, sol) for g, sol, _ in suite if sol.winner == REACH]
    worst = 0
    ok = True
    for g, sol in wins:
        v = replay(sol)
        ok &= v.ok and v.max_rounds <= g.n ** 3
        worst = max(worst, v.max_rounds / g.n ** 3)
    record(7, ok, f"{len(wins)} traveler wins replayed exhaustively; "
                  f"longest play uses {worst:.1%} of n^3")


def test_criterion_8_scenario():
    g = load_scenario(bundled("scenario1.json"))
    one = g.replace(saboteurs=g.saboteurs[:1])
    s0 = one.saboteurs[0]

    def variant(budget, obs):
        return one.replace(observation=obs, saboteurs=(Saboteur(s0.start, budget, s0.edges),))

    expect = [(variant(1, FULL), REACH), (variant(1, ADJACENT), REACH),
              (variant(1, NONE), SAFE), (variant(INF, NONE), SAFE)]
    ok = all(solve(build_arena(h)).winner == w == oracle_minimax(h) for h, w in expect)
    both = solve_saboteur(g)
    marks = [g.label_set(p) for p in extracted_marks(both)]
    ok &= both.winner == SAFE and oracle_minimax(g) == SAFE and marks == [["R1"], ["CR2"]]
    record(8, ok, f"single-intruder variants as expected; both intruders mark {marks}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
