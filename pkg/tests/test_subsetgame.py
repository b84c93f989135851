import random

import pytest

from sabotage.arena import REACH, SAFE, build_arena
from sabotage.errors import UnboundedBudget, ValidationError
from sabotage.generators import complete_game, random_game
from sabotage.model import BUCHI, FULL, INF, Saboteur, bundled, load_scenario, make_game
from sabotage.solver import explore, replay, solve
from sabotage.subsetgame import (build_saboteur_arena, dense_state_count, extracted_marks,
                                 solve_dense, solve_saboteur, winner_with_initial_marks)


@pytest.fixture(scope="module")
def scenario():
    return load_scenario(bundled("scenario1.json"))


def test_budget_zero_is_pursuit_free():
    rng = random.Random(4)
    for _ in range(30):
        g = random_game(rng, budgets=(0,), modes=(FULL,))
        gg = explore(build_saboteur_arena(g))
        assert all(not any(m for m in gg.decode(i).marks) for i in range(gg.n))


def test_both_intruders(scenario):
    sol = solve_saboteur(scenario)
    assert sol.winner == SAFE
    assert replay(sol).ok
    placed = extracted_marks(sol)
    assert [scenario.label_set(p) for p in placed] == [["R1"], ["CR2"]]


def test_first_intruder_alone(scenario):
    one = scenario.replace(saboteurs=scenario.saboteurs[:1])
    assert solve_saboteur(one).winner == REACH


def test_unbounded_budget_rejected():
    g = make_game(["a", "goal", "z"], [("a", "goal")], [("z", INF)], "a", ["goal"])
    with pytest.raises(UnboundedBudget):
        build_saboteur_arena(g)
    with pytest.raises(UnboundedBudget):
        solve_dense(g)


def test_dense_matches_explicit():
    rng = random.Random(12)
    for _ in range(120):
        g = random_game(rng, modes=(FULL,), budgets=(0, 1, 2), n_max=7)
        assert solve_dense(g).winner == solve_saboteur(g).winner


def test_full_observation_routes_agree():
    rng = random.Random(13)
    for _ in range(80):
        g = random_game(rng, modes=(FULL,))
        assert solve_saboteur(g).winner == solve(build_arena(g)).winner


def test_buchi_routes_agree():
    rng = random.Random(14)
    for _ in range(60):
        g = random_game(rng, modes=(FULL,), objective=BUCHI)
        a = solve(build_saboteur_arena(g))
        assert a.winner == solve(build_arena(g)).winner
        assert replay(a).ok


def test_initial_marks():
    g = make_game(["a", "b", "c", "goal", "s"],
                  [("a", "b"), ("b", "goal"), ("a", "c"), ("c", "goal")],
                  [("s", 1, [])], "a", ["goal"], observation=FULL)
    assert winner_with_initial_marks(g, []) == REACH
    assert winner_with_initial_marks(g, [g.index("b")]) == REACH
    two = g.replace(saboteurs=(Saboteur(4, 2, frozenset()),))
    assert winner_with_initial_marks(two, [g.index("b"), g.index("c")]) == SAFE
    with pytest.raises(ValidationError):
        winner_with_initial_marks(g, [g.index("a")])
    with pytest.raises(ValidationError):
        winner_with_initial_marks(g, [g.index("b"), g.index("c")])


def test_state_count_polynomial():
    for n in (10, 20, 40):
        assert dense_state_count(n, 1, 2) <= 2 * n ** 4
    g = complete_game(10, budget=2, seed=0, observation=FULL)
    assert solve_dense(g).states == dense_state_count(10, 1, 2)
