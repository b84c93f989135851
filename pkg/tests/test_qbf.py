import json
import random

import pytest

from sabotage.arena import REACH, build_arena
from sabotage.errors import UnsupportedSemantics, ValidationError
from sabotage.generators import random_game
from sabotage.model import INF, NONE, bundled, make_game
from sabotage.qbf import (EXISTS, FORALL, ClassicGame, bounded_winner, classic_game,
                          classic_winner, connected_graphs, emit_qdimacs, encode_classic,
                          encode_qbf, evaluate_instance, evaluate_qbf, round_bound)
from sabotage.solver import solve


def two_vertex():
    return make_game(["s", "f", "b"], [("s", "f")], [("b", INF, [("b", "s"), ("s", "b")])],
                     "s", ["f"])


@pytest.fixture(scope="module")
def triangle():
    with open(bundled("classic_triangle.json")) as fh:
        return ClassicGame.from_dict(json.load(fh))


def test_round_bound():
    g = make_game(["a", "b", "c", "d"], [("a", "b")], [("c", 1)], "a", ["b"])
    assert round_bound(g) == 64
    g2 = make_game(["a", "b", "c", "d"], [("a", "b")], [("c", 1), ("d", 1)], "a", ["b"])
    assert round_bound(g2) == 256
    assert round_bound(make_game(["a", "s"], [], [("s", 1)], "a", ["a"])) == 8


def test_prefix_shape():
    g = two_vertex()
    q = encode_qbf(g, 3)
    quants = [qq for qq, _ in q.prefix]
    assert quants == [EXISTS, FORALL, EXISTS, FORALL, EXISTS]
    # every position block holds q.bits variables; the last also holds auxiliaries
    assert all(len(vs) == q.bits for _, vs in q.prefix[:-1])
    assert q.position_vars[FORALL] == 2 * q.bits


def test_two_vertex_true():
    q = encode_qbf(two_vertex(), 2)
    assert evaluate_instance(q)
    assert bounded_winner(two_vertex(), 2)


def test_horizon_too_short():
    g = make_game(["a", "b", "f", "s"], [("a", "b"), ("b", "f")], [("s", INF, [("s", "s")])],
                  "a", ["f"])
    assert not evaluate_instance(encode_qbf(g, 1))
    assert evaluate_instance(encode_qbf(g, 2))


def test_triangle_false(triangle):
    g = encode_classic(triangle)
    for gamma in (2, 4):
        q = encode_qbf(g, gamma)
        assert not evaluate_instance(q)
        assert not bounded_winner(g, gamma)


def test_truncated_agreement():
    rng = random.Random(11)
    for _ in range(25):
        g = random_game(rng, n_max=4, budgets=(INF,))
        gamma = rng.randint(1, 6)
        assert evaluate_instance(encode_qbf(g, gamma)) == bounded_winner(g, gamma)


def test_clause_growth():
    rng = random.Random(3)
    for _ in range(15):
        g = random_game(rng, n_max=4, budgets=(INF,))
        gamma = rng.randint(1, 8)
        q = encode_qbf(g, gamma)
        assert len(q.clauses) <= 12 * gamma * q.n ** 2


def test_finals_are_merged():
    g = make_game(["a", "x", "y", "s"], [("a", "x"), ("a", "y")], [("s", INF)], "a", ["x", "y"])
    q = encode_qbf(g, 1)
    assert q.n == 3
    assert q.labels[q.final] == "x+y"


def test_finite_budget_unsupported():
    g = make_game(["a", "b", "s"], [("a", "b")], [("s", 2)], "a", ["b"])
    with pytest.raises(UnsupportedSemantics):
        encode_qbf(g, 2)
    with pytest.raises(UnsupportedSemantics):
        bounded_winner(g, 2)


def test_bad_horizon():
    with pytest.raises(ValidationError):
        encode_qbf(two_vertex(), 0)


def test_emit_files(tmp_path, triangle):
    q = encode_qbf(encode_classic(triangle), 3)
    out = tmp_path / "t.qdimacs"
    meta = emit_qdimacs(q, out)
    lines = out.read_text().splitlines()
    assert lines[0] == f"p cnf {q.n_vars} {len(q.clauses)}"
    assert lines[1].startswith("e ") and lines[2].startswith("a ")
    assert all(x.endswith(" 0") for x in lines[1:])
    data = json.loads(open(meta).read())
    assert data["gamma"] == 3
    assert len(data["variables"]) == 5 * q.bits
    assert data["variables"]["1"] == {"block": "r", "round": 1, "bit": 0}


def test_evaluator_basics():
    # forall x exists y: x == y
    assert evaluate_qbf([(FORALL, [1]), (EXISTS, [2])], [[1, -2], [-1, 2]])
    # exists y forall x: x == y
    assert not evaluate_qbf([(EXISTS, [2]), (FORALL, [1])], [[1, -2], [-1, 2]])
    assert not evaluate_qbf([(EXISTS, [1])], [[1], [-1]])
    assert evaluate_qbf([], [])


def test_hub_encoding_counts(triangle):
    g = encode_classic(triangle)
    e = len(triangle.edges)
    assert g.n == 3 + e + 1
    assert len(g.traveler_edges) == 4 * e
    assert g.saboteurs[0].budget == INF
    assert len(g.saboteurs[0].edges) == 2 * e


def test_classic_oracle_small():
    assert classic_winner(classic_game(2, [(0, 1)], 0, 1))
    # the saboteur cuts the second edge of a path right after the first move
    assert not classic_winner(classic_game(3, [(0, 1), (1, 2)], 0, 2))
    assert classic_winner(classic_game(3, [(0, 1), (1, 2), (0, 2)], 0, 2))


def test_connected_graph_counts():
    # labelled connected graphs on 1..4 vertices
    assert [sum(1 for _ in connected_graphs(n)) for n in range(1, 5)] == [1, 1, 4, 38]


def test_classic_equivalence_three_vertices():
    for es in connected_graphs(3):
        for s in range(3):
            for f in range(3):
                c = classic_game(3, es, s, f)
                assert (solve(build_arena(encode_classic(c))).winner == REACH) == classic_winner(c)


def test_classic_round_trip(triangle):
    assert ClassicGame.from_dict(triangle.to_dict()) == triangle


def test_none_observation_still_encodes():
    g = two_vertex().replace(observation=NONE)
    assert evaluate_instance(encode_qbf(g, 2))
