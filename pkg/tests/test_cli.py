import csv
import dataclasses
import io
import json

import pytest

from sabotage import cli
from sabotage.arena import REACH, SAFE
from sabotage.generators import complete_game
from sabotage.model import FULL, INF, NONE, bundled, load_scenario, make_game, save_scenario
from sabotage.solver import solve, strategy_to_dict


@pytest.fixture
def fork(tmp_path):
    """From a the traveler can go to the goal or into a dead end."""
    g = make_game(["a", "goal", "dead", "s"], [("a", "goal"), ("a", "dead")], [("s", 0)],
                  "a", ["goal"], observation=NONE)
    p = tmp_path / "fork.json"
    save_scenario(g, p)
    return g, p


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_solve_scenario_saboteur(capsys):
    code, out = run(["solve", "--scenario", bundled("scenario1.json"), "--side", "saboteur"],
                    capsys)
    assert code == 0
    assert "winner: saboteur" in out.out
    assert "saboteur 1 marks: R1" in out.out
    assert "saboteur 2 marks: CR2" in out.out
    assert "(B2) (T1) PTIME" in out.out


def test_solve_timing_scenario(capsys):
    code, out = run(["solve", "--scenario", bundled("scenario_timing.json")], capsys)
    assert code == 0
    assert "winner: traveler" in out.out
    assert "EXPTIME-complete" in out.out


def test_solve_and_validate(tmp_path, capsys, fork):
    _, p = fork
    s = tmp_path / "s.json"
    dot = tmp_path / "a.dot"
    code, out = run(["solve", "--scenario", p, "--out", s, "--dot", dot], capsys)
    assert code == 0
    assert dot.read_text().startswith("digraph")
    code, out = run(["validate", "--scenario", p, "--strategy", s], capsys)
    assert code == 0
    assert "ALL_WIN for the traveler" in out.out


def test_validate_counterexample(tmp_path, capsys, fork):
    g, p = fork
    arena, _ = cli.build_route(g, "traveler")
    sol = solve(arena)
    data = strategy_to_dict(sol)
    # redirect the opening move into the dead end
    start = sol.graph.describe(0)
    dead = g.index("dead")
    bad = next(sol.graph.describe(int(y)) for y in sol.graph.succ(0)
               if sol.graph.decode(int(y)).u == dead)
    data["moves"] = [[a, bad if a == start else b] for a, b in data["moves"]]
    s = tmp_path / "bad.json"
    s.write_text(json.dumps(data))
    code, out = run(["validate", "--scenario", p, "--strategy", s], capsys)
    assert code == 2
    assert "COUNTEREXAMPLE" in out.out


def test_validate_unknown_vertex(tmp_path, capsys, fork):
    _, p = fork
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"owner": "traveler", "side": "traveler", "moves": [["x", "y"]]}))
    code, _ = run(["validate", "--scenario", p, "--strategy", s], capsys)
    assert code == 2


def test_guard_exit(tmp_path, capsys):
    p = tmp_path / "big.json"
    save_scenario(complete_game(8, budget=2, seed=1), p)
    code, out = run(["solve", "--scenario", p, "--max-vertices", 1000], capsys)
    assert code == 3
    assert "exceeds 1000" in out.err


def test_input_errors(tmp_path, capsys):
    code, _ = run(["solve", "--scenario", tmp_path / "missing.json"], capsys)
    assert code == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(["solve", "--scenario", bad], capsys)
    assert code == 4
    bad.write_text(json.dumps({"vertices": ["a"], "traveler_edges": [["a", "zz"]]}))
    code, _ = run(["solve", "--scenario", bad], capsys)
    assert code == 4


def test_unbounded_saboteur_side(tmp_path, capsys):
    g = load_scenario(bundled("scenario1.json"))
    g = g.replace(saboteurs=tuple(dataclasses.replace(s, budget=INF) for s in g.saboteurs))
    p = tmp_path / "inf.json"
    save_scenario(g, p)
    code, _ = run(["solve", "--scenario", p, "--side", "saboteur"], capsys)
    assert code == 4


def test_dense_engine(tmp_path, capsys):
    g = load_scenario(bundled("scenario1.json"))
    p = tmp_path / "one.json"
    save_scenario(g.replace(saboteurs=g.saboteurs[:1]), p)
    code, out = run(["solve", "--scenario", p, "--engine", "dense"], capsys)
    assert code == 0
    assert "winner: traveler" in out.out
    # two saboteurs are outside the dense route
    code, _ = run(["solve", "--scenario", bundled("scenario1.json"), "--engine", "dense"],
                  capsys)
    assert code == 4


def test_compile_atm(capsys, tmp_path):
    code, out = run(["compile-atm", "--input", "TBB", "--solve"], capsys)
    assert code == 0
    assert "REJECT (saboteur wins)" in out.out
    g = tmp_path / "g.json"
    code, out = run(["compile-atm", "--machine", bundled("machine_M.json"), "--input", "B",
                     "--solve", "--out", g], capsys)
    assert "ACCEPT (traveler wins)" in out.out
    assert load_scenario(g).saboteurs[0].budget == 1


def test_compile_atm_bad_word(capsys):
    code, _ = run(["compile-atm", "--input", "TXB"], capsys)
    assert code == 4


def test_encode_qbf(tmp_path, capsys):
    out = tmp_path / "tri.qdimacs"
    code, res = run(["encode-qbf", "--scenario", bundled("classic_triangle.json"),
                     "--bound", 8, "--out", out], capsys)
    assert code == 0
    text = out.read_text()
    assert text.startswith("p cnf ")
    meta = json.loads((tmp_path / "tri.qdimacs.meta.json").read_text())
    assert meta["gamma"] == 8
    assert "gamma 8" in res.out


def test_encode_qbf_finite_budget(tmp_path, capsys):
    code, _ = run(["encode-qbf", "--scenario", bundled("scenario1.json"), "--bound", 2,
                   "--out", tmp_path / "x.qdimacs"], capsys)
    assert code == 4


def test_bench_columns(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _ = run(["bench", "--side", "traveler", "--min", 4, "--max", 5, "--step", 1,
                   "--trials", 2, "--budget", 0, "--out", out], capsys)
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert list(rows[0]) == cli.BENCH_COLUMNS
    assert len(rows) == 4
    assert all(r["winner"] == "traveler" and not r["timeout"] for r in rows)
    assert len({r["seed"] for r in rows}) == 4


def test_bench_deterministic(capsys):
    a = cli.bench_trial("saboteur", 6, 2, 17, 60, 10_000)
    b = cli.bench_trial("saboteur", 6, 2, 17, 60, 10_000)
    assert a["winner"] == b["winner"] and a["states"] == b["states"]


def test_bench_timeout():
    row = cli.bench_trial("traveler", 12, 2, 1, 0.5, 8_000_000)
    assert row["timeout"] == "timeout"


def test_regime_labels():
    g = load_scenario(bundled("scenario1.json"))
    assert cli.regime(g, "saboteur") == "(B2) (T1) PTIME"
    assert cli.regime(g.replace(observation=NONE)) == "(B2) (T2) PSPACE-complete"
    assert cli.regime(g.replace(observation=FULL)) == "(B2) (T1) PTIME"


def scripted(answers):
    it = iter(answers)
    return lambda prompt="": next(it)


def test_play_human_traveler_reprompts(fork):
    g, _ = fork
    arena, _ = cli.build_route(g, "traveler")
    sol = solve(arena)
    lines = []
    winner = cli.play(g, "traveler", sol, inp=scripted(["nowhere", "9", "goal"]),
                      out=lines.append)
    assert winner == REACH
    assert lines.count("illegal move, try again") == 2
    assert lines[-1].endswith("traveler wins")


def test_play_human_saboteur_budget_zero():
    g = make_game(["a", "b", "goal", "s"], [("a", "b"), ("b", "goal")], [("s", 0)],
                  "a", ["goal"], observation=NONE)
    arena, _ = cli.build_route(g, "traveler")
    sol = solve(arena)
    lines = []
    winner = cli.play(g, "saboteur", sol, inp=scripted(["0"] * 10), out=lines.append)
    assert winner == REACH
    assert any(x.startswith("machine: go") for x in lines)


def test_play_loses_on_dead_end(fork):
    g, _ = fork
    sol = solve(cli.build_route(g, "traveler")[0])
    lines = []
    assert cli.play(g, "traveler", sol, inp=scripted(["dead"]), out=lines.append) == SAFE


def test_play_command(monkeypatch, capsys, fork):
    _, p = fork
    monkeypatch.setattr("sys.stdin", io.StringIO("goal\n"))
    code, out = run(["play", "--scenario", p], capsys)
    assert code == 0
    assert "traveler wins" in out.out
