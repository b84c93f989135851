"""Command-line entry point: ``sabotage <command> ...``.

Exit codes: 0 solved, 2 strategy validation failed, 3 vertex guard or
timeout hit, 4 bad input.
"""
from __future__ import annotations

import argparse
import csv
import json
import multiprocessing as mp
import sys
import time
from pathlib import Path

from . import atm, qbf, solver, subsetgame
from .arena import REACH, SAFE, build_arena
from .errors import (ArenaTooLarge, ParseError, SabotageError, SpaceBoundExceeded,
                     StrategyIncomplete, UnboundedBudget, UnsupportedSemantics,
                     ValidationError)
from .generators import complete_game
from .model import FULL, NONE, SabotageGame, load_scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GUARD = 3
EXIT_INPUT = 4

_COMPLEXITY = {
    ("B1", None): "PSPACE-complete",
    ("B2", "T1"): "PTIME",
    ("B2", "T2"): "PSPACE-complete",
    ("B2", "T3"): "EXPTIME-complete",
}


def regime(g: SabotageGame, side: str = "traveler") -> str:
    """Restriction labels and complexity class of the route taken for ``g``."""
    b = "B2" if g.finite_budget else "B1"
    if side == "saboteur":
        t = "T1"
    else:
        t = {FULL: "T1", NONE: "T2"}.get(g.observation, "T3")
    cls = _COMPLEXITY[(b, None)] if b == "B1" else _COMPLEXITY[(b, t)]
    return f"({b}) ({t}) {cls}"


def read_game(path) -> SabotageGame:
    """Load a scenario; files with a ``classic`` key go through the hub encoding."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if isinstance(data, dict) and data.get("classic"):
        return qbf.encode_classic(qbf.ClassicGame.from_dict(data))
    return load_scenario(path)


def build_route(g: SabotageGame, side: str, engine: str = "auto"):
    """Pick the arena for ``side``; returns (arena, engine)."""
    if side == "saboteur":
        if not g.finite_budget:
            raise UnboundedBudget("saboteur side needs finite budgets")
        return subsetgame.build_saboteur_arena(g), "global"
    if g.observation == FULL and g.finite_budget:
        # nothing is hidden, so marks can be tracked explicitly
        return subsetgame.build_saboteur_arena(g), "global"
    if engine == "local" and g.objective != "buchi":
        return build_arena(g, settle_spent=True), "local"
    return build_arena(g), "global"


def run_engine(arena, engine: str, max_vertices: int):
    if engine == "local":
        return solver.solve_local(arena, max_vertices)
    return solver.solve(arena, max_vertices)


def _solve_game(g, side, engine, max_vertices):
    arena, engine = build_route(g, side, engine)
    sol = run_engine(arena, engine, max_vertices)
    sol.extra.update({"side": side, "engine": engine, "regime": regime(g, side)})
    return sol


def report(sol, g) -> str:
    lines = [
        f"winner: {sol.winner_name}",
        f"route: {sol.extra.get('regime', '')}",
        f"arena: {sol.graph.n} vertices, {sol.graph.n_edges} edges",
        f"time: {sol.seconds * 1000:.1f} ms",
    ]
    if sol.extra.get("side") == "saboteur" and sol.winner == SAFE:
        placed = subsetgame.extracted_marks(sol)
        for i, p in enumerate(placed):
            lines.append(f"saboteur {i + 1} marks: {', '.join(g.label_set(p)) or '-'}")
    return "\n".join(lines)


# -- commands ---------------------------------------------------------------------


def cmd_solve(args) -> int:
    g = read_game(args.scenario)
    if args.engine == "dense":
        d = subsetgame.solve_dense(g)
        print(f"winner: {d.winner_name}\nroute: {regime(g, 'saboteur')} (dense)")
        print(f"states: {d.states}\ntime: {d.seconds * 1000:.1f} ms")
        return EXIT_OK
    sol = _solve_game(g, args.side, args.engine, args.max_vertices)
    print(report(sol, g))
    if args.out:
        solver.dump_strategy(sol, args.out)
    if args.dot:
        Path(args.dot).write_text(solver.to_dot(sol.graph, sol.strategy))
    return EXIT_OK


def _bench_one(side, n, budget, seed, max_vertices, queue):
    g = complete_game(n, budget=budget, seed=seed, observation=NONE)
    t0 = time.perf_counter()
    try:
        if side == "saboteur":
            d = subsetgame.solve_dense(g)
            row = (d.states, 0, d.winner_name)
        else:
            sol = solver.solve_reachability(build_arena(g), max_vertices)
            row = (sol.graph.n, sol.graph.n_edges, sol.winner_name)
        queue.put(("ok", row, time.perf_counter() - t0))
    except ArenaTooLarge:
        queue.put(("guard", None, time.perf_counter() - t0))


def bench_trial(side, n, budget, seed, timeout, max_vertices):
    """One benchmark instance in a child process; returns a CSV row dict."""
    q = mp.Queue()
    p = mp.Process(target=_bench_one, args=(side, n, budget, seed, max_vertices, q))
    t0 = time.perf_counter()
    p.start()
    p.join(timeout)
    row = {"n": n, "seed": seed, "side": side, "budget": budget, "states": "",
           "edges": "", "winner": "", "timeout": ""}
    if p.is_alive():
        p.terminate()
        p.join()
        row.update(millis=round((time.perf_counter() - t0) * 1000, 1), timeout="timeout")
        return row
    status, res, secs = q.get() if not q.empty() else ("error", None, 0.0)
    row["millis"] = round(secs * 1000, 1)
    if status == "ok":
        row.update(states=res[0], edges=res[1], winner=res[2])
    else:
        row["timeout"] = status
    return row


BENCH_COLUMNS = ["n", "trial", "seed", "side", "budget", "states", "edges", "millis",
                 "winner", "timeout"]


def cmd_bench(args) -> int:
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS)
    w.writeheader()
    for n in range(args.min, args.max + 1, args.step):
        for trial in range(args.trials):
            seed = args.seed * 100_003 + n * 1000 + trial
            row = bench_trial(args.side, n, args.budget, seed, args.timeout, args.max_vertices)
            row["trial"] = trial
            w.writerow(row)
            out.flush()
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


def cmd_encode_qbf(args) -> int:
    g = read_game(args.scenario)
    q = qbf.encode_qbf(g, args.bound)
    out = args.out or str(Path(args.scenario).with_suffix(".qdimacs"))
    meta = qbf.emit_qdimacs(q, out)
    print(f"wrote {out} ({q.n_vars} variables, {len(q.clauses)} clauses, gamma {q.gamma})")
    print(f"metadata {meta}")
    if args.evaluate:
        print("formula", "TRUE" if qbf.evaluate_instance(q) else "FALSE")
    return EXIT_OK


def cmd_compile_atm(args) -> int:
    m = atm.load_machine(args.machine) if args.machine else atm.machine_m()
    gg = atm.compile_atm(m, args.input)
    g = gg.game
    print(f"compiled {g.n} vertices, {len(g.traveler_edges)} traveler edges, "
          f"{len(gg.gadgets)} gadgets")
    if args.out:
        Path(args.out).write_text(json.dumps(g.to_dict(), indent=2) + "\n")
    if args.solve:
        sol = solver.solve_local(build_arena(g, settle_spent=True), args.max_vertices)
        if sol.winner == REACH:
            print("ACCEPT (traveler wins)")
        else:
            print("REJECT (saboteur wins)")
    return EXIT_OK


def cmd_validate(args) -> int:
    g = read_game(args.scenario)
    with open(args.strategy) as fh:
        data = json.load(fh)
    side = data.get("side", "traveler")
    arena, engine = build_route(g, side, data.get("engine", "global"))
    sol = run_engine(arena, engine, args.max_vertices)
    s = solver.load_strategy(sol.graph, data)
    v = solver.replay(sol.graph, s)
    if v.ok:
        print(f"ALL_WIN for the {data['owner']}"
              + (f" (at most {v.max_rounds} traveler moves)" if v.max_rounds else ""))
        return EXIT_OK
    print("COUNTEREXAMPLE")
    for x in v.counterexample:
        print("  " + sol.graph.describe(x))
    return EXIT_INVALID


# -- interactive play ----------------------------------------------------------------


def _action_text(gg, x, y):
    a, b = gg.arena.decode(gg.vertices[x]), gg.arena.decode(gg.vertices[y])
    lab = gg.arena.g.labels
    if gg.owner[x] == REACH:
        return f"go {lab[b.u]}"
    if hasattr(b, "marks"):
        new = [lab[v] for v in range(len(lab))
               if any((bm >> v) & 1 and not (am >> v) & 1 for am, bm in zip(a.marks, b.marks))]
    else:
        new = [lab[v] for v in range(len(lab))
               if any((bt >> v) & 1 and not (at >> v) & 1 for at, bt in zip(a.T, b.T))]
    moved = [lab[w] for w, w0 in zip(b.v, a.v)]
    text = "move to " + ",".join(moved)
    return text + (f", mark {','.join(new)}" if new else "")


def render(gg, x) -> str:
    """The traveler's observation record at arena vertex ``x``."""
    st = gg.arena.decode(gg.vertices[x])
    g = gg.arena.g
    lab = g.labels
    marks = st.marks if hasattr(st, "marks") else st.T
    seen = 0
    for m in marks:
        seen |= m
    sus = 0
    for m in getattr(st, "S", ()):
        sus |= m
    def names(mask):
        return "{" + ", ".join(lab[v] for v in range(len(lab)) if (mask >> v) & 1) + "}"
    return (f"traveler at {lab[st.u]}; saboteurs at {', '.join(lab[w] for w in st.v)}; "
            f"seen marks {names(seen)}; suspects {names(sus)}")


def play(g: SabotageGame, human: str, sol, inp=input, out=print) -> int:
    """Human versus solved strategy; returns the winner."""
    gg = sol.graph
    me = REACH if human == "traveler" else SAFE
    machine = sol.strategy if sol.strategy.owner != me else None
    x = 0
    horizon = solver.default_horizon(g)
    rounds = 0
    while True:
        if gg.target[x]:
            out("traveler reaches a final vertex: traveler wins")
            return REACH
        st = gg.arena.decode(gg.vertices[x])
        marks = st.marks if hasattr(st, "marks") else st.T
        if any((m >> st.u) & 1 for m in marks):
            out("traveler occupies a marked vertex: saboteur wins")
            return SAFE
        nxt = gg.succ(x).tolist()
        if not nxt:
            who = "traveler" if gg.owner[x] == REACH else "saboteur"
            out(f"{who} has no move: {'saboteur' if who == 'traveler' else 'traveler'} wins")
            return SAFE if gg.owner[x] == REACH else REACH
        if gg.owner[x] == REACH:
            rounds += 1
            if rounds > horizon:
                out("round bound exceeded: saboteur wins")
                return SAFE
            out(render(gg, x))
        if gg.owner[x] == me:
            opts = {_action_text(gg, x, y): y for y in nxt}
            keys = list(opts)
            for i, k in enumerate(keys):
                out(f"  [{i}] {k}")
            while True:
                ans = inp("> ").strip()
                if ans.isdigit() and int(ans) < len(keys):
                    x = opts[keys[int(ans)]]
                    break
                hit = [k for k in keys if k.split(",")[0].split()[-1] == ans]
                if len(hit) == 1:
                    x = opts[hit[0]]
                    break
                out("illegal move, try again")
        else:
            y = machine.get(x) if machine is not None else None
            if y is None:
                y = nxt[0]
            out(f"machine: {_action_text(gg, x, y)}")
            x = y


def cmd_play(args) -> int:
    g = read_game(args.scenario)
    # the traveler's view decides what is shown, whoever the human plays
    arena, _ = build_route(g, "traveler", "global")
    sol = solver.solve(arena, args.max_vertices)
    if args.strategy:
        sol.strategy = solver.load_strategy(sol.graph, args.strategy)
    try:
        play(g, args.as_, sol)
    except EOFError:
        print()
    return EXIT_OK


# -- argument parsing --------------------------------------------------------------


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sabotage", description="Solve generalized sabotage games.")
    sub = p.add_subparsers(dest="command", required=True)
    guard = dict(type=int, default=solver.DEFAULT_MAX_VERTICES, dest="max_vertices")

    s = sub.add_parser("solve", help="solve a scenario from one side")
    s.add_argument("--scenario", required=True)
    s.add_argument("--side", choices=["traveler", "saboteur"], default="traveler")
    s.add_argument("--engine", choices=["auto", "global", "local", "dense"], default="auto")
    s.add_argument("--out")
    s.add_argument("--dot")
    s.add_argument("--max-vertices", **guard)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="timing table on random complete networks")
    b.add_argument("--side", choices=["traveler", "saboteur"], default="saboteur")
    b.add_argument("--min", type=int, default=10)
    b.add_argument("--max", type=int, default=20)
    b.add_argument("--step", type=int, default=2)
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--budget", type=int, default=2)
    b.add_argument("--timeout", type=float, default=600.0)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--max-vertices", **guard)
    b.set_defaults(func=cmd_bench)

    pl = sub.add_parser("play", help="play one side in the terminal")
    pl.add_argument("--scenario", required=True)
    pl.add_argument("--as", dest="as_", choices=["traveler", "saboteur"], default="traveler")
    pl.add_argument("--strategy")
    pl.add_argument("--max-vertices", **guard)
    pl.set_defaults(func=cmd_play)

    q = sub.add_parser("encode-qbf", help="write the QDIMACS encoding of a game")
    q.add_argument("--scenario", required=True)
    q.add_argument("--bound", type=int)
    q.add_argument("--out")
    q.add_argument("--evaluate", action="store_true")
    q.set_defaults(func=cmd_encode_qbf)

    c = sub.add_parser("compile-atm", help="compile a machine and word into a game")
    c.add_argument("--machine")
    c.add_argument("--input", required=True)
    c.add_argument("--solve", action="store_true")
    c.add_argument("--out")
    c.add_argument("--max-vertices", **guard)
    c.set_defaults(func=cmd_compile_atm)

    v = sub.add_parser("validate", help="replay a stored strategy against all responses")
    v.add_argument("--scenario", required=True)
    v.add_argument("--strategy", required=True)
    v.add_argument("--max-vertices", **guard)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.func(args)
    except ArenaTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except StrategyIncomplete as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, ValidationError, UnboundedBudget, UnsupportedSemantics,
            SpaceBoundExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SabotageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
