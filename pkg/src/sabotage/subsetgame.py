"""Saboteur-perspective arena with explicit marks.

The traveler is assumed to see every mark, so positions carry the marked
set itself instead of suspects.  For a fixed budget the arena is polynomial
in the number of vertices.

Two routes solve it: the explicit :class:`MarkedArena` (explored and solved
by :mod:`sabotage.solver`) and :func:`solve_dense`, a vectorized fixpoint
over the whole product space for the single-saboteur case.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import NamedTuple

import numpy as np

from .arena import REACH, SAFE, Arena
from .errors import UnboundedBudget, ValidationError
from .model import BUCHI, FULL, SabotageGame, from_mask, to_mask
from . import solver


class MarkedVertexState(NamedTuple):
    u: int
    v: tuple
    marks: tuple  # bitmask per saboteur
    turn: int


class MarkedArena(Arena):
    def __init__(self, g: SabotageGame, marks=None):
        if not g.finite_budget:
            raise UnboundedBudget("saboteur-side arena needs finite budgets")
        self.g = g
        self.objective = g.objective
        self.k = g.k
        self.final_mask = to_mask(g.final)
        self.budgets = tuple(int(s.budget) for s in g.saboteurs)
        init = [0] * g.k
        init[0] = to_mask(g.initial_marked if marks is None else marks)
        self.initial = MarkedVertexState(
            g.traveler_start, tuple(s.start for s in g.saboteurs), tuple(init), 0
        )

    def owner(self, x):
        return REACH if x.turn == 0 else SAFE

    def is_target(self, x):
        return x.turn == 0 and (self.final_mask >> x.u) & 1 == 1

    def successors(self, x):
        g = self.g
        marked = 0
        for m in x.marks:
            marked |= m
        if x.turn == 0:
            return [MarkedVertexState(w, x.v, x.marks, 1)
                    for w in g.t_succ[x.u] if not (marked >> w) & 1]
        i = x.turn - 1
        nxt = x.turn + 1 if x.turn < self.k else 0
        here = x.v[i]
        moves = g.b_succ[i][here]
        if not moves:
            return [x._replace(turn=nxt)]
        out = []
        used = bin(x.marks[i]).count("1")
        for w in moves:
            v = x.v[:i] + (w,) + x.v[i + 1:]
            cand = [c for c in sorted({here, w}) if c != x.u and not (marked >> c) & 1]
            for bits in range(1 << len(cand)):
                add = 0
                cnt = 0
                for j, c in enumerate(cand):
                    if bits >> j & 1:
                        add |= 1 << c
                        cnt += 1
                if used + cnt > self.budgets[i]:
                    continue
                marks = x.marks[:i] + (x.marks[i] | add,) + x.marks[i + 1:]
                out.append(MarkedVertexState(x.u, v, marks, nxt))
        return out

    def describe(self, x):
        lab = self.g.labels
        marks = "|".join("{" + ",".join(self.g.label_set(from_mask(m))) + "}" for m in x.marks)
        turn = "t" if x.turn == 0 else f"b{x.turn}" if self.k > 1 else "b"
        return f"({lab[x.u]}, {','.join(lab[w] for w in x.v)}, {marks}, {turn})"


def build_saboteur_arena(g: SabotageGame, marks=None) -> MarkedArena:
    return MarkedArena(g.replace(observation=FULL), marks)


def solve_saboteur(g: SabotageGame, marks=None, max_vertices=solver.DEFAULT_MAX_VERTICES):
    return solver.solve(build_saboteur_arena(g, marks), max_vertices)


def winner_with_initial_marks(g: SabotageGame, marks) -> int:
    """Winner when ``marks`` are already marked (and visible) at the start."""
    marks = frozenset(marks)
    if g.traveler_start in marks:
        raise ValidationError("initial marks avoid the traveler start")
    if marks & g.final:
        raise ValidationError("initial marks avoid final vertices")
    if len(marks) > g.saboteurs[0].budget:
        raise ValidationError("initial marks within budget")
    return solve_saboteur(g, marks).winner


def extracted_marks(sol) -> list:
    """Marks placed by each saboteur along the replay of ``sol``'s strategy.

    The traveler side is enumerated exhaustively; returns one set of vertex
    ids per saboteur (union over all plays).
    """
    gg = sol.graph
    succ = solver._restricted(gg, sol.strategy, solver.EXHAUSTIVE)
    parent, _, _ = solver._dfs(0, succ)
    k = len(gg.vertices[0].marks)
    placed = [set() for _ in range(k)]
    for x in parent:
        for i, m in enumerate(gg.vertices[x].marks):
            placed[i] |= from_mask(m)
    return placed


# -- dense route ---------------------------------------------------------------


@dataclass
class DenseSolution:
    winner: int
    states: int
    iterations: int
    seconds: float
    wt: np.ndarray  # traveler-to-move wins, shape (n, n, C)
    wb: np.ndarray  # saboteur-to-move wins
    combos: list

    @property
    def winner_name(self):
        return solver.PLAYER_NAMES[self.winner]


def dense_state_count(n: int, n_final: int, m: int) -> int:
    c = sum(comb(n - n_final, j) for j in range(m + 1))
    return 2 * n * n * c


def solve_dense(g: SabotageGame, marks=None) -> DenseSolution:
    """Reachability fixpoint over every (traveler, saboteur, marks, turn).

    Single saboteur, finite budget, full observation.
    """
    if g.k != 1:
        raise ValidationError("dense route supports one saboteur")
    if not g.finite_budget:
        raise UnboundedBudget("dense route needs a finite budget")
    if g.objective == BUCHI:
        raise ValidationError("dense route solves reachability objectives")
    t0 = time.perf_counter()
    n = g.n
    m = int(g.saboteurs[0].budget)
    nonfinal = [v for v in range(n) if v not in g.final]
    m = min(m, len(nonfinal))
    combos = [()]
    for j in range(1, m + 1):
        combos.extend(combinations(nonfinal, j))
    cidx = {c: i for i, c in enumerate(combos)}
    C = len(combos)
    in_mask = np.zeros((n, C), dtype=bool)
    for i, c in enumerate(combos):
        in_mask[list(c), i] = True
    # add_idx[x, c]: index of c | {x}, or -1 when x is final or over budget
    add_idx = np.full((n, C), -1, dtype=np.int64)
    for i, c in enumerate(combos):
        for x in nonfinal:
            if x in c:
                add_idx[x, i] = i
            elif len(c) < m:
                add_idx[x, i] = cidx[tuple(sorted(c + (x,)))]
    ET = np.zeros((n, n), dtype=np.float32)
    for a, b in g.traveler_edges:
        ET[a, b] = 1.0
    EB = np.zeros((n, n), dtype=np.float32)
    for a in range(n):
        for b in g.b_succ[0][a]:
            EB[a, b] = 1.0
    stuck = EB.sum(axis=1) == 0
    is_final = np.zeros(n, dtype=bool)
    is_final[list(g.final)] = True

    eye = np.eye(n, dtype=bool)
    ar = np.arange(n)
    # mark-on-arrival option for each (v', c), ignoring occupancy
    arr_ok = (add_idx >= 0) & ~in_mask
    arr_idx = np.where(add_idx >= 0, add_idx, 0)

    wt = np.zeros((n, n, C), dtype=bool)
    wt[is_final] = True
    wb = np.zeros((n, n, C), dtype=bool)
    iterations = 0
    while True:
        iterations += 1
        # traveler: some unmarked successor where the saboteur is to move and loses
        x = (wb & ~in_mask[:, None, :]).reshape(n, n * C).astype(np.float32)
        reach = (ET @ x).reshape(n, n, C) > 0
        wt_new = reach | is_final[:, None, None]
        # saboteur: every legal action keeps the traveler winning
        gathered = wt_new[:, ar[:, None], arr_idx]  # (u, v', c) -> wt[u, v', c+v']
        opt = np.where(arr_ok[None] & ~eye[:, :, None], gathered, True)
        G = wt_new & opt
        fail = (~G).astype(np.float32)
        cnt = np.matmul(EB[None], fail)
        A = cnt == 0
        # mark on departure: A at c + v, when v is not occupied and fits budget
        dep = A[:, ar[:, None], arr_idx]
        dep = np.where(arr_ok[None] & ~eye[:, :, None], dep, True)
        wb_new = A & dep
        if stuck.any():
            wb_new[:, stuck, :] = wt_new[:, stuck, :]
        if np.array_equal(wt_new, wt) and np.array_equal(wb_new, wb):
            break
        wt, wb = wt_new, wb_new
    c0 = cidx[tuple(sorted(g.initial_marked if marks is None else marks))]
    winner = REACH if wt[g.traveler_start, g.saboteurs[0].start, c0] else SAFE
    return DenseSolution(winner, 2 * n * n * C, iterations, time.perf_counter() - t0,
                         wt, wb, combos)
