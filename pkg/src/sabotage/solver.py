"""Explicit-state solving of reachability and Buchi games.

Arenas are explored forward from their initial vertex, then solved by
backward attractor computation.  Strategies are memoryless maps over the
explored vertex ids.
"""
from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from array import array

import numpy as np
from numba import njit

from .arena import REACH, SAFE, Arena
from .errors import ArenaTooLarge, StrategyIncomplete
from .model import BUCHI, REACHABILITY, SabotageGame

DEFAULT_MAX_VERTICES = 8_000_000

ALL_WIN = "ALL_WIN"
COUNTEREXAMPLE = "COUNTEREXAMPLE"
EXHAUSTIVE = "EXHAUSTIVE"

PLAYER_NAMES = {REACH: "traveler", SAFE: "saboteur"}


class GameGraph:
    """An explored arena: dense ids, owners, targets and CSR successors."""

    def __init__(self, arena, vertices, owner, target, indptr, indices):
        self.arena = arena
        self.vertices = vertices  # arena vertex per id
        self.owner = np.asarray(owner, dtype=np.int8)
        self.target = np.asarray(target, dtype=np.bool_)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int32)
        self._pred = None
        self.index = None

    @property
    def n(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.indices)

    def succ(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def preds(self):
        if self._pred is None:
            src = np.repeat(np.arange(self.n, dtype=np.int32), np.diff(self.indptr))
            order = np.argsort(self.indices, kind="stable")
            pptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(self.indices, minlength=self.n), out=pptr[1:])
            self._pred = (pptr, src[order])
        return self._pred

    def id_of(self, vertex):
        if self.index is None:
            self.index = {v: i for i, v in enumerate(self.vertices)}
        return self.index[vertex]

    def decode(self, i):
        return self.arena.decode(self.vertices[i])

    def describe(self, i):
        return self.arena.describe(self.vertices[i])


def explore(arena: Arena, max_vertices: int = DEFAULT_MAX_VERTICES) -> GameGraph:
    """Materialize every vertex reachable from ``arena.initial``.

    Raises ArenaTooLarge once more than ``max_vertices`` are discovered.
    """
    index = {arena.initial: 0}
    vertices = [arena.initial]
    owner = bytearray()
    target = bytearray()
    indptr = array("q", [0])
    indices = array("i")
    absorbing = arena.absorbing_targets
    successors = arena.successors
    owner_of = arena.owner
    is_target = arena.is_target
    get = index.get
    i = 0
    while i < len(vertices):
        x = vertices[i]
        owner.append(owner_of(x))
        tgt = is_target(x)
        target.append(tgt)
        if not (tgt and absorbing):
            for y in successors(x):
                j = get(y)
                if j is None:
                    j = len(vertices)
                    if j >= max_vertices:
                        raise ArenaTooLarge(max_vertices)
                    index[y] = j
                    vertices.append(y)
                indices.append(j)
        indptr.append(len(indices))
        i += 1
    gg = GameGraph(arena, vertices,
                   np.frombuffer(bytes(owner), dtype=np.int8),
                   np.frombuffer(bytes(target), dtype=np.bool_),
                   np.frombuffer(indptr, dtype=np.int64),
                   np.frombuffer(indices, dtype=np.int32))
    gg.index = index
    return gg


@njit(cache=True)
def _attractor_kernel(indptr, indices, pptr, pidx, owner, player, target, alive):
    n = len(indptr) - 1
    in_attr = np.zeros(n, dtype=np.bool_)
    rank = np.full(n, -1, dtype=np.int32)
    count = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    head = 0
    tail = 0
    for x in range(n):
        if not alive[x]:
            continue
        if target[x]:
            in_attr[x] = True
            rank[x] = 0
            queue[tail] = x
            tail += 1
            continue
        if owner[x] != player:
            c = 0
            for j in range(indptr[x], indptr[x + 1]):
                if alive[indices[j]]:
                    c += 1
            count[x] = c
            if c == 0:
                in_attr[x] = True
                rank[x] = 0
                queue[tail] = x
                tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        r = rank[x] + 1
        for j in range(pptr[x], pptr[x + 1]):
            p = pidx[j]
            if in_attr[p] or not alive[p]:
                continue
            if owner[p] == player:
                in_attr[p] = True
                rank[p] = r
                queue[tail] = p
                tail += 1
            else:
                count[p] -= 1
                if count[p] == 0:
                    in_attr[p] = True
                    rank[p] = r
                    queue[tail] = p
                    tail += 1
    return in_attr, rank


@njit(cache=True)
def _attractor_choice_kernel(indptr, indices, owner, player, in_attr, rank, alive):
    # min rank, then lowest vertex id; -1 where undefined
    n = len(indptr) - 1
    choice = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        if in_attr[x] and owner[x] == player and rank[x] > 0:
            best = -1
            for j in range(indptr[x], indptr[x + 1]):
                y = indices[j]
                if in_attr[y] and alive[y]:
                    if best == -1 or rank[y] < rank[best] or (rank[y] == rank[best] and y < best):
                        best = y
            choice[x] = best
    return choice


@njit(cache=True)
def _trap_choice_kernel(indptr, indices, owner, player, region):
    # stay inside region; lowest id
    n = len(indptr) - 1
    choice = np.full(n, -1, dtype=np.int64)
    for x in range(n):
        if region[x] and owner[x] == player:
            best = -1
            for j in range(indptr[x], indptr[x + 1]):
                y = indices[j]
                if region[y] and (best == -1 or y < best):
                    best = y
            choice[x] = best
    return choice


def attractor(gg: GameGraph, player: int, target, alive=None):
    """Attractor of ``target`` for ``player`` inside ``alive``.

    Returns boolean membership and rank arrays.  An opponent vertex with no
    alive successor is attracted (its owner is stuck and loses).
    """
    pptr, pidx = gg.preds()
    if alive is None:
        alive = np.ones(gg.n, dtype=np.bool_)
    return _attractor_kernel(gg.indptr, gg.indices, pptr, pidx, gg.owner, player,
                             np.asarray(target, dtype=np.bool_),
                             np.asarray(alive, dtype=np.bool_))


def _attractor_choices(gg, player, in_attr, rank, alive=None):
    if alive is None:
        alive = np.ones(gg.n, dtype=np.bool_)
    return _attractor_choice_kernel(gg.indptr, gg.indices, gg.owner, player,
                                    in_attr, rank, np.asarray(alive, dtype=np.bool_))


def _trap_choices(gg, player, region):
    return _trap_choice_kernel(gg.indptr, gg.indices, gg.owner, player,
                               np.asarray(region, dtype=np.bool_))


def _merge(base, new):
    return np.where(new >= 0, new, base)


class Strategy:
    """Memoryless strategy: successor id per vertex id, -1 where undefined."""

    def __init__(self, owner: int, choice):
        self.owner = owner
        if isinstance(choice, dict):
            size = max(list(choice) + [-1]) + 1
            arr = np.full(size, -1, dtype=np.int64)
            for x, y in choice.items():
                arr[x] = y
            choice = arr
        self.choice = np.asarray(choice, dtype=np.int64)

    def get(self, x, default=None):
        if 0 <= x < len(self.choice) and self.choice[x] >= 0:
            return int(self.choice[x])
        return default

    def __getitem__(self, x):
        y = self.get(x)
        if y is None:
            raise KeyError(x)
        return y

    def __contains__(self, x):
        return self.get(x) is not None

    def __len__(self):
        return int((self.choice >= 0).sum())

    def items(self):
        idx = np.nonzero(self.choice >= 0)[0]
        return list(zip(idx.tolist(), self.choice[idx].tolist()))

    def redirect(self, x, y) -> "Strategy":
        arr = self.choice.copy()
        arr[x] = y
        return Strategy(self.owner, arr)


@dataclass
class Solution:
    winner: int
    strategy: Strategy
    graph: GameGraph
    region: np.ndarray  # True where the traveler (REACH) wins
    objective: str = REACHABILITY
    rank: np.ndarray = None
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def winner_name(self):
        return PLAYER_NAMES[self.winner]


def _as_graph(a, max_vertices):
    return a if isinstance(a, GameGraph) else explore(a, max_vertices)


def solve_reachability(a, max_vertices: int = DEFAULT_MAX_VERTICES) -> Solution:
    t0 = time.perf_counter()
    gg = _as_graph(a, max_vertices)
    in_attr, rank = attractor(gg, REACH, gg.target)
    winner = REACH if in_attr[0] else SAFE
    if winner == REACH:
        choice = _attractor_choices(gg, REACH, in_attr, rank)
    else:
        choice = _trap_choices(gg, SAFE, ~in_attr)
    return Solution(winner, Strategy(winner, choice), gg, in_attr, REACHABILITY,
                    rank, time.perf_counter() - t0)


def _cpre(gg, player, target, alive):
    """Vertices of ``alive`` from which ``player`` forces one step into ``target``."""
    src = np.repeat(np.arange(gg.n), np.diff(gg.indptr))
    live = alive[gg.indices]
    into = np.bincount(src, weights=live & target[gg.indices], minlength=gg.n)
    total = np.bincount(src, weights=live, minlength=gg.n)
    mine = gg.owner == player
    # an opponent vertex without live moves is stuck and loses
    return alive & np.where(mine, into > 0, into == total)


def solve_buchi(a, max_vertices: int = DEFAULT_MAX_VERTICES, recurrence=None) -> Solution:
    """Iterated-attractor Buchi solver.

    Each round removes the saboteur attractor of the vertices from which
    the traveler cannot force a further visit (at least one step away) to
    the recurrence set.  ``recurrence`` optionally overrides the arena's
    target predicate.
    """
    t0 = time.perf_counter()
    gg = _as_graph(a, max_vertices)
    n = gg.n
    if recurrence is None:
        rec = gg.target.copy()
    else:
        rec = np.array([bool(recurrence(gg.decode(i))) for i in range(n)], dtype=np.bool_)
    alive = np.ones(n, dtype=np.bool_)
    safe_choice = np.full(n, -1, dtype=np.int64)
    while True:
        in_attr, rank = attractor(gg, REACH, alive & rec, alive)
        trap = alive & ~_cpre(gg, REACH, in_attr, alive)
        if not trap.any():
            break
        d_attr, d_rank = attractor(gg, SAFE, trap, alive)
        safe_choice = _merge(safe_choice, _trap_choices(gg, SAFE, trap & ~in_attr))
        # recurrence vertices in the trap: step out of the attractor
        for x in np.nonzero(trap & in_attr & (gg.owner == SAFE))[0].tolist():
            for y in gg.succ(x).tolist():
                if alive[y] and not in_attr[y]:
                    safe_choice[x] = y
                    break
        safe_choice = _merge(safe_choice, _attractor_choices(gg, SAFE, d_attr, d_rank, alive))
        alive &= ~d_attr
    region = alive
    winner = REACH if region[0] else SAFE
    if winner == REACH:
        choice = _attractor_choices(gg, REACH, in_attr, rank, alive)
        for x in np.nonzero(alive & rec & (gg.owner == REACH))[0].tolist():
            best = None
            for y in gg.succ(x).tolist():
                if alive[y] and in_attr[y] and (best is None or (rank[y], y) < (rank[best], best)):
                    best = y
            if best is not None:
                choice[x] = best
        strategy = Strategy(REACH, choice)
    else:
        strategy = Strategy(SAFE, np.where(region, -1, safe_choice))
    return Solution(winner, strategy, gg, region, BUCHI, None, time.perf_counter() - t0)


def solve_local(arena: Arena, max_vertices: int = DEFAULT_MAX_VERTICES) -> Solution:
    """On-the-fly reachability solving by depth-first least fixpoint.

    A vertex stops being expanded once it is known to be won, so plays the
    traveler refutes quickly are never explored in full.  Traveler moves
    are tried in order of ``arena.priority``.  Only the explored part of
    the arena ends up in the returned graph; it is closed under all moves
    of the losing player from vertices that are not won.
    """
    if arena.objective == BUCHI:
        raise ValueError("local solving handles reachability objectives")
    t0 = time.perf_counter()
    index = {}
    vertices = []
    owner = []
    target = []
    succ = []  # explored successor ids
    parents = []
    won = []
    pending = []  # saboteur vertices: explored successors not yet won
    done = []
    choice = []
    order = []  # ids in the order they were won
    priority = arena.priority

    def new(x):
        i = len(vertices)
        if i >= max_vertices:
            raise ArenaTooLarge(max_vertices)
        index[x] = i
        vertices.append(x)
        owner.append(arena.owner(x))
        tgt = bool(arena.is_target(x))
        target.append(tgt)
        succ.append([])
        parents.append([])
        won.append(False)
        pending.append(0)
        done.append(False)
        choice.append(-1)
        if tgt:
            won[i] = True
            done[i] = True
            order.append(i)
        return i

    def win(i, via):
        work = [(i, via)]
        while work:
            y, w = work.pop()
            if won[y]:
                continue
            won[y] = True
            choice[y] = w
            order.append(y)
            for p in parents[y]:
                if won[p]:
                    continue
                if owner[p] == REACH:
                    work.append((p, y))
                else:
                    pending[p] -= 1
                    if done[p] and pending[p] == 0:
                        work.append((p, -1))

    def link(p, c):
        succ[p].append(c)
        parents[c].append(p)
        if won[c]:
            if owner[p] == REACH:
                win(p, c)
        else:
            pending[p] += 1

    def moves(i):
        ys = arena.successors(vertices[i])
        if owner[i] == REACH and len(ys) > 1:
            ys = sorted(ys, key=priority)
        return iter(ys)

    root = new(arena.initial)
    stack = [] if won[root] else [(root, moves(root))]
    while stack and not won[root]:
        i, it = stack[-1]
        if won[i]:
            stack.pop()
            continue
        for y in it:
            j = index.get(y)
            fresh = j is None
            if fresh:
                j = new(y)
            link(i, j)
            if won[i]:
                break
            if fresh and not won[j]:
                stack.append((j, moves(j)))
                break
        else:
            done[i] = True
            stack.pop()
            if owner[i] == SAFE and pending[i] == 0:
                win(i, -1)
    n = len(vertices)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum([len(s) for s in succ], out=indptr[1:])
    indices = np.fromiter((j for s in succ for j in s), dtype=np.int32, count=int(indptr[-1]))
    gg = GameGraph(arena, vertices, owner, target, indptr, indices)
    gg.index = index
    region = np.array(won, dtype=np.bool_)
    rank = np.full(n, -1, dtype=np.int64)
    rank[np.array(order, dtype=np.int64)] = np.arange(len(order))
    if won[root]:
        strategy = Strategy(REACH, np.array(choice, dtype=np.int64))
        winner = REACH
    else:
        winner = SAFE
        ch = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            if owner[i] == SAFE and not won[i]:
                for j in succ[i]:
                    if not won[j]:
                        ch[i] = j
                        break
        strategy = Strategy(SAFE, ch)
    return Solution(winner, strategy, gg, region, REACHABILITY, rank,
                    time.perf_counter() - t0, {"local": True})


def solve(a, max_vertices: int = DEFAULT_MAX_VERTICES) -> Solution:
    if a.objective == BUCHI:
        return solve_buchi(a, max_vertices)
    return solve_reachability(a, max_vertices)


# -- replay ---------------------------------------------------------------------


@dataclass
class Verdict:
    status: str
    counterexample: list = None  # vertex ids
    max_rounds: int = 0  # most traveler moves before the objective is met
    lasso: list = None  # accepting cycle certificate for Buchi

    @property
    def ok(self):
        return self.status == ALL_WIN


def _restricted(gg, s: Strategy, adversary):
    def succ(x):
        if gg.target[x] and gg.arena.absorbing_targets:
            return []
        nxt = gg.succ(x).tolist()
        if gg.owner[x] == s.owner:
            if not nxt:
                return []
            y = s.get(x)
            if y is None:
                raise StrategyIncomplete(f"no choice at {gg.describe(x)}")
            if y not in nxt:
                raise StrategyIncomplete(f"illegal choice at {gg.describe(x)}")
            return [y]
        if adversary is not EXHAUSTIVE and adversary is not None and nxt:
            y = adversary.get(x)
            if y is not None:
                return [y]
        return nxt
    return succ


def _dfs(n_start, succ):
    """Iterative DFS; yields (parent map, postorder, back edges)."""
    color = {}
    parent = {n_start: None}
    post = []
    back = []
    stack = [(n_start, iter(succ(n_start)))]
    color[n_start] = 1
    while stack:
        x, it = stack[-1]
        for y in it:
            c = color.get(y, 0)
            if c == 0:
                color[y] = 1
                parent[y] = x
                stack.append((y, iter(succ(y))))
                break
            if c == 1:
                back.append((x, y))
        else:
            color[x] = 2
            post.append(x)
            stack.pop()
    return parent, post, back


def _path_to(parent, x):
    out = []
    while x is not None:
        out.append(x)
        x = parent[x]
    return out[::-1]


def _sccs(nodes, succ):
    """Tarjan over ``nodes`` (iterative)."""
    index = {}
    low = {}
    on = set()
    st = []
    comps = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        st.append(root)
        on.add(root)
        while work:
            x, it = work[-1]
            advanced = False
            for y in it:
                if y not in index:
                    index[y] = low[y] = counter
                    counter += 1
                    st.append(y)
                    on.add(y)
                    work.append((y, iter(succ(y))))
                    advanced = True
                    break
                if y in on:
                    low[x] = min(low[x], index[y])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[x])
            if low[x] == index[x]:
                comp = []
                while True:
                    y = st.pop()
                    on.discard(y)
                    comp.append(y)
                    if y == x:
                        break
                comps.append(comp)
    return comps


def replay(sol_or_graph, strategy: Strategy = None, adversary=EXHAUSTIVE,
           objective: str = None) -> Verdict:
    """Check that every play agreeing with ``strategy`` is won by its owner.

    Plays are enumerated exhaustively over adversary choices (or follow the
    given adversary strategy).  Reachability plays are finite on success,
    so the longest one bounds the number of traveler moves.
    """
    if isinstance(sol_or_graph, Solution):
        gg = sol_or_graph.graph
        strategy = strategy or sol_or_graph.strategy
        objective = objective or sol_or_graph.objective
    else:
        gg = sol_or_graph
        objective = objective or gg.arena.objective
    succ = _restricted(gg, strategy, adversary)
    cache = {}

    def s(x):
        if x not in cache:
            cache[x] = succ(x)
        return cache[x]

    parent, post, back = _dfs(0, s)
    reach_owned = gg.owner
    if objective != BUCHI:
        if strategy.owner == REACH:
            for x in post:
                if not gg.target[x] and not s(x) and reach_owned[x] == REACH:
                    return Verdict(COUNTEREXAMPLE, _path_to(parent, x))
            if back:
                x, y = back[0]
                return Verdict(COUNTEREXAMPLE, _path_to(parent, x) + [y])
            # longest path in the DAG, counting traveler moves
            longest = {}
            for x in post:
                best = 0
                for y in s(x):
                    best = max(best, longest[y])
                longest[x] = best + (1 if reach_owned[x] == REACH and s(x) else 0)
            return Verdict(ALL_WIN, max_rounds=longest[0])
        for x in post:
            if gg.target[x]:
                return Verdict(COUNTEREXAMPLE, _path_to(parent, x))
            if not s(x) and reach_owned[x] == SAFE:
                return Verdict(COUNTEREXAMPLE, _path_to(parent, x))
        return Verdict(ALL_WIN)
    # Buchi
    nodes = list(parent)
    if strategy.owner == REACH:
        for x in nodes:
            if not s(x) and reach_owned[x] == REACH:
                return Verdict(COUNTEREXAMPLE, _path_to(parent, x))
        non_target = [x for x in nodes if not gg.target[x]]
        keep = set(non_target)
        for comp in _sccs(non_target, lambda x: [y for y in s(x) if y in keep]):
            if len(comp) > 1 or comp[0] in [y for y in s(comp[0])]:
                return Verdict(COUNTEREXAMPLE, _path_to(parent, comp[0]))
        lasso = None
        for comp in _sccs(nodes, s):
            cs = set(comp)
            if any(gg.target[x] for x in comp) and (len(comp) > 1 or comp[0] in s(comp[0])):
                lasso = _cycle_through(comp, cs, s, gg)
                break
        return Verdict(ALL_WIN, lasso=lasso)
    for x in nodes:
        if not s(x) and reach_owned[x] == SAFE:
            return Verdict(COUNTEREXAMPLE, _path_to(parent, x))
    for comp in _sccs(nodes, s):
        if any(gg.target[x] for x in comp) and (len(comp) > 1 or comp[0] in s(comp[0])):
            return Verdict(COUNTEREXAMPLE, _path_to(parent, comp[0]),
                           lasso=_cycle_through(comp, set(comp), s, gg))
    return Verdict(ALL_WIN)


def _cycle_through(comp, cs, s, gg):
    start = next(x for x in comp if gg.target[x])
    prev = {start: None}
    q = deque([start])
    while q:
        x = q.popleft()
        for y in s(x):
            if y == start:
                path = [x]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1] + [start]
            if y in cs and y not in prev:
                prev[y] = x
                q.append(y)
    return None


# -- serialization ----------------------------------------------------------------


def strategy_to_dict(sol: Solution, reachable_only: bool = True) -> dict:
    gg = sol.graph
    choice = sol.strategy
    if reachable_only:
        succ = _restricted(gg, sol.strategy, EXHAUSTIVE)
        parent, _, _ = _dfs(0, succ)
        keys = sorted(x for x in parent if x in choice)
    else:
        keys = [x for x, _ in choice.items()]
    return {
        "winner": sol.winner_name,
        "objective": sol.objective,
        "owner": PLAYER_NAMES[sol.strategy.owner],
        "arena_vertices": gg.n,
        "arena_edges": gg.n_edges,
        "solve_seconds": round(sol.seconds, 6),
        "initial": gg.describe(0),
        "moves": [[gg.describe(x), gg.describe(choice[x])] for x in keys],
        **sol.extra,
    }


def dump_strategy(sol: Solution, path) -> None:
    with open(path, "w") as fh:
        json.dump(strategy_to_dict(sol), fh, indent=2)
        fh.write("\n")


def load_strategy(gg: GameGraph, path_or_dict) -> Strategy:
    """Rebuild a strategy over ``gg`` from its serialized descriptors."""
    data = path_or_dict
    if not isinstance(data, dict):
        with open(path_or_dict) as fh:
            data = json.load(fh)
    by_label = {gg.describe(i): i for i in range(gg.n)}
    owner = REACH if data["owner"] == "traveler" else SAFE
    choice = {}
    for a, b in data["moves"]:
        if a not in by_label or b not in by_label:
            raise StrategyIncomplete(f"unknown arena vertex {a!r} -> {b!r}")
        choice[by_label[a]] = by_label[b]
    return Strategy(owner, choice)


def to_dot(gg: GameGraph, strategy: Strategy = None, max_vertices: int = 2000) -> str:
    if gg.n > max_vertices:
        raise ArenaTooLarge(max_vertices)
    lines = ["digraph arena {"]
    for i in range(gg.n):
        shape = "box" if gg.owner[i] == REACH else "ellipse"
        extra = ", peripheries=2" if gg.target[i] else ""
        label = gg.describe(i).replace('"', '\\"')
        lines.append(f'  v{i} [label="{label}", shape={shape}{extra}];')
    for i in range(gg.n):
        for j in gg.succ(i).tolist():
            bold = strategy is not None and strategy.get(i) == j
            lines.append(f"  v{i} -> v{j}{' [penwidth=3]' if bold else ''};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- independent oracle -------------------------------------------------------------


def default_horizon(g: SabotageGame) -> int:
    return g.n ** (g.k + 2)


def oracle_minimax(g: SabotageGame, horizon: int = None) -> int:
    """Winner by exhaustive alternating search over traveler information sets.

    An information set is the set of concrete mark assignments (one frozenset
    per saboteur) consistent with everything the traveler has observed.  The
    traveler must reach a final vertex within ``horizon`` of its own moves
    against every saboteur behaviour; otherwise the saboteur wins.
    """
    if horizon is None:
        horizon = default_horizon(g)
    k = g.k
    final = g.final
    budgets = [s.budget for s in g.saboteurs]
    t_succ = g.t_succ
    b_succ = g.b_succ
    obs = g.obs
    win_at = {}  # state -> smallest horizon known to win
    lose_at = {}  # state -> largest horizon known to lose

    def union(world):
        return frozenset().union(*world)

    def sab_options(world, i, t, here):
        moves = b_succ[i][here]
        if not moves:
            yield here, world
            return
        marked = union(world)
        for w in moves:
            cand = [x for x in {here, w} if x != t and x not in marked]
            for bits in range(1 << len(cand)):
                m = frozenset(x for j, x in enumerate(cand) if bits >> j & 1)
                if len(world[i]) + len(m) <= budgets[i]:
                    nw = list(world)
                    nw[i] = world[i] | m
                    yield w, tuple(nw)

    def win(t, vs, belief, turn, d):
        key = (t, vs, belief, turn)
        w = win_at.get(key)
        if w is not None and w <= d:
            return True
        lz = lose_at.get(key)
        if lz is not None and lz >= d:
            return False
        res = _win(t, vs, belief, turn, d)
        if res:
            win_at[key] = d if w is None else min(w, d)
        else:
            lose_at[key] = d if lz is None else max(lz, d)
        return res

    def _win(t, vs, belief, turn, d):
        if turn == 0:
            if t in final:
                return True
            if d == 0:
                return False
            risky = frozenset().union(*(union(w) for w in belief))
            for t2 in t_succ[t]:
                if t2 in final:
                    return True
            for t2 in t_succ[t]:
                if t2 in risky:
                    continue
                if win(t2, vs, belief, 1, d - 1):
                    return True
            return False
        i = turn - 1
        nxt = turn + 1 if turn < k else 0
        groups = {}
        for world in belief:
            for w, nw in sab_options(world, i, t, vs[i]):
                seen = union(nw) & obs[t]
                groups.setdefault((w, seen), set()).add(nw)
        for (w, _), worlds in sorted(groups.items(), key=lambda kv: len(kv[1]), reverse=True):
            nvs = vs[:i] + (w,) + vs[i + 1:]
            if not win(t, nvs, frozenset(worlds), nxt, d):
                return False
        return True

    init_worlds = set()
    init = sorted(g.initial_marked)
    for bits in range(1 << len(init)):
        m = frozenset(x for j, x in enumerate(init) if bits >> j & 1)
        world = [frozenset()] * k
        world[0] = m
        init_worlds.add(tuple(world))
    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * horizon * (k + 1) + 1000))
    try:
        ok = win(g.traveler_start, tuple(s.start for s in g.saboteurs),
                 frozenset(init_worlds), 0, horizon)
    finally:
        sys.setrecursionlimit(old)
    return REACH if ok else SAFE
