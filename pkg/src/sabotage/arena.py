"""Traveler-perspective knowledge arena.

A perfect-information game whose positions record what the traveler knows:
both positions, the vertices each saboteur may have marked without the
traveler having looked (suspects) and the marks the traveler has already
seen.  Marks are committed lazily: a suspect becomes a mark only at the
moment it enters the traveler's observation range.
"""
from __future__ import annotations

from itertools import product
from typing import NamedTuple

from .model import BUCHI, SabotageGame, from_mask, to_mask

REACH = 0  # traveler / reachability (Buchi) player
SAFE = 1  # saboteur / safety player


class Arena:
    """Lazily described two-player turn-based game graph.

    Subclasses provide ``initial``, ``successors``, ``owner``, ``is_target``
    and ``describe``.  ``absorbing_targets`` tells exploration not to expand
    target vertices (reachability games end there).
    """

    objective = "reachability"
    initial = None

    @property
    def absorbing_targets(self) -> bool:
        return self.objective != BUCHI

    def successors(self, x):
        raise NotImplementedError

    def owner(self, x) -> int:
        raise NotImplementedError

    def is_target(self, x) -> bool:
        raise NotImplementedError

    def describe(self, x) -> str:
        return repr(x)

    def decode(self, x):
        return x

    def priority(self, x):
        """Move-ordering hint for local solving; lower is tried first."""
        return 0


class KnowledgeVertex(NamedTuple):
    u: int
    v: tuple  # saboteur positions
    S: tuple  # suspect bitmask per saboteur
    T: tuple  # discovered-mark bitmask per saboteur
    turn: int  # 0 traveler, i + 1 saboteur i


class KnowledgeArena(Arena):
    """Knowledge arena; vertices are packed integer codes.

    Layout, low bits first: turn, traveler position, saboteur positions,
    suspect masks, discovered-mark masks.  Use :meth:`decode` for a
    :class:`KnowledgeVertex` view.
    """

    def __init__(self, g: SabotageGame, settle_spent: bool = False):
        self.g = g
        # with every budget spent the saboteurs are powerless; optionally decide
        # such traveler vertices by plain reachability and merge all targets
        self.settle_spent = (settle_spent and g.objective != BUCHI and g.finite_budget)
        self._settled = {}
        self.objective = g.objective
        k = g.k
        n = g.n
        self.k = k
        self.final_mask = to_mask(g.final)
        self.budgets = tuple(s.budget for s in g.saboteurs)
        self.tb = k.bit_length()
        self.nb = max(1, (n - 1).bit_length())
        self.pos_mask = (1 << self.nb) - 1
        self.set_mask = (1 << n) - 1
        self.s_shift = self.tb + self.nb * (1 + k)
        self.t_shift = self.s_shift + n * k
        # suspects outside every reachable observation range can never be
        # revealed, so they are dropped from the state
        seen = {g.traveler_start}
        stack = [g.traveler_start]
        while stack:
            x = stack.pop()
            for y in g.t_succ[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        self.observable = 0
        for x in seen:
            self.observable |= g.obs_mask[x]
        S0 = [0] * k
        S0[0] = to_mask(g.initial_marked) & self.observable
        self.dist = _distance_to(g.final, g.t_succ, n)
        self.initial = self.encode(KnowledgeVertex(
            g.traveler_start, tuple(s.start for s in g.saboteurs), tuple(S0), (0,) * k, 0
        ))

    def encode(self, x: KnowledgeVertex) -> int:
        code = x.turn | x.u << self.tb
        for i, w in enumerate(x.v):
            code |= w << (self.tb + self.nb * (1 + i))
        n = self.g.n
        for i, m in enumerate(x.S):
            code |= m << (self.s_shift + n * i)
        for i, m in enumerate(x.T):
            code |= m << (self.t_shift + n * i)
        return code

    def decode(self, code: int) -> KnowledgeVertex:
        n = self.g.n
        k = self.k
        turn = code & ((1 << self.tb) - 1)
        u = (code >> self.tb) & self.pos_mask
        v = tuple((code >> (self.tb + self.nb * (1 + i))) & self.pos_mask for i in range(k))
        S = tuple((code >> (self.s_shift + n * i)) & self.set_mask for i in range(k))
        T = tuple((code >> (self.t_shift + n * i)) & self.set_mask for i in range(k))
        return KnowledgeVertex(u, v, S, T, turn)

    def owner(self, code):
        return REACH if code & ((1 << self.tb) - 1) == 0 else SAFE

    def is_target(self, code):
        return (code & ((1 << self.tb) - 1) == 0
                and (self.final_mask >> ((code >> self.tb) & self.pos_mask)) & 1 == 1)

    def priority(self, code):
        return self.dist[(code >> self.tb) & self.pos_mask]

    def marked(self, x: KnowledgeVertex) -> int:
        t = 0
        for m in x.T:
            t |= m
        return t

    def successors(self, code):
        if self.settle_spent:
            return self._settled_successors(code)
        if self.k == 1:
            return self._successors1(code)
        return [self.encode(y) for y in self.successors_of(self.decode(code))]

    def _settled_successors(self, code):
        if code & ((1 << self.tb) - 1) == 0:
            x = self.decode(code)
            if all(bin(t).count("1") >= b for t, b in zip(x.T, self.budgets)):
                T_all = self.marked(x)
                return [self.won] if self._free_path(x.u, T_all) else []
        out = self._successors1(code) if self.k == 1 else \
            [self.encode(y) for y in self.successors_of(self.decode(code))]
        if code & ((1 << self.tb) - 1) == 0:
            return out
        return list(dict.fromkeys(self.won if self.is_target(c) else c for c in out))

    @property
    def won(self):
        return min(self.g.final) << self.tb

    def _free_path(self, u, blocked):
        key = (u, blocked)
        if key not in self._settled:
            seen = {u}
            stack = [] if (blocked >> u) & 1 else [u]
            ok = False
            while stack:
                x = stack.pop()
                if x in self.g.final:
                    ok = True
                    break
                for y in self.g.t_succ[x]:
                    if y not in seen and not (blocked >> y) & 1:
                        seen.add(y)
                        stack.append(y)
            self._settled[key] = ok
        return self._settled[key]

    def _successors1(self, code):
        # single saboteur; same rules as successors_of on packed codes
        g = self.g
        u = (code >> 1) & self.pos_mask
        T = code >> self.t_shift
        final = (self.final_mask >> u) & 1
        if code & 1 == 0:
            if (T >> u) & 1 and not final:
                return [code | 1]
            base = code & ~(self.pos_mask << 1) | 1
            return [base | w << 1 for w in g.t_succ[u] if not (T >> w) & 1]
        if (T >> u) & 1 and not final:
            return [code & ~1]
        vs = 1 + self.nb
        here = (code >> vs) & self.pos_mask
        S = (code >> self.s_shift) & self.set_mask
        moves = g.b_succ[0][here]
        obs = g.obs_mask[u]
        keep = code & ((1 << vs) - 1) & ~1  # traveler position, turn 0
        budget = self.budgets[0]
        used = bin(T).count("1")
        out = []
        seen = set()
        if moves:
            vis = self.observable & ~(1 << u) & ~T
            options = [(w, S | (((1 << here) | (1 << w)) & vis)) for w in moves]
        else:
            options = [(here, S)]
        for w, cand in options:
            in_range = cand & obs
            S2 = cand & ~obs
            head = keep | w << vs | S2 << self.s_shift
            if not in_range:
                c = head | T << self.t_shift
                if c not in seen:
                    seen.add(c)
                    out.append(c)
                continue
            room = budget - used
            bits = [1 << x for x in range(in_range.bit_length()) if (in_range >> x) & 1]
            for sub in _subsets(bits, room):
                c = head | (T | sub) << self.t_shift
                if c not in seen:
                    seen.add(c)
                    out.append(c)
        return out

    def successors_of(self, x: KnowledgeVertex):
        """Successors of a decoded vertex (reference implementation, any k)."""
        g = self.g
        u = x.u
        T_all = self.marked(x)
        losing = (T_all >> u) & 1 and not (self.final_mask >> u) & 1
        if x.turn == 0:
            if losing:
                return [x._replace(turn=1)]
            return [
                KnowledgeVertex(w, x.v, x.S, x.T, 1)
                for w in g.t_succ[u]
                if not (T_all >> w) & 1
            ]
        if losing:
            return [x._replace(turn=0)]
        i = x.turn - 1
        nxt = x.turn + 1 if x.turn < self.k else 0
        here = x.v[i]
        moves = g.b_succ[i][here]
        out = []
        seen = set()
        if not moves:
            options = [(here, x.S[i])]
        else:
            options = []
            for w in moves:
                fresh = ((1 << here) | (1 << w)) & ~(1 << u) & ~T_all & self.observable
                options.append((w, x.S[i] | fresh))
        obs = g.obs_mask[u]
        for w, cand in options:
            S = list(x.S)
            S[i] = cand
            v = list(x.v)
            v[i] = w
            v = tuple(v)
            for S2, T2 in self._reveals(S, x.T, obs, T_all):
                y = KnowledgeVertex(u, v, S2, T2, nxt)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
        return out

    def _reveals(self, S, T, obs, T_all):
        """Enumerate the forced reveals of suspects inside ``obs``.

        Each suspect in range is either cleared or revealed as a mark of one
        saboteur that could have placed it, within that saboteur's budget.
        """
        k = self.k
        union = 0
        for s in S:
            union |= s
        in_range = union & obs & ~T_all
        S_out = tuple(s & ~obs for s in S)
        if not in_range:
            yield S_out, tuple(T)
            return
        verts = sorted(from_mask(in_range))
        choices = []
        for x in verts:
            opts = [None] + [j for j in range(k) if (S[j] >> x) & 1]
            choices.append(opts)
        for pick in product(*choices):
            T2 = list(T)
            for x, j in zip(verts, pick):
                if j is not None:
                    T2[j] |= 1 << x
            if all(bin(T2[j]).count("1") <= self.budgets[j] for j in range(k)):
                yield S_out, tuple(T2)

    def describe(self, code):
        x = self.decode(code)
        lab = self.g.labels
        def names(mask):
            return "{" + ",".join(self.g.label_set(from_mask(mask))) + "}"
        v = ",".join(lab[w] for w in x.v)
        S = "|".join(names(m) for m in x.S)
        T = "|".join(names(m) for m in x.T)
        turn = "t" if x.turn == 0 else f"b{x.turn}" if self.k > 1 else "b"
        return f"({lab[x.u]}, {v}, {S}, {T}, {turn})"


def _distance_to(final, succ, n):
    """Traveler-graph distance from each vertex to the nearest final vertex."""
    pred = [[] for _ in range(n)]
    for a in range(n):
        for b in succ[a]:
            pred[b].append(a)
    dist = [n + 1] * n
    frontier = list(final)
    for f in frontier:
        dist[f] = 0
    while frontier:
        nxt = []
        for x in frontier:
            for p in pred[x]:
                if dist[p] > dist[x] + 1:
                    dist[p] = dist[x] + 1
                    nxt.append(p)
        frontier = nxt
    return dist


def _subsets(bits, room):
    """OR-combinations of ``bits`` with at most ``room`` members."""
    out = [0]
    if room <= 0:
        return out
    for b in bits:
        out += [s | b for s in out if bin(s).count("1") < room]
    return out


def build_arena(g: SabotageGame, settle_spent: bool = False) -> KnowledgeArena:
    return KnowledgeArena(g, settle_spent)


def buchi_target(g: SabotageGame):
    """Recurrence predicate for the Buchi reading of ``g``'s arena."""
    final = to_mask(g.final)
    return lambda x: x.turn == 0 and (final >> x.u) & 1 == 1


def suspects(x: KnowledgeVertex) -> frozenset:
    m = 0
    for s in x.S:
        m |= s
    return from_mask(m)
