"""Round bounds, the QBF encoding of unlimited-budget games, and the
classic-sabotage hub encoding.

The formula describes a bounded unrolling: the traveler names its next
position, the saboteur answers with its own, and the traveler must never
stand on a vertex the saboteur has visited.  Positions are binary-coded
blocks of variables; the matrix is produced by a Tseitin transformation.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import UnsupportedSemantics, ValidationError
from .model import FULL, INF, Saboteur, SabotageGame

EXISTS = "e"
FORALL = "a"


def round_bound(g: SabotageGame) -> int:
    """Rounds within which a winning traveler reaches F: n^(k+2)."""
    return g.n ** (g.k + 2)


# -- circuit --------------------------------------------------------------------


class _Circuit:
    """Tseitin builder; literals are nonzero ints, constants are bools."""

    def __init__(self, first_var: int):
        self.next_var = first_var
        self.clauses = []
        self._cache = {}

    def var(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def AND(self, lits):
        out = []
        for x in lits:
            if x is False:
                return False
            if x is not True:
                out.append(x)
        out = sorted(set(out))
        if not out:
            return True
        if len(out) == 1:
            return out[0]
        if any(-x in out for x in out):
            return False
        key = ("and", tuple(out))
        if key in self._cache:
            return self._cache[key]
        g = self.var()
        for x in out:
            self.clauses.append([-g, x])
        self.clauses.append([g] + [-x for x in out])
        self._cache[key] = g
        return g

    def OR(self, lits):
        return self.NOT(self.AND([self.NOT(x) for x in lits]))

    @staticmethod
    def NOT(x):
        if isinstance(x, bool):
            return not x
        return -x

    def IMPLIES(self, a, b):
        return self.OR([self.NOT(a), b])


# -- encoding -------------------------------------------------------------------


@dataclass
class QbfInstance:
    """Prenex CNF formula plus the index of its position variables."""

    n: int  # vertices after merging finals
    bits: int
    gamma: int
    labels: tuple
    final: int
    prefix: list  # [(quantifier, [vars])]
    clauses: list
    n_vars: int
    var_map: dict = field(default_factory=dict)  # var -> (block, round, bit)

    @property
    def position_vars(self):
        return {q: sum(len(vs) for qq, vs in self.prefix if qq == q) for q in (EXISTS, FORALL)}

    def to_qdimacs(self) -> str:
        lines = [f"p cnf {self.n_vars} {len(self.clauses)}"]
        for q, vs in self.prefix:
            if vs:
                lines.append(f"{q} {' '.join(map(str, vs))} 0")
        for c in self.clauses:
            lines.append(" ".join(map(str, c)) + " 0")
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        return {
            "gamma": self.gamma,
            "bits": self.bits,
            "vertices": list(self.labels),
            "final": self.labels[self.final],
            "variables": {str(v): {"block": b, "round": r, "bit": i}
                          for v, (b, r, i) in sorted(self.var_map.items())},
        }


def _psi_view(g: SabotageGame):
    """Merge the final set into one vertex; returns labels, successor lists,
    both starts and the final index."""
    keep = [v for v in range(g.n) if v not in g.final]
    idx = {v: i for i, v in enumerate(keep)}
    vf = len(keep)
    for f in g.final:
        idx[f] = vf
    labels = tuple(g.labels[v] for v in keep)
    if len(g.final) == 1:
        labels += (g.labels[next(iter(g.final))],)
    else:
        labels += ("+".join(sorted(g.label_set(g.final))),)
    n = vf + 1
    t_succ = [set() for _ in range(n)]
    for a, b in g.traveler_edges:
        t_succ[idx[a]].add(idx[b])
    b_succ = [set() for _ in range(n)]
    for a, b in g.saboteurs[0].edges:
        b_succ[idx[a]].add(idx[b])
    t_succ = [sorted(s) for s in t_succ]
    b_succ = [sorted(s) for s in b_succ]
    return labels, t_succ, b_succ, idx[g.traveler_start], idx[g.saboteurs[0].start], vf


def _check_regime(g: SabotageGame):
    if g.k != 1:
        raise UnsupportedSemantics("the QBF encoding covers a single saboteur")
    if g.saboteurs[0].budget != INF:
        raise UnsupportedSemantics(
            "finite budgets are not expressible in the QBF encoding; solve the knowledge arena")


def encode_qbf(g: SabotageGame, gamma: int = None) -> QbfInstance:
    """Encode the unlimited-budget game as a QBF with horizon ``gamma``.

    ``gamma`` defaults to :func:`round_bound`.  The formula is true iff the
    traveler reaches the final vertex within ``gamma`` moves without ever
    stepping on a vertex the saboteur has visited.
    """
    _check_regime(g)
    if gamma is None:
        gamma = round_bound(g)
    if gamma < 1:
        raise ValidationError("gamma", "horizon must be positive")
    labels, t_succ, b_succ, r0, c0, vf = _psi_view(g)
    n = len(labels)
    bits = max(1, (n - 1).bit_length())

    var_map = {}
    prefix = []
    nxt = 1
    r_blocks = {}
    c_blocks = {}
    for i in range(1, gamma + 1):
        r_blocks[i] = list(range(nxt, nxt + bits))
        for j, v in enumerate(r_blocks[i]):
            var_map[v] = ("r", i, j)
        nxt += bits
        prefix.append((EXISTS, r_blocks[i]))
        if i < gamma:
            c_blocks[i] = list(range(nxt, nxt + bits))
            for j, v in enumerate(c_blocks[i]):
                var_map[v] = ("c", i, j)
            nxt += bits
            prefix.append((FORALL, c_blocks[i]))
    cc = _Circuit(nxt)

    @lru_cache(maxsize=None)
    def eq(block, i, v):
        # block "r"/"c", round i; round 0 is the constant start
        if i == 0:
            return v == (r0 if block == "r" else c0)
        vs = (r_blocks if block == "r" else c_blocks)[i]
        return cc.AND([x if (v >> j) & 1 else -x for j, x in enumerate(vs)])

    def valid(block, i):
        if i == 0 or (1 << bits) == n:
            return True
        return cc.OR([eq(block, i, v) for v in range(n)])

    def edge(block, i, succ):
        # e(pos_{i-1}, pos_i) over the successor lists
        return cc.OR([cc.AND([eq(block, i - 1, u), cc.OR([eq(block, i, w) for w in succ[u]])])
                      for u in range(n) if succ[u]])

    # visited-by-saboteur flags after round i
    visited = [[v == c0 for v in range(n)]]
    for i in range(1, gamma):
        visited.append([cc.OR([visited[-1][v], eq("c", i, v)]) for v in range(n)])

    # build the matrix from the innermost round outwards
    body = cc.AND([edge("r", gamma, t_succ), eq("r", gamma, vf)])
    for i in range(gamma - 1, 0, -1):
        theta = cc.NOT(cc.OR([cc.AND([eq("r", i, v), visited[i][v]]) for v in range(n)]))
        premise = cc.AND([edge("c", i, b_succ), valid("c", i), cc.NOT(eq("c", i, vf)),
                          cc.NOT(eq("r", i, vf))])
        body = cc.AND([edge("r", i, t_succ), valid("r", i),
                       cc.IMPLIES(premise, cc.AND([theta, body]))])

    clauses = cc.clauses
    if body is True:
        pass
    elif body is False:
        x = cc.var()
        clauses.append([x])
        clauses.append([-x])
    else:
        clauses.append([body])
    aux = list(range(nxt, cc.next_var))
    prefix[-1] = (EXISTS, prefix[-1][1] + aux)
    return QbfInstance(n, bits, gamma, labels, vf, prefix, clauses, cc.next_var - 1, var_map)


def emit_qdimacs(q: QbfInstance, path, metadata_path=None) -> str:
    """Write ``q`` as QDIMACS plus a JSON variable map; returns the metadata path."""
    with open(path, "w") as fh:
        fh.write(q.to_qdimacs())
    metadata_path = metadata_path or f"{path}.meta.json"
    with open(metadata_path, "w") as fh:
        json.dump(q.metadata(), fh, indent=2)
        fh.write("\n")
    return str(metadata_path)


# -- evaluation -----------------------------------------------------------------


def evaluate_qbf(prefix, clauses) -> bool:
    """Naive quantifier expansion with unit propagation and universal reduction."""
    level = {}
    quant = {}
    order = []
    for lvl, (q, vs) in enumerate(prefix):
        for v in vs:
            level[v] = lvl
            quant[v] = q
            order.append(v)
    clauses = [tuple(c) for c in clauses]
    occurs = {}
    for ci, c in enumerate(clauses):
        for x in c:
            occurs.setdefault(abs(x), []).append(ci)

    def status(c, assign):
        # None: satisfied; otherwise the reduced list of open literals
        open_ = []
        for x in c:
            val = assign.get(abs(x))
            if val is None:
                open_.append(x)
            elif val == (x > 0):
                return None
        ex = [x for x in open_ if quant[abs(x)] == EXISTS]
        deepest = max((level[abs(x)] for x in ex), default=-1)
        return [x for x in open_ if quant[abs(x)] == EXISTS or level[abs(x)] < deepest]

    def propagate(assign, dirty):
        queue = list(dirty)
        while queue:
            v = queue.pop()
            for ci in occurs.get(v, ()):
                st = status(clauses[ci], assign)
                if st is None:
                    continue
                if not st:
                    return False
                if len(st) == 1 and quant[abs(st[0])] == EXISTS:
                    x = st[0]
                    assign[abs(x)] = x > 0
                    queue.append(abs(x))
        return True

    def solve(assign, pos):
        while pos < len(order) and order[pos] in assign:
            pos += 1
        if pos == len(order):
            return all(status(c, assign) is None for c in clauses)
        if all(status(c, assign) is None for c in clauses):
            return True
        v = order[pos]
        results = []
        for val in (True, False):
            a = dict(assign)
            a[v] = val
            r = propagate(a, [v]) and solve(a, pos + 1)
            if quant[v] == EXISTS and r:
                return True
            if quant[v] == FORALL and not r:
                return False
            results.append(r)
        return quant[v] == FORALL

    assign = {}
    for c in clauses:
        st = status(c, assign)
        if st is not None and not st:
            return False
    if not propagate(assign, [abs(x) for c in clauses if len(c) == 1 for x in c]):
        return False
    return solve(assign, 0)


def evaluate_instance(q: QbfInstance) -> bool:
    return evaluate_qbf(q.prefix, q.clauses)


def bounded_winner(g: SabotageGame, gamma: int) -> bool:
    """Play the bounded unrolling directly: True iff the traveler wins.

    Same rules as the formula: the traveler must move, a saboteur without
    a legal non-final move cannot stop it, and the traveler loses on any
    vertex the saboteur has visited.
    """
    _check_regime(g)
    _, t_succ, b_succ, r0, c0, vf = _psi_view(g)

    @lru_cache(maxsize=None)
    def win(i, r_prev, c_prev, visited):
        if i == gamma:
            return vf in t_succ[r_prev]
        for r in t_succ[r_prev]:
            if r == vf:
                return True
            ok = True
            for c in b_succ[c_prev]:
                if c == vf:
                    continue
                vis = visited | (1 << c)
                if (vis >> r) & 1 or not win(i + 1, r, c, vis):
                    ok = False
                    break
            if ok:
                return True
        return False

    return win(1, r0, c0, 1 << c0)


# -- classic sabotage -------------------------------------------------------------


@dataclass(frozen=True)
class ClassicGame:
    """Undirected graph where the saboteur deletes one edge per round."""

    labels: tuple
    edges: frozenset  # frozenset of frozenset pairs
    start: int
    final: frozenset

    @classmethod
    def from_dict(cls, d):
        labels = tuple(d["vertices"])
        ix = {x: i for i, x in enumerate(labels)}
        edges = frozenset(frozenset((ix[a], ix[b])) for a, b in d["edges"])
        final = d["final"] if isinstance(d["final"], list) else [d["final"]]
        return cls(labels, edges, ix[d["start"]], frozenset(ix[f] for f in final))

    def to_dict(self):
        lab = self.labels
        return {
            "classic": True,
            "vertices": list(lab),
            "edges": sorted(sorted(lab[v] for v in e) for e in self.edges),
            "start": lab[self.start],
            "final": sorted(lab[f] for f in self.final),
        }


def classic_game(n_or_labels, edges, start, final) -> ClassicGame:
    labels = tuple(f"v{i}" for i in range(n_or_labels)) if isinstance(n_or_labels, int) \
        else tuple(n_or_labels)
    final = frozenset([final]) if isinstance(final, int) else frozenset(final)
    return ClassicGame(labels, frozenset(frozenset(e) for e in edges), start, final)


def encode_classic(c: ClassicGame) -> SabotageGame:
    """Hub encoding: one subdivision vertex per edge and a saboteur hub ``z``.

    The saboteur shuttles between the hub and the edge vertices with an
    unlimited budget, so every other move it can delete one edge.
    """
    if not c.final:
        raise ValidationError("final", "classic game needs a final vertex")
    n = len(c.labels)
    edges = sorted(tuple(sorted(e)) for e in c.edges)
    labels = list(c.labels)
    t_edges = set()
    mids = []
    for a, b in edges:
        m = len(labels)
        labels.append(f"{c.labels[a]}~{c.labels[b]}")
        mids.append(m)
        t_edges |= {(a, m), (m, b), (b, m), (m, a)}
    z = len(labels)
    labels.append("z" if "z" not in labels else "_hub")
    b_edges = frozenset({(m, z) for m in mids} | {(z, m) for m in mids})
    return SabotageGame(
        labels=tuple(labels),
        traveler_edges=frozenset(t_edges),
        saboteurs=(Saboteur(z, INF, b_edges),),
        traveler_start=c.start,
        observation=FULL,
        final=frozenset(c.final),
    )


def classic_winner(c: ClassicGame) -> bool:
    """Classic rules by minimax: the runner moves first along a remaining
    edge, then the saboteur deletes one remaining edge.  A stuck runner loses."""
    adj = {}
    for e in c.edges:
        a, b = tuple(e)
        adj.setdefault(a, []).append((b, e))
        adj.setdefault(b, []).append((a, e))

    @lru_cache(maxsize=None)
    def runner(u, edges):
        if u in c.final:
            return True
        for w, e in adj.get(u, ()):
            if e in edges and saboteur(w, edges):
                return True
        return False

    @lru_cache(maxsize=None)
    def saboteur(u, edges):
        if u in c.final:
            return True
        if not edges:
            return runner(u, edges)
        return all(runner(u, edges - {e}) for e in edges)

    return runner(c.start, frozenset(c.edges))


def connected_graphs(n: int):
    """Every connected simple undirected graph on vertices 0..n-1 (labelled)."""
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for bits in range(1 << len(pairs)):
        es = [pairs[i] for i in range(len(pairs)) if bits >> i & 1]
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for a, b in es:
                for p, q in ((a, b), (b, a)):
                    if p == x and q not in seen:
                        seen.add(q)
                        stack.append(q)
        if len(seen) == n:
            yield es
