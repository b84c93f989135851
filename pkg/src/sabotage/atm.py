"""Alternating Turing machines and their compilation into sabotage games.

The compiled game uses a single saboteur with budget one and adjacent
observation.  The tape lives in the traveler's suspicion: cell ``p``
holds value ``x`` exactly when the tape vertex ``p,x`` is a suspect.

Gadgets are linked by lock-step schedules.  Every traveler vertex on a
schedule carries an escape ``t -> t/esc -> t/blk -> goal`` whose blocker
is reachable only from the saboteur's scheduled vertex, so a saboteur that
leaves its schedule loses.  A traveler that goes where it should not is
caught by a one-exit vertex the saboteur can mark.
"""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, SpaceBoundExceeded, ValidationError
from .model import ADJACENT, Saboteur, SabotageGame

TOP = 1
BOT = 0
SYMBOLS = {"⊤": TOP, "T": TOP, "1": TOP, "⊥": BOT, "B": BOT, "F": BOT, "0": BOT}
SYMBOL_NAMES = {TOP: "⊤", BOT: "⊥"}
MOVES = {"L": -1, "R": 1}
GOAL = "goal"

DATA = Path(__file__).parent / "data"


def parse_word(w) -> tuple:
    if isinstance(w, (tuple, list)) and all(x in (0, 1) for x in w):
        return tuple(w)
    try:
        return tuple(SYMBOLS[ch] for ch in str(w) if not ch.isspace() and ch not in "·.")
    except KeyError as exc:
        raise ParseError(f"unknown tape symbol {exc.args[0]!r}") from None


def word_str(w) -> str:
    return "".join(SYMBOL_NAMES[x] for x in w)


@dataclass(frozen=True)
class AtmSpec:
    states: tuple
    existential: frozenset
    delta: dict  # (state, symbol) -> tuple of (state, symbol, move)
    initial: str
    accept: str
    reject: str
    space_bound: tuple = (1, 1)  # P(n) = sum c_i n^i

    def __post_init__(self):
        self.validate()

    @property
    def universal(self) -> frozenset:
        return frozenset(self.states) - self.existential

    def is_final(self, q) -> bool:
        return q in (self.accept, self.reject)

    def space(self, n: int) -> int:
        return sum(c * n ** i for i, c in enumerate(self.space_bound))

    def validate(self):
        states = set(self.states)
        for q in (self.initial, self.accept, self.reject):
            if q not in states:
                raise ValidationError("known state", q)
        if self.accept == self.reject:
            raise ValidationError("distinct accept and reject states")
        if not self.existential <= states:
            raise ValidationError("existential states are states")
        if self.accept not in self.existential or self.reject not in self.existential:
            raise ValidationError("final states are existential")
        for (q, x), outs in self.delta.items():
            if q not in states or x not in (TOP, BOT):
                raise ValidationError("transition source", f"{q},{x}")
            for q2, y, d in outs:
                if q2 not in states or y not in (TOP, BOT) or d not in (-1, 1):
                    raise ValidationError("transition target", f"{q2},{y},{d}")
        for q in self.states:
            if self.is_final(q):
                continue
            for x in (TOP, BOT):
                if not self.delta.get((q, x)):
                    raise ValidationError("transitions defined on non-final states",
                                          f"{q},{SYMBOL_NAMES[x]}")

    @classmethod
    def from_dict(cls, d):
        try:
            delta = {}
            for t in d["transitions"]:
                key = (t["from"], SYMBOLS[str(t["read"])])
                move = t["move"].upper()
                delta.setdefault(key, []).append(
                    (t["to"], SYMBOLS[str(t["write"])], MOVES[move]))
            return cls(
                states=tuple(d["states"]),
                existential=frozenset(d["existential"]),
                delta={k: tuple(v) for k, v in delta.items()},
                initial=d["initial"],
                accept=d["accept"],
                reject=d["reject"],
                space_bound=tuple(d.get("space_bound", (1, 1))),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"bad machine description: {exc!r}") from None

    def to_dict(self):
        trans = []
        for (q, x), outs in sorted(self.delta.items()):
            for q2, y, d in outs:
                trans.append({"from": q, "read": SYMBOL_NAMES[x], "to": q2,
                              "write": SYMBOL_NAMES[y], "move": "L" if d < 0 else "R"})
        return {
            "states": list(self.states),
            "existential": sorted(self.existential),
            "transitions": trans,
            "initial": self.initial,
            "accept": self.accept,
            "reject": self.reject,
            "space_bound": list(self.space_bound),
        }


def load_machine(path) -> AtmSpec:
    with open(path) as fh:
        return AtmSpec.from_dict(json.load(fh))


def machine_m() -> AtmSpec:
    """The four-state example machine shipped with the package."""
    return load_machine(DATA / "machine_M.json")


# -- acceptance -------------------------------------------------------------------


def _step(m: AtmSpec, p: int, d: int, cells: int) -> int:
    # a left move on the first cell stays put
    p2 = max(1, p + d)
    if p2 > cells:
        raise SpaceBoundExceeded(f"head moves to cell {p2} > {cells}")
    return p2


def configurations(m: AtmSpec, w):
    """Reachable configurations ``(state, head, tape)`` and their successors."""
    w = parse_word(w)
    cells = m.space(len(w))
    if len(w) > cells:
        raise SpaceBoundExceeded(f"input longer than {cells} cells")
    start = (m.initial, 1, w + (BOT,) * (cells - len(w)))
    succ = {}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        if c in succ:
            continue
        q, p, tape = c
        out = []
        if not m.is_final(q):
            for q2, y, d in m.delta[(q, tape[p - 1])]:
                t2 = tape[:p - 1] + (y,) + tape[p:]
                out.append((q2, _step(m, p, d, cells), t2))
        succ[c] = out
        queue.extend(x for x in out if x not in succ)
    return start, succ


def atm_accepts(m: AtmSpec, w) -> bool:
    """Least-fixpoint acceptance; configurations on cycles reject."""
    start, succ = configurations(m, w)
    acc = {c for c in succ if c[0] == m.accept}
    changed = True
    while changed:
        changed = False
        for c, out in succ.items():
            if c in acc or m.is_final(c[0]) or not out:
                continue
            if c[0] in m.existential:
                ok = any(x in acc for x in out)
            else:
                ok = all(x in acc for x in out)
            if ok:
                acc.add(c)
                changed = True
    return start in acc


def random_machine(rng: random.Random, n_states: int = 4, max_branch: int = 2,
                   space_bound=(1, 1)) -> AtmSpec:
    """Random machine with ``n_states`` states including accept and reject."""
    extra = [f"q{i}" for i in range(n_states - 2)]
    states = tuple(extra) + ("qa", "qr")
    ex = {"qa", "qr"} | {q for q in extra if rng.random() < 0.5}
    delta = {}
    for q in extra:
        for x in (TOP, BOT):
            k = rng.randint(1, max_branch)
            outs = set()
            while len(outs) < k:
                outs.add((rng.choice(states), rng.randint(0, 1), rng.choice((-1, 1))))
            delta[(q, x)] = tuple(sorted(outs))
    return AtmSpec(states, frozenset(ex), delta, extra[0], "qa", "qr", tuple(space_bound))


# -- compilation ------------------------------------------------------------------


@dataclass
class GadgetGraph:
    game: SabotageGame
    gadgets: dict  # gadget key -> vertex ids
    tape: dict  # (cell, symbol) -> vertex id
    cells: int
    machine: AtmSpec = None
    word: tuple = ()
    pairs: list = field(default_factory=list)  # reachable (state, cell)

    def vertex(self, label) -> int:
        return self.game.index(label)


class _Builder:
    def __init__(self):
        self.labels = []
        self.ix = {}
        self.t = set()
        self.b = set()
        self.groups = {}
        self.group = None

    def v(self, label):
        if label not in self.ix:
            self.ix[label] = len(self.labels)
            self.labels.append(label)
            if self.group is not None:
                self.groups.setdefault(self.group, []).append(self.ix[label])
        return self.ix[label]

    def te(self, a, b):
        self.t.add((self.v(a), self.v(b)))

    def be(self, a, b):
        self.b.add((self.v(a), self.v(b)))

    def guard(self, t, scheduled):
        """Escape from traveler vertex ``t`` unless the saboteur stands on one
        of ``scheduled``: then it can mark the blocker and trap the traveler."""
        esc, blk = f"{t}/esc", f"{t}/blk"
        self.te(t, esc)
        self.te(esc, blk)
        self.te(blk, GOAL)
        for s in scheduled:
            self.be(s, blk)

    def step(self, t0, t1, s0, s1, guard=True):
        """Both players advance one round: ``t0 -> t1`` and ``s0 -> s1``."""
        self.te(t0, t1)
        self.be(s0, s1)
        if guard:
            self.guard(t1, [s1])


def _tape(p, x):
    return f"{p},{SYMBOL_NAMES[x]}"


def state_pairs(m: AtmSpec, cells: int):
    """(state, cell) pairs reachable when tape contents are ignored."""
    seen = set()
    queue = deque([(m.initial, 1)])
    while queue:
        q, p = queue.popleft()
        if (q, p) in seen:
            continue
        seen.add((q, p))
        if m.is_final(q):
            continue
        for x in (TOP, BOT):
            for q2, _, d in m.delta[(q, x)]:
                p2 = max(1, p + d)
                if p2 <= cells:
                    queue.append((q2, p2))
    return sorted(seen, key=lambda x: (m.states.index(x[0]), x[1]))


def compile_atm(m: AtmSpec, w, normalize: bool = True) -> GadgetGraph:
    """Build the game in which the traveler wins iff ``m`` accepts ``w``."""
    w = parse_word(w)
    configurations(m, w)  # space-bound validation
    cells = m.space(len(w))
    tape0 = w + (BOT,) * (cells - len(w))
    bld = _Builder()
    bld.v(GOAL)
    for p in range(1, cells + 1):
        for x in (BOT, TOP):
            bld.v(_tape(p, x))
    tape = {(p, x): bld.ix[_tape(p, x)] for p in range(1, cells + 1) for x in (BOT, TOP)}
    # tape cells lead the traveler to the goal through a per-cell gate
    for p in range(1, cells + 1):
        for x in (BOT, TOP):
            bld.te(_tape(p, x), f"d{p},{SYMBOL_NAMES[x]}")
            bld.te(f"d{p},{SYMBOL_NAMES[x]}", GOAL)

    pairs = state_pairs(m, cells)
    live = {qp for qp in pairs if not m.is_final(qp[0])}

    def entry(q, p, t_prev, s_prev):
        # hand both players over to the gadget for state q at cell p
        if q == m.accept:
            bld.group = ("A", q, p)
            bld.te(t_prev, f"A({p}).acc")
            bld.te(f"A({p}).acc", GOAL)
        elif q == m.reject or (q, p) not in live:
            bld.group = ("R", q, p)
            bld.te(t_prev, f"R({p}).rej")  # dead end
        else:
            bld.te(t_prev, f"E({q},{p}).wait")
            bld.be(s_prev, f"E({q},{p}).pi")

    # input gadget: the saboteur walks over the initial tape
    bld.group = ("I",)
    t, s = "I.start", "I.sab"
    bld.v(t)
    bld.v(s)
    r = 0
    for p in range(1, cells + 1):
        for s1 in (_tape(p, tape0[p - 1]), f"I.s{p}"):
            r += 1
            bld.step(t, f"I.t{r}", s, s1)
            t, s = f"I.t{r}", s1
    entry(m.initial, 1, t, s)

    for q, p in sorted(live, key=lambda x: (m.states.index(x[0]), x[1])):
        pre = f"E({q},{p})"
        bld.group = ("E", q, p)
        W, pi, R = f"{pre}.wait", f"{pre}.pi", f"{pre}.R"
        bld.guard(W, [pi])
        bld.te(W, R)
        claims = [f"{pre}.claim{SYMBOL_NAMES[c]}" for c in (BOT, TOP)]
        for c in claims:
            bld.be(pi, c)
        bld.guard(R, claims)
        for c in (BOT, TOP):
            cn = SYMBOL_NAMES[c]
            claim, ack, g = f"{pre}.claim{cn}", f"{pre}.ack{cn}", f"{pre}.g{cn}"
            bld.te(R, ack)
            bld.te(ack, g)  # the only exit of ack
            bld.be(claim, f"{pre}.g{SYMBOL_NAMES[1 - c]}")  # catches a wrong acknowledgement
            bld.be(claim, f"{pre}.f{cn}")
            bld.step(ack, g, f"{pre}.f{cn}", f"{pre}.h{cn}")
            # disputing a claim walks through the claimed tape vertex
            bld.te(g, f"{pre}.dis{cn}")
            bld.te(f"{pre}.dis{cn}", _tape(p, c))
            bld.step(g, f"{pre}.w{cn}", f"{pre}.h{cn}", f"{pre}.hh{cn}")
            look, L = f"{pre}.look{cn}", f"{pre}.L{cn}"
            bld.step(f"{pre}.w{cn}", look, f"{pre}.hh{cn}", L)
            for x in (BOT, TOP):
                bld.te(look, _tape(p, x))
                bld.be(L, f"d{p},{SYMBOL_NAMES[x]}")
            o, n = f"{pre}.out{cn}", f"{pre}.n{cn}"
            bld.step(look, o, L, n)
            _transition(bld, m, q, p, c, o, n, entry, normalize, cells)

    game = SabotageGame(
        labels=tuple(bld.labels),
        traveler_edges=frozenset(bld.t),
        saboteurs=(Saboteur(bld.ix["I.sab"], 1, frozenset(bld.b)),),
        traveler_start=bld.ix["I.start"],
        observation=ADJACENT,
        final=frozenset([bld.ix[GOAL]]),
    )
    return GadgetGraph(game, bld.groups, tape, cells, m, w, pairs)


def _transition(bld, m, q, p, c, o, n, entry, normalize, cells):
    outs = m.delta[(q, c)]
    cn = SYMBOL_NAMES[c]
    if q in m.existential:
        pre = f"X({q},{p},{cn})"
        bld.group = ("X", q, p, c)
        X, sig = f"{pre}.X", f"{pre}.sigma"
        bld.step(o, X, n, sig)
        for j, (q2, y, d) in enumerate(outs):
            bj = f"{pre}.beta{j}"
            bld.step(X, f"{pre}.ch{j}", sig, bj)
            bld.step(f"{pre}.ch{j}", f"{pre}.k{j}", bj, f"{pre}.gamma{j}")
            bld.step(f"{pre}.k{j}", f"{pre}.kk{j}", f"{pre}.gamma{j}", _tape(p, y))
            bld.step(f"{pre}.kk{j}", f"{pre}.m{j}", _tape(p, y), f"{pre}.rho{j}")
            _exit(bld, m, q, q2, max(1, p + d), f"{pre}.m{j}", f"{pre}.rho{j}",
                  entry, normalize, pre, j)
    else:
        pre = f"U({q},{p},{cn})"
        bld.group = ("U", q, p, c)
        X = f"{pre}.X"
        betas = [f"{pre}.beta{j}" for j in range(len(outs))]
        bld.te(o, X)
        for bj in betas:
            bld.be(n, bj)
        bld.guard(X, betas)
        for j, (q2, y, d) in enumerate(outs):
            ack, k = f"{pre}.ack{j}", f"{pre}.k{j}"
            bld.te(X, ack)
            bld.te(ack, k)  # the only exit of ack
            for i in range(len(outs)):
                if i != j:
                    bld.be(betas[i], k)  # catches a traveler that follows the wrong branch
            bld.be(betas[j], f"{pre}.gamma{j}")
            bld.step(ack, k, f"{pre}.gamma{j}", _tape(p, y))
            bld.step(k, f"{pre}.m{j}", _tape(p, y), f"{pre}.rho{j}")
            _exit(bld, m, q, q2, max(1, p + d), f"{pre}.m{j}", f"{pre}.rho{j}",
                  entry, normalize, pre, j)


def _exit(bld, m, q, q2, p2, t, s, entry, normalize, pre, j):
    if normalize and not m.is_final(q2) and ((q in m.existential) == (q2 in m.existential)):
        # pass-through round between two gadgets of the same kind
        bld.step(t, f"{pre}.pass{j}", s, f"{pre}.passb{j}")
        t, s = f"{pre}.pass{j}", f"{pre}.passb{j}"
    entry(q2, p2, t, s)
