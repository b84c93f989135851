"""Sabotage games: instances, configurations, moves and observations.

Vertices are dense integer ids ``0..n-1``; string labels only appear at the
file boundary.  A game has one traveler and one or more saboteurs.  A round
is a traveler move followed by one move of every saboteur in list order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple

from .errors import IllegalMove, ParseError, ValidationError

INF = math.inf

FULL = "full"
NONE = "none"
ADJACENT = "adjacent"

REACHABILITY = "reachability"
BUCHI = "buchi"


@dataclass(frozen=True)
class Saboteur:
    start: int
    budget: float  # int or INF
    edges: frozenset  # of (int, int)

    @property
    def unlimited(self) -> bool:
        return self.budget == INF


@dataclass(frozen=True)
class SabotageGame:
    labels: tuple
    traveler_edges: frozenset
    saboteurs: tuple
    traveler_start: int
    observation: object = NONE  # FULL | NONE | ADJACENT | tuple of frozensets
    objective: str = REACHABILITY
    final: frozenset = frozenset()
    initial_marked: frozenset = frozenset()

    t_succ: tuple = field(init=False, repr=False, compare=False)
    b_succ: tuple = field(init=False, repr=False, compare=False)
    obs: tuple = field(init=False, repr=False, compare=False)
    obs_mask: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._validate()
        n = self.n
        t_succ = [[] for _ in range(n)]
        for u, w in self.traveler_edges:
            t_succ[u].append(w)
        object.__setattr__(self, "t_succ", tuple(tuple(sorted(s)) for s in t_succ))
        b_succ = []
        for sab in self.saboteurs:
            succ = [[] for _ in range(n)]
            for u, w in sab.edges:
                # the saboteur never enters a final vertex
                if w not in self.final:
                    succ[u].append(w)
            b_succ.append(tuple(tuple(sorted(s)) for s in succ))
        object.__setattr__(self, "b_succ", tuple(b_succ))
        obs = [self._obs_of(u) for u in range(n)]
        object.__setattr__(self, "obs", tuple(obs))
        object.__setattr__(self, "obs_mask", tuple(to_mask(o) for o in obs))

    # -- construction helpers -------------------------------------------------

    def _obs_of(self, u):
        mode = self.observation
        if mode == FULL:
            return frozenset(range(self.n))
        if mode == NONE:
            return frozenset([u])
        if mode == ADJACENT:
            return frozenset([u]).union(w for (x, w) in self.traveler_edges if x == u)
        # explicit map; the traveler always sees the vertex it stands on
        return frozenset(mode[u]) | {u}

    def _validate(self):
        n = len(self.labels)
        if n == 0:
            raise ValidationError("vertices nonempty")
        if len(set(self.labels)) != n:
            raise ValidationError("vertex labels unique")
        ids = range(n)

        def check_vertex(v, what):
            if not isinstance(v, int) or v not in ids:
                raise ValidationError("unknown vertex id", f"{what}: {v!r}")

        check_vertex(self.traveler_start, "traveler_start")
        for u, w in self.traveler_edges:
            check_vertex(u, "traveler edge")
            check_vertex(w, "traveler edge")
        if not self.saboteurs:
            raise ValidationError("at least one saboteur")
        for i, sab in enumerate(self.saboteurs):
            check_vertex(sab.start, f"saboteur {i} start")
            for u, w in sab.edges:
                check_vertex(u, f"saboteur {i} edge")
                check_vertex(w, f"saboteur {i} edge")
            if sab.budget != INF and (sab.budget < 0 or int(sab.budget) != sab.budget):
                raise ValidationError("budget is a natural or inf", repr(sab.budget))
            if sab.start in self.final:
                raise ValidationError("saboteur start not final", self.labels[sab.start])
        if not self.final:
            raise ValidationError("final set nonempty")
        for f in self.final:
            check_vertex(f, "final")
        for v in self.initial_marked:
            check_vertex(v, "initial_marked")
        if self.traveler_start in self.initial_marked:
            raise ValidationError("traveler start not initially marked")
        if self.initial_marked & self.final:
            raise ValidationError("final vertices not initially marked")
        if len(self.initial_marked) > self.saboteurs[0].budget:
            raise ValidationError(
                "initial marks within budget",
                f"{len(self.initial_marked)} > {self.saboteurs[0].budget}",
            )
        if self.objective not in (REACHABILITY, BUCHI):
            raise ValidationError("objective type", repr(self.objective))
        mode = self.observation
        if mode not in (FULL, NONE, ADJACENT):
            if not isinstance(mode, tuple) or len(mode) != n:
                raise ValidationError("observation mode", repr(mode))
            for row in mode:
                for v in row:
                    check_vertex(v, "observation map")

    # -- properties -------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def k(self) -> int:
        return len(self.saboteurs)

    @property
    def finite_budget(self) -> bool:
        return all(not s.unlimited for s in self.saboteurs)

    @property
    def total_budget(self):
        return sum(s.budget for s in self.saboteurs)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError("unknown vertex id", repr(label)) from None

    def label_set(self, vs: Iterable[int]) -> list:
        return sorted(self.labels[v] for v in vs)

    def replace(self, **changes) -> "SabotageGame":
        data = {
            "labels": self.labels,
            "traveler_edges": self.traveler_edges,
            "saboteurs": self.saboteurs,
            "traveler_start": self.traveler_start,
            "observation": self.observation,
            "objective": self.objective,
            "final": self.final,
            "initial_marked": self.initial_marked,
        }
        data.update(changes)
        return SabotageGame(**data)

    # -- file format ------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: Mapping) -> "SabotageGame":
        try:
            labels = tuple(str(v) for v in data["vertices"])
            idx = {lab: i for i, lab in enumerate(labels)}

            def vid(lab):
                if str(lab) not in idx:
                    raise ValidationError("unknown vertex id", repr(lab))
                return idx[str(lab)]

            def edge_set(pairs):
                return frozenset((vid(a), vid(b)) for a, b in pairs)

            t_edges = edge_set(data.get("traveler_edges", []))
            sabs = []
            for s in data["saboteurs"]:
                budget = s.get("budget", 0)
                if isinstance(budget, str):
                    if budget.lower() not in ("inf", "infinite", "infinity"):
                        raise ParseError(f"bad budget {budget!r}")
                    budget = INF
                if "edges" in s and s["edges"] is not None:
                    edges = edge_set(s["edges"])
                else:
                    n = len(labels)
                    edges = frozenset((a, b) for a in range(n) for b in range(n) if a != b)
                sabs.append(Saboteur(vid(s["start"]), budget, edges))
            obs = data.get("observation", NONE)
            if isinstance(obs, Mapping):
                rows = [set() for _ in labels]
                for lab, seen in obs.items():
                    rows[vid(lab)] = {vid(x) for x in seen}
                obs = tuple(frozenset(r) for r in rows)
            elif obs not in (FULL, NONE, ADJACENT):
                raise ParseError(f"bad observation {obs!r}")
            objective = data.get("objective", {})
            return cls(
                labels=labels,
                traveler_edges=t_edges,
                saboteurs=tuple(sabs),
                traveler_start=vid(data["traveler_start"]),
                observation=obs,
                objective=objective.get("type", REACHABILITY),
                final=frozenset(vid(f) for f in objective.get("final", [])),
                initial_marked=frozenset(vid(v) for v in data.get("initial_marked", [])),
            )
        except (KeyError, TypeError, AttributeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise ParseError(f"malformed scenario: {exc!r}") from exc

    def to_dict(self) -> dict:
        lab = self.labels

        def pairs(edges):
            return [[lab[a], lab[b]] for a, b in sorted(edges)]

        if isinstance(self.observation, tuple):
            obs = {lab[u]: self.label_set(row) for u, row in enumerate(self.observation)}
        else:
            obs = self.observation
        return {
            "vertices": list(lab),
            "traveler_edges": pairs(self.traveler_edges),
            "saboteurs": [
                {
                    "start": lab[s.start],
                    "budget": "inf" if s.unlimited else int(s.budget),
                    "edges": pairs(s.edges),
                }
                for s in self.saboteurs
            ],
            "traveler_start": lab[self.traveler_start],
            "observation": obs,
            "objective": {"type": self.objective, "final": self.label_set(self.final)},
            "initial_marked": self.label_set(self.initial_marked),
        }


def to_mask(vs: Iterable[int]) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def from_mask(mask: int) -> frozenset:
    out = []
    v = 0
    while mask:
        if mask & 1:
            out.append(v)
        mask >>= 1
        v += 1
    return frozenset(out)


def make_game(vertices, traveler_edges, saboteurs, traveler_start, final,
              observation=NONE, objective=REACHABILITY, initial_marked=()):
    """Build a game from labels.

    ``saboteurs`` is a list of ``(start, budget)`` or ``(start, budget, edges)``;
    edges default to the complete graph.
    """
    sabs = []
    for s in saboteurs:
        d = {"start": s[0], "budget": s[1]}
        if len(s) > 2 and s[2] is not None:
            d["edges"] = s[2]
        sabs.append(d)
    if isinstance(observation, Mapping):
        observation = {str(k): [str(x) for x in v] for k, v in observation.items()}
    return SabotageGame.from_dict({
        "vertices": list(vertices),
        "traveler_edges": list(traveler_edges),
        "saboteurs": [
            {**d, "budget": "inf" if d["budget"] == INF else d["budget"]} for d in sabs
        ],
        "traveler_start": traveler_start,
        "observation": observation,
        "objective": {"type": objective, "final": list(final)},
        "initial_marked": list(initial_marked),
    })


def bundled(name: str) -> Path:
    """Path of a data file shipped with the package (e.g. ``scenario1.json``)."""
    return Path(__file__).parent / "data" / name


def load_scenario(path) -> SabotageGame:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError(f"{path}: top level must be an object")
    return SabotageGame.from_dict(data)


def dumps_scenario(g: SabotageGame) -> str:
    return json.dumps(g.to_dict(), indent=2)


def save_scenario(g: SabotageGame, path) -> None:
    Path(path).write_text(dumps_scenario(g) + "\n")


# -- plays --------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Traveler position, saboteur positions and per-saboteur marks.

    ``turn`` is 0 when the traveler moves next and ``i + 1`` when saboteur
    ``i`` moves next.
    """

    traveler: int
    saboteurs: tuple
    marks: tuple  # frozenset per saboteur
    turn: int = 0

    @property
    def marked(self) -> frozenset:
        return frozenset().union(*self.marks)


class ObservationRecord(NamedTuple):
    traveler: int
    saboteurs: tuple
    marks: frozenset


def initial_configuration(g: SabotageGame) -> Configuration:
    marks = [frozenset()] * g.k
    marks[0] = g.initial_marked
    return Configuration(g.traveler_start, tuple(s.start for s in g.saboteurs), tuple(marks), 0)


def legal_traveler_moves(g: SabotageGame, c: Configuration) -> set:
    # marked successors are legal; walking into one loses
    return set(g.t_succ[c.traveler])


def legal_saboteur_moves(g: SabotageGame, c: Configuration, i: int) -> set:
    sab = g.saboteurs[i]
    b = c.saboteurs[i]
    marked = c.marked
    own = c.marks[i]
    succ = g.b_succ[i][b]
    if not succ:
        return {(b, frozenset())}
    out = set()
    for b2 in succ:
        cand = [x for x in {b, b2} if x != c.traveler and x not in marked]
        for bits in range(1 << len(cand)):
            m = frozenset(x for j, x in enumerate(cand) if bits >> j & 1)
            if len(own) + len(m) <= sab.budget:
                out.add((b2, m))
    return out


def step(g: SabotageGame, c: Configuration, action) -> Configuration:
    if c.turn == 0:
        if action not in legal_traveler_moves(g, c):
            raise IllegalMove(f"traveler cannot move {g.labels[c.traveler]} -> {action!r}")
        return Configuration(action, c.saboteurs, c.marks, 1)
    i = c.turn - 1
    b2, m = action[0], frozenset(action[1])
    if (b2, m) not in legal_saboteur_moves(g, c, i):
        raise IllegalMove(f"saboteur {i} cannot play {action!r}")
    pos = list(c.saboteurs)
    pos[i] = b2
    marks = list(c.marks)
    marks[i] = marks[i] | m
    turn = c.turn + 1 if c.turn < g.k else 0
    return Configuration(c.traveler, tuple(pos), tuple(marks), turn)


def observe(g: SabotageGame, c: Configuration) -> ObservationRecord:
    return ObservationRecord(c.traveler, c.saboteurs, c.marked & g.obs[c.traveler])


def outcome(g: SabotageGame, c: Configuration):
    """Return "traveler", "saboteur" or None for a reachability position."""
    if c.traveler in c.marked:
        return "saboteur"
    if c.turn == 0 and c.traveler in g.final:
        return "traveler"
    if c.turn == 0 and not g.t_succ[c.traveler]:
        return "saboteur"
    return None


def check_play(g: SabotageGame, play) -> None:
    """Raise ValidationError unless ``play`` is a legal sequence of rounds.

    ``play`` lists the configurations seen before each traveler move.
    """
    if not play or play[0] != initial_configuration(g):
        raise ValidationError("play starts at the initial configuration")
    for a, b in zip(play, play[1:]):
        if (a.traveler, b.traveler) not in g.traveler_edges:
            raise ValidationError("traveler follows E_T")
        for i, sab in enumerate(g.saboteurs):
            if g.b_succ[i][a.saboteurs[i]]:
                if (a.saboteurs[i], b.saboteurs[i]) not in sab.edges:
                    raise ValidationError("saboteur follows E_B")
            elif a.saboteurs[i] != b.saboteurs[i]:
                raise ValidationError("stuck saboteur stays put")
            new = b.marks[i] - a.marks[i]
            if not a.marks[i] <= b.marks[i] or not new <= {a.saboteurs[i], b.saboteurs[i]}:
                raise ValidationError("marks grow monotonically at saboteur positions")
            if len(b.marks[i]) > sab.budget:
                raise ValidationError("budget respected")
