"""Random instance generators."""
from __future__ import annotations

import random

from .model import ADJACENT, FULL, NONE, REACHABILITY, Saboteur, SabotageGame

MODES = (FULL, NONE, ADJACENT)


def complete_game(n, budget=2, seed=None, observation=NONE, objective=REACHABILITY):
    """Complete traveler and saboteur graphs; positions and one final drawn uniformly."""
    rng = random.Random(seed)
    edges = frozenset((a, b) for a in range(n) for b in range(n) if a != b)
    f = rng.randrange(n)
    t = rng.choice([v for v in range(n) if v != f])
    b = rng.choice([v for v in range(n) if v != f])
    return SabotageGame(
        labels=tuple(f"v{i}" for i in range(n)),
        traveler_edges=edges,
        saboteurs=(Saboteur(b, budget, edges),),
        traveler_start=t,
        observation=observation,
        objective=objective,
        final=frozenset([f]),
    )


def random_game(rng: random.Random, n_max=6, budgets=(0, 1, 2), modes=MODES, k=1,
                p_edge=None, n_min=2, objective=REACHABILITY):
    """A small random game with sparse random traveler and saboteur edges."""
    n = rng.randint(n_min, n_max)
    p_t = p_edge if p_edge is not None else rng.uniform(0.2, 0.6)
    t_edges = frozenset(
        (a, b) for a in range(n) for b in range(n) if a != b and rng.random() < p_t
    )
    f = rng.randrange(n)
    t = rng.choice([v for v in range(n) if v != f] or [f])
    sabs = []
    for _ in range(k):
        p_b = rng.uniform(0.2, 0.8)
        b_edges = frozenset(
            (a, b) for a in range(n) for b in range(n) if rng.random() < p_b
        )
        start = rng.choice([v for v in range(n) if v != f])
        sabs.append(Saboteur(start, rng.choice(budgets), b_edges))
    mode = rng.choice(modes)
    return SabotageGame(
        labels=tuple(f"v{i}" for i in range(n)),
        traveler_edges=t_edges,
        saboteurs=tuple(sabs),
        traveler_start=t,
        observation=mode,
        objective=objective,
        final=frozenset([f]),
    )
