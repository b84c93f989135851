# %% [markdown]
# # Server-room scenario
#
# Two intruders against one traveler on the bundled network.  We vary the
# budget and what the traveler can see, then look at the marks the
# intruders pick when they cooperate.

# %%
import dataclasses

from sabotage import ADJACENT, FULL, INF, NONE, REACH, bundled, load_scenario
from sabotage.arena import build_arena
from sabotage.solver import oracle_minimax, replay, solve
from sabotage.subsetgame import extracted_marks, solve_saboteur

g = load_scenario(bundled("scenario1.json"))
print(g.n, "vertices, final:", g.label_set(g.final))

# %% [markdown]
# Only the first intruder, one mark.  Seeing further helps the traveler.

# %%
one = g.replace(saboteurs=g.saboteurs[:1])
for obs in (FULL, ADJACENT, NONE):
    for budget in (1, INF):
        h = one.replace(observation=obs,
                        saboteurs=(dataclasses.replace(one.saboteurs[0], budget=budget),))
        sol = solve(build_arena(h))
        print(f"{obs:9s} budget {budget}: {sol.winner_name:9s} "
              f"arena {sol.graph.n:6d}  oracle agrees: {oracle_minimax(h) == sol.winner}")

# %% [markdown]
# With full observation the traveler wins; a replay against every
# intruder response confirms it and bounds the traveler's moves.

# %%
h = one.replace(observation=FULL)
sol = solve(build_arena(h))
v = replay(sol)
print(v.status, "within", v.max_rounds, "traveler moves")

# %% [markdown]
# Both intruders together win; the strategy marks one router and one
# core router.

# %%
both = solve_saboteur(g)
print(both.winner_name, [g.label_set(m) for m in extracted_marks(both)])
assert both.winner != REACH
