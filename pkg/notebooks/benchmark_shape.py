# %% [markdown]
# # Why the two sides scale so differently
#
# Saboteur-side solving keeps explicit marks: states grow like n^(m+2).
# Traveler-side solving tracks suspects, whose subsets blow up with n.
# Small sizes only; the CLI `bench` command runs the large ones.

# %%
import time

import numpy as np

from sabotage.arena import build_arena
from sabotage.generators import complete_game
from sabotage.model import FULL, NONE
from sabotage.solver import solve_reachability
from sabotage.subsetgame import solve_dense

# %%
ns = np.arange(10, 41, 10)
sab = []
for n in ns:
    d = solve_dense(complete_game(int(n), 2, seed=int(n), observation=FULL))
    sab.append((d.states, d.seconds))
    print(f"saboteur n={n:3d} states {d.states:9d} {d.seconds:6.3f}s {d.winner_name}")
sab = np.array(sab)
print("state slope in log-log:", np.polyfit(np.log(ns), np.log(sab[:, 0]), 1)[0].round(2))

# %%
tn = np.arange(5, 11)
trav = []
for n in tn:
    g = complete_game(int(n), 2, seed=int(n), observation=NONE)
    t0 = time.perf_counter()
    sol = solve_reachability(build_arena(g))
    trav.append((sol.graph.n, time.perf_counter() - t0))
    print(f"traveler n={n:3d} states {sol.graph.n:9d} {trav[-1][1]:6.3f}s {sol.winner_name}")
trav = np.array(trav)

# %% [markdown]
# Growth factor per extra location on the traveler side keeps rising,
# unlike a polynomial.

# %%
print((trav[1:, 0] / trav[:-1, 0]).round(2))
