# %% [markdown]
# # Formulas and machines
#
# Two translations: unlimited-budget games to QBF, and bounded-space
# alternating machines to budget-one games with adjacent observation.

# %%
import json

from sabotage import bundled
from sabotage.arena import build_arena
from sabotage.atm import atm_accepts, compile_atm, machine_m, word_str
from sabotage.qbf import (ClassicGame, bounded_winner, classic_winner, encode_classic,
                          encode_qbf, evaluate_instance)
from sabotage.solver import solve, solve_local

# %% [markdown]
# The classic triangle, hub-encoded.  The runner wins the classic game
# and the encoded game alike.  The formula is stricter: it treats every
# vertex the saboteur has visited as removed, whether or not it was
# marked.  The saboteur reaches the middle vertex of the direct edge from
# its hub first, so the formula is false at every horizon.

# %%
tri = ClassicGame.from_dict(json.loads(bundled("classic_triangle.json").read_text()))
g = encode_classic(tri)
print("classic runner wins:", classic_winner(tri))
print("encoded game:", solve(build_arena(g)).winner_name)
for gamma in range(1, 5):
    q = encode_qbf(g, gamma)
    print(gamma, q.n_vars, "vars", len(q.clauses), "clauses",
          evaluate_instance(q), bounded_winner(g, gamma))

# %% [markdown]
# The four-state example machine.

# %%
m = machine_m()
for w in ("TBB", "B", "BT"):
    gg = compile_atm(m, w)
    sol = solve_local(build_arena(gg.game, settle_spent=True))
    print(word_str(gg.word), "accepts" if atm_accepts(m, w) else "rejects",
          "| game:", gg.game.n, "vertices,", sol.winner_name, "wins,",
          sol.graph.n, "arena vertices explored")
