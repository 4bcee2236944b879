"""
Net transit between strategies
==============================

Net probability current between states, on hand-checkable chains and on
synthetic play, where it lines up with the angular momentum.
"""

# %%
import numpy as np

import eigencycle as ec
from eigencycle.dynamics import AgentConfig, simulate_agents
from eigencycle.fixtures import oneill_game

print("flip-flop:\n", ec.net_transit_from_sequences([[1, 2] * 20 + [1]], 2).t)
print("3-cycle:\n", ec.net_transit_from_sequences([[1, 2, 3] * 3 + [1]], 3).t.round(3))

# %%
game = oneill_game()
series = simulate_agents(game, AgentConfig("noisy_best_response", 13_000, seed=0))
cross = ec.net_transit(series, "cross")
lm = ec.angular_momentum_matrix(series, ec.interior_rest_point(game))
iu = np.triu_indices(8, 1)
print("Spearman(T, L) over subspaces:", ec.spearman(cross.t[iu], lm[iu]).rho)
print("per-population chains (8x8), row A1:", ec.net_transit(series).t[0].round(4))
