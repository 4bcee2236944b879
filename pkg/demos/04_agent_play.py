"""
Synthetic play and the angular momentum table
=============================================

Uniform random play shows no cycles; simple adaptive agents rotate in the
directions the leading eigencycle predicts.
"""

# %%
import numpy as np

import eigencycle as ec
from eigencycle.dynamics import AgentConfig, simulate_agents
from eigencycle.fixtures import oneill_game, table2

game = oneill_game()
x_star = ec.interior_rest_point(game)
sigma = table2().column(".8i").values

# %%
for policy in ("uniform", "noisy_best_response", "win_stay_lose_shift"):
    series = simulate_agents(game, AgentConfig(policy, 100_000, seed=1, eps=0.1))
    tab = ec.angular_momentum_table(series, x_star)
    z = np.abs(tab.values) / tab.se
    rho = ec.spearman(tab.values, sigma).rho
    print(f"{policy:<20} max |L|/SE {z.max():6.1f}   Spearman with sigma_.8i {rho:+.3f}")

# %%
# The running sum in subspace 15 drifts steadily one way under best response.
series = simulate_agents(game, AgentConfig("noisy_best_response", 5000, seed=2))
acc = ec.accumulated_angular_momentum(series, x_star, (1, 5))
print("accumulated L(15) every 1000 transitions:", acc[::1000].round(2))
