"""
Interference between modes
==========================

Two modes can add a cross term to the angular momentum. Distinct
frequencies average it away on their own; degenerate modes need the phases
to be reshuffled by random shocks.
"""

# %%
import numpy as np

import eigencycle as ec
from eigencycle.dynamics import NoiseRestartConfig, simulate_with_noise_restarts
from eigencycle.fixtures import oneill_game, table2

game = oneill_game()
x_star = ec.interior_rest_point(game)
ref = table2()
eigs = ec.eigen_decompose(ec.jacobian_at(game, x_star).j)
eigs = ec.align_conjugate_pairs(eigs, 0.4j, [ref.eigenpair(".4i_1"), ref.eigenpair(".4i_2")])
by = {e.tag: e for e in eigs}

# %%
# Distinct frequencies, no shocks.
slow = 2 * np.pi / 0.4
res = simulate_with_noise_restarts(game, [by[".8i"], by[".4i_1"]], NoiseRestartConfig(0.0), 1e3 * slow, [1.0, 1.0])
print("distinct, cross mean in 26:", res.mean_angular_momentum((2, 6), "cross")[0])

# %%
# Degenerate pair without and with shocks.
pair = [by[".4i_1"], by[".4i_2"]]
quiet = simulate_with_noise_restarts(game, pair, NoiseRestartConfig(0.0), 1e3, [1.0, 1.0])
print("degenerate, no shocks:", quiet.mean_angular_momentum((2, 6), "cross")[0])
noisy = simulate_with_noise_restarts(game, pair, NoiseRestartConfig(1.0, seed=3), 1e4, [1.0, 1.0])
mean, se = noisy.mean_angular_momentum((2, 6), "cross")
print(f"degenerate, {len(noisy.shock_times)} shocks: {mean:.2e} +- {se:.2e}")
