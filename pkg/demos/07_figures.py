"""
SVG figures
===========

Lissajous matrix of an eigenvector, a regression scatter and an accumulated
angular momentum trace, written to ``demos/out``.
"""

# %%
from pathlib import Path

import eigencycle as ec
from eigencycle.dynamics import AgentConfig, simulate_agents
from eigencycle.fixtures import l_table, oneill_game, table2
from eigencycle.io import atomic_write
from eigencycle.render import render_accumulated, render_lissajous, render_regression_scatter

out = Path(__file__).with_name("out")
game = oneill_game()
x_star = ec.interior_rest_point(game)
eigs = ec.eigen_decompose(ec.jacobian_at(game, x_star).j)

atomic_write(out / "lissajous_8i.svg", render_lissajous(eigs[0], title="lambda = 0.8i"))

# %%
x, y = table2().column(".8i").values, l_table().column("O")
fit = ec.ols(y, x, ["sigma"])
atomic_write(out / "scatter_O.svg", render_regression_scatter(x, y, fit["sigma"].estimate, fit["const"].estimate,
                                                             labels=l_table().codes))

# %%
series = simulate_agents(game, AgentConfig("noisy_best_response", 3000, seed=1))
acc = ec.accumulated_angular_momentum(series, x_star, (1, 5))
atomic_write(out / "accumulated_15.svg", render_accumulated(acc))
print("wrote", sorted(p.name for p in out.glob("*.svg")))
