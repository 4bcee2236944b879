"""
Experimental cycles against the eigencycle prediction
=====================================================

The shipped per-subspace angular momenta of six experimental treatments are
compared with the eigencycle columns: rank agreement between treatments,
simple and multiple regressions, and the fine-structure t-tests.
"""

# %%
import numpy as np

from eigencycle.fixtures import TREATMENT_NAMES, l_table
from eigencycle.reproduce import eigencycle_predictors, fine_structure_samples, pooled_l
from eigencycle.stats import ols, spearman_matrix, t_test_one_sample

lt = l_table()
print("subspace 15 across treatments:", dict(zip(TREATMENT_NAMES, lt.rows(["15"])[0])))

# %%
# Treatments agree with each other in rank.
rho = spearman_matrix(np.column_stack([lt.column(n) for n in TREATMENT_NAMES]))
print("Spearman matrix\n", rho.round(3))

# %%
# Each treatment regressed on the leading eigencycle column, then on each
# member of the degenerate pair.
preds = eigencycle_predictors(unit=False)
for name in TREATMENT_NAMES:
    y = lt.column(name)
    main = ols(y, preds["sigma_8i"].values, ["sigma"])
    weak = [ols(y, preds[k].values, ["sigma"])["sigma"].p for k in ("sigma_4i_1", "sigma_4i_2")]
    print(f"L_{name:<3} t={main['sigma'].t:6.2f}  R2={main.r_squared:.3f}   .4i p-values {weak[0]:.2f}, {weak[1]:.2f}")

# %%
# Pooling the fixed-pair treatments exposes the weaker alpha and beta cycles.
unit = eigencycle_predictors(unit=True)
names = ["sigma_8i", "sigma_alpha", "sigma_beta"]
fit = ols(pooled_l("mean"), np.column_stack([unit[n].values for n in names]), names)
print(fit.table())

# %%
# Fine structure: subspaces predicted to carry the 3-strength cycles.
for n, sample in sorted(fine_structure_samples().items()):
    res = t_test_one_sample(sample)
    print(f"N={n}: t={res.t:.2f}, p={res.p:.3g}")
