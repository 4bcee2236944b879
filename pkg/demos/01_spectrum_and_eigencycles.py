"""
Eigen system and eigencycles of the O'Neill game
================================================

Linearise the replicator field at the interior rest point, decompose the
Jacobian and turn every eigenvector into its set of 28 eigencycles.
"""

# %%
# The game and its rest point. Exact arithmetic is available because the
# payoffs are integers.
import numpy as np

import eigencycle as ec
from eigencycle.fixtures import oneill_game, table2

game = oneill_game()
x_star = ec.interior_rest_point(game, exact=True)
print("rest point:", [str(v) for v in x_star])

# %%
# The Jacobian, closed form, checked against central differences.
jac = ec.jacobian_at(game, x_star)
print("J * 25 =\n", (np.asarray(jac.j) * 25).round(6))
fd = ec.jacobian_at(game, np.asarray(x_star, dtype=float), "finite_difference")
print("closed form vs finite difference:", np.abs(jac.j - fd.j).max())

# %%
# Eigenvalues come out as +-0.8i, +-0.2 and a doubly degenerate +-0.4i.
# The degenerate pair has no preferred basis; align it with the printed one
# so columns can be compared entry by entry.
eigs = ec.eigen_decompose(jac.j)
ref = table2()
eigs = ec.align_conjugate_pairs(eigs, 0.4j, [ref.eigenpair(".4i_1"), ref.eigenpair(".4i_2")])
for e in eigs:
    print(f"{e.tag:>7}  lambda = {e.lam.real:+.3f}{e.lam.imag:+.3f}i   residual {e.residual(jac.j):.1e}")

# %%
# Eigencycles. The published columns differ from ours by one positive scale
# and, for this sign convention, a global sign.
for e in eigs:
    if e.is_complex:
        fit = ec.fit_scale_sign(ec.eigencycle_set(e), ref.column(e.tag))
        print(f"{e.tag:>7}  scale {fit.scale:.4f}  sign {fit.sign:+d}  max error {fit.max_abs_error:.1e}")

main = ec.eigencycle_set(eigs[0])
print("strengths 15:16:26 =", abs(main["15"] / main["26"]), ":", abs(main["16"] / main["26"]), ": 1")

# %%
# The degenerate pair is best read through its alpha/beta bases, whose
# supports are the outer and inner cross blocks.
alpha, beta = ec.alpha_beta_bases(ref.column(".4i_1"), ref.column(".4i_2"))
print("alpha support:", alpha.support())
print("beta support: ", beta.support())
