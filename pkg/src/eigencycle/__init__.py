"""Eigencycle analysis of two-population replicator dynamics.

The main entry points are re-exported here; see the submodules for the
full API.
"""

from .errors import *  # noqa: F401,F403
from .game import PayoffBimatrix, PayoffProfile, check_state, expected_payoffs, interior_rest_point, replicator_velocity
from .spectral import (
    EigencycleSet,
    EigenPair,
    JacobianMatrix,
    ModalCoefficients,
    align_basis,
    align_conjugate_pairs,
    alpha_beta_bases,
    eigen_decompose,
    eigencycle_set,
    eigenspace_eigencycles,
    fit_scale_sign,
    jacobian_at,
    modal_decompose,
    subspace_pairs,
)
from .tsmetrics import (
    AngularMomentumTable,
    NetTransitMatrix,
    PlaySeries,
    Session,
    Trajectory,
    accumulated_angular_momentum,
    angular_momentum,
    angular_momentum_matrix,
    angular_momentum_table,
    encode_states,
    net_transit,
    net_transit_from_sequences,
)
from .dynamics import (
    AgentConfig,
    NoiseRestartConfig,
    OdeConfig,
    integrate_replicator,
    linearized_modal_trajectory,
    simulate_agents,
    simulate_with_noise_restarts,
)
from .stats import RankCorrelation, RegressionResult, ols, spearman, spearman_matrix, t_test_one_sample

__version__ = "0.1.0"
